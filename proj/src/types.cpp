#include "mibel/types.hpp"

#include <array>
#include <utility>

#include "mibel/errors.hpp"

namespace mibel {

namespace {

constexpr std::array<std::pair<Technology, std::string_view>, 10> kTechNames{{
    {Technology::ccgt, "ccgt"},
    {Technology::coal, "coal"},
    {Technology::hydro_reservoir, "hydro_reservoir"},
    {Technology::hydro_pumped, "hydro_pumped"},
    {Technology::nuclear, "nuclear"},
    {Technology::wind, "wind"},
    {Technology::solar, "solar"},
    {Technology::cogen_waste, "cogen_waste"},
    {Technology::import_block, "import_block"},
    {Technology::other, "other"},
}};

constexpr std::array<std::pair<SegmentKind, std::string_view>, 3> kKindNames{{
    {SegmentKind::domestic_inelastic, "domestic_inelastic"},
    {SegmentKind::domestic_elastic, "domestic_elastic"},
    {SegmentKind::export_block, "export_block"},
}};

constexpr std::array<std::pair<Country, std::string_view>, 4> kCountryNames{{
    {Country::ES, "ES"},
    {Country::PT, "PT"},
    {Country::FR, "FR"},
    {Country::MA, "MA"},
}};

template <typename Table, typename E>
std::string_view name_of(const Table& table, E value) noexcept {
    for (const auto& [e, name] : table) {
        if (e == value) return name;
    }
    return "?";
}

template <typename Table>
auto value_of(const Table& table, std::string_view s) noexcept
    -> std::optional<decltype(table[0].first)> {
    for (const auto& [e, name] : table) {
        if (name == s) return e;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Technology t) noexcept { return name_of(kTechNames, t); }
std::string_view to_string(SegmentKind k) noexcept { return name_of(kKindNames, k); }
std::string_view to_string(Country c) noexcept { return name_of(kCountryNames, c); }

std::optional<Technology> technology_from_string(std::string_view s) noexcept {
    return value_of(kTechNames, s);
}
std::optional<SegmentKind> segment_kind_from_string(std::string_view s) noexcept {
    return value_of(kKindNames, s);
}
std::optional<Country> country_from_string(std::string_view s) noexcept {
    return value_of(kCountryNames, s);
}

void validate(const SupplyOffer& offer) {
    if (!(offer.quantity > 0.0))
        throw InvalidSegment("offer '" + offer.unit_id + "': quantity must be > 0");
    if (!(offer.price >= 0.0))
        throw InvalidSegment("offer '" + offer.unit_id + "': price must be >= 0");
    if (offer.privileged && offer.technology != Technology::ccgt &&
        offer.technology != Technology::coal)
        throw InvalidSegment("offer '" + offer.unit_id +
                             "': only ccgt/coal units can be privileged");
    if (offer.capped && offer.privileged)
        throw InvalidSegment("offer '" + offer.unit_id +
                             "': capped and privileged are mutually exclusive");
}

void validate(const DemandBid& bid) {
    if (!(bid.quantity > 0.0))
        throw InvalidSegment("bid '" + bid.agent_id + "': quantity must be > 0");
    if (!(bid.price >= 0.0))
        throw InvalidSegment("bid '" + bid.agent_id + "': price must be >= 0");
    if (bid.segment_kind == SegmentKind::export_block && bid.affected)
        throw InvalidSegment("bid '" + bid.agent_id +
                             "': export blocks never pay the demand contribution");
}

}  // namespace mibel

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mibel {

enum class Technology : std::uint8_t {
    ccgt,
    coal,
    hydro_reservoir,
    hydro_pumped,
    nuclear,
    wind,
    solar,
    cogen_waste,
    import_block,
    other,
};

enum class SegmentKind : std::uint8_t {
    domestic_inelastic,
    domestic_elastic,
    export_block,
};

enum class Country : std::uint8_t { ES, PT, FR, MA };

std::string_view to_string(Technology t) noexcept;
std::string_view to_string(SegmentKind k) noexcept;
std::string_view to_string(Country c) noexcept;

std::optional<Technology> technology_from_string(std::string_view s) noexcept;
std::optional<SegmentKind> segment_kind_from_string(std::string_view s) noexcept;
std::optional<Country> country_from_string(std::string_view s) noexcept;

// One divisible sell segment.  `privileged` marks gas-cost-compensated units
// (combined cycles and coal under the subsidy), `gas_indexed` marks units
// whose offers track the marginal gas unit (opportunity-cost hydro),
// `capped` marks units whose revenue above the infra-marginal cap is clawed
// back.  A unit is never both privileged and capped.
struct SupplyOffer {
    std::string unit_id;
    Technology technology = Technology::other;
    double price = 0.0;     // EUR/MWh
    double quantity = 0.0;  // MWh, > 0
    bool privileged = false;
    bool gas_indexed = false;
    bool capped = false;
};

// One divisible buy segment.  `affected` marks demand that pays the demand
// contribution; export blocks are never affected.
struct DemandBid {
    std::string agent_id;
    double price = 0.0;     // EUR/MWh
    double quantity = 0.0;  // MWh, > 0
    bool affected = false;
    SegmentKind segment_kind = SegmentKind::domestic_inelastic;
};

// Throw InvalidSegment when a segment violates its field constraints.
void validate(const SupplyOffer& offer);
void validate(const DemandBid& bid);

}  // namespace mibel

#include "mibel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mibel/clearing.hpp"
#include "mibel/config.hpp"
#include "mibel/coupling.hpp"
#include "mibel/errors.hpp"
#include "mibel/mechanism.hpp"
#include "mibel/timeutil.hpp"

namespace mibel {

namespace {

constexpr double kPi = 3.14159265358979323846;

// All draws go through one generator in a fixed order, so output depends
// only on (spec, seed).
struct Rng {
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double unit() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    std::mt19937_64 gen;
};

// Snap to the file format's precision grid at creation time, so the records
// handed to callers equal the records after a write/parse cycle.
double round_price(double x) { return std::round(x * 100.0) / 100.0; }
double round_qty(double x) { return std::round(x * 1000.0) / 1000.0; }
double round_fine(double x) { return std::round(x * 10000.0) / 10000.0; }

void push_offer(HourRecord& r, std::string id, Technology tech, double price,
                double qty, bool privileged, bool gas_indexed, bool capped) {
    qty = round_qty(qty);
    if (qty < 0.001) return;
    SupplyOffer o;
    o.unit_id = std::move(id);
    o.technology = tech;
    o.price = round_price(price);
    o.quantity = qty;
    o.privileged = privileged;
    o.gas_indexed = gas_indexed;
    o.capped = capped;
    r.supply_offers.push_back(std::move(o));
}

void push_bid(HourRecord& r, std::string id, double price, double qty,
              bool affected, SegmentKind kind, Country country) {
    qty = round_qty(qty);
    if (qty < 0.001) return;
    DemandBid b;
    b.agent_id = std::move(id);
    b.price = round_price(price);
    b.quantity = qty;
    b.affected = affected;
    b.segment_kind = kind;
    r.demand_bids.push_back(std::move(b));
    r.bid_country.push_back(country);
}

}  // namespace

void GenSpec::validate() const {
    if (hours < 1) throw InvalidParams("hours must be >= 1");
    if (!parse_hour_id(start_hour))
        throw InvalidParams("start_hour '" + start_hour +
                            "' is not a valid hour id");
    if (ccgt_units < 1) throw InvalidParams("ccgt_units must be >= 1");
    if (base_demand_es <= 0.0 || base_demand_pt <= 0.0)
        throw InvalidParams("base demand must be > 0");
    if (elastic_share < 0.0 || elastic_share >= 1.0)
        throw InvalidParams("elastic_share must be in [0, 1)");
    if (affected_share_es < 0.0 || affected_share_es > 1.0 ||
        affected_share_pt < 0.0 || affected_share_pt > 1.0)
        throw InvalidParams("affected shares must be in [0, 1]");
    if (morocco_demand < 0.0) throw InvalidParams("morocco_demand must be >= 0");
    if (gas_base <= 0.0) throw InvalidParams("gas_base must be > 0");
    if (gas_amplitude < 0.0 || gas_amplitude >= gas_base)
        throw InvalidParams("gas_amplitude must be in [0, gas_base)");
    if (ntc_export < 0.0 || ntc_import < 0.0)
        throw InvalidParams("interconnector capacities must be >= 0");
}

GenSpec parse_gen_spec(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("generator spec: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("generator spec root must be an object");
    static constexpr std::string_view kKeys[] = {
        "hours",          "start_hour",        "ccgt_units",
        "base_demand_es", "base_demand_pt",    "elastic_share",
        "affected_share_es", "affected_share_pt", "morocco_demand",
        "gas_base",       "gas_amplitude",     "with_border",
        "ntc_export",     "ntc_import",        "bridge_mode"};
    reject_unknown_keys(j, "gen_spec", kKeys);

    GenSpec spec;
    auto num = [&](const char* key, double v) {
        if (!j.contains(key)) return v;
        if (!j.at(key).is_number())
            throw ConfigError(std::string("gen_spec.") + key + " must be a number");
        return j.at(key).get<double>();
    };
    auto flag = [&](const char* key, bool v) {
        if (!j.contains(key)) return v;
        if (!j.at(key).is_boolean())
            throw ConfigError(std::string("gen_spec.") + key +
                              " must be true or false");
        return j.at(key).get<bool>();
    };
    if (j.contains("hours")) {
        if (!j.at("hours").is_number_integer())
            throw ConfigError("gen_spec.hours must be an integer");
        spec.hours = j.at("hours").get<int>();
    }
    if (j.contains("start_hour")) {
        if (!j.at("start_hour").is_string())
            throw ConfigError("gen_spec.start_hour must be a string");
        spec.start_hour = j.at("start_hour").get<std::string>();
    }
    if (j.contains("ccgt_units")) {
        if (!j.at("ccgt_units").is_number_integer())
            throw ConfigError("gen_spec.ccgt_units must be an integer");
        spec.ccgt_units = j.at("ccgt_units").get<int>();
    }
    spec.base_demand_es = num("base_demand_es", spec.base_demand_es);
    spec.base_demand_pt = num("base_demand_pt", spec.base_demand_pt);
    spec.elastic_share = num("elastic_share", spec.elastic_share);
    spec.affected_share_es = num("affected_share_es", spec.affected_share_es);
    spec.affected_share_pt = num("affected_share_pt", spec.affected_share_pt);
    spec.morocco_demand = num("morocco_demand", spec.morocco_demand);
    spec.gas_base = num("gas_base", spec.gas_base);
    spec.gas_amplitude = num("gas_amplitude", spec.gas_amplitude);
    spec.with_border = flag("with_border", spec.with_border);
    spec.ntc_export = num("ntc_export", spec.ntc_export);
    spec.ntc_import = num("ntc_import", spec.ntc_import);
    spec.bridge_mode = flag("bridge_mode", spec.bridge_mode);
    try {
        spec.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("gen_spec: ") + e.what());
    }
    return spec;
}

GenSpec load_gen_spec(const std::filesystem::path& path) {
    return parse_gen_spec(load_json_file(path).dump());
}

std::vector<HourRecord> generate_synthetic(const GenSpec& spec,
                                           std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const MechanismParams params{};
    const HourStamp start = *parse_hour_id(spec.start_hour);
    const bool bridge = spec.bridge_mode;
    const bool border = spec.with_border && !bridge;
    const double elastic_share = bridge ? 0.0 : spec.elastic_share;

    std::vector<HourRecord> hours;
    hours.reserve(static_cast<std::size_t>(spec.hours));

    for (int h = 0; h < spec.hours; ++h) {
        const HourStamp t = add_hours(start, h);
        HourRecord r;
        r.hour_id = format_hour_id(t);
        r.affected_share_es = round_fine(spec.affected_share_es);
        r.affected_share_pt = round_fine(spec.affected_share_pt);
        r.morocco_demand = round_qty(spec.morocco_demand);

        const int month = months_between(start, t) + 1;
        const double ref = gas_reference_price(month, params);
        const double hod = static_cast<double>(t.hour);

        const double gas_raw = spec.gas_base +
                               spec.gas_amplitude *
                                   std::sin(2.0 * kPi * (hod - 12.0) / 24.0) +
                               rng.uniform(-8.0, 8.0);
        const double gas = std::max(gas_raw, ref + 15.0);
        const double gc =
            round_fine(generation_contribution(gas, ref, params.efficiency));
        r.gc_per_mwh = gc;

        const double gas_marginal = gas / params.efficiency;

        // Supply stack, cheap to dear.  In bridge mode every unit is made
        // compensation-eligible and nothing is capped, so a uniform offer
        // shift moves the whole curve.
        const bool cap = !bridge;
        const bool all_gas = bridge;
        push_offer(r, "nuc_1", Technology::nuclear, rng.uniform(8.0, 14.0),
                   7100.0 * rng.uniform(0.96, 1.0), false, all_gas, cap);
        push_offer(r, "wind_1", Technology::wind, rng.uniform(0.5, 6.0),
                   rng.uniform(3000.0, 9000.0), false, all_gas, cap);
        {
            const double shape =
                (t.hour >= 7 && t.hour <= 19)
                    ? std::sin(kPi * (hod - 6.0) / 13.0)
                    : 0.0;
            const double q = 6000.0 * shape * rng.uniform(0.75, 1.0);
            push_offer(r, "sol_1", Technology::solar, rng.uniform(0.2, 3.0), q,
                       false, all_gas, cap);
        }
        push_offer(r, "hyd_1", Technology::hydro_reservoir,
                   gas_marginal * rng.uniform(0.92, 1.08),
                   rng.uniform(2500.0, 5000.0), false, true, false);
        push_offer(r, "hydp_1", Technology::hydro_pumped,
                   gas_marginal * rng.uniform(1.05, 1.25),
                   rng.uniform(800.0, 1800.0), false, true, false);
        for (int u = 0; u < spec.ccgt_units; ++u)
            push_offer(r, "ccgt_" + std::to_string(u + 1), Technology::ccgt,
                       gas_marginal + rng.uniform(2.0, 12.0),
                       rng.uniform(2200.0, 3200.0), true, false, false);
        push_offer(r, "coal_1", Technology::coal,
                   gas_marginal * rng.uniform(1.06, 1.20),
                   rng.uniform(700.0, 1200.0), true, false, false);
        push_offer(r, "cog_1", Technology::cogen_waste, rng.uniform(90.0, 180.0),
                   rng.uniform(1200.0, 2000.0), false, all_gas, false);
        const double peak_price = rng.uniform(260.0, 420.0);
        double peak_qty = rng.uniform(2000.0, 3500.0);

        // Demand: regulated (affected) and free (unaffected) baseload at the
        // administrative ceiling, plus an industrial elastic tail.
        const double factor_es =
            1.0 + 0.15 * std::sin(2.0 * kPi * (hod - 9.0) / 24.0) +
            rng.uniform(-0.03, 0.03);
        const double factor_pt =
            1.0 + 0.15 * std::sin(2.0 * kPi * (hod - 9.0) / 24.0) +
            rng.uniform(-0.03, 0.03);
        const double es_total = spec.base_demand_es * factor_es;
        const double pt_total = spec.base_demand_pt * factor_pt;
        const double ceiling = params.demand_ceiling;

        const double es_inelastic = es_total * (1.0 - elastic_share);
        push_bid(r, "es_reg", ceiling, es_inelastic * spec.affected_share_es,
                 true, SegmentKind::domestic_inelastic, Country::ES);
        push_bid(r, "es_base", ceiling,
                 es_inelastic * (1.0 - spec.affected_share_es), false,
                 SegmentKind::domestic_inelastic, Country::ES);
        const double pt_inelastic = pt_total * (1.0 - elastic_share);
        push_bid(r, "pt_reg", ceiling, pt_inelastic * spec.affected_share_pt,
                 true, SegmentKind::domestic_inelastic, Country::PT);
        push_bid(r, "pt_base", ceiling,
                 pt_inelastic * (1.0 - spec.affected_share_pt), false,
                 SegmentKind::domestic_inelastic, Country::PT);

        if (elastic_share > 0.0) {
            const double es_flex = es_total * elastic_share;
            const double w[3] = {0.5, 0.3, 0.2};
            const double lo[3] = {360.0, 300.0, 240.0};
            const double hi[3] = {420.0, 359.0, 299.0};
            for (int i = 0; i < 3; ++i)
                push_bid(r, "es_flex_" + std::to_string(i + 1),
                         rng.uniform(lo[i], hi[i]), es_flex * w[i], false,
                         SegmentKind::domestic_elastic, Country::ES);
            const double pt_flex = pt_total * elastic_share;
            push_bid(r, "pt_flex_1", rng.uniform(340.0, 410.0), pt_flex * 0.6,
                     false, SegmentKind::domestic_elastic, Country::PT);
            push_bid(r, "pt_flex_2", rng.uniform(250.0, 330.0), pt_flex * 0.4,
                     false, SegmentKind::domestic_elastic, Country::PT);
        }

        // Guarantee feasibility: the peaker covers whatever the rest of the
        // stack cannot, including a fully drawn export block.
        {
            double demand_total = 0.0;
            for (const DemandBid& b : r.demand_bids) demand_total += b.quantity;
            if (border) demand_total += spec.ntc_export;
            double supply_total = 0.0;
            for (const SupplyOffer& o : r.supply_offers)
                supply_total += o.quantity;
            if (border) supply_total += spec.ntc_import;
            peak_qty = std::max(peak_qty, demand_total * 1.06 - supply_total);
            push_offer(r, "peak_1", Technology::other, peak_price, peak_qty,
                       false, all_gas, false);
        }

        InterconnectorHour ic;
        if (border) {
            // French price regimes: mostly between the recorded price and the
            // compensation-added price, sometimes above both, sometimes below.
            const double p0 =
                clear(build_supply_curve(r.supply_offers),
                      build_demand_curve(r.demand_bids))
                    .price;
            const double u = rng.unit();
            double french;
            if (u < 0.85)
                french = p0 + (0.25 + 0.30 * rng.unit()) * gc;
            else if (u < 0.95)
                french = p0 + gc + rng.uniform(30.0, 120.0);
            else
                french = std::max(2.0, p0 - rng.uniform(20.0, 60.0));
            ic.french_price = round_price(french);
            ic.ntc_export = round_qty(spec.ntc_export);
            ic.ntc_import = round_qty(spec.ntc_import);

            const CouplingBlocks blocks = export_import_blocks(ic);
            if (blocks.import_offer)
                r.supply_offers.push_back(*blocks.import_offer);
            if (blocks.export_bid) {
                r.demand_bids.push_back(*blocks.export_bid);
                r.bid_country.push_back(Country::FR);
            }
        }

        const ClearingResult cleared = clear(build_supply_curve(r.supply_offers),
                                             build_demand_curve(r.demand_bids));
        r.actual_price = cleared.price;

        double rent_spain = 0.0;
        if (border) {
            ic.actual_flow = round_qty(
                net_flow(cleared, r.supply_offers, r.demand_bids, ic));
            rent_spain = recorded_rent(r.actual_price, ic).rent_spain;
            r.interconnector = ic;
        }

        // The stored demand contribution follows from the stored series, so
        // the dataset settles exactly under the same arithmetic the engines
        // apply.
        double privileged_mwh = 0.0;
        for (const SegmentFill& f : cleared.supply_fills)
            if (r.supply_offers[f.source].privileged) privileged_mwh += f.mwh;
        double dem_es = 0.0;
        double dem_pt = 0.0;
        for (const SegmentFill& f : cleared.demand_fills) {
            const DemandBid& b = r.demand_bids[f.source];
            if (b.segment_kind == SegmentKind::export_block) continue;
            if (r.bid_country[f.source] == Country::ES) dem_es += f.mwh;
            if (r.bid_country[f.source] == Country::PT) dem_pt += f.mwh;
        }
        const double affected_volume = r.affected_share_es * dem_es +
                                       r.affected_share_pt * dem_pt +
                                       r.morocco_demand;
        const double total_gc = gc * privileged_mwh;
        const double rent_allocated = std::min(rent_spain, total_gc);
        r.dc_per_mwh =
            affected_volume > 0.0
                ? round_fine(demand_contribution(total_gc, rent_allocated,
                                                 affected_volume))
                : 0.0;

        hours.push_back(std::move(r));
    }
    return hours;
}

}  // namespace mibel

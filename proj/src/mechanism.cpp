#include "mibel/mechanism.hpp"

#include <algorithm>

#include "mibel/errors.hpp"

namespace mibel {

void MechanismParams::validate() const {
    if (!(efficiency > 0.0 && efficiency <= 1.0))
        throw InvalidParams("efficiency must be in (0, 1]");
    if (!(cap_fraction >= 0.0 && cap_fraction <= 1.0))
        throw InvalidParams("cap_fraction must be in [0, 1]");
    if (!(infra_cap >= 0.0)) throw InvalidParams("infra_cap must be >= 0");
    if (!(ref_price_start >= 0.0) || !(ref_price_step >= 0.0) ||
        !(ref_price_cap >= ref_price_start))
        throw InvalidParams("reference price schedule is inconsistent");
    if (flat_months < 0) throw InvalidParams("flat_months must be >= 0");
    if (!(demand_ceiling > 0.0)) throw InvalidParams("demand_ceiling must be > 0");
}

double gas_reference_price(int month_index, const MechanismParams& params) {
    params.validate();
    if (month_index < 1) throw InvalidMonth("scheme month index must be >= 1");
    const int steps = std::max(0, month_index - params.flat_months);
    return std::min(params.ref_price_start + params.ref_price_step * steps,
                    params.ref_price_cap);
}

double generation_contribution(double gas_price, double reference_price,
                               double efficiency) {
    if (!(efficiency > 0.0)) throw InvalidParams("efficiency must be > 0");
    return std::max(0.0, gas_price - reference_price) / efficiency;
}

double demand_contribution(double total_gc, double rent_allocated,
                           double affected_volume) {
    if (!(affected_volume > 0.0))
        throw NoAffectedDemand("demand contribution needs affected volume > 0");
    return std::max(0.0, total_gc - rent_allocated) / affected_volume;
}

double capped_revenue(double market_price, const MechanismParams& params) {
    if (market_price <= params.infra_cap) return market_price;
    return params.infra_cap +
           (1.0 - params.cap_fraction) * (market_price - params.infra_cap);
}

double system_income_from_cap(double market_price, const MechanismParams& params) {
    return std::max(0.0, params.cap_fraction * (market_price - params.infra_cap));
}

HourSettlement settle_hour(const ClearingResult& clearing,
                           std::span<const SupplyOffer> offers, double gc_per_mwh,
                           double rent_allocated, double affected_volume) {
    if (rent_allocated < 0.0)
        throw InconsistentVolumes("settle_hour: rent_allocated must be >= 0");
    if (gc_per_mwh < 0.0)
        throw InconsistentVolumes("settle_hour: gc_per_mwh must be >= 0");

    HourSettlement s;
    s.gc_per_mwh = gc_per_mwh;
    for (const auto& fill : clearing.supply_fills) {
        if (fill.source < offers.size() && offers[fill.source].privileged)
            s.privileged_volume += fill.mwh;
    }
    s.total_gc = gc_per_mwh * s.privileged_volume;
    // Rents beyond the bill are not consumed by the mechanism; clamping keeps
    // the budget identity exact.
    s.rent_allocated = std::min(rent_allocated, s.total_gc);
    s.affected_volume = affected_volume;
    s.dc_per_mwh = demand_contribution(s.total_gc, s.rent_allocated, affected_volume);
    return s;
}

}  // namespace mibel

#include "mibel/accounting.hpp"

#include <cmath>
#include <vector>

#include "mibel/errors.hpp"
#include "mibel/kernels.hpp"

namespace mibel {

Money Money::from_euros(double eur) {
    return Money{static_cast<std::int64_t>(std::llround(eur * 100.0))};
}

Money consumer_impact(double avg_hourly_demand, double affected_share,
                      double delta_cost_per_mwh, double hours) {
    return Money::from_euros(avg_hourly_demand * affected_share *
                             delta_cost_per_mwh * hours);
}

Money rent_funding_effect(double avg_hourly_demand, double affected_share,
                          double dc_relief_per_mwh, double hours) {
    return Money::from_euros(avg_hourly_demand * affected_share *
                             dc_relief_per_mwh * hours);
}

MarginDecomposition& MarginDecomposition::operator+=(const MarginDecomposition& o) noexcept {
    incumbent_privileged_gain += o.incumbent_privileged_gain;
    new_generation_revenue += o.new_generation_revenue;
    new_generation_min_margin += o.new_generation_min_margin;
    inframarginal_merchant_loss += o.inframarginal_merchant_loss;
    system_income_loss += o.system_income_loss;
    return *this;
}

MarginDecomposition margin_decomposition(const ClearingResult& actual,
                                         std::span<const SupplyOffer> actual_offers,
                                         double gc_per_mwh,
                                         const ClearingResult& cf,
                                         std::span<const SupplyOffer> cf_offers,
                                         const MechanismParams& params) {
    for (const auto& f : actual.supply_fills) {
        if (f.source >= actual_offers.size())
            throw HourMismatch("margin decomposition: actual fill outside offer list");
    }
    for (const auto& f : cf.supply_fills) {
        if (f.source >= cf_offers.size())
            throw HourMismatch("margin decomposition: counterfactual fill outside offer list");
    }

    MarginDecomposition m;
    const double subsidized_revenue = actual.price + gc_per_mwh;

    // Per-source counterfactual fills for the privileged overlap.
    std::vector<double> cf_fill(cf_offers.size(), 0.0);
    for (const auto& f : cf.supply_fills) cf_fill[f.source] = f.mwh;

    double capped_both = 0.0;
    for (const auto& f : actual.supply_fills) {
        const SupplyOffer& offer = actual_offers[f.source];
        const double in_cf = f.source < cf_fill.size() ? cf_fill[f.source] : 0.0;
        const double both = std::min(f.mwh, in_cf);
        const double only_actual = f.mwh - both;
        if (offer.privileged) {
            m.incumbent_privileged_gain += (subsidized_revenue - cf.price) * both;
            m.new_generation_revenue += subsidized_revenue * only_actual;
            // Margin over what the same segment would have to be paid in the
            // counterfactual world: its counterfactual offer price.
            const double cf_offer_price =
                f.source < cf_offers.size() ? cf_offers[f.source].price : offer.price;
            m.new_generation_min_margin += (subsidized_revenue - cf_offer_price) * only_actual;
        }
        if (offer.capped) capped_both += both;
    }

    const double keep_delta =
        capped_revenue(cf.price, params) - capped_revenue(actual.price, params);
    const double claw_delta = system_income_from_cap(cf.price, params) -
                              system_income_from_cap(actual.price, params);
    m.inframarginal_merchant_loss = keep_delta * capped_both;
    m.system_income_loss = claw_delta * capped_both;
    return m;
}

EmissionsGas emissions_and_gas(double delta_fossil_gen_mwh, double co2_factor,
                               double efficiency) {
    if (!(efficiency > 0.0)) throw InvalidParams("efficiency must be > 0");
    if (co2_factor < 0.0) throw InvalidParams("co2_factor must be >= 0");
    return EmissionsGas{delta_fossil_gen_mwh * co2_factor,
                        delta_fossil_gen_mwh / efficiency};
}

RentSummary rent_summary(std::span<const double> actual_hourly_rent,
                         std::span<const double> cf_hourly_rent, double hours) {
    RentSummary s;
    const double mean_actual =
        actual_hourly_rent.empty()
            ? 0.0
            : kernels::sum(actual_hourly_rent) / static_cast<double>(actual_hourly_rent.size());
    const double mean_cf =
        cf_hourly_rent.empty()
            ? 0.0
            : kernels::sum(cf_hourly_rent) / static_cast<double>(cf_hourly_rent.size());
    s.actual_total = Money::from_euros(mean_actual * hours);
    s.cf_total = Money::from_euros(mean_cf * hours);
    s.delta = s.actual_total - s.cf_total;
    return s;
}

}  // namespace mibel

#pragma once

#include <cstdint>
#include <span>

#include "mibel/clearing.hpp"
#include "mibel/mechanism.hpp"
#include "mibel/types.hpp"

namespace mibel {

// Currency held as integer cents so period totals are exact at reported
// precision regardless of summation order.
struct Money {
    std::int64_t cents = 0;

    static Money from_euros(double eur);
    double euros() const noexcept { return static_cast<double>(cents) / 100.0; }
    double millions() const noexcept { return static_cast<double>(cents) / 100.0 / 1e6; }

    Money& operator+=(Money o) noexcept { cents += o.cents; return *this; }
    friend Money operator+(Money a, Money b) noexcept { return Money{a.cents + b.cents}; }
    friend Money operator-(Money a, Money b) noexcept { return Money{a.cents - b.cents}; }
    friend bool operator==(Money a, Money b) noexcept { return a.cents == b.cents; }
};

// Period consumer bill delta: average hourly demand x affected share x cost
// delta per MWh x hours.  Sign preserved: positive means the scheme cost
// consumers money, negative means it saved them money.
Money consumer_impact(double avg_hourly_demand, double affected_share,
                      double delta_cost_per_mwh, double hours);

// Period value of the demand-contribution relief funded by congestion rents,
// same product shape.
Money rent_funding_effect(double avg_hourly_demand, double affected_share,
                          double dc_relief_per_mwh, double hours);

// Producer-side margin shifts between the subsidized outcome and a
// counterfactual, in euros for the volumes passed in.  All five fields are
// non-negative in the regular configuration (counterfactual price above the
// subsidized price, dispatch expanding under the subsidy).
struct MarginDecomposition {
    // (actual price + GC - cf price) x privileged volume dispatched in both.
    double incumbent_privileged_gain = 0.0;
    // (actual price + GC) x privileged volume dispatched only under the scheme.
    double new_generation_revenue = 0.0;
    // Same volume valued against its counterfactual offer prices: the margin
    // wedge the subsidy opened.
    double new_generation_min_margin = 0.0;
    // Revenue kept by capped units falls when the price would have been
    // higher without the scheme.
    double inframarginal_merchant_loss = 0.0;
    // Clawed-back cap income foregone for the system, same volume.
    double system_income_loss = 0.0;

    MarginDecomposition& operator+=(const MarginDecomposition& o) noexcept;
};

// Decompose margins between one hour's subsidized clearing and its
// counterfactual clearing.  `actual_offers` / `cf_offers` are the lists the
// respective curves were built from; counterfactual offers derived from the
// actual hour keep their source indices, which is how volumes "dispatched in
// both" are matched.  Throws HourMismatch when fills reference segments
// outside the given lists.
MarginDecomposition margin_decomposition(const ClearingResult& actual,
                                         std::span<const SupplyOffer> actual_offers,
                                         double gc_per_mwh,
                                         const ClearingResult& cf,
                                         std::span<const SupplyOffer> cf_offers,
                                         const MechanismParams& params = {});

struct EmissionsGas {
    double co2_tonnes = 0.0;
    double gas_mwh = 0.0;
};

// CO2 and gas burn implied by extra fossil generation: tonnes at the emission
// factor, gas at the fleet efficiency.
EmissionsGas emissions_and_gas(double delta_fossil_gen_mwh, double co2_factor = 0.38,
                               double efficiency = 0.55);

struct RentSummary {
    Money actual_total;
    Money cf_total;
    Money delta;  // actual - counterfactual
};

// Period rent totals from hourly series: mean hourly rent x hours, per side.
RentSummary rent_summary(std::span<const double> actual_hourly_rent,
                         std::span<const double> cf_hourly_rent, double hours);

}  // namespace mibel

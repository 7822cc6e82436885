#pragma once

#include <span>

#include "mibel/clearing.hpp"
#include "mibel/types.hpp"

namespace mibel {

// Parameters of the gas-cost compensation scheme and the inframarginal
// revenue cap.  Defaults match the scheme as introduced in mid-2022.
struct MechanismParams {
    double ref_price_start = 40.0;  // EUR/MWh gas, months 1..flat_months
    double ref_price_step = 5.0;    // monthly increment afterwards
    double ref_price_cap = 70.0;    // schedule ceiling
    int flat_months = 6;
    double efficiency = 0.55;      // MWh electric per MWh gas
    double infra_cap = 67.0;       // EUR/MWh revenue cap threshold
    double cap_fraction = 0.9;     // share of the excess clawed back
    double demand_ceiling = 3000.0;  // price-insensitive bid price, EUR/MWh

    void validate() const;  // throws InvalidParams
};

// Administered gas reference price for the scheme month (1-based).
// Flat for the first `flat_months`, then rising by `ref_price_step` per
// month, clamped at `ref_price_cap`.  Throws InvalidMonth for month < 1.
double gas_reference_price(int month_index, const MechanismParams& params = {});

// Per-MWh compensation owed to a gas-fired unit: the gas cost above the
// reference, converted at the fleet efficiency.  Never negative.
double generation_contribution(double gas_price, double reference_price,
                               double efficiency = 0.55);

// Per-MWh charge on affected demand funding whatever compensation is not
// covered by allocated congestion rents.  Never negative.  Throws
// NoAffectedDemand when affected_volume <= 0.
double demand_contribution(double total_gc, double rent_allocated,
                           double affected_volume);

// Revenue a capped unit keeps per MWh at the given market price: the full
// price below the cap threshold, threshold plus the residual share above it.
double capped_revenue(double market_price, const MechanismParams& params = {});

// Per-MWh amount clawed back from capped units at the given market price.
double system_income_from_cap(double market_price, const MechanismParams& params = {});

// Cash flows of one settled hour.  rent_allocated is clamped to the
// compensation actually owed, so the identity
//   dc_per_mwh * affected_volume + rent_allocated == total_gc
// holds whenever total_gc > 0.
struct HourSettlement {
    double gc_per_mwh = 0.0;
    double privileged_volume = 0.0;  // dispatched MWh receiving compensation
    double total_gc = 0.0;           // gc_per_mwh * privileged_volume
    double rent_allocated = 0.0;     // rents applied against the bill
    double affected_volume = 0.0;
    double dc_per_mwh = 0.0;
};

// Settle one cleared hour.  Privileged volume is read from the fills of
// `offers` flagged privileged.  Throws NoAffectedDemand when
// affected_volume <= 0 and InconsistentVolumes on negative rents.
HourSettlement settle_hour(const ClearingResult& clearing,
                           std::span<const SupplyOffer> offers, double gc_per_mwh,
                           double rent_allocated, double affected_volume);

}  // namespace mibel

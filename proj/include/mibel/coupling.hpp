#pragma once

#include <optional>
#include <span>

#include "mibel/clearing.hpp"
#include "mibel/types.hpp"

namespace mibel {

// Recorded state of the French border for one hour.  Flow sign convention:
// positive = export from the Iberian market to France.
struct InterconnectorHour {
    double ntc_export = 0.0;   // MWh available toward France
    double ntc_import = 0.0;   // MWh available from France
    double french_price = 0.0; // EUR/MWh
    double actual_flow = 0.0;  // recorded net flow, MWh
};

struct RentAccount {
    double rent_total = 0.0;
    double rent_spain = 0.0;   // Iberian half
    double rent_france = 0.0;  // French half
};

// Price-taker representation of the border for a coupled clearing: France
// buys up to ntc_export and sells up to ntc_import at its own price.  A zero
// capacity yields an empty block on that side.
struct CouplingBlocks {
    std::optional<DemandBid> export_bid;
    std::optional<SupplyOffer> import_offer;
};

// Block ids used when the engine injects the border into an hour's lists.
inline constexpr const char* kExportBlockId = "fr_export";
inline constexpr const char* kImportBlockId = "fr_import";

CouplingBlocks export_import_blocks(const InterconnectorHour& ic);

// Net flow implied by a clearing that included the hour's border blocks:
// accepted export bids minus accepted import offers.  When the clearing
// price equals the French price exactly the border is indifferent and the
// net flow is 0 by convention.  Throws InternalInconsistency if both
// directions were fully accepted at distinct prices.
double net_flow(const ClearingResult& clearing, std::span<const SupplyOffer> offers,
                std::span<const DemandBid> bids, const InterconnectorHour& ic);

// Congestion rent of the border at the given prices and net flow, split
// 50/50 between the two systems.  Zero when prices are equal; otherwise the
// price gap times the flowed volume (at the capacity limit after a coupled
// clearing; recorded flows may sit below the limit).  Throws
// DirectionMismatch when the flow runs against the price gap.
RentAccount congestion_rent(double iberian_price, const InterconnectorHour& ic,
                            double flow);

// Rent implied by recorded data, tolerant of direction noise: zero instead
// of throwing when the recorded flow runs against the price gap.
RentAccount recorded_rent(double iberian_price, const InterconnectorHour& ic);

}  // namespace mibel

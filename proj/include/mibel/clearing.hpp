#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "mibel/curve.hpp"
#include "mibel/types.hpp"

namespace mibel {

// Accepted volume of one segment, keyed by its source index in the offer/bid
// list the curve was built from.  Only segments with accepted volume > 0
// appear.
struct SegmentFill {
    std::uint32_t source;
    double mwh;
};

struct ClearingResult {
    double price = 0.0;     // uniform clearing price, EUR/MWh
    double quantity = 0.0;  // traded volume, MWh
    std::vector<SegmentFill> supply_fills;
    std::vector<SegmentFill> demand_fills;
    // Technology of the highest-priced accepted supply segment (input order
    // breaks ties); Technology::other if nothing is dispatched.
    Technology marginal_technology = Technology::other;
    // True when segments bidding exactly at the clearing price were only
    // partially served (pro-rata rationing applied on either side).
    bool rationed_at_price = false;

    // Accepted volume of the segment with the given source index, 0 if none.
    double supply_fill_of(std::uint32_t source) const noexcept;
    double demand_fill_of(std::uint32_t source) const noexcept;
};

// Uniform-price clearing of one hour.
//
// The clearing price is the lowest price p among the breakpoints of either
// curve at which cumulative supply at or below p covers all demand bidding
// strictly above p; when supply and demand steps leave a vertical gap, this
// lands on the marginal bid price.  Volume is min(S(p*), D(p*)).  Supply
// strictly below and demand strictly above the price are accepted in full;
// segments exactly at the price share the remainder pro rata to their size.
// Throws Infeasible when demand insisting on prices above the whole supply
// stack exceeds total supply, and EmptyCurve on an empty side.
ClearingResult clear(const StepCurve& supply, const StepCurve& demand);

// Fold per-segment fills into accepted MWh per unit/agent id.  Ids shared by
// several segments accumulate.
std::map<std::string, double> acceptance_map(const ClearingResult& result,
                                             std::span<const SupplyOffer> offers,
                                             std::span<const DemandBid> bids);

struct TechnologyShare {
    int hours = 0;
    double share = 0.0;
};

// Hours and share of hours in which each technology set the price.
std::map<Technology, TechnologyShare> marginal_tech_histogram(
    std::span<const ClearingResult> results);

}  // namespace mibel

#include "mibel/clearing.hpp"

#include <algorithm>

#include "mibel/errors.hpp"

namespace mibel {

double ClearingResult::supply_fill_of(std::uint32_t source) const noexcept {
    for (const auto& f : supply_fills) {
        if (f.source == source) return f.mwh;
    }
    return 0.0;
}

double ClearingResult::demand_fill_of(std::uint32_t source) const noexcept {
    for (const auto& f : demand_fills) {
        if (f.source == source) return f.mwh;
    }
    return 0.0;
}

ClearingResult clear(const StepCurve& supply, const StepCurve& demand) {
    if (supply.empty()) throw EmptyCurve("clear: supply curve is empty");
    if (demand.empty()) throw EmptyCurve("clear: demand curve is empty");

    // Demand that insists on buying above the top of the supply stack can
    // never be served: the curves do not cross.
    const double top_supply_price = supply.prices().back();
    if (supply.total() < demand.demand_strictly_above(top_supply_price)) {
        throw Infeasible("clear: demand above the supply stack exceeds total supply");
    }

    // Candidate prices: union of both curves' breakpoints, ascending.
    std::vector<double> candidates;
    candidates.reserve(supply.size() + demand.size());
    candidates.insert(candidates.end(), supply.prices().begin(), supply.prices().end());
    candidates.insert(candidates.end(), demand.prices().begin(), demand.prices().end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    double price = candidates.back();
    for (const double p : candidates) {
        if (supply.supply_at_or_below(p) >= demand.demand_strictly_above(p)) {
            price = p;
            break;
        }
    }

    const double s_at = supply.supply_at_or_below(price);
    const double s_below = supply.supply_strictly_below(price);
    const double d_at = demand.demand_at_or_above(price);
    const double d_above = demand.demand_strictly_above(price);
    const double quantity = std::min(s_at, d_at);

    ClearingResult result;
    result.price = price;
    result.quantity = quantity;

    // Pro-rata share for segments offering/bidding exactly at the price.
    const double supply_at_price = s_at - s_below;
    const double supply_avail = quantity - s_below;
    const double supply_frac = supply_at_price > 0.0 ? supply_avail / supply_at_price : 0.0;
    const double demand_at_price = d_at - d_above;
    const double demand_avail = quantity - d_above;
    const double demand_frac = demand_at_price > 0.0 ? demand_avail / demand_at_price : 0.0;

    result.rationed_at_price = (supply_at_price > 0.0 && supply_avail < supply_at_price) ||
                               (demand_at_price > 0.0 && demand_avail < demand_at_price);

    std::size_t marginal = supply.size();  // merit-order index of the price setter
    for (std::size_t i = 0; i < supply.size(); ++i) {
        const double p = supply.prices()[i];
        if (p > price) break;
        const double accepted =
            p < price ? supply.quantities()[i] : supply.quantities()[i] * supply_frac;
        if (accepted > 0.0) {
            result.supply_fills.push_back({supply.sources()[i], accepted});
            marginal = i;
        }
    }
    if (marginal < supply.technologies().size()) {
        result.marginal_technology = supply.technologies()[marginal];
    }

    for (std::size_t i = 0; i < demand.size(); ++i) {
        const double p = demand.prices()[i];
        if (p < price) break;
        const double accepted =
            p > price ? demand.quantities()[i] : demand.quantities()[i] * demand_frac;
        if (accepted > 0.0) result.demand_fills.push_back({demand.sources()[i], accepted});
    }

    return result;
}

std::map<std::string, double> acceptance_map(const ClearingResult& result,
                                             std::span<const SupplyOffer> offers,
                                             std::span<const DemandBid> bids) {
    std::map<std::string, double> out;
    for (const auto& f : result.supply_fills) {
        if (f.source < offers.size()) out[offers[f.source].unit_id] += f.mwh;
    }
    for (const auto& f : result.demand_fills) {
        if (f.source < bids.size()) out[bids[f.source].agent_id] += f.mwh;
    }
    return out;
}

std::map<Technology, TechnologyShare> marginal_tech_histogram(
    std::span<const ClearingResult> results) {
    std::map<Technology, TechnologyShare> hist;
    for (const auto& r : results) hist[r.marginal_technology].hours += 1;
    if (!results.empty()) {
        for (auto& [tech, entry] : hist) {
            entry.share = static_cast<double>(entry.hours) /
                          static_cast<double>(results.size());
        }
    }
    return hist;
}

}  // namespace mibel

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mibel/types.hpp"

namespace mibel {

enum class CurveSide : std::uint8_t { supply, demand };

// Merged breakpoint: price plus cumulative quantity at that price (sum of all
// equal-price segments folded in).
struct Breakpoint {
    double price;
    double cumulative;
};

// A step curve in merit order, structure-of-arrays.  Supply is sorted by
// ascending price, demand by descending price; ties keep input order.
// `source(i)` is the index of segment i in the offer/bid list the curve was
// built from, so flags and ids stay with the caller instead of being copied.
class StepCurve {
public:
    StepCurve() = default;

    CurveSide side() const noexcept { return side_; }
    std::size_t size() const noexcept { return price_.size(); }
    bool empty() const noexcept { return price_.empty(); }

    std::span<const double> prices() const noexcept { return price_; }
    std::span<const double> quantities() const noexcept { return quantity_; }
    // cumulative(i): total quantity of segments 0..i in merit order.
    std::span<const double> cumulative() const noexcept { return cumulative_; }
    std::span<const std::uint32_t> sources() const noexcept { return source_; }
    // Technology per segment; populated on supply curves, empty on demand.
    std::span<const Technology> technologies() const noexcept { return technology_; }

    double total() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

    // Quantity a supply curve offers at price <= p / strictly below p.
    double supply_at_or_below(double p) const noexcept;
    double supply_strictly_below(double p) const noexcept;

    // Quantity a demand curve requests at price >= p / strictly above p.
    double demand_at_or_above(double p) const noexcept;
    double demand_strictly_above(double p) const noexcept;

    // Equal-price segments merged; supply ascending, demand descending by
    // price, cumulative in merit order.
    std::vector<Breakpoint> breakpoints() const;

    friend StepCurve build_supply_curve(std::span<const SupplyOffer> offers);
    friend StepCurve build_demand_curve(std::span<const DemandBid> bids);
    friend StepCurve shift_curve(const StepCurve& curve, double delta,
                                 std::span<const std::uint8_t> source_mask);

private:
    void sort_and_accumulate();

    CurveSide side_ = CurveSide::supply;
    std::vector<double> price_;
    std::vector<double> quantity_;
    std::vector<double> cumulative_;
    std::vector<std::uint32_t> source_;
    std::vector<Technology> technology_;
};

// Validate segments and build the merit-order curve.  Throws EmptyCurve on an
// empty list and InvalidSegment on a bad segment.
StepCurve build_supply_curve(std::span<const SupplyOffer> offers);
StepCurve build_demand_curve(std::span<const DemandBid> bids);

// Copy of `curve` with `delta` added to every segment whose source index has
// a nonzero entry in `source_mask`, clamped below at 0, then re-sorted into
// merit order.  `source_mask` is indexed by source id, not curve position.
StepCurve shift_curve(const StepCurve& curve, double delta,
                      std::span<const std::uint8_t> source_mask);

}  // namespace mibel

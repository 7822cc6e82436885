#include "mibel/curve.hpp"

#include <algorithm>
#include <numeric>

#include "mibel/errors.hpp"
#include "mibel/kernels.hpp"

namespace mibel {

namespace {

// Index of the first element in `prices` (sorted ascending) that is > p.
std::size_t upper_bound_asc(std::span<const double> prices, double p) noexcept {
    return static_cast<std::size_t>(
        std::upper_bound(prices.begin(), prices.end(), p) - prices.begin());
}

std::size_t lower_bound_asc(std::span<const double> prices, double p) noexcept {
    return static_cast<std::size_t>(
        std::lower_bound(prices.begin(), prices.end(), p) - prices.begin());
}

// Same for a descending-sorted span.
std::size_t upper_bound_desc(std::span<const double> prices, double p) noexcept {
    return static_cast<std::size_t>(
        std::upper_bound(prices.begin(), prices.end(), p, std::greater<>()) -
        prices.begin());
}

std::size_t lower_bound_desc(std::span<const double> prices, double p) noexcept {
    return static_cast<std::size_t>(
        std::lower_bound(prices.begin(), prices.end(), p, std::greater<>()) -
        prices.begin());
}

}  // namespace

void StepCurve::sort_and_accumulate() {
    std::vector<std::uint32_t> order(price_.size());
    std::iota(order.begin(), order.end(), 0u);
    if (side_ == CurveSide::supply) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return price_[a] < price_[b]; });
    } else {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return price_[a] > price_[b]; });
    }
    std::vector<double> p(price_.size()), q(price_.size());
    std::vector<std::uint32_t> s(price_.size());
    std::vector<Technology> t(technology_.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        p[i] = price_[order[i]];
        q[i] = quantity_[order[i]];
        s[i] = source_[order[i]];
        if (!technology_.empty()) t[i] = technology_[order[i]];
    }
    price_ = std::move(p);
    quantity_ = std::move(q);
    source_ = std::move(s);
    technology_ = std::move(t);
    cumulative_.resize(quantity_.size());
    kernels::prefix_sum(quantity_, cumulative_);
}

double StepCurve::supply_at_or_below(double p) const noexcept {
    const std::size_t k = upper_bound_asc(price_, p);
    return k == 0 ? 0.0 : cumulative_[k - 1];
}

double StepCurve::supply_strictly_below(double p) const noexcept {
    const std::size_t k = lower_bound_asc(price_, p);
    return k == 0 ? 0.0 : cumulative_[k - 1];
}

double StepCurve::demand_at_or_above(double p) const noexcept {
    // Everything before the first element strictly below p.
    const std::size_t j = upper_bound_desc(price_, p);
    return j == 0 ? 0.0 : cumulative_[j - 1];
}

double StepCurve::demand_strictly_above(double p) const noexcept {
    const std::size_t k = lower_bound_desc(price_, p);
    return k == 0 ? 0.0 : cumulative_[k - 1];
}

std::vector<Breakpoint> StepCurve::breakpoints() const {
    std::vector<Breakpoint> out;
    out.reserve(price_.size());
    for (std::size_t i = 0; i < price_.size(); ++i) {
        if (!out.empty() && out.back().price == price_[i]) {
            out.back().cumulative = cumulative_[i];
        } else {
            out.push_back({price_[i], cumulative_[i]});
        }
    }
    return out;
}

StepCurve build_supply_curve(std::span<const SupplyOffer> offers) {
    if (offers.empty()) throw EmptyCurve("supply curve has no segments");
    StepCurve c;
    c.side_ = CurveSide::supply;
    c.price_.reserve(offers.size());
    c.quantity_.reserve(offers.size());
    c.source_.reserve(offers.size());
    c.technology_.reserve(offers.size());
    for (std::size_t i = 0; i < offers.size(); ++i) {
        validate(offers[i]);
        c.price_.push_back(offers[i].price);
        c.quantity_.push_back(offers[i].quantity);
        c.source_.push_back(static_cast<std::uint32_t>(i));
        c.technology_.push_back(offers[i].technology);
    }
    c.sort_and_accumulate();
    return c;
}

StepCurve build_demand_curve(std::span<const DemandBid> bids) {
    if (bids.empty()) throw EmptyCurve("demand curve has no segments");
    StepCurve c;
    c.side_ = CurveSide::demand;
    c.price_.reserve(bids.size());
    c.quantity_.reserve(bids.size());
    c.source_.reserve(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i) {
        validate(bids[i]);
        c.price_.push_back(bids[i].price);
        c.quantity_.push_back(bids[i].quantity);
        c.source_.push_back(static_cast<std::uint32_t>(i));
    }
    c.sort_and_accumulate();
    return c;
}

StepCurve shift_curve(const StepCurve& curve, double delta,
                      std::span<const std::uint8_t> source_mask) {
    StepCurve out = curve;
    // Reorder the mask from source ids into current merit order, then let the
    // kernel apply the clamped shift in one pass.
    std::vector<std::uint8_t> mask(out.price_.size(), 0);
    for (std::size_t i = 0; i < out.source_.size(); ++i) {
        const std::uint32_t s = out.source_[i];
        mask[i] = (s < source_mask.size()) ? source_mask[s] : 0;
    }
    kernels::shift_where(out.price_, mask, delta, 0.0);
    out.sort_and_accumulate();
    return out;
}

}  // namespace mibel

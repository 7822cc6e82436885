#include <doctest.h>

#include <random>
#include <vector>

#include "mibel/clearing.hpp"
#include "mibel/curve.hpp"
#include "mibel/errors.hpp"
#include "mibel/mechanism.hpp"

using namespace mibel;

TEST_CASE("reference gas price schedule: flat, rising, clamped") {
    for (int m = 1; m <= 6; ++m) CHECK(gas_reference_price(m) == 40.0);
    CHECK(gas_reference_price(7) == 45.0);
    CHECK(gas_reference_price(8) == 50.0);
    CHECK(gas_reference_price(11) == 65.0);
    CHECK(gas_reference_price(12) == 70.0);
    // Beyond the schedule the ceiling binds.
    CHECK(gas_reference_price(13) == 70.0);
    CHECK(gas_reference_price(60) == 70.0);

    CHECK_THROWS_AS(gas_reference_price(0), InvalidMonth);
    CHECK_THROWS_AS(gas_reference_price(-3), InvalidMonth);

    // The schedule is non-decreasing month over month.
    for (int m = 1; m < 40; ++m)
        CHECK(gas_reference_price(m) <= gas_reference_price(m + 1));
}

TEST_CASE("generation contribution converts excess gas cost at efficiency") {
    CHECK(generation_contribution(100.0, 40.0, 0.55) ==
          doctest::Approx(109.0909090909).epsilon(1e-10));
    CHECK(generation_contribution(40.0, 40.0, 0.55) == 0.0);
    CHECK(generation_contribution(25.0, 40.0, 0.55) == 0.0);  // never negative
    CHECK(generation_contribution(90.0, 45.0, 0.5) == 90.0);

    CHECK_THROWS_AS(generation_contribution(100.0, 40.0, 0.0), InvalidParams);

    // Non-decreasing in the gas price.
    double prev = 0.0;
    for (double gas = 30.0; gas <= 200.0; gas += 2.5) {
        const double gc = generation_contribution(gas, 40.0, 0.55);
        CHECK(gc >= prev);
        prev = gc;
    }
}

TEST_CASE("demand contribution spreads the uncovered bill") {
    CHECK(demand_contribution(1783000.0, 0.0, 15352.0) ==
          doctest::Approx(116.1412).epsilon(1e-6));
    CHECK(demand_contribution(1000.0, 400.0, 100.0) == 6.0);
    // Rents above the bill never push the charge negative.
    CHECK(demand_contribution(1000.0, 5000.0, 100.0) == 0.0);
    CHECK_THROWS_AS(demand_contribution(1000.0, 0.0, 0.0), NoAffectedDemand);
    CHECK_THROWS_AS(demand_contribution(1000.0, 0.0, -5.0), NoAffectedDemand);

    // Non-increasing in allocated rents.
    double prev = 1e300;
    for (double rent = 0.0; rent <= 2000.0; rent += 100.0) {
        const double dc = demand_contribution(1500.0, rent, 120.0);
        CHECK(dc <= prev);
        prev = dc;
    }
}

TEST_CASE("capped revenue and clawback split the price at the threshold") {
    CHECK(capped_revenue(200.0) == doctest::Approx(80.3).epsilon(1e-12));
    CHECK(capped_revenue(150.0) == doctest::Approx(75.3).epsilon(1e-12));
    CHECK(capped_revenue(67.0) == 67.0);
    CHECK(capped_revenue(50.0) == 50.0);

    CHECK(system_income_from_cap(200.0) == doctest::Approx(119.7).epsilon(1e-12));
    CHECK(system_income_from_cap(150.0) == doctest::Approx(74.7).epsilon(1e-12));
    CHECK(system_income_from_cap(67.0) == 0.0);
    CHECK(system_income_from_cap(50.0) == 0.0);

    // Kept revenue plus clawback reconstructs the price.
    for (double p = 0.0; p <= 400.0; p += 7.3)
        CHECK(capped_revenue(p) + system_income_from_cap(p) ==
              doctest::Approx(p).epsilon(1e-12));

    // Kept revenue is non-decreasing in the price: the cap softens, never
    // inverts, the incentive to clear.
    for (double p = 0.0; p < 400.0; p += 5.0)
        CHECK(capped_revenue(p) <= capped_revenue(p + 5.0));
}

TEST_CASE("parameter validation rejects out-of-range mechanisms") {
    MechanismParams p;
    p.efficiency = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidParams);
    p = {};
    p.cap_fraction = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidParams);
    p = {};
    p.ref_price_cap = 10.0;  // below the starting price
    CHECK_THROWS_AS(p.validate(), InvalidParams);
    p = {};
    p.flat_months = -1;
    CHECK_THROWS_AS(p.validate(), InvalidParams);
    p = {};
    p.demand_ceiling = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidParams);
    p = {};
    CHECK_NOTHROW(p.validate());
}

namespace {

ClearingResult clear_stack(const std::vector<SupplyOffer>& offers,
                           double demand_mwh) {
    DemandBid b;
    b.agent_id = "load";
    b.price = 3000.0;
    b.quantity = demand_mwh;
    b.segment_kind = SegmentKind::domestic_inelastic;
    const std::vector<DemandBid> bids = {b};
    return clear(build_supply_curve(offers), build_demand_curve(bids));
}

SupplyOffer unit(const char* id, Technology tech, double price, double qty,
                 bool privileged) {
    SupplyOffer o;
    o.unit_id = id;
    o.technology = tech;
    o.price = price;
    o.quantity = qty;
    o.privileged = privileged;
    return o;
}

}  // namespace

TEST_CASE("settling an hour: privileged volume, clamped rents, exact budget") {
    const std::vector<SupplyOffer> offers = {
        unit("wind", Technology::wind, 1.0, 6000.0, false),
        unit("gas1", Technology::ccgt, 180.0, 5000.0, true),
        unit("gas2", Technology::ccgt, 190.0, 5000.0, true),
        unit("peak", Technology::other, 400.0, 3000.0, false),
    };
    const ClearingResult r = clear_stack(offers, 17000.0);
    REQUIRE(r.price == 400.0);  // peaker is marginal, gas fleet fully in

    const HourSettlement s = settle_hour(r, offers, 100.0, 250000.0, 15352.0);
    CHECK(s.privileged_volume == 10000.0);  // both gas units fully dispatched
    CHECK(s.total_gc == 1000000.0);
    CHECK(s.rent_allocated == 250000.0);
    CHECK(s.dc_per_mwh == doctest::Approx(750000.0 / 15352.0).epsilon(1e-12));
    // Budget identity: the charge plus rents covers the bill exactly.
    CHECK(s.dc_per_mwh * s.affected_volume + s.rent_allocated ==
          doctest::Approx(s.total_gc).epsilon(1e-12));

    // Rents above the bill are clamped, the charge floors at zero, and the
    // identity still holds exactly.
    const HourSettlement s2 = settle_hour(r, offers, 100.0, 2000000.0, 15352.0);
    CHECK(s2.rent_allocated == s2.total_gc);
    CHECK(s2.dc_per_mwh == 0.0);
    CHECK(s2.dc_per_mwh * s2.affected_volume + s2.rent_allocated == s2.total_gc);

    CHECK_THROWS_AS(settle_hour(r, offers, 100.0, -1.0, 15352.0),
                    InconsistentVolumes);
    CHECK_THROWS_AS(settle_hour(r, offers, -2.0, 0.0, 15352.0),
                    InconsistentVolumes);
    CHECK_THROWS_AS(settle_hour(r, offers, 100.0, 0.0, 0.0), NoAffectedDemand);
}

TEST_CASE("budget identity holds across random settlements") {
    std::mt19937_64 gen(0xb1d6e7);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const std::vector<SupplyOffer> offers = {
            unit("w", Technology::wind, uniform(0.0, 10.0), uniform(500.0, 8000.0),
                 false),
            unit("g", Technology::ccgt, uniform(100.0, 250.0),
                 uniform(500.0, 8000.0), true),
            unit("p", Technology::other, uniform(260.0, 500.0),
                 uniform(4000.0, 9000.0), false),
        };
        double total = 0.0;
        for (const auto& o : offers) total += o.quantity;
        const double demand = uniform(0.2, 0.95) * total;
        const ClearingResult r = clear_stack(offers, demand);
        const double gc = uniform(0.0, 200.0);
        const double rent = uniform(0.0, 500000.0);
        const double affected = uniform(100.0, 20000.0);
        const HourSettlement s = settle_hour(r, offers, gc, rent, affected);

        CHECK(s.dc_per_mwh >= 0.0);
        CHECK(s.rent_allocated <= rent);
        const double lhs = s.dc_per_mwh * s.affected_volume + s.rent_allocated;
        CHECK(lhs == doctest::Approx(s.total_gc).epsilon(1e-6));
    }
}

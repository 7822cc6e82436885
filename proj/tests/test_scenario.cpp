// Counterfactual scenario engines: the administrative replay, the re-cleared
// elastic variant, the coupled-border variant, and the multi-hour runner.
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mibel/errors.hpp"
#include "mibel/scenario.hpp"
#include "mibel/synth.hpp"

using namespace mibel;

namespace {

SupplyOffer so(const char* id, Technology tech, double price, double qty,
               bool privileged = false, bool gas_indexed = false,
               bool capped = false) {
    SupplyOffer o;
    o.unit_id = id;
    o.technology = tech;
    o.price = price;
    o.quantity = qty;
    o.privileged = privileged;
    o.gas_indexed = gas_indexed;
    o.capped = capped;
    return o;
}

DemandBid db(const char* id, double price, double qty, bool affected = false,
             SegmentKind kind = SegmentKind::domestic_inelastic) {
    DemandBid b;
    b.agent_id = id;
    b.price = price;
    b.quantity = qty;
    b.affected = affected;
    b.segment_kind = kind;
    return b;
}

}  // namespace

TEST_CASE("administrative replay reproduces the averaged-hour arithmetic") {
    // One hour shaped like the period averages: price 148.5, compensation
    // 178.3, demand contribution 124.4, 26,022 MWh of inelastic demand.
    HourRecord hr;
    hr.hour_id = "2022-09-15T12:00:00Z";
    hr.supply_offers = {so("gas_fleet", Technology::ccgt, 148.5, 30000.0, true)};
    hr.demand_bids = {db("es_load", 3000.0, 26022.0, true)};
    hr.bid_country = {Country::ES};
    hr.gc_per_mwh = 178.3;
    hr.dc_per_mwh = 124.4;
    hr.actual_price = 148.5;
    hr.affected_share_es = 0.59;

    const HourOutcome o = ministry_cf(hr);

    CHECK(o.cf_price == doctest::Approx(326.8).epsilon(1e-12));
    CHECK(o.consumer_price_actual == doctest::Approx(272.9).epsilon(1e-12));
    CHECK(o.consumer_price_cf == doctest::Approx(326.8).epsilon(1e-12));

    const double saving = o.consumer_price_cf - o.consumer_price_actual;
    CHECK(saving == doctest::Approx(53.9).epsilon(1e-9));

    // Hourly saving times hourly demand.
    const double demand = o.actual_demand_es + o.actual_demand_pt;
    CHECK(demand == 26022.0);
    CHECK(saving * demand == doctest::Approx(1402585.8).epsilon(1e-9));
    CHECK(std::llround(saving * demand) == 1402586);

    // Volumes and trade are frozen at their recorded values.
    CHECK(o.cf_quantity == o.actual_quantity);
    CHECK(o.cf_demand_es == o.actual_demand_es);
    CHECK(o.cf_privileged_mwh == o.actual_privileged_mwh);
    CHECK(o.cf_marginal == o.actual_marginal);
    CHECK(o.affected_volume == doctest::Approx(26022.0 * 0.59).epsilon(1e-12));
}

TEST_CASE("administrative replay moves only cap-related margins") {
    // Dispatch is frozen, so the privileged wedge (price + GC - cf price) is
    // identically zero and the only producer effects come from the revenue
    // cap evaluated at the two prices.
    HourRecord hr;
    hr.hour_id = "2022-07-01T10:00:00Z";
    hr.supply_offers = {
        so("nuc", Technology::nuclear, 10.0, 100.0, false, false, true),
        so("gas", Technology::ccgt, 90.0, 100.0, true),
    };
    hr.demand_bids = {db("load", 3000.0, 150.0, true)};
    hr.gc_per_mwh = 60.0;
    hr.dc_per_mwh = 25.0;
    hr.actual_price = 90.0;
    hr.affected_share_es = 1.0;

    const HourOutcome o = ministry_cf(hr);
    CHECK(o.cf_price == 150.0);
    CHECK(std::abs(o.margins.incumbent_privileged_gain) < 1e-9);
    CHECK(o.margins.new_generation_revenue == 0.0);
    CHECK(o.margins.new_generation_min_margin == 0.0);
    // Kept revenue at 150 vs 90: (67 + 0.1x83) - (67 + 0.1x23) = 6 on 100 MWh.
    CHECK(o.margins.inframarginal_merchant_loss == doctest::Approx(600.0).epsilon(1e-9));
    // Forgone clawback: 0.9x83 - 0.9x23 = 54 on 100 MWh.
    CHECK(o.margins.system_income_loss == doctest::Approx(5400.0).epsilon(1e-9));
}

TEST_CASE("re-clearing undoes the subsidy and lets demand respond") {
    // Two compensated gas units behind free wind; an elastic industrial bid
    // at 130 caps what the market will pay once the subsidy is removed.
    HourRecord hr;
    hr.hour_id = "2022-07-02T20:00:00Z";
    hr.supply_offers = {
        so("wind", Technology::wind, 0.0, 80.0),
        so("gas_a", Technology::ccgt, 20.0, 50.0, true),
        so("gas_b", Technology::ccgt, 90.0, 100.0, true),
    };
    hr.demand_bids = {
        db("reg", 3000.0, 100.0, true),
        db("ind", 130.0, 60.0, false, SegmentKind::domestic_elastic),
    };
    hr.gc_per_mwh = 60.0;
    hr.dc_per_mwh = 20.0;
    hr.actual_price = 90.0;
    hr.affected_share_es = 0.6;

    const HourOutcome o = elastic_cf(hr);

    // Subsidized hour: gas_b marginal at 90, 160 MWh trades.
    CHECK(o.actual_price == 90.0);
    CHECK(o.actual_quantity == 160.0);
    CHECK(o.actual_privileged_mwh == 80.0);

    // Counterfactual: gas_a moves to 80, gas_b to 150, and the clearing
    // lands on the industrial bid at 130 in the gap between them.
    CHECK(o.cf_price == 130.0);
    CHECK(o.cf_quantity == 130.0);
    CHECK(o.cf_privileged_mwh == 50.0);
    CHECK(o.cf_demand_es == 130.0);
    CHECK(o.cf_marginal == Technology::ccgt);

    // gas_a runs in both worlds and banks (90 + 60 - 130) on 50 MWh; gas_b's
    // 30 MWh only exist under the scheme, worth 150/MWh of pure revenue and
    // zero margin over its own shifted price.
    CHECK(o.margins.incumbent_privileged_gain == 1000.0);
    CHECK(o.margins.new_generation_revenue == 4500.0);
    CHECK(o.margins.new_generation_min_margin == 0.0);
    CHECK(o.margins.inframarginal_merchant_loss == 0.0);
    CHECK(o.margins.system_income_loss == 0.0);

    CHECK(o.consumer_price_actual == 110.0);  // 90 + 20 of demand contribution
    CHECK(o.consumer_price_cf == 130.0);
}

TEST_CASE("the demand contribution shifts affected bids in the re-clearing") {
    // An affected bid at 49 cannot reach supply at 50; with the 10/MWh
    // contribution rolled into its willingness to pay it crosses.
    HourRecord hr;
    hr.hour_id = "2022-07-03T08:00:00Z";
    hr.supply_offers = {so("gas", Technology::ccgt, 50.0, 100.0, true)};
    hr.demand_bids = {db("aff", 49.0, 60.0, true, SegmentKind::domestic_elastic)};
    hr.gc_per_mwh = 0.0;
    hr.dc_per_mwh = 10.0;
    hr.actual_price = 49.0;
    hr.affected_share_es = 1.0;

    const HourOutcome o = elastic_cf(hr);
    CHECK(o.actual_quantity == 0.0);
    CHECK(o.cf_price == 50.0);
    CHECK(o.cf_quantity == 60.0);
}

TEST_CASE("re-clearing freezes border exchange at accepted volumes") {
    HourRecord hr;
    hr.hour_id = "2022-07-04T11:00:00Z";
    hr.supply_offers = {
        so("wind", Technology::wind, 0.0, 150.0, false, true),
        so("fr_in", Technology::import_block, 10.0, 30.0),
    };
    hr.demand_bids = {
        db("dom", 3000.0, 100.0, true),
        db("fr_out", 40.0, 60.0, false, SegmentKind::export_block),
    };
    hr.bid_country = {Country::ES, Country::FR};
    hr.gc_per_mwh = 0.0;
    hr.dc_per_mwh = 0.0;
    hr.actual_price = 10.0;
    hr.affected_share_es = 1.0;
    hr.interconnector = InterconnectorHour{80.0, 80.0, 40.0, 50.0};

    const HourOutcome base = elastic_cf(hr);
    // Subsidized hour: 60 exported, 10 imported, net +50 toward France.
    CHECK(base.actual_quantity == 160.0);
    CHECK(base.cf_flow == 50.0);
    // Recorded rent at the 30/MWh gap on the recorded 50 MWh flow.
    CHECK(base.actual_rent_spain == doctest::Approx(750.0).epsilon(1e-12));

    // The frozen border does not respond to the size of the compensation:
    // wind reprices from 0 to 20, the flow stays put.
    HourRecord shifted = hr;
    shifted.gc_per_mwh = 20.0;
    const HourOutcome moved = elastic_cf(shifted);
    CHECK(moved.cf_price == 20.0);
    CHECK(moved.cf_flow == 50.0);
    CHECK(moved.cf_quantity == base.cf_quantity);
}

namespace {

HourRecord coupled_fixture() {
    HourRecord hr;
    hr.hour_id = "2022-07-05T19:00:00Z";
    hr.supply_offers = {
        so("wind", Technology::wind, 0.0, 100.0),
        so("gas", Technology::ccgt, 90.0, 100.0, true),
        so("fr_in", Technology::import_block, 145.0, 30.0),
    };
    hr.demand_bids = {
        db("dom", 3000.0, 120.0, true),
        db("fr_out", 175.0, 40.0, false, SegmentKind::export_block),
    };
    hr.bid_country = {Country::ES, Country::FR};
    hr.gc_per_mwh = 60.0;
    hr.dc_per_mwh = 0.0;
    hr.actual_price = 90.0;
    hr.affected_share_es = 1.0;
    hr.interconnector = InterconnectorHour{80.0, 80.0, 200.0, 40.0};
    return hr;
}

}  // namespace

TEST_CASE("coupled scenario re-prices the border as a French price taker") {
    const HourRecord hr = coupled_fixture();
    const HourOutcome o = coupled_cf(hr);

    // Recorded hour exported 40 MWh through a block bid at 175.
    CHECK(o.actual_quantity == 160.0);
    CHECK(o.actual_flow == 40.0);

    // Counterfactually the gas unit moves to 150, France bids 200 behind an
    // 80 MWh capacity, and the line saturates toward the expensive side.
    CHECK(o.cf_price == 150.0);
    CHECK(o.cf_quantity == 200.0);
    CHECK(o.cf_flow == 80.0);
    CHECK(o.cf_privileged_mwh == 100.0);
    CHECK(o.cf_demand_es == 120.0);  // export blocks are not domestic demand

    // Congestion rent (200 - 150) x 80, half to the Iberian side.
    CHECK(o.cf_rent_total == doctest::Approx(4000.0).epsilon(1e-12));
    CHECK(o.cf_rent_spain == doctest::Approx(2000.0).epsilon(1e-12));

    // Headline treatment: rents are not credited to consumers.
    CHECK(o.consumer_price_cf == 150.0);
}

TEST_CASE("crediting counterfactual rents lowers the counterfactual bill") {
    const HourRecord hr = coupled_fixture();
    EngineOptions opt;
    opt.rents_in_cf = true;
    const HourOutcome o = coupled_cf(hr, opt);
    // 2,000 of Iberian rent over 120 MWh of fully affected demand.
    CHECK(o.consumer_price_cf ==
          doctest::Approx(150.0 - 2000.0 / 120.0).epsilon(1e-12));
}

TEST_CASE("coupled scenario requires border data") {
    HourRecord hr = coupled_fixture();
    hr.interconnector.reset();
    CHECK_THROWS_AS(coupled_cf(hr), DataError);
}

TEST_CASE("blanket repricing shifts unflagged storage too") {
    HourRecord hr;
    hr.hour_id = "2022-07-06T22:00:00Z";
    hr.supply_offers = {so("hyd", Technology::hydro_reservoir, 80.0, 100.0)};
    hr.demand_bids = {db("dom", 3000.0, 50.0, true)};
    hr.gc_per_mwh = 60.0;
    hr.dc_per_mwh = 0.0;
    hr.actual_price = 80.0;
    hr.affected_share_es = 1.0;

    CHECK(elastic_cf(hr).cf_price == 80.0);  // unflagged: not repriced

    EngineOptions blanket;
    blanket.blanket_hydro_shift = true;
    CHECK(elastic_cf(hr, blanket).cf_price == 140.0);
}

TEST_CASE("recomputing the compensation follows the reference schedule") {
    const auto make_hour = [](const char* id) {
        HourRecord hr;
        hr.hour_id = id;
        hr.supply_offers = {so("gas", Technology::ccgt, 50.0, 100.0, true)};
        hr.demand_bids = {db("load", 3000.0, 100.0, true)};
        hr.gc_per_mwh = 1.0;  // recorded series is ignored when recomputing
        hr.dc_per_mwh = 1.0;
        hr.actual_price = 50.0;
        hr.affected_share_es = 1.0;
        return hr;
    };
    const std::vector<HourRecord> recs = {
        make_hour("2022-06-15T00:00:00Z"),  // scheme month 1: reference 40
        make_hour("2022-12-15T00:00:00Z"),  // scheme month 7: reference 45
    };

    EngineOptions opt;
    opt.recompute_gc = true;
    opt.mibgas_price = 100.0;
    const ScenarioResult r = run_horizon(recs, Scenario::ministry, opt);

    CHECK(r.hours[0].gc == doctest::Approx(60.0 / 0.55).epsilon(1e-12));
    CHECK(r.hours[1].gc == doctest::Approx(100.0).epsilon(1e-12));
    // Fully affected single-buyer system: the contribution equals the
    // compensation (the whole cost lands on the same 100 MWh).
    CHECK(r.hours[0].dc == doctest::Approx(r.hours[0].gc).epsilon(1e-12));
    CHECK(r.hours[1].dc == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(r.hours[0].cf_price == doctest::Approx(50.0 + 60.0 / 0.55).epsilon(1e-12));

    // Deep in the schedule the reference is capped at 70.
    EngineOptions late = opt;
    late.recompute_month = 13;
    const HourOutcome o = ministry_cf(recs[0], late);
    CHECK(o.gc == doctest::Approx(30.0 / 0.55).epsilon(1e-12));
}

TEST_CASE("period-average demand contribution replaces the hourly track") {
    std::vector<HourRecord> recs;
    for (double dc : {10.0, 20.0, 30.0}) {
        HourRecord hr;
        hr.hour_id = "2022-08-0" + std::to_string(1 + recs.size()) + "T12:00:00Z";
        hr.supply_offers = {so("gas", Technology::ccgt, 50.0, 100.0, true)};
        hr.demand_bids = {db("load", 3000.0, 60.0, true)};
        hr.gc_per_mwh = 40.0;
        hr.dc_per_mwh = dc;
        hr.actual_price = 50.0;
        hr.affected_share_es = 1.0;
        recs.push_back(hr);
    }

    EngineOptions opt;
    opt.dc_period_average = true;
    const ScenarioResult r = run_horizon(recs, Scenario::ministry, opt);

    for (const HourOutcome& h : r.hours)
        CHECK(h.consumer_price_actual == doctest::Approx(70.0).epsilon(1e-12));
    // The hourly series itself is untouched.
    CHECK(r.hours[0].dc == 10.0);
    CHECK(r.hours[2].dc == 30.0);
    CHECK(r.agg.mean_consumer_actual == doctest::Approx(70.0).epsilon(1e-12));
}

TEST_CASE("vertical-demand horizons bridge the replay and the re-clearing") {
    GenSpec spec;
    spec.bridge_mode = true;
    spec.elastic_share = 0.0;
    spec.hours = 120;
    const std::vector<HourRecord> recs = generate_synthetic(spec, 0xb41d6e);

    REQUIRE(recs.size() == 120);
    for (const HourRecord& hr : recs) {
        const HourOutcome m = ministry_cf(hr);
        const HourOutcome e = elastic_cf(hr);
        CHECK(std::abs(m.cf_price - e.cf_price) <= 1e-6);
        CHECK(std::abs(m.cf_quantity - e.cf_quantity) <= 1e-6);
        CHECK(std::abs(m.consumer_price_cf - e.consumer_price_cf) <= 1e-6);
    }
}

TEST_CASE("scenarios order mean counterfactual prices") {
    GenSpec spec;
    spec.hours = 240;
    const std::vector<HourRecord> recs = generate_synthetic(spec, 0x5c34a10);

    const double ministry =
        run_horizon(recs, Scenario::ministry, {}).agg.mean_cf_price;
    const double elastic = run_horizon(recs, Scenario::elastic, {}).agg.mean_cf_price;
    const double coupled = run_horizon(recs, Scenario::coupled, {}).agg.mean_cf_price;

    CHECK(ministry >= elastic);
    CHECK(elastic >= coupled);
    // All three undo a positive subsidy, so all sit above the actual price.
    const double actual = run_horizon(recs, Scenario::ministry, {}).agg.mean_actual_price;
    CHECK(coupled > actual);
}

TEST_CASE("horizon runs are identical for any worker count") {
    GenSpec spec;
    spec.hours = 72;
    const std::vector<HourRecord> recs = generate_synthetic(spec, 0x7ead5);

    EngineOptions one;
    one.threads = 1;
    EngineOptions four;
    four.threads = 4;

    for (Scenario sc : {Scenario::ministry, Scenario::elastic, Scenario::coupled}) {
        const ScenarioResult a = run_horizon(recs, sc, one);
        const ScenarioResult b = run_horizon(recs, sc, four);
        REQUIRE(a.hours.size() == b.hours.size());
        for (std::size_t i = 0; i < a.hours.size(); ++i) {
            CHECK(a.hours[i].cf_price == b.hours[i].cf_price);
            CHECK(a.hours[i].cf_quantity == b.hours[i].cf_quantity);
            CHECK(a.hours[i].cf_flow == b.hours[i].cf_flow);
            CHECK(a.hours[i].cf_rent_spain == b.hours[i].cf_rent_spain);
            CHECK(a.hours[i].margins.new_generation_revenue ==
                  b.hours[i].margins.new_generation_revenue);
        }
        CHECK(a.agg.mean_cf_price == b.agg.mean_cf_price);
        CHECK(a.agg.mean_consumer_cf == b.agg.mean_consumer_cf);
        CHECK(a.agg.margin_totals.incumbent_privileged_gain ==
              b.agg.margin_totals.incumbent_privileged_gain);
    }
}

TEST_CASE("a failing hour aborts the horizon with its id") {
    GenSpec spec;
    spec.hours = 10;
    std::vector<HourRecord> recs = generate_synthetic(spec, 0xfa11);
    recs[3].demand_bids.clear();  // clearing will reject the empty curve
    recs[7].demand_bids.clear();

    for (int threads : {1, 4}) {
        EngineOptions opt;
        opt.threads = threads;
        try {
            run_horizon(recs, Scenario::elastic, opt);
            FAIL("expected the poisoned horizon to throw");
        } catch (const Error& e) {
            // The earliest failing hour wins regardless of interleaving.
            const std::string expected = "hour " + recs[3].hour_id + ":";
            CHECK(std::string(e.what()).rfind(expected, 0) == 0);
        }
    }
}

TEST_CASE("horizon aggregates are consistent with their hours") {
    GenSpec spec;
    spec.hours = 96;
    const std::vector<HourRecord> recs = generate_synthetic(spec, 0xa66);
    const ScenarioResult r = run_horizon(recs, Scenario::coupled, {});

    CHECK(r.agg.hours == 96);

    double price_sum = 0.0;
    for (const HourOutcome& h : r.hours) price_sum += h.cf_price;
    CHECK(r.agg.mean_cf_price ==
          doctest::Approx(price_sum / 96.0).epsilon(1e-9));

    double actual_share = 0.0;
    double cf_share = 0.0;
    for (const auto& [tech, share] : r.agg.marginal_actual) {
        CHECK(share.hours >= 1);
        actual_share += share.share;
    }
    for (const auto& [tech, share] : r.agg.marginal_cf) cf_share += share.share;
    CHECK(actual_share == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cf_share == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(r.agg.mean_affected_share_es == doctest::Approx(0.59).epsilon(1e-9));
    CHECK(r.agg.mean_affected_share_pt == doctest::Approx(0.35).epsilon(1e-9));
}

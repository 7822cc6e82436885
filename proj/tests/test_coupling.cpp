#include <doctest.h>

#include <cmath>
#include <vector>

#include "mibel/clearing.hpp"
#include "mibel/coupling.hpp"
#include "mibel/curve.hpp"
#include "mibel/errors.hpp"
#include "oracle.hpp"

using namespace mibel;

namespace {

// Domestic market plus the hour's border blocks, cleared together.
struct CoupledHour {
    std::vector<SupplyOffer> offers;
    std::vector<DemandBid> bids;
    ClearingResult result;
};

CoupledHour clear_with_border(std::vector<SupplyOffer> offers,
                              std::vector<DemandBid> bids,
                              const InterconnectorHour& ic) {
    const CouplingBlocks blocks = export_import_blocks(ic);
    if (blocks.import_offer) offers.push_back(*blocks.import_offer);
    if (blocks.export_bid) bids.push_back(*blocks.export_bid);
    ClearingResult r = clear(build_supply_curve(offers), build_demand_curve(bids));
    return {std::move(offers), std::move(bids), std::move(r)};
}

}  // namespace

TEST_CASE("border blocks mirror the hour's capacities at the French price") {
    const InterconnectorHour ic{2000.0, 1500.0, 250.0, 0.0};
    const CouplingBlocks blocks = export_import_blocks(ic);
    REQUIRE(blocks.export_bid.has_value());
    REQUIRE(blocks.import_offer.has_value());
    CHECK(blocks.export_bid->agent_id == kExportBlockId);
    CHECK(blocks.export_bid->price == 250.0);
    CHECK(blocks.export_bid->quantity == 2000.0);
    CHECK(blocks.export_bid->segment_kind == SegmentKind::export_block);
    CHECK_FALSE(blocks.export_bid->affected);
    CHECK(blocks.import_offer->unit_id == kImportBlockId);
    CHECK(blocks.import_offer->technology == Technology::import_block);
    CHECK(blocks.import_offer->price == 250.0);
    CHECK(blocks.import_offer->quantity == 1500.0);
    CHECK_FALSE(blocks.import_offer->privileged);
    CHECK_FALSE(blocks.import_offer->capped);

    const CouplingBlocks none = export_import_blocks({0.0, 0.0, 250.0, 0.0});
    CHECK_FALSE(none.export_bid.has_value());
    CHECK_FALSE(none.import_offer.has_value());
}

TEST_CASE("cheap domestic supply exports at full capacity") {
    std::vector<SupplyOffer> offers = {
        {"w", Technology::wind, 5.0, 8000.0, false, false, false},
        {"g", Technology::ccgt, 60.0, 4000.0, false, false, false},
    };
    std::vector<DemandBid> bids = {
        {"load", 3000.0, 6000.0, false, SegmentKind::domestic_inelastic}};
    const InterconnectorHour ic{2000.0, 2000.0, 200.0, 0.0};
    const CoupledHour hour = clear_with_border(offers, bids, ic);

    CHECK(hour.result.price < ic.french_price);
    const double flow = net_flow(hour.result, hour.offers, hour.bids, ic);
    CHECK(flow == 2000.0);  // export side saturated

    const RentAccount rent = congestion_rent(hour.result.price, ic, flow);
    CHECK(rent.rent_total ==
          doctest::Approx((200.0 - hour.result.price) * 2000.0));
    CHECK(rent.rent_spain == doctest::Approx(rent.rent_total / 2.0));
    CHECK(rent.rent_france == doctest::Approx(rent.rent_total / 2.0));
}

TEST_CASE("dear domestic supply imports at full capacity") {
    std::vector<SupplyOffer> offers = {
        {"g", Technology::ccgt, 180.0, 9000.0, false, false, false}};
    std::vector<DemandBid> bids = {
        {"load", 3000.0, 6000.0, false, SegmentKind::domestic_inelastic}};
    const InterconnectorHour ic{1500.0, 1500.0, 60.0, 0.0};
    const CoupledHour hour = clear_with_border(offers, bids, ic);

    CHECK(hour.result.price > ic.french_price);
    const double flow = net_flow(hour.result, hour.offers, hour.bids, ic);
    CHECK(flow == -1500.0);  // import side saturated
    const RentAccount rent = congestion_rent(hour.result.price, ic, flow);
    CHECK(rent.rent_total ==
          doctest::Approx((hour.result.price - 60.0) * 1500.0));
}

TEST_CASE("clearing at the French price means no net exchange by convention") {
    std::vector<SupplyOffer> offers = {
        {"g", Technology::ccgt, 100.0, 9000.0, false, false, false}};
    std::vector<DemandBid> bids = {
        {"load", 3000.0, 5000.0, false, SegmentKind::domestic_inelastic}};
    const InterconnectorHour ic{1000.0, 1000.0, 100.0, 0.0};
    const CoupledHour hour = clear_with_border(offers, bids, ic);
    CHECK(hour.result.price == 100.0);
    CHECK(net_flow(hour.result, hour.offers, hour.bids, ic) == 0.0);
    const RentAccount rent = congestion_rent(100.0, ic, 0.0);
    CHECK(rent.rent_total == 0.0);
}

TEST_CASE("worked rent split: 150 EUR gap on 2000 MWh") {
    const InterconnectorHour ic{2000.0, 2000.0, 250.0, 0.0};
    const RentAccount rent = congestion_rent(100.0, ic, 2000.0);
    CHECK(rent.rent_total == 300000.0);
    CHECK(rent.rent_spain == 150000.0);
    CHECK(rent.rent_france == 150000.0);
}

TEST_CASE("flow against the price gap is rejected, or zeroed for records") {
    const InterconnectorHour cheap_france{2000.0, 2000.0, 50.0, 1200.0};
    // France is cheaper yet the flow points toward France.
    CHECK_THROWS_AS(congestion_rent(120.0, cheap_france, 800.0),
                    DirectionMismatch);
    CHECK_THROWS_AS(congestion_rent(20.0, cheap_france, -800.0),
                    DirectionMismatch);

    const RentAccount tolerated = recorded_rent(120.0, cheap_france);
    CHECK(tolerated.rent_total == 0.0);
    CHECK(tolerated.rent_spain == 0.0);

    InterconnectorHour consistent = cheap_france;
    consistent.actual_flow = -900.0;
    const RentAccount rent = recorded_rent(120.0, consistent);
    CHECK(rent.rent_total == doctest::Approx(70.0 * 900.0));
}

TEST_CASE("coupled clearings satisfy flow-price complementarity") {
    oracle::GridGen gen(0xc0a91ed);
    int exports = 0, imports = 0, balanced = 0;
    for (int trial = 0; trial < 600; ++trial) {
        const auto s_segs = gen.side(8, 30);
        double total = 0.0;
        for (const auto& s : s_segs) total += s.qty;

        auto offers = oracle::to_offers(s_segs);
        std::vector<DemandBid> bids = {{"load", 3000.0, total / 2.0, false,
                                        SegmentKind::domestic_inelastic}};
        InterconnectorHour ic;
        ic.french_price = static_cast<double>(gen.irange(0, 30));
        ic.ntc_export = 0.25 * gen.irange(1, 8);
        ic.ntc_import = 0.25 * gen.irange(1, 8);

        const CoupledHour hour = clear_with_border(offers, bids, ic);
        const double flow = net_flow(hour.result, hour.offers, hour.bids, ic);

        if (hour.result.price < ic.french_price) {
            CHECK(flow == ic.ntc_export);
            ++exports;
        } else if (hour.result.price > ic.french_price) {
            CHECK(flow == -ic.ntc_import);
            ++imports;
        } else {
            CHECK(flow == 0.0);
            ++balanced;
        }
        // A consistent flow never trips the direction check.
        const RentAccount rent = congestion_rent(hour.result.price, ic, flow);
        CHECK(rent.rent_total >= 0.0);
        CHECK(rent.rent_total ==
              doctest::Approx(std::abs(ic.french_price - hour.result.price) *
                              std::abs(flow)));
    }
    CHECK(exports > 50);
    CHECK(imports > 50);
    CHECK(balanced > 0);
}

TEST_CASE("raising domestic offers weakly turns exports into imports") {
    oracle::GridGen gen(0x51f7ed);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s_segs = gen.side(8, 30);
        double total = 0.0;
        for (const auto& s : s_segs) total += s.qty;

        auto offers = oracle::to_offers(s_segs);
        std::vector<DemandBid> bids = {{"load", 3000.0, total / 2.0, false,
                                        SegmentKind::domestic_inelastic}};
        InterconnectorHour ic;
        ic.french_price = static_cast<double>(gen.irange(5, 25));
        ic.ntc_export = 2.0;
        ic.ntc_import = 2.0;

        double prev_flow = 1e300;
        for (double delta = 0.0; delta <= 12.0; delta += 3.0) {
            auto shifted = offers;
            for (auto& o : shifted) o.price += delta;
            const CoupledHour hour = clear_with_border(shifted, bids, ic);
            const double flow =
                net_flow(hour.result, hour.offers, hour.bids, ic);
            CHECK(flow <= prev_flow);
            prev_flow = flow;
        }
    }
}

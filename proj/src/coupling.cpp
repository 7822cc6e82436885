#include "mibel/coupling.hpp"

#include <cmath>

#include "mibel/errors.hpp"

namespace mibel {

namespace {

constexpr double kVolumeTol = 1e-6;  // MWh comparisons

RentAccount split_rent(double gap, double volume) {
    RentAccount r;
    r.rent_total = gap * volume;
    r.rent_spain = 0.5 * r.rent_total;
    r.rent_france = 0.5 * r.rent_total;
    return r;
}

}  // namespace

CouplingBlocks export_import_blocks(const InterconnectorHour& ic) {
    CouplingBlocks blocks;
    if (ic.ntc_export > 0.0) {
        blocks.export_bid = DemandBid{kExportBlockId, ic.french_price, ic.ntc_export,
                                      /*affected=*/false, SegmentKind::export_block};
    }
    if (ic.ntc_import > 0.0) {
        blocks.import_offer =
            SupplyOffer{kImportBlockId, Technology::import_block, ic.french_price,
                        ic.ntc_import, /*privileged=*/false,
                        /*gas_indexed=*/false, /*capped=*/false};
    }
    return blocks;
}

double net_flow(const ClearingResult& clearing, std::span<const SupplyOffer> offers,
                std::span<const DemandBid> bids, const InterconnectorHour& ic) {
    if (clearing.price == ic.french_price) return 0.0;

    double exported = 0.0;
    for (const auto& f : clearing.demand_fills) {
        if (f.source < bids.size() &&
            bids[f.source].segment_kind == SegmentKind::export_block)
            exported += f.mwh;
    }
    double imported = 0.0;
    for (const auto& f : clearing.supply_fills) {
        if (f.source < offers.size() &&
            offers[f.source].technology == Technology::import_block)
            imported += f.mwh;
    }

    const bool export_full = ic.ntc_export > 0.0 && exported >= ic.ntc_export - kVolumeTol;
    const bool import_full = ic.ntc_import > 0.0 && imported >= ic.ntc_import - kVolumeTol;
    if (export_full && import_full) {
        throw InternalInconsistency(
            "net_flow: both border directions fully accepted away from the French price");
    }
    return exported - imported;
}

RentAccount congestion_rent(double iberian_price, const InterconnectorHour& ic,
                            double flow) {
    const double gap = ic.french_price - iberian_price;
    if (gap == 0.0 || flow == 0.0) return split_rent(std::abs(gap), 0.0);
    if ((gap > 0.0 && flow < 0.0) || (gap < 0.0 && flow > 0.0)) {
        throw DirectionMismatch("congestion rent: flow runs against the price gap");
    }
    return split_rent(std::abs(gap), std::abs(flow));
}

RentAccount recorded_rent(double iberian_price, const InterconnectorHour& ic) {
    const double gap = ic.french_price - iberian_price;
    const double flow = ic.actual_flow;
    if ((gap > 0.0 && flow < 0.0) || (gap < 0.0 && flow > 0.0)) {
        return split_rent(0.0, 0.0);
    }
    return split_rent(std::abs(gap), std::abs(flow));
}

}  // namespace mibel

#include "mibel/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <utility>

#include "mibel/curve.hpp"
#include "mibel/errors.hpp"
#include "mibel/kernels.hpp"
#include "mibel/timeutil.hpp"

namespace mibel {

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
        case Scenario::ministry: return "ministry";
        case Scenario::elastic: return "elastic";
        case Scenario::coupled: return "coupled";
    }
    return "?";
}

std::optional<Scenario> scenario_from_string(std::string_view s) noexcept {
    if (s == "ministry") return Scenario::ministry;
    if (s == "elastic") return Scenario::elastic;
    if (s == "coupled") return Scenario::coupled;
    return std::nullopt;
}

namespace {

// Re-cleared recorded curves plus the accepted volumes the engines care about.
struct ActualSide {
    ClearingResult clearing;
    double demand_es = 0.0;
    double demand_pt = 0.0;
    double privileged = 0.0;
    double imported = 0.0;
};

ActualSide clear_actual(const HourRecord& hr) {
    ActualSide a;
    a.clearing = clear(build_supply_curve(hr.supply_offers),
                       build_demand_curve(hr.demand_bids));
    for (const auto& f : a.clearing.demand_fills) {
        const DemandBid& bid = hr.demand_bids[f.source];
        if (bid.segment_kind == SegmentKind::export_block) continue;
        const Country c =
            f.source < hr.bid_country.size() ? hr.bid_country[f.source] : Country::ES;
        if (c == Country::ES) a.demand_es += f.mwh;
        else if (c == Country::PT) a.demand_pt += f.mwh;
    }
    for (const auto& f : a.clearing.supply_fills) {
        const SupplyOffer& offer = hr.supply_offers[f.source];
        if (offer.privileged) a.privileged += f.mwh;
        if (offer.technology == Technology::import_block) a.imported += f.mwh;
    }
    return a;
}

double share_weighted_affected(const HourRecord& hr, const ActualSide& a) {
    return a.demand_es * hr.affected_share_es + a.demand_pt * hr.affected_share_pt +
           hr.morocco_demand;
}

struct Applied {
    double gc;
    double dc;
};

Applied applied_contributions(const HourRecord& hr, const ActualSide& a,
                              const EngineOptions& opt, double affected_volume) {
    if (!opt.recompute_gc) return {hr.gc_per_mwh, hr.dc_per_mwh};
    const double ref = gas_reference_price(opt.recompute_month, opt.params);
    const double gc =
        generation_contribution(opt.mibgas_price, ref, opt.params.efficiency);
    double rent_spain = 0.0;
    if (hr.interconnector)
        rent_spain = recorded_rent(hr.actual_price, *hr.interconnector).rent_spain;
    const double total_gc = gc * a.privileged;
    double dc = 0.0;
    if (affected_volume > 0.0)
        dc = demand_contribution(total_gc, std::min(rent_spain, total_gc),
                                 affected_volume);
    return {gc, dc};
}

HourOutcome make_base(const HourRecord& hr, const ActualSide& a, double gc, double dc) {
    HourOutcome o;
    o.hour_id = hr.hour_id;
    o.actual_price = hr.actual_price;
    o.gc = gc;
    o.dc = dc;
    o.actual_quantity = a.clearing.quantity;
    o.actual_demand_es = a.demand_es;
    o.actual_demand_pt = a.demand_pt;
    o.actual_privileged_mwh = a.privileged;
    o.actual_marginal = a.clearing.marginal_technology;
    o.has_interconnector = hr.interconnector.has_value();
    if (hr.interconnector) {
        o.french_price = hr.interconnector->french_price;
        o.actual_flow = hr.interconnector->actual_flow;
        o.actual_rent_spain = recorded_rent(hr.actual_price, *hr.interconnector).rent_spain;
    }
    o.affected_volume = share_weighted_affected(hr, a);
    o.consumer_price_actual = hr.actual_price + dc;
    return o;
}

struct CfHour {
    std::vector<SupplyOffer> offers;
    std::vector<DemandBid> bids;
    std::vector<Country> countries;
};

// Build the counterfactual hour.  Domestic supply segments keep their source
// indices (the margin decomposition matches volumes through them); border
// segments are transformed in place, so nothing shifts position.  Segments
// that must not trade are parked at a price no counterpart ever crosses.
CfHour build_cf_hour(const HourRecord& hr, const ActualSide& a, Scenario sc, double gc,
                     double dc, const EngineOptions& opt) {
    CfHour b;
    b.offers = hr.supply_offers;
    b.bids = hr.demand_bids;
    b.countries = hr.bid_country;
    b.countries.resize(b.bids.size(), Country::ES);
    const double ceiling = opt.params.demand_ceiling;
    const double parked = ceiling * 16.0;

    for (std::size_t i = 0; i < b.offers.size(); ++i) {
        if (b.offers[i].technology != Technology::import_block) continue;
        if (sc == Scenario::elastic) {
            // Trade frozen: accepted import volume runs as a price taker at
            // the floor, the rest never dispatches.
            const double accepted =
                a.clearing.supply_fill_of(static_cast<std::uint32_t>(i));
            if (accepted > 0.0) {
                b.offers[i].price = 0.0;
                b.offers[i].quantity = accepted;
            } else {
                b.offers[i].price = parked;
            }
        } else {
            b.offers[i].price = parked;  // replaced by the canonical block below
        }
    }
    for (std::size_t i = 0; i < b.bids.size(); ++i) {
        if (b.bids[i].segment_kind != SegmentKind::export_block) continue;
        if (sc == Scenario::elastic) {
            const double accepted =
                a.clearing.demand_fill_of(static_cast<std::uint32_t>(i));
            if (accepted > 0.0) {
                b.bids[i].price = ceiling;
                b.bids[i].quantity = accepted;
            } else {
                b.bids[i].price = 0.0;
            }
        } else {
            b.bids[i].price = 0.0;
        }
    }
    if (sc == Scenario::coupled) {
        const CouplingBlocks blocks = export_import_blocks(*hr.interconnector);
        if (blocks.import_offer) b.offers.push_back(*blocks.import_offer);
        if (blocks.export_bid) {
            b.bids.push_back(*blocks.export_bid);
            b.countries.push_back(Country::FR);
        }
    }

    // Compensation shifts eligible offers up; the demand contribution shifts
    // affected bids up.  One vectorized pass each.
    {
        std::vector<double> prices(b.offers.size());
        std::vector<std::uint8_t> mask(b.offers.size());
        for (std::size_t i = 0; i < b.offers.size(); ++i) {
            const SupplyOffer& o = b.offers[i];
            prices[i] = o.price;
            const bool eligible =
                !o.capped && o.technology != Technology::import_block &&
                o.price < parked &&
                (opt.blanket_hydro_shift || o.privileged || o.gas_indexed);
            mask[i] = eligible ? 1 : 0;
        }
        kernels::shift_where(prices, mask, gc, 0.0);
        for (std::size_t i = 0; i < b.offers.size(); ++i) b.offers[i].price = prices[i];
    }
    {
        std::vector<double> prices(b.bids.size());
        std::vector<std::uint8_t> mask(b.bids.size());
        for (std::size_t i = 0; i < b.bids.size(); ++i) {
            prices[i] = b.bids[i].price;
            mask[i] = b.bids[i].affected ? 1 : 0;
        }
        kernels::shift_where(prices, mask, dc, 0.0);
        for (std::size_t i = 0; i < b.bids.size(); ++i) b.bids[i].price = prices[i];
    }
    return b;
}

HourOutcome run_recleared(const HourRecord& hr, Scenario sc, const EngineOptions& opt) {
    if (sc == Scenario::coupled && !hr.interconnector) {
        throw DataError(DataError::Kind::missing_interconnector,
                        "coupled scenario needs border data for every hour");
    }
    const ActualSide a = clear_actual(hr);
    const auto [gc, dc] =
        applied_contributions(hr, a, opt, share_weighted_affected(hr, a));
    HourOutcome o = make_base(hr, a, gc, dc);

    const CfHour b = build_cf_hour(hr, a, sc, gc, dc, opt);
    const ClearingResult cf =
        clear(build_supply_curve(b.offers), build_demand_curve(b.bids));

    o.cf_price = cf.price;
    o.cf_quantity = cf.quantity;
    o.cf_marginal = cf.marginal_technology;
    double exported = 0.0;
    double imported = 0.0;
    for (const auto& f : cf.demand_fills) {
        const DemandBid& bid = b.bids[f.source];
        if (bid.segment_kind == SegmentKind::export_block) {
            exported += f.mwh;
            continue;
        }
        const Country c = b.countries[f.source];
        if (c == Country::ES) o.cf_demand_es += f.mwh;
        else if (c == Country::PT) o.cf_demand_pt += f.mwh;
    }
    for (const auto& f : cf.supply_fills) {
        const SupplyOffer& offer = b.offers[f.source];
        if (offer.privileged) o.cf_privileged_mwh += f.mwh;
        if (offer.technology == Technology::import_block) imported += f.mwh;
    }

    if (sc == Scenario::coupled) {
        o.cf_flow = net_flow(cf, b.offers, b.bids, *hr.interconnector);
        const RentAccount rent = congestion_rent(cf.price, *hr.interconnector, o.cf_flow);
        o.cf_rent_total = rent.rent_total;
        o.cf_rent_spain = rent.rent_spain;
    } else {
        o.cf_flow = exported - imported;
    }

    o.consumer_price_cf = cf.price;
    if (opt.rents_in_cf && o.cf_rent_spain > 0.0) {
        const double affected_cf = o.cf_demand_es * hr.affected_share_es +
                                   o.cf_demand_pt * hr.affected_share_pt +
                                   hr.morocco_demand;
        if (affected_cf > 0.0) o.consumer_price_cf -= o.cf_rent_spain / affected_cf;
    }

    o.margins = margin_decomposition(a.clearing, hr.supply_offers, gc, cf, b.offers,
                                     opt.params);
    return o;
}

void aggregate(ScenarioResult& r) {
    Aggregates& g = r.agg;
    g.hours = r.hours.size();
    if (g.hours == 0) return;
    const double n = static_cast<double>(g.hours);

    std::vector<double> col(r.hours.size());
    const auto mean = [&](auto getter) {
        for (std::size_t i = 0; i < r.hours.size(); ++i) col[i] = getter(r.hours[i]);
        return kernels::sum(col) / n;
    };
    g.mean_actual_price = mean([](const HourOutcome& h) { return h.actual_price; });
    g.mean_cf_price = mean([](const HourOutcome& h) { return h.cf_price; });
    g.mean_gc = mean([](const HourOutcome& h) { return h.gc; });
    g.mean_dc = mean([](const HourOutcome& h) { return h.dc; });
    g.mean_consumer_actual =
        mean([](const HourOutcome& h) { return h.consumer_price_actual; });
    g.mean_consumer_cf = mean([](const HourOutcome& h) { return h.consumer_price_cf; });
    g.mean_demand_es_actual =
        mean([](const HourOutcome& h) { return h.actual_demand_es; });
    g.mean_demand_es_cf = mean([](const HourOutcome& h) { return h.cf_demand_es; });
    g.mean_demand_pt_actual =
        mean([](const HourOutcome& h) { return h.actual_demand_pt; });
    g.mean_demand_pt_cf = mean([](const HourOutcome& h) { return h.cf_demand_pt; });
    g.mean_privileged_actual =
        mean([](const HourOutcome& h) { return h.actual_privileged_mwh; });
    g.mean_privileged_cf = mean([](const HourOutcome& h) { return h.cf_privileged_mwh; });
    g.mean_actual_rent_spain =
        mean([](const HourOutcome& h) { return h.actual_rent_spain; });
    g.mean_cf_rent_spain = mean([](const HourOutcome& h) { return h.cf_rent_spain; });
    g.mean_actual_flow = mean([](const HourOutcome& h) { return h.actual_flow; });
    g.mean_cf_flow = mean([](const HourOutcome& h) { return h.cf_flow; });

    for (const HourOutcome& h : r.hours) {
        if (h.has_interconnector) {
            if (h.french_price < h.actual_price) g.hours_french_below_actual += 1;
            if (h.french_price < h.cf_price) g.hours_french_below_cf += 1;
        }
        if ((h.actual_flow > 0.0 && h.cf_flow < 0.0) ||
            (h.actual_flow < 0.0 && h.cf_flow > 0.0))
            g.hours_flow_reversed += 1;
        g.margin_totals += h.margins;
        g.marginal_actual[h.actual_marginal].hours += 1;
        g.marginal_cf[h.cf_marginal].hours += 1;
    }
    for (auto& [tech, share] : g.marginal_actual)
        share.share = share.hours / n;
    for (auto& [tech, share] : g.marginal_cf)
        share.share = share.hours / n;
}

}  // namespace

HourOutcome ministry_cf(const HourRecord& hr, const EngineOptions& opt) {
    const ActualSide a = clear_actual(hr);
    const auto [gc, dc] =
        applied_contributions(hr, a, opt, share_weighted_affected(hr, a));
    HourOutcome o = make_base(hr, a, gc, dc);
    o.cf_price = hr.actual_price + gc;
    o.cf_quantity = o.actual_quantity;
    o.cf_demand_es = o.actual_demand_es;
    o.cf_demand_pt = o.actual_demand_pt;
    o.cf_privileged_mwh = o.actual_privileged_mwh;
    o.cf_marginal = o.actual_marginal;
    o.cf_flow = o.actual_flow;
    o.consumer_price_cf = o.cf_price;
    // Same dispatch at the undone price: only cap-related margins move.
    ClearingResult frozen = a.clearing;
    frozen.price = o.cf_price;
    o.margins = margin_decomposition(a.clearing, hr.supply_offers, gc, frozen,
                                     hr.supply_offers, opt.params);
    return o;
}

HourOutcome elastic_cf(const HourRecord& hr, const EngineOptions& opt) {
    return run_recleared(hr, Scenario::elastic, opt);
}

HourOutcome coupled_cf(const HourRecord& hr, const EngineOptions& opt) {
    return run_recleared(hr, Scenario::coupled, opt);
}

ScenarioResult run_horizon(std::span<const HourRecord> records, Scenario scenario,
                           const EngineOptions& opt) {
    ScenarioResult result;
    result.scenario = scenario;
    result.hours.resize(records.size());
    if (records.empty()) return result;

    std::vector<int> scheme_month(records.size(), 1);
    if (opt.recompute_gc) {
        const auto start = parse_hour_id(records.front().hour_id);
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto t = parse_hour_id(records[i].hour_id);
            scheme_month[i] = (start && t) ? months_between(*start, *t) + 1 : 1;
        }
    }

    const int workers =
        std::max(1, std::min({opt.threads, 64, static_cast<int>(records.size())}));
    struct Failure {
        std::size_t index;
        std::exception_ptr error;
    };
    std::vector<Failure> failures(static_cast<std::size_t>(workers),
                                  {records.size(), nullptr});

    const auto work = [&](int w) {
        for (std::size_t i = static_cast<std::size_t>(w); i < records.size();
             i += static_cast<std::size_t>(workers)) {
            try {
                EngineOptions local = opt;
                local.recompute_month = scheme_month[i];
                switch (scenario) {
                    case Scenario::ministry:
                        result.hours[i] = ministry_cf(records[i], local);
                        break;
                    case Scenario::elastic:
                        result.hours[i] = elastic_cf(records[i], local);
                        break;
                    case Scenario::coupled:
                        result.hours[i] = coupled_cf(records[i], local);
                        break;
                }
            } catch (const std::exception& e) {
                failures[static_cast<std::size_t>(w)] = {
                    i, std::make_exception_ptr(
                           Error("hour " + records[i].hour_id + ": " + e.what()))};
                return;
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    // Earliest failing hour wins regardless of worker interleaving.
    const Failure* first = nullptr;
    for (const Failure& f : failures) {
        if (f.error && (!first || f.index < first->index)) first = &f;
    }
    if (first) std::rethrow_exception(first->error);

    if (opt.dc_period_average) {
        std::vector<double> dcs(result.hours.size());
        for (std::size_t i = 0; i < result.hours.size(); ++i) dcs[i] = result.hours[i].dc;
        const double mean_dc = kernels::sum(dcs) / static_cast<double>(dcs.size());
        for (HourOutcome& h : result.hours)
            h.consumer_price_actual = h.actual_price + mean_dc;
    }

    aggregate(result);

    // Shares live on the records, not the outcomes.
    std::vector<double> share(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) share[i] = records[i].affected_share_es;
    result.agg.mean_affected_share_es =
        kernels::sum(share) / static_cast<double>(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) share[i] = records[i].affected_share_pt;
    result.agg.mean_affected_share_pt =
        kernels::sum(share) / static_cast<double>(records.size());
    std::vector<double> morocco(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) morocco[i] = records[i].morocco_demand;
    result.agg.mean_morocco =
        kernels::sum(morocco) / static_cast<double>(records.size());

    return result;
}

}  // namespace mibel

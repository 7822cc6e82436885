#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mibel/accounting.hpp"
#include "mibel/coupling.hpp"
#include "mibel/mechanism.hpp"
#include "mibel/types.hpp"

namespace mibel {

// Everything recorded about one delivery hour: the submitted curves, the
// applied subsidy series, and border data when available.  bid_country runs
// parallel to demand_bids.
struct HourRecord {
    std::string hour_id;
    std::vector<SupplyOffer> supply_offers;
    std::vector<DemandBid> demand_bids;
    std::vector<Country> bid_country;
    double gc_per_mwh = 0.0;
    double dc_per_mwh = 0.0;
    double actual_price = 0.0;  // recorded outcome, EUR/MWh
    std::optional<InterconnectorHour> interconnector;
    double affected_share_es = 0.0;
    double affected_share_pt = 0.0;
    double morocco_demand = 0.0;  // MWh of affected Moroccan offtake
};

enum class Scenario { ministry, elastic, coupled };

std::string_view to_string(Scenario s) noexcept;
std::optional<Scenario> scenario_from_string(std::string_view s) noexcept;

struct EngineOptions {
    MechanismParams params{};
    // Credit counterfactual congestion rents against the counterfactual
    // consumer price (sensitivity switch; default off, matching the headline
    // treatment that drops rents from the counterfactual).
    bool rents_in_cf = false;
    // Derive the generation contribution from gas prices instead of using
    // the recorded series.
    bool recompute_gc = false;
    double mibgas_price = 100.0;  // flat gas price for recompute_gc, EUR/MWh
    int recompute_month = 1;      // scheme month for single-hour calls
    // Shift every non-capped offer instead of only flagged segments.
    bool blanket_hydro_shift = false;
    // Replace the hourly demand contribution with its horizon mean in the
    // consumer price track.
    bool dc_period_average = false;
    int threads = 1;
};

// Outcome of one hour under a scenario, next to the recorded actuals.
struct HourOutcome {
    std::string hour_id;

    double actual_price = 0.0;  // recorded
    double gc = 0.0;            // applied generation contribution
    double dc = 0.0;            // applied demand contribution
    double actual_quantity = 0.0;
    double actual_demand_es = 0.0;
    double actual_demand_pt = 0.0;
    double actual_privileged_mwh = 0.0;
    Technology actual_marginal = Technology::other;
    bool has_interconnector = false;
    double french_price = 0.0;
    double actual_flow = 0.0;
    double actual_rent_spain = 0.0;  // EUR in this hour

    double cf_price = 0.0;
    double cf_quantity = 0.0;
    double cf_demand_es = 0.0;
    double cf_demand_pt = 0.0;
    double cf_privileged_mwh = 0.0;
    Technology cf_marginal = Technology::other;
    double cf_flow = 0.0;
    double cf_rent_total = 0.0;
    double cf_rent_spain = 0.0;

    double consumer_price_actual = 0.0;  // recorded price + demand contribution
    double consumer_price_cf = 0.0;
    double affected_volume = 0.0;  // share-weighted ES+PT demand plus Morocco
    MarginDecomposition margins;   // EUR in this hour
};

struct Aggregates {
    std::size_t hours = 0;
    double mean_actual_price = 0.0;
    double mean_cf_price = 0.0;
    double mean_gc = 0.0;
    double mean_dc = 0.0;
    double mean_consumer_actual = 0.0;
    double mean_consumer_cf = 0.0;
    double mean_demand_es_actual = 0.0;
    double mean_demand_es_cf = 0.0;
    double mean_demand_pt_actual = 0.0;
    double mean_demand_pt_cf = 0.0;
    double mean_morocco = 0.0;
    double mean_affected_share_es = 0.0;
    double mean_affected_share_pt = 0.0;
    double mean_privileged_actual = 0.0;
    double mean_privileged_cf = 0.0;
    double mean_actual_rent_spain = 0.0;  // EUR/h
    double mean_cf_rent_spain = 0.0;
    double mean_actual_flow = 0.0;
    double mean_cf_flow = 0.0;
    int hours_french_below_actual = 0;
    int hours_french_below_cf = 0;
    int hours_flow_reversed = 0;
    MarginDecomposition margin_totals;  // EUR over the horizon
    std::map<Technology, TechnologyShare> marginal_actual;
    std::map<Technology, TechnologyShare> marginal_cf;
};

struct ScenarioResult {
    Scenario scenario = Scenario::ministry;
    std::vector<HourOutcome> hours;
    Aggregates agg;
};

// The administrative replay: counterfactual price = recorded price plus the
// hourly compensation, volumes and trade frozen at their recorded values.
HourOutcome ministry_cf(const HourRecord& hr, const EngineOptions& opt = {});

// Full re-clearing with subsidy-eligible offers shifted up by the
// compensation and affected bids shifted up by the demand contribution;
// border exchanges held at their accepted volumes.
HourOutcome elastic_cf(const HourRecord& hr, const EngineOptions& opt = {});

// As elastic_cf, but the border is re-priced: France trades as a price taker
// within the hour's capacities, so flows and congestion rents respond to the
// counterfactual price.
HourOutcome coupled_cf(const HourRecord& hr, const EngineOptions& opt = {});

// Run a scenario across a horizon.  Hours are independent and may be
// processed by several workers; results and aggregates are reduced in hour
// order, so output is identical for any worker count.  A failing hour aborts
// the run with the hour id in the error message.
ScenarioResult run_horizon(std::span<const HourRecord> records, Scenario scenario,
                           const EngineOptions& opt = {});

}  // namespace mibel

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mibel/accounting.hpp"
#include "mibel/scenario.hpp"

namespace mibel {

// Everything the report emitters need, reduced from a scenario run: price
// tracks, period economics in exact cents, the producer-margin split, and a
// set of notes flagging figures whose published counterparts are internally
// inconsistent.
struct ImpactReport {
    Scenario scenario = Scenario::ministry;
    std::size_t hours = 0;

    // Hourly means, EUR/MWh.
    double wholesale_actual = 0.0;
    double wholesale_cf = 0.0;
    double wholesale_delta = 0.0;  // cf - actual
    double wholesale_pct = 0.0;    // delta relative to actual, percent
    double dc_mean = 0.0;
    double consumer_actual = 0.0;  // wholesale + demand contribution
    double consumer_cf = 0.0;
    double consumer_delta = 0.0;  // cf - actual: positive = scheme saved money
    double consumer_pct = 0.0;

    // Hourly mean served demand, MWh.
    double demand_es_actual = 0.0;
    double demand_es_cf = 0.0;
    double demand_es_pct = 0.0;
    double demand_pt_actual = 0.0;
    double demand_pt_cf = 0.0;
    double demand_pt_pct = 0.0;

    // Headline consumer-saving product: per-MWh saving x mean hourly Spanish
    // demand gives EUR per hour; the period figure is that times hours.
    double saving_per_mwh = 0.0;
    double headline_eur_per_hour = 0.0;
    Money headline_total;

    // Period consumer bills by geography (positive = scheme cost money).
    Money consumer_cost_es;
    Money consumer_cost_pt;

    // Congestion-rent funding of the demand charge.
    double dc_relief_per_mwh = 0.0;
    Money rent_funding_es;
    Money rent_funding_pt;
    Money rent_funding_ma;
    RentSummary rents_spain;

    // Dispatch, emissions, and gas burn deltas (actual minus counterfactual).
    double delta_fossil_mwh_per_hour = 0.0;
    EmissionsGas emissions_per_hour;
    double co2_total_tonnes = 0.0;
    double gas_total_mwh = 0.0;

    MarginDecomposition margin_totals;  // EUR over the horizon

    // Make-whole payments to regulated renewables are out of model; the flag
    // is emitted so downstream consumers know the column is absent, not zero.
    bool regulated_renewables_makeup_modeled = false;

    std::vector<std::pair<std::string, double>> marginal_share_actual;
    std::vector<std::pair<std::string, double>> marginal_share_cf;

    std::vector<std::string> notes;
};

ImpactReport build_impact_report(const ScenarioResult& result,
                                 const EngineOptions& opt);

// Flat field/value summary; the CSV and JSON emitters agree field for field.
void write_summary_csv(const ImpactReport& report, std::ostream& out);
nlohmann::json summary_json(const ImpactReport& report);

// Per-hour price tracks next to the border series.
void write_series_csv(const ScenarioResult& result, std::ostream& out);

// Write summary.csv, summary.json, and hourly_series.csv under `dir`.
void emit_report(const ScenarioResult& result, const EngineOptions& opt,
                 const std::filesystem::path& dir);

// Side-by-side comparison of several summary.json payloads, keyed by
// scenario name.
nlohmann::json merge_reports(std::span<const nlohmann::json> summaries);
void write_merged_csv(const nlohmann::json& merged, std::ostream& out);

}  // namespace mibel

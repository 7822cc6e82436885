#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mibel/clearing.hpp"
#include "mibel/config.hpp"
#include "mibel/dataset.hpp"
#include "mibel/errors.hpp"
#include "mibel/report.hpp"
#include "mibel/scenario.hpp"
#include "mibel/synth.hpp"

namespace {

using namespace mibel;

int run_clear(const std::string& input, const std::string& hour) {
    const auto hours = parse_dataset_file(input);
    const HourRecord* record = nullptr;
    for (const HourRecord& r : hours)
        if (r.hour_id == hour) record = &r;
    if (!record)
        throw DataError(DataError::Kind::bad_row,
                        "hour '" + hour + "' not found in " + input);

    const ClearingResult res = clear(build_supply_curve(record->supply_offers),
                                     build_demand_curve(record->demand_bids));
    std::printf("hour %s\n", record->hour_id.c_str());
    std::printf("price_eur_mwh %.2f\n", res.price);
    std::printf("quantity_mwh %.3f\n", res.quantity);
    std::printf("marginal_technology %s\n",
                std::string(to_string(res.marginal_technology)).c_str());
    std::printf("rationed_at_price %d\n", res.rationed_at_price ? 1 : 0);
    std::printf("supply_segments_accepted %zu\n", res.supply_fills.size());
    std::printf("demand_segments_served %zu\n", res.demand_fills.size());
    return 0;
}

int run_validate(const std::string& input, const RunConfig& cfg) {
    const auto hours = parse_dataset_file(input);
    const ValidationReport report = validate_dataset(hours, cfg.price_tolerance);
    std::printf("hours %zu\n", report.hours);
    std::printf("tolerance_eur_mwh %.4f\n", report.tolerance);
    std::printf("max_abs_gap_eur_mwh %.6f\n", report.max_abs_gap);
    std::printf("deviations %zu\n", report.deviations.size());
    std::size_t shown = 0;
    for (const PriceDeviation& d : report.deviations) {
        if (++shown > 20) {
            std::printf("... %zu more\n", report.deviations.size() - 20);
            break;
        }
        std::printf("hour %s cleared %.4f recorded %.4f gap %.4f\n",
                    d.hour_id.c_str(), d.cleared_price, d.recorded_price,
                    d.abs_gap);
    }
    return 0;
}

int run_synth(const std::string& out, std::uint64_t seed,
              const std::string& spec_path, int hours_override,
              bool bridge_override) {
    GenSpec spec;
    if (!spec_path.empty()) spec = load_gen_spec(spec_path);
    if (hours_override > 0) spec.hours = hours_override;
    if (bridge_override) spec.bridge_mode = true;
    const auto records = generate_synthetic(spec, seed);
    write_dataset_file(records, out);
    std::printf("wrote %zu hours to %s\n", records.size(), out.c_str());
    return 0;
}

int run_cf(const std::string& input, const std::string& scenario_name,
           const RunConfig& cfg, const std::string& outdir, int threads,
           bool recompute_gc) {
    Scenario scenario = cfg.scenario;
    if (!scenario_name.empty()) {
        const auto s = scenario_from_string(scenario_name);
        if (!s)
            throw ConfigError("unknown scenario '" + scenario_name +
                              "' (expected ministry, elastic, or coupled)");
        scenario = *s;
    }
    EngineOptions opt = cfg.engine_options();
    if (threads > 0) opt.threads = threads;
    if (recompute_gc) opt.recompute_gc = true;

    const auto records = parse_dataset_file(input);
    const ScenarioResult result = run_horizon(records, scenario, opt);

    const ImpactReport report = build_impact_report(result, opt);
    if (cfg.output_format == "json")
        std::cout << summary_json(report).dump(2) << '\n';
    else
        write_summary_csv(report, std::cout);

    if (!outdir.empty()) emit_report(result, opt, outdir);
    return 0;
}

int run_merge(const std::vector<std::string>& inputs, const std::string& outdir) {
    std::vector<nlohmann::json> summaries;
    summaries.reserve(inputs.size());
    for (const std::string& path : inputs)
        summaries.push_back(load_json_file(path));
    const nlohmann::json merged = merge_reports(summaries);
    if (outdir.empty()) {
        write_merged_csv(merged, std::cout);
    } else {
        std::error_code ec;
        std::filesystem::create_directories(outdir, ec);
        if (ec) throw IoError("cannot create " + outdir + ": " + ec.message());
        std::ofstream jout(std::filesystem::path(outdir) / "merged.json");
        if (!jout) throw IoError("cannot write merged.json under " + outdir);
        jout << merged.dump(2) << '\n';
        std::ofstream cout_file(std::filesystem::path(outdir) / "merged.csv");
        if (!cout_file) throw IoError("cannot write merged.csv under " + outdir);
        write_merged_csv(merged, cout_file);
        std::printf("wrote merged.json and merged.csv to %s\n", outdir.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iberian day-ahead market simulator: uniform-price clearing, "
                 "gas-cap mechanism arithmetic, and counterfactual scenarios"};
    app.require_subcommand(1);

    std::string input, hour, config_path, scenario, outdir, spec_path;
    std::uint64_t seed = 1;
    int threads = 0;
    int hours_override = 0;
    bool bridge = false;
    bool recompute_gc = false;
    std::vector<std::string> merge_inputs;

    CLI::App* c_clear = app.add_subcommand("clear", "Clear one recorded hour");
    c_clear->add_option("--input", input, "dataset CSV")->required();
    c_clear->add_option("--hour", hour, "hour id, e.g. 2022-06-15T10:00:00Z")
        ->required();

    CLI::App* c_validate = app.add_subcommand(
        "validate", "Re-clear every hour and compare with recorded prices");
    c_validate->add_option("--input", input, "dataset CSV")->required();
    c_validate->add_option("--config", config_path, "run configuration JSON");

    CLI::App* c_synth =
        app.add_subcommand("synth", "Generate a deterministic synthetic dataset");
    c_synth->add_option("--out", outdir, "output CSV path")->required();
    c_synth->add_option("--seed", seed, "generator seed");
    c_synth->add_option("--spec", spec_path, "generator spec JSON");
    c_synth->add_option("--hours", hours_override, "override horizon length");
    c_synth->add_flag("--bridge", bridge,
                      "degenerate horizon on which frozen replay and full "
                      "re-clearing coincide");

    CLI::App* c_cf =
        app.add_subcommand("cf", "Run a counterfactual scenario over a dataset");
    c_cf->add_option("--input", input, "dataset CSV")->required();
    c_cf->add_option("--scenario", scenario,
                     "ministry, elastic, or coupled (overrides config)");
    c_cf->add_option("--config", config_path, "run configuration JSON");
    c_cf->add_option("--out", outdir,
                     "directory for summary.csv/summary.json/hourly_series.csv");
    c_cf->add_option("--threads", threads, "worker count (default 1)");
    c_cf->add_flag("--recompute-gc", recompute_gc,
                   "derive the compensation from gas prices instead of the "
                   "recorded series");

    CLI::App* c_merge = app.add_subcommand(
        "report-merge", "Combine several summary.json files side by side");
    c_merge->add_option("inputs", merge_inputs, "summary.json paths")
        ->required()
        ->expected(-1);
    c_merge->add_option("--out", outdir, "directory for merged.json/merged.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_run_config(config_path);

        if (app.got_subcommand(c_clear)) return run_clear(input, hour);
        if (app.got_subcommand(c_validate)) return run_validate(input, cfg);
        if (app.got_subcommand(c_synth))
            return run_synth(outdir, seed, spec_path, hours_override, bridge);
        if (app.got_subcommand(c_cf))
            return run_cf(input, scenario, cfg, outdir, threads, recompute_gc);
        if (app.got_subcommand(c_merge)) return run_merge(merge_inputs, outdir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mibel/scenario.hpp"

namespace mibel {

// Run configuration, normally loaded from a JSON file.  Every section and
// key is optional; unknown keys are rejected so typos fail loudly instead of
// silently running defaults.
struct RunConfig {
    MechanismParams mechanism{};
    Scenario scenario = Scenario::elastic;
    bool rents_in_cf = false;
    bool recompute_gc = false;
    double mibgas_price = 100.0;  // EUR/MWh gas when recompute_gc is on
    bool blanket_hydro_shift = false;
    bool dc_period_average = false;
    std::string output_format = "csv";  // "csv" or "json"
    double price_tolerance = 1.0;       // validation gap threshold, EUR/MWh

    EngineOptions engine_options() const;
};

// Parse errors, unknown keys, and out-of-range values throw ConfigError with
// the offending key path; unreadable files throw IoError.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Shared JSON plumbing for config-like files.
nlohmann::json load_json_file(const std::filesystem::path& path);
void reject_unknown_keys(const nlohmann::json& object, const std::string& context,
                         std::span<const std::string_view> allowed);

}  // namespace mibel

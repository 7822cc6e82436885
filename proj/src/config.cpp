#include "mibel/config.hpp"

#include <algorithm>
#include <fstream>

#include "mibel/errors.hpp"

namespace mibel {

namespace {

using nlohmann::json;

double number_at(const json& obj, const std::string& context,
                 const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(context + "." + key + " must be a number");
    return v.get<double>();
}

int int_at(const json& obj, const std::string& context, const char* key,
           int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(context + "." + key + " must be an integer");
    return v.get<int>();
}

bool flag_at(const json& obj, const std::string& context, const char* key,
             bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw ConfigError(context + "." + key + " must be true or false");
    return v.get<bool>();
}

std::string string_at(const json& obj, const std::string& context,
                      const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError(context + "." + key + " must be a string");
    return v.get<std::string>();
}

const json& object_at(const json& obj, const std::string& context,
                      const char* key) {
    const json& v = obj.at(key);
    if (!v.is_object())
        throw ConfigError(context + "." + key + " must be an object");
    return v;
}

}  // namespace

EngineOptions RunConfig::engine_options() const {
    EngineOptions opt;
    opt.params = mechanism;
    opt.rents_in_cf = rents_in_cf;
    opt.recompute_gc = recompute_gc;
    opt.mibgas_price = mibgas_price;
    opt.blanket_hydro_shift = blanket_hydro_shift;
    opt.dc_period_average = dc_period_average;
    return opt;
}

void reject_unknown_keys(const nlohmann::json& object, const std::string& context,
                         std::span<const std::string_view> allowed) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + context + "." + key + "'");
    }
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return j;
}

RunConfig parse_run_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    static constexpr std::string_view kTop[] = {"mechanism", "scenario",
                                                "sensitivity", "output",
                                                "validation"};
    reject_unknown_keys(j, "config", kTop);

    RunConfig cfg;

    if (j.contains("mechanism")) {
        const json& m = object_at(j, "config", "mechanism");
        static constexpr std::string_view kKeys[] = {
            "ref_price_start", "ref_price_step", "ref_price_cap",
            "flat_months",     "efficiency",     "infra_cap",
            "cap_fraction",    "demand_ceiling"};
        reject_unknown_keys(m, "mechanism", kKeys);
        MechanismParams& p = cfg.mechanism;
        p.ref_price_start = number_at(m, "mechanism", "ref_price_start", p.ref_price_start);
        p.ref_price_step = number_at(m, "mechanism", "ref_price_step", p.ref_price_step);
        p.ref_price_cap = number_at(m, "mechanism", "ref_price_cap", p.ref_price_cap);
        p.flat_months = int_at(m, "mechanism", "flat_months", p.flat_months);
        p.efficiency = number_at(m, "mechanism", "efficiency", p.efficiency);
        p.infra_cap = number_at(m, "mechanism", "infra_cap", p.infra_cap);
        p.cap_fraction = number_at(m, "mechanism", "cap_fraction", p.cap_fraction);
        p.demand_ceiling = number_at(m, "mechanism", "demand_ceiling", p.demand_ceiling);
        try {
            p.validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("mechanism: ") + e.what());
        }
    }

    if (j.contains("scenario")) {
        const std::string name = string_at(j, "config", "scenario", "elastic");
        const auto s = scenario_from_string(name);
        if (!s)
            throw ConfigError("config.scenario: unknown scenario '" + name +
                              "' (expected ministry, elastic, or coupled)");
        cfg.scenario = *s;
    }

    if (j.contains("sensitivity")) {
        const json& s = object_at(j, "config", "sensitivity");
        static constexpr std::string_view kKeys[] = {
            "rents_in_cf", "recompute_gc", "mibgas_price_eur_mwh",
            "blanket_hydro_shift", "dc_period_average"};
        reject_unknown_keys(s, "sensitivity", kKeys);
        cfg.rents_in_cf = flag_at(s, "sensitivity", "rents_in_cf", cfg.rents_in_cf);
        cfg.recompute_gc = flag_at(s, "sensitivity", "recompute_gc", cfg.recompute_gc);
        cfg.mibgas_price =
            number_at(s, "sensitivity", "mibgas_price_eur_mwh", cfg.mibgas_price);
        cfg.blanket_hydro_shift =
            flag_at(s, "sensitivity", "blanket_hydro_shift", cfg.blanket_hydro_shift);
        cfg.dc_period_average =
            flag_at(s, "sensitivity", "dc_period_average", cfg.dc_period_average);
        if (cfg.mibgas_price <= 0.0)
            throw ConfigError("sensitivity.mibgas_price_eur_mwh must be > 0");
    }

    if (j.contains("output")) {
        const json& o = object_at(j, "config", "output");
        static constexpr std::string_view kKeys[] = {"format"};
        reject_unknown_keys(o, "output", kKeys);
        cfg.output_format = string_at(o, "output", "format", cfg.output_format);
        if (cfg.output_format != "csv" && cfg.output_format != "json")
            throw ConfigError("output.format must be 'csv' or 'json', got '" +
                              cfg.output_format + "'");
    }

    if (j.contains("validation")) {
        const json& v = object_at(j, "config", "validation");
        static constexpr std::string_view kKeys[] = {"price_tolerance"};
        reject_unknown_keys(v, "validation", kKeys);
        cfg.price_tolerance =
            number_at(v, "validation", "price_tolerance", cfg.price_tolerance);
        if (cfg.price_tolerance < 0.0)
            throw ConfigError("validation.price_tolerance must be >= 0");
    }

    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(load_json_file(path));
}

}  // namespace mibel

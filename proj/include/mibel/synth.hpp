#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mibel/scenario.hpp"

namespace mibel {

// Shape of a generated horizon.  Defaults give a two-day Iberian-scale
// system: a merit order from near-zero renewables up to an expensive peaker,
// gas-linked thermal in the middle, demand split into price-insensitive
// regulated load (the affected share) and a high-priced elastic tail, and a
// price-taking French border.
struct GenSpec {
    int hours = 48;
    std::string start_hour = "2022-06-15T00:00:00Z";
    int ccgt_units = 4;
    double base_demand_es = 26000.0;  // mean hourly Spanish demand, MWh
    double base_demand_pt = 5400.0;   // mean hourly Portuguese demand, MWh
    double elastic_share = 0.35;      // slice of domestic demand bid with a price
    double affected_share_es = 0.59;
    double affected_share_pt = 0.35;
    double morocco_demand = 278.0;  // MWh of affected offtake outside ES/PT
    double gas_base = 120.0;        // daily mean gas price, EUR/MWh
    double gas_amplitude = 25.0;    // intraday gas swing
    bool with_border = true;
    double ntc_export = 2200.0;  // MWh per hour toward France
    double ntc_import = 2200.0;
    // Degenerate horizon on which a frozen administrative replay and a full
    // re-clearing provably coincide: fully price-insensitive demand, every
    // supply segment compensation-eligible, no border.
    bool bridge_mode = false;

    void validate() const;  // throws InvalidParams
};

// Read a GenSpec from JSON; missing keys keep their defaults, unknown keys
// throw ConfigError.
GenSpec parse_gen_spec(const std::string& text);
GenSpec load_gen_spec(const std::filesystem::path& path);

// Deterministic synthetic horizon: a given spec and seed always produce the
// same records.  Generated hours are self-consistent (the
// recorded price re-clears exactly, the stored demand contribution follows
// from the stored compensation, rents, and affected volume) and every value
// sits on the file format's precision grid, so a write/parse cycle is
// lossless.
std::vector<HourRecord> generate_synthetic(const GenSpec& spec,
                                           std::uint64_t seed);

}  // namespace mibel

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mibel/scenario.hpp"

namespace mibel {

// Hourly dataset schema, one CSV with three row kinds sharing a 22-column
// header: offer rows, bid rows, and exactly one meta row per hour carrying
// the recorded outcome, the subsidy series, and border data.  Declared
// precision: prices 0.01 EUR/MWh, quantities 0.001 MWh.
extern const std::vector<std::string>& dataset_columns();

// Parse a dataset; rows may arrive in any order, hours come back sorted by
// hour id.  Throws DataError with line/column context on malformed input,
// missing or duplicated meta rows, and unknown technologies.  Hours that
// carry a French price but no capacity default both capacities to the
// largest absolute recorded flow in the file.
std::vector<HourRecord> parse_dataset(std::istream& in);
std::vector<HourRecord> parse_dataset_file(const std::filesystem::path& path);

void write_dataset(std::span<const HourRecord> hours, std::ostream& out);
void write_dataset_file(std::span<const HourRecord> hours,
                        const std::filesystem::path& path);

struct PriceDeviation {
    std::string hour_id;
    double cleared_price = 0.0;
    double recorded_price = 0.0;
    double abs_gap = 0.0;
};

// Reconciliation of stored curves against recorded prices: re-clears every
// hour and reports gaps above the tolerance.  Diagnostic only; it never
// throws on a price gap.
struct ValidationReport {
    std::size_t hours = 0;
    double tolerance = 0.0;
    double max_abs_gap = 0.0;
    std::vector<PriceDeviation> deviations;
};

ValidationReport validate_dataset(std::span<const HourRecord> hours,
                                  double tolerance = 1.0);

}  // namespace mibel

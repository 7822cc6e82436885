#include "mibel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "mibel/clearing.hpp"
#include "mibel/errors.hpp"
#include "mibel/timeutil.hpp"

namespace mibel {

namespace {

const std::vector<std::string> kColumns = {
    "hour_id",          "row_kind",        "unit_or_agent_id",
    "technology",       "price_eur_mwh",   "quantity_mwh",
    "privileged",       "gas_indexed",     "capped",
    "affected",         "segment_kind",    "country",
    "gc_eur_mwh",       "dc_eur_mwh",      "actual_price_eur_mwh",
    "french_price_eur_mwh", "ntc_export_mwh", "ntc_import_mwh",
    "actual_flow_mwh",  "affected_share_es", "affected_share_pt",
    "morocco_demand_mwh",
};

// Column indices, kept in lockstep with kColumns.
enum Col : std::size_t {
    kHourId = 0,
    kRowKind,
    kUnitId,
    kTechnology,
    kPrice,
    kQuantity,
    kPrivileged,
    kGasIndexed,
    kCapped,
    kAffected,
    kSegmentKind,
    kCountry,
    kGc,
    kDc,
    kActualPrice,
    kFrenchPrice,
    kNtcExport,
    kNtcImport,
    kActualFlow,
    kShareEs,
    kSharePt,
    kMorocco,
    kColumnCount,
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

[[noreturn]] void fail(DataError::Kind kind, std::size_t line,
                       const std::string& what) {
    throw DataError(kind, "line " + std::to_string(line) + ": " + what);
}

double need_number(const std::string& field, Col col, std::size_t line) {
    if (field.empty())
        fail(DataError::Kind::bad_number, line,
             "column '" + kColumns[col] + "' is empty");
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail(DataError::Kind::bad_number, line,
             "column '" + kColumns[col] + "': cannot parse '" + field + "'");
    return value;
}

std::optional<double> maybe_number(const std::string& field, Col col,
                                   std::size_t line) {
    if (field.empty()) return std::nullopt;
    return need_number(field, col, line);
}

bool need_flag(const std::string& field, Col col, std::size_t line) {
    if (field == "1") return true;
    if (field == "0" || field.empty()) return false;
    fail(DataError::Kind::bad_number, line,
         "column '" + kColumns[col] + "': flag must be 0 or 1, got '" + field +
             "'");
}

// Meta fields staged with optionals so capacity defaulting can run after the
// whole file is read.
struct MetaStage {
    std::size_t line = 0;
    double gc = 0.0;
    double dc = 0.0;
    double actual_price = 0.0;
    std::optional<double> french_price;
    std::optional<double> ntc_export;
    std::optional<double> ntc_import;
    std::optional<double> actual_flow;
    double share_es = 0.0;
    double share_pt = 0.0;
    double morocco = 0.0;
};

struct HourStage {
    HourRecord record;
    std::optional<MetaStage> meta;
};

std::string format_value(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string price_str(double v) { return format_value("%.2f", v); }
std::string qty_str(double v) { return format_value("%.3f", v); }
std::string fine_str(double v) { return format_value("%.4f", v); }

void write_row(std::ostream& out, const std::string (&fields)[kColumnCount]) {
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

}  // namespace

const std::vector<std::string>& dataset_columns() { return kColumns; }

std::vector<HourRecord> parse_dataset(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line))
        throw DataError(DataError::Kind::bad_row, "empty input: missing header");
    ++lineno;
    {
        const auto header = split_csv(line);
        if (header.size() != kColumnCount)
            fail(DataError::Kind::bad_row, lineno,
                 "header has " + std::to_string(header.size()) +
                     " columns, expected " + std::to_string(kColumnCount));
        for (std::size_t i = 0; i < kColumnCount; ++i)
            if (header[i] != kColumns[i])
                fail(DataError::Kind::bad_row, lineno,
                     "header column " + std::to_string(i + 1) + " is '" +
                         header[i] + "', expected '" + kColumns[i] + "'");
    }

    std::map<std::string, HourStage> stages;  // keyed by hour id, sorted

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != kColumnCount)
            fail(DataError::Kind::bad_row, lineno,
                 "row has " + std::to_string(f.size()) + " columns, expected " +
                     std::to_string(kColumnCount));

        const std::string& hour_id = f[kHourId];
        if (!parse_hour_id(hour_id))
            fail(DataError::Kind::bad_row, lineno,
                 "malformed hour_id '" + hour_id + "'");
        HourStage& stage = stages[hour_id];
        stage.record.hour_id = hour_id;

        const std::string& kind = f[kRowKind];
        if (kind == "offer") {
            SupplyOffer offer;
            offer.unit_id = f[kUnitId];
            if (offer.unit_id.empty())
                fail(DataError::Kind::bad_row, lineno, "offer without unit id");
            const auto tech = technology_from_string(f[kTechnology]);
            if (!tech)
                fail(DataError::Kind::unknown_technology, lineno,
                     "unknown technology '" + f[kTechnology] + "'");
            offer.technology = *tech;
            offer.price = need_number(f[kPrice], kPrice, lineno);
            offer.quantity = need_number(f[kQuantity], kQuantity, lineno);
            offer.privileged = need_flag(f[kPrivileged], kPrivileged, lineno);
            offer.gas_indexed = need_flag(f[kGasIndexed], kGasIndexed, lineno);
            offer.capped = need_flag(f[kCapped], kCapped, lineno);
            try {
                validate(offer);
            } catch (const Error& e) {
                fail(DataError::Kind::bad_row, lineno, e.what());
            }
            stage.record.supply_offers.push_back(std::move(offer));
        } else if (kind == "bid") {
            DemandBid bid;
            bid.agent_id = f[kUnitId];
            if (bid.agent_id.empty())
                fail(DataError::Kind::bad_row, lineno, "bid without agent id");
            bid.price = need_number(f[kPrice], kPrice, lineno);
            bid.quantity = need_number(f[kQuantity], kQuantity, lineno);
            bid.affected = need_flag(f[kAffected], kAffected, lineno);
            const auto seg = segment_kind_from_string(f[kSegmentKind]);
            if (!seg)
                fail(DataError::Kind::bad_row, lineno,
                     "unknown segment_kind '" + f[kSegmentKind] + "'");
            bid.segment_kind = *seg;
            const auto country = country_from_string(f[kCountry]);
            if (!country)
                fail(DataError::Kind::bad_row, lineno,
                     "unknown country '" + f[kCountry] + "'");
            try {
                validate(bid);
            } catch (const Error& e) {
                fail(DataError::Kind::bad_row, lineno, e.what());
            }
            stage.record.bid_country.push_back(*country);
            stage.record.demand_bids.push_back(std::move(bid));
        } else if (kind == "meta") {
            if (stage.meta)
                fail(DataError::Kind::duplicate_meta, lineno,
                     "second meta row for hour " + hour_id +
                         " (first at line " + std::to_string(stage.meta->line) +
                         ")");
            MetaStage m;
            m.line = lineno;
            m.gc = need_number(f[kGc], kGc, lineno);
            m.dc = need_number(f[kDc], kDc, lineno);
            m.actual_price = need_number(f[kActualPrice], kActualPrice, lineno);
            m.french_price = maybe_number(f[kFrenchPrice], kFrenchPrice, lineno);
            m.ntc_export = maybe_number(f[kNtcExport], kNtcExport, lineno);
            m.ntc_import = maybe_number(f[kNtcImport], kNtcImport, lineno);
            m.actual_flow = maybe_number(f[kActualFlow], kActualFlow, lineno);
            if (!f[kShareEs].empty())
                m.share_es = need_number(f[kShareEs], kShareEs, lineno);
            if (!f[kSharePt].empty())
                m.share_pt = need_number(f[kSharePt], kSharePt, lineno);
            if (!f[kMorocco].empty())
                m.morocco = need_number(f[kMorocco], kMorocco, lineno);
            stage.meta = m;
        } else {
            fail(DataError::Kind::bad_row, lineno,
                 "unknown row_kind '" + kind + "'");
        }
    }

    // Capacity defaulting needs the whole file: use the largest recorded
    // absolute flow anywhere as the fallback when a bordered hour omits it.
    double max_abs_flow = 0.0;
    for (const auto& [id, stage] : stages)
        if (stage.meta && stage.meta->actual_flow)
            max_abs_flow = std::max(max_abs_flow, std::abs(*stage.meta->actual_flow));

    std::vector<HourRecord> hours;
    hours.reserve(stages.size());
    for (auto& [id, stage] : stages) {
        if (!stage.meta)
            throw DataError(DataError::Kind::missing_meta,
                            "hour " + id + " has no meta row");
        const MetaStage& m = *stage.meta;
        HourRecord& r = stage.record;
        r.gc_per_mwh = m.gc;
        r.dc_per_mwh = m.dc;
        r.actual_price = m.actual_price;
        r.affected_share_es = m.share_es;
        r.affected_share_pt = m.share_pt;
        r.morocco_demand = m.morocco;
        if (m.french_price) {
            if (!m.ntc_export && !m.ntc_import && max_abs_flow == 0.0)
                throw DataError(
                    DataError::Kind::missing_interconnector,
                    "hour " + id +
                        " has a French price but no capacity and the file has "
                        "no recorded flow to default from");
            InterconnectorHour ic;
            ic.french_price = *m.french_price;
            ic.ntc_export = m.ntc_export.value_or(max_abs_flow);
            ic.ntc_import = m.ntc_import.value_or(max_abs_flow);
            ic.actual_flow = m.actual_flow.value_or(0.0);
            r.interconnector = ic;
        } else if (m.ntc_export || m.ntc_import || m.actual_flow) {
            throw DataError(DataError::Kind::missing_interconnector,
                            "hour " + id +
                                " has border capacity or flow but no French "
                                "price");
        }
        hours.push_back(std::move(r));
    }
    return hours;
}

std::vector<HourRecord> parse_dataset_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return parse_dataset(in);
}

void write_dataset(std::span<const HourRecord> hours, std::ostream& out) {
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (i) out << ',';
        out << kColumns[i];
    }
    out << '\n';

    for (const HourRecord& r : hours) {
        std::string f[kColumnCount];
        for (const SupplyOffer& o : r.supply_offers) {
            for (auto& s : f) s.clear();
            f[kHourId] = r.hour_id;
            f[kRowKind] = "offer";
            f[kUnitId] = o.unit_id;
            f[kTechnology] = to_string(o.technology);
            f[kPrice] = price_str(o.price);
            f[kQuantity] = qty_str(o.quantity);
            f[kPrivileged] = o.privileged ? "1" : "0";
            f[kGasIndexed] = o.gas_indexed ? "1" : "0";
            f[kCapped] = o.capped ? "1" : "0";
            write_row(out, f);
        }
        for (std::size_t i = 0; i < r.demand_bids.size(); ++i) {
            const DemandBid& b = r.demand_bids[i];
            for (auto& s : f) s.clear();
            f[kHourId] = r.hour_id;
            f[kRowKind] = "bid";
            f[kUnitId] = b.agent_id;
            f[kPrice] = price_str(b.price);
            f[kQuantity] = qty_str(b.quantity);
            f[kAffected] = b.affected ? "1" : "0";
            f[kSegmentKind] = to_string(b.segment_kind);
            f[kCountry] =
                to_string(i < r.bid_country.size() ? r.bid_country[i]
                                                   : Country::ES);
            write_row(out, f);
        }
        for (auto& s : f) s.clear();
        f[kHourId] = r.hour_id;
        f[kRowKind] = "meta";
        f[kGc] = fine_str(r.gc_per_mwh);
        f[kDc] = fine_str(r.dc_per_mwh);
        f[kActualPrice] = price_str(r.actual_price);
        if (r.interconnector) {
            f[kFrenchPrice] = price_str(r.interconnector->french_price);
            f[kNtcExport] = qty_str(r.interconnector->ntc_export);
            f[kNtcImport] = qty_str(r.interconnector->ntc_import);
            f[kActualFlow] = qty_str(r.interconnector->actual_flow);
        }
        f[kShareEs] = fine_str(r.affected_share_es);
        f[kSharePt] = fine_str(r.affected_share_pt);
        f[kMorocco] = qty_str(r.morocco_demand);
        write_row(out, f);
    }
}

void write_dataset_file(std::span<const HourRecord> hours,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_dataset(hours, out);
    out.flush();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

ValidationReport validate_dataset(std::span<const HourRecord> hours,
                                  double tolerance) {
    ValidationReport report;
    report.hours = hours.size();
    report.tolerance = tolerance;
    for (const HourRecord& r : hours) {
        ClearingResult cleared;
        try {
            cleared = clear(build_supply_curve(r.supply_offers),
                            build_demand_curve(r.demand_bids));
        } catch (const Error& e) {
            throw Error("hour " + r.hour_id + ": " + e.what());
        }
        const double gap = std::abs(cleared.price - r.actual_price);
        report.max_abs_gap = std::max(report.max_abs_gap, gap);
        if (gap > tolerance)
            report.deviations.push_back(
                {r.hour_id, cleared.price, r.actual_price, gap});
    }
    return report;
}

}  // namespace mibel

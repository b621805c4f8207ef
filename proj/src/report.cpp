#include "defexp/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace defexp {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::skipped: return "skipped";
    }
    return "?";
}

Verdict verdict_from_name(const std::string& name) {
    if (name == "pass") return Verdict::pass;
    if (name == "fail") return Verdict::fail;
    if (name == "inconclusive") return Verdict::inconclusive;
    if (name == "skipped") return Verdict::skipped;
    throw parse_error("unknown verdict '" + name + "'");
}

OutputFormat format_from_name(const std::string& name) {
    if (name == "table") return OutputFormat::table;
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw domain_error("unknown output format '" + name + "' (table|csv|json)");
}

long VerificationReport::count(Verdict v) const {
    return static_cast<long>(std::count_if(rows.begin(), rows.end(),
                                           [&](const ReportRow& r) { return r.verdict == v; }));
}

void print_table(std::ostream& os, const VerificationReport& report) {
    os << "suite " << report.suite << "  [" << report.fingerprint << "]\n";
    for (const ReportRow& r : report.rows) {
        os << "  " << r.name << ": " << verdict_name(r.verdict);
        for (const auto& [k, v] : r.cols) os << "  " << k << "=" << v;
        os << "\n";
    }
    os << "  summary: " << report.count(Verdict::pass) << " pass, "
       << report.count(Verdict::fail) << " fail, "
       << report.count(Verdict::inconclusive) << " inconclusive, "
       << report.count(Verdict::skipped) << " skipped  ("
       << report.wall_seconds << " s)\n";
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

// Full RFC-style record reader: quoted fields may span commas and newlines.
std::vector<std::vector<std::string>> csv_records(std::istream& is) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool field_started = false;
    int ci;
    while ((ci = is.get()) != std::char_traits<char>::eof()) {
        const char c = static_cast<char>(ci);
        if (quoted) {
            if (c == '"') {
                if (is.peek() == '"') {
                    cur += '"';
                    is.get();
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; field_started = true; break;
            case ',':
                fields.push_back(std::move(cur));
                cur.clear();
                field_started = false;
                break;
            case '\r': break;
            case '\n':
                if (!fields.empty() || !cur.empty() || field_started) {
                    fields.push_back(std::move(cur));
                    cur.clear();
                    records.push_back(std::move(fields));
                    fields.clear();
                }
                field_started = false;
                break;
            default: cur += c; field_started = true; break;
        }
    }
    if (quoted) throw parse_error("CSV ends inside a quoted field");
    if (!fields.empty() || !cur.empty() || field_started) {
        fields.push_back(std::move(cur));
        records.push_back(std::move(fields));
    }
    return records;
}

} // namespace

void print_csv(std::ostream& os, const VerificationReport& report) {
    os << "suite,row,verdict";
    if (!report.rows.empty()) {
        for (const auto& [k, v] : report.rows.front().cols) os << "," << csv_quote(k);
    }
    os << "\n";
    for (const ReportRow& r : report.rows) {
        os << csv_quote(report.suite) << "," << csv_quote(r.name) << "," << verdict_name(r.verdict);
        for (const auto& [k, v] : r.cols) os << "," << csv_quote(v);
        os << "\n";
    }
}

VerificationReport parse_csv(std::istream& is) {
    std::vector<std::vector<std::string>> records = csv_records(is);
    if (records.empty()) throw parse_error("empty CSV report");
    const std::vector<std::string>& header = records.front();
    if (header.size() < 3 || header[0] != "suite" || header[1] != "row" ||
        header[2] != "verdict") {
        throw parse_error("CSV header must start with suite,row,verdict");
    }
    VerificationReport report;
    for (size_t r = 1; r < records.size(); ++r) {
        const std::vector<std::string>& fields = records[r];
        if (fields.size() != header.size()) {
            throw parse_error("CSV row width differs from header");
        }
        report.suite = fields[0];
        ReportRow row;
        row.name = fields[1];
        row.verdict = verdict_from_name(fields[2]);
        for (size_t i = 3; i < fields.size(); ++i) {
            row.cols.emplace_back(header[i], fields[i]);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void print_json(std::ostream& os, const VerificationReport& report) {
    nlohmann::ordered_json j;
    j["suite"] = report.suite;
    j["fingerprint"] = report.fingerprint;
    j["wall_seconds"] = report.wall_seconds;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const ReportRow& r : report.rows) {
        nlohmann::ordered_json o;
        o["row"] = r.name;
        o["verdict"] = verdict_name(r.verdict);
        for (const auto& [k, v] : r.cols) o[k] = v;
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    j["summary"] = {{"pass", report.count(Verdict::pass)},
                    {"fail", report.count(Verdict::fail)},
                    {"inconclusive", report.count(Verdict::inconclusive)},
                    {"skipped", report.count(Verdict::skipped)}};
    os << j.dump(2) << "\n";
}

std::string format_justified(const ErrorBoundedValue& v, long requested_digits) {
    if (requested_digits < 1) requested_digits = 1;
    if (v.value.is_zero()) {
        return v.abs_err.is_zero() ? "0" : ("0 (+- " + v.abs_err.decimal(3) + ")");
    }
    long justified = requested_digits;
    if (!v.abs_err.is_zero()) {
        // significant digits = log10(|value| / abs_err)
        const double bits = static_cast<double>(v.value.floor_log2() - v.abs_err.ceil_log2());
        justified = static_cast<long>(bits * 0.30102999566398);
    }
    long digits = std::max<long>(1, std::min(requested_digits, justified));
    return v.value.decimal(static_cast<size_t>(digits));
}

} // namespace defexp

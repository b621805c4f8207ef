#pragma once

#include "defexp/arith.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace defexp {

enum class Verdict { pass, fail, inconclusive, skipped };

const char* verdict_name(Verdict v);
Verdict verdict_from_name(const std::string& name);

struct ReportRow {
    std::string name;
    Verdict verdict = Verdict::pass;
    std::vector<std::pair<std::string, std::string>> cols;

    bool operator==(const ReportRow&) const = default;
};

struct VerificationReport {
    std::string suite;
    std::string fingerprint;     // q literal plus precision settings
    std::vector<ReportRow> rows;
    double wall_seconds = 0.0;

    long count(Verdict v) const;
    bool passed() const { return count(Verdict::fail) == 0; }
};

enum class OutputFormat { table, csv, json };
OutputFormat format_from_name(const std::string& name);

void print_table(std::ostream& os, const VerificationReport& report);
// CSV: header row "suite,row,verdict,<col keys...>", RFC-style quoting. Every
// row of a suite carries the same column keys.
void print_csv(std::ostream& os, const VerificationReport& report);
void print_json(std::ostream& os, const VerificationReport& report);

// Inverse of print_csv, used by the round-trip contract. Restores suite name,
// row names, verdicts and column cells exactly.
VerificationReport parse_csv(std::istream& is);

// Decimal rendering limited to the digits the error bound justifies.
std::string format_justified(const ErrorBoundedValue& v, long requested_digits);

} // namespace defexp

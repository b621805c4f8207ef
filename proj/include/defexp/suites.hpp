#pragma once

#include "defexp/analysis.hpp"
#include "defexp/report.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace defexp {

struct VerifyOptions {
    std::string q_decimal = "0.5";
    long digits = 50;
    long n_max = 30;
    long tol_bits = kDefaultTolBits;
    long hard_cap = kDefaultHardCapBits;
    std::optional<std::filesystem::path> cache_path;
};

// Runs the named verification suites over one parameter set, sharing the
// zero enumeration (and its optional on-disk cache) between them.
class SuiteEngine {
public:
    explicit SuiteEngine(VerifyOptions opt);

    const Params& params() const { return params_; }
    const PrecisionContext& ctx() const { return ctx_; }
    const VerifyOptions& options() const { return opt_; }
    std::string fingerprint() const;

    // Records 1..n_needed (cached, loaded, or enumerated on demand).
    const std::vector<ZeroRecord>& zeros(long n_needed);

    VerificationReport run(const std::string& suite);
    std::vector<VerificationReport> run_all();

    static const std::vector<std::string>& suite_names();   // excluding "all"

private:
    VerifyOptions opt_;
    PrecisionContext ctx_;
    Params params_;
    std::vector<ZeroRecord> zeros_;
};

// Regression baselines recorded from the first verified run; 0 = not yet
// frozen (rows report skipped instead of pass/fail).
double s30_baseline(const std::string& q_decimal);
void amplitude_band_baseline(double& c_min, double& c_max);   // q = 0.5, n in [5,25]

} // namespace defexp

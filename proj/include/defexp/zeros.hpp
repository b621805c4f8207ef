#pragma once

#include "defexp/series.hpp"

#include <filesystem>
#include <vector>

namespace defexp {

enum class BracketSource { theorem_interval, scan };

struct Bracket {
    Real lo, hi;   // lo < hi < 0 and f changes sign across [lo, hi]
    BracketSource source = BracketSource::scan;
};

struct ZeroRecord {
    long n = 0;
    ErrorBoundedValue x;            // the zero, negative
    Real bracket_lo, bracket_hi;    // verified sign-change bracket
    ErrorBoundedValue residual;     // |f(x)|
    long working_bits_used = 0;
    long newton_iters = 0;
    BracketSource source = BracketSource::scan;
};

struct ZeroCache {
    int format_version = 1;
    std::string q_decimal;
    long working_bits = 0;
    long tol_bits = 0;
    std::vector<ZeroRecord> records;   // contiguous, n = 1 .. size()
};

inline constexpr long kDefaultTolBits = 128;
inline constexpr int kCacheFormatVersion = 1;

// Sign-change interval for the n-th zero. Tries the asymptotic interval
// (-(n + lambda0/n) alpha^{n-1}, -n alpha^{n-1}) widened by (1 +- 2 lambda0/n^2)
// when that interval is trustworthy, otherwise walks a geometric grid with
// step alpha^{1/8} from alpha*x_{n-1} (or -1 for n = 1), at most 64 steps.
Bracket bracket_zero(long n, const Params& params, const PrecisionContext& ctx,
                     const ZeroRecord* prev = nullptr);

// Bisection to ~20 relative bits, then bracket-guarded Newton with
// f'(x) = f(qx) until the step drops below |x| 2^{-tol_bits}.
ZeroRecord refine_zero(const Bracket& bracket, long n, const Params& params,
                       const PrecisionContext& ctx, long tol_bits = kDefaultTolBits);

std::vector<ZeroRecord> enumerate_zeros(long n_max, const Params& params,
                                        const PrecisionContext& ctx,
                                        long tol_bits = kDefaultTolBits);

// Grow an existing contiguous list in place up to n_max (cache reuse path).
void extend_zeros(std::vector<ZeroRecord>& records, long n_max, const Params& params,
                  const PrecisionContext& ctx, long tol_bits = kDefaultTolBits);

// x_{n+1} < alpha x_n < x_n < 0 on computed values; throws integrity_error.
void validate_interlacing(const std::vector<ZeroRecord>& records, const Params& params);

void save_cache(const ZeroCache& cache, const std::filesystem::path& path);
ZeroCache load_cache(const std::filesystem::path& path, const Params& params);

} // namespace defexp

#pragma once

#include "defexp/qseries.hpp"
#include "defexp/zeros.hpp"

#include <optional>
#include <vector>

namespace defexp {

struct AsymptoticRow {
    long n = 0;
    Real x_n;
    Real theta_n;    // -x_n / alpha^{n-1} - n
    Real s_n;        // n * theta_n, converging to g(q)
    Real d_n;        // |s_n - g_ref|
    std::optional<Real> ratio_defect;   // n^2 (x_{n+1}/(alpha x_n) - 1 - 1/n)
};

struct AsymptoticTable {
    ErrorBoundedValue g_ref;
    std::vector<AsymptoticRow> rows;
};

AsymptoticTable asymptotic_table(const std::vector<ZeroRecord>& zeros, const Params& params,
                                 const PrecisionContext& ctx);

// The ratio-law defects n^2 (x_{n+1}/(alpha x_n) - 1 - 1/n), n = 1..N-1.
std::vector<Real> ratio_table(const std::vector<ZeroRecord>& zeros, const Params& params,
                              const PrecisionContext& ctx);

struct AmplitudeRow {
    long n = 0;
    ErrorBoundedValue a_n;     // |f(x_n / q)|
    Real c_n;                  // a_n n^{3/2} e^{-n} q^{n(n+1)/2}
    int extremum_sign = 0;     // sign of f(x_n / q)
    bool sign_ok = false;      // sign equals (-1)^n, value beyond 4x error
    bool skipped = false;      // precision cap exceeded for this n
};

std::vector<AmplitudeRow> amplitude_table(const std::vector<ZeroRecord>& zeros,
                                          const Params& params, const PrecisionContext& ctx);

struct SignLemmaResult {
    long n = 0;
    Real lambda;
    int sign_observed = 0;
    int sign_predicted = 0;
    bool conclusive = false;   // hypothesis |lambda h - H| > 4x error held, f decisive
    bool agree = false;
};

// Lemma check at xi_n = -(n + lambda/n) alpha^{n-1}: predicted sign of f is
// (-1)^n sign(lambda h(alpha) - H(alpha)).
SignLemmaResult sign_lemma_check(long n, const Real& lambda, const Params& params,
                                 const PrecisionContext& ctx);

// prod_{n<=N} (1 - x/x_n) with a rigorous enclosure of the omitted tail.
// Requires enough zeros that |x| alpha^{1-N} / N < tail_tol.
ErrorBoundedValue product_eval(const Real& x, const std::vector<ZeroRecord>& zeros,
                               const Params& params, const PrecisionContext& ctx,
                               const Real& tail_tol);

struct SymmetricSumResult {
    int order = 0;
    ErrorBoundedValue lhs;   // enclosure including truncation tails
    Real rhs;                // -1 (order 1) or q/2 (order 2)
    bool agree = false;      // rhs inside the enclosure
    bool conclusive = false; // enclosure width below decisive_tol
    long required_n = 0;     // zeros needed for a decisive width (when inconclusive)
};

SymmetricSumResult symmetric_sum_check(const std::vector<ZeroRecord>& zeros, int order,
                                       const Params& params, const Real& decisive_tol);

} // namespace defexp

#pragma once

#include "defexp/arith.hpp"

#include <optional>
#include <vector>

namespace defexp {

// Sum of all positive divisors of k, exact (trial division up to sqrt k).
unsigned long long sigma(unsigned long long k);

// g(q) = sum_{k>=1} sigma(k) q^k. Refuses q > 0.99 (divergence as q -> 1);
// truncation tail bounded in closed form via sigma(k) <= k^2.
ErrorBoundedValue g_series(const Params& params, const Real& tol, const PrecisionContext& ctx);

// Lambert form of the same quantity: sum_{k>=1} k / (alpha^k - 1).
ErrorBoundedValue g_lambert(const Params& params, const Real& tol, const PrecisionContext& ctx);

// h(alpha)  = sum_{j>=1} (2j-1) (-1)^{j-1} alpha^{-j(j-1)/2}
// H(alpha)  = sum_{j>=1} j(j-1)(2j-1)/6 (-1)^j alpha^{-j(j-1)/2}
// h_product = prod_{k>=1} (1 - alpha^{-k})^3   (triple product route)
ErrorBoundedValue h_series(const Params& params, const Real& tol, const PrecisionContext& ctx);
ErrorBoundedValue h_product(const Params& params, const Real& tol, const PrecisionContext& ctx);
ErrorBoundedValue H_series(const Params& params, const Real& tol, const PrecisionContext& ctx);

struct PartialRatioRow {
    long m = 0;
    Real h_m, H_m;
    std::optional<Real> ratio;      // H_m / h_m, present only when h_m is provably > 0
    std::optional<Real> ratio_err;  // absolute bound on the ratio's rounding error
};

struct PartialRatioTable {
    std::vector<PartialRatioRow> rows;
    // smallest N such that for every m with N < m <= checked_to the chain
    // H_{2m-1}/h_{2m-1} < H_{2m+1}/h_{2m+1} < H_{2m}/h_{2m} < H_{2m-2}/h_{2m-2}
    // holds decisively; 1 when it holds at every checkable m, -1 when nothing
    // was checkable.
    long interleave_from = -1;
    long checked_to = 0;         // largest m the chain could be tested at
};

PartialRatioTable partial_ratios(const Params& params, long m_max, const PrecisionContext& ctx);

// lambda0 = 1 + H(alpha)/h(alpha), the bracketing width parameter.
ErrorBoundedValue lambda0(const Params& params, const PrecisionContext& ctx);

enum class ProductSign { plus, minus };

// prod_{k>=1} (1 +- alpha^{-k}).
ErrorBoundedValue euler_product(const Params& params, ProductSign sign, const Real& tol,
                                const PrecisionContext& ctx);

} // namespace defexp

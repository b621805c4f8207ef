#include "defexp/zeros.hpp"

#include "defexp/qseries.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace defexp {

namespace {

using ordered_json = nlohmann::ordered_json;

int significant_sign(const SeriesValue& sv) {
    Real margin = mul_ui(sv.result.abs_err, 4, kBoundPrec, MPFR_RNDU);
    return abs(sv.result.value) > margin ? sv.result.value.sign() : 0;
}

PrecisionContext deepened(const PrecisionContext& ctx, long target_floor) {
    PrecisionContext c = ctx;
    c.target_abs_exp = std::min(ctx.target_abs_exp, target_floor);
    return c;
}

// alpha^{1/8}, the geometric scan step.
Real scan_step(const Params& params, mpfr_prec_t wp) {
    Real e = div_ui(log(params.alpha(), wp), 8, wp);
    return exp(e, wp);
}

struct ScanProbe {
    std::string point;
    int sign;
};

std::string trace_to_string(const std::vector<ScanProbe>& trace) {
    std::ostringstream os;
    for (const auto& p : trace) {
        os << "\n  f(" << p.point << ") sign " << p.sign;
    }
    return os.str();
}

} // namespace

Bracket bracket_zero(long n, const Params& params, const PrecisionContext& ctx,
                     const ZeroRecord* prev) {
    if (n < 1) throw domain_error("bracket_zero requires n >= 1");
    if (n >= 2 && (prev == nullptr || prev->n != n - 1)) {
        throw domain_error("bracket_zero requires the record for n-1 when n >= 2");
    }
    const mpfr_prec_t wp = ctx.working_bits;
    auto probe = [&](const Real& t) { return significant_sign(eval_f(t, params, ctx)); };

    // The asymptotic interval is only trusted where it provably isolates one
    // zero: never for n = 1, and only when alpha >= 1.2 and 2 lambda0/n^2
    // stays small (the widened interval then cannot reach x_{n-1} or x_{n+1}).
    if (n >= 2 && params.alpha() >= Real::from_decimal("1.2", 16)) {
        Real lam = lambda0(params, ctx).upper();
        Real n2 = Real::from_long(n * n, wp);
        Real spread = div(mul_2si(lam, 1), n2, wp, MPFR_RNDU);   // 2 lambda0 / n^2
        if (spread <= Real::from_decimal("0.125", 16)) {
            Real base = pow_si(params.alpha(), n - 1, wp);
            Real one = Real::from_long(1, wp);
            Real center_lo = add(Real::from_long(n, wp),
                                 div_ui(lam, static_cast<unsigned long>(n), wp), wp);
            Real lo = neg(mul(mul(center_lo, base, wp), add(one, spread, wp), wp));
            Real hi = neg(mul(mul_ui(base, static_cast<unsigned long>(n), wp),
                              sub(one, spread, wp), wp));
            const int slo = probe(lo);
            const int shi = probe(hi);
            if (slo != 0 && shi != 0 && slo != shi) {
                return {std::move(lo), std::move(hi), BracketSource::theorem_interval};
            }
            // legitimate for small n: fall through to the scan
        }
    }

    // Geometric scan. Start from alpha * x_{n-1} (n = 1: from -1) and walk by
    // factors of alpha^{1/8}; every window that small holds at most one zero,
    // so the first decisive sign flip brackets x_n.
    const Real step = scan_step(params, wp);
    std::vector<ScanProbe> trace;
    Real start = (n == 1) ? Real::from_long(-1, wp) : mul(params.alpha(), prev->x.value, wp);
    int s0 = probe(start);
    trace.push_back({start.decimal(12), s0});
    for (int nudge = 0; s0 == 0 && nudge < 2; ++nudge) {
        // landed on (or indistinguishably near) a zero: shift outward a half step
        start = mul(start, sqrt(step, wp), wp);
        s0 = probe(start);
        trace.push_back({start.decimal(12), s0});
    }
    if (s0 == 0) {
        throw enumeration_error("bracket_zero: no decisive sign at scan start for n = " +
                                std::to_string(n) + trace_to_string(trace));
    }

    // n = 1 with f(-1) < 0 means x_1 lies in (-1, 0): walk toward zero instead.
    const bool inward = (n == 1 && s0 < 0);
    Real factor = inward ? ui_div(1, step, wp) : step;
    Real last_decisive = start;
    Real t = start;
    for (int j = 1; j <= 64; ++j) {
        t = mul(t, factor, wp);
        const int s = probe(t);
        trace.push_back({t.decimal(12), s});
        if (s != 0 && s != s0) {
            Real lo = inward ? last_decisive : t;
            Real hi = inward ? t : last_decisive;
            return {std::move(lo), std::move(hi), BracketSource::scan};
        }
        if (s != 0) last_decisive = t;
    }
    throw enumeration_error("bracket_zero: no sign change within 64 scan steps for n = " +
                            std::to_string(n) + trace_to_string(trace));
}

ZeroRecord refine_zero(const Bracket& bracket, long n, const Params& params,
                       const PrecisionContext& ctx, long tol_bits) {
    if (tol_bits < 8) throw domain_error("refine_zero requires tol_bits >= 8");
    if (!(bracket.lo < bracket.hi) || bracket.hi.sign() >= 0) {
        throw domain_error("refine_zero requires lo < hi < 0");
    }
    const mpfr_prec_t xp = static_cast<mpfr_prec_t>(tol_bits + 96);
    // evaluation target deep enough that Newton steps resolve |x| 2^{-tol_bits}
    const PrecisionContext ectx =
        deepened(ctx, bracket.lo.floor_log2() - tol_bits - ctx.guard_bits);
    auto F = [&](const Real& t) { return eval_f(t, params, ectx); };

    Real lo(xp), hi(xp);
    mpfr_set(lo.mp(), bracket.lo.mp(), MPFR_RNDD);
    mpfr_set(hi.mp(), bracket.hi.mp(), MPFR_RNDU);
    SeriesValue f_lo = F(lo);
    const int slo = significant_sign(f_lo);
    {
        SeriesValue f_hi = F(hi);
        const int shi = significant_sign(f_hi);
        if (slo == 0 || shi == 0 || slo == shi) {
            throw refinement_error("refine_zero: endpoints do not bracket a sign change");
        }
    }

    long bits_used = f_lo.working_bits_used;
    // bisect to ~20 relative bits so Newton starts inside its basin
    const Real rel20 = Real::two_pow(-20, 8);
    for (int i = 0; i < 2000; ++i) {
        Real width = sub(hi, lo, xp, MPFR_RNDU);
        if (width <= mul(abs(hi), rel20, xp)) break;
        Real mid = div_ui(add(lo, hi, xp), 2, xp);
        SeriesValue fm = F(mid);
        bits_used = std::max<long>(bits_used, fm.working_bits_used);
        const int sm = significant_sign(fm);
        if (sm == 0) break;   // already indistinguishable from the zero
        if (sm == slo) {
            lo = std::move(mid);
        } else {
            hi = std::move(mid);
        }
    }

    // bracket-guarded Newton: x <- x - f(x)/f(qx)
    Real x = div_ui(add(lo, hi, xp), 2, xp);
    const Real rel_tol = Real::two_pow(-tol_bits, 8);
    long iters = 0;
    bool converged = false;
    SeriesValue fx = F(x);
    while (!converged) {
        if (++iters > 200) {
            throw refinement_error("refine_zero: Newton did not converge for n = " +
                                   std::to_string(n) + " in [" + lo.decimal(12) + ", " +
                                   hi.decimal(12) + "]");
        }
        SeriesValue fpx = eval_f_prime(x, params, ectx);
        bits_used = std::max<long>({bits_used, fx.working_bits_used, fpx.working_bits_used});
        if (significant_sign(fpx) == 0) {
            throw refinement_error("refine_zero: derivative not significant at n = " +
                                   std::to_string(n));
        }
        // shrink the bracket with the decisive sign at the current iterate
        const int sx = significant_sign(fx);
        if (sx == slo && x > lo) lo = x;
        if (sx == -slo && x < hi) hi = x;

        Real step = div(fx.result.value, fpx.result.value, xp);
        Real cand = sub(x, step, xp);
        if (abs(step) <= mul(abs(x), rel_tol, xp)) {
            // inside the bracket only one zero exists and |f/f'| tracks the
            // distance to it, so a below-tolerance step means done; apply it
            // when it stays contained (near ulp scale it can collide with an
            // endpoint, which is equally converged)
            converged = true;
            if (lo < cand && cand < hi) {
                x = std::move(cand);
                fx = F(x);
            }
            break;
        }
        if (!(lo < cand && cand < hi)) {
            cand = div_ui(add(lo, hi, xp), 2, xp);   // Newton tried to escape
        }
        x = std::move(cand);
        fx = F(x);
    }

    // rebuild a tight bracket around the converged iterate with fresh decisive
    // probes, doubling the half-width until both signs resolve
    Real w = mul(abs(x), rel_tol, xp);
    int s1 = 0, s2 = 0;
    Real blo(xp), bhi(xp);
    for (int attempt = 0; attempt < 16; ++attempt) {
        blo = sub(x, w, xp, MPFR_RNDD);
        bhi = add(x, w, xp, MPFR_RNDU);
        SeriesValue f1 = F(blo);
        SeriesValue f2 = F(bhi);
        bits_used = std::max<long>({bits_used, f1.working_bits_used, f2.working_bits_used});
        s1 = significant_sign(f1);
        s2 = significant_sign(f2);
        if (s1 != 0 && s2 != 0 && s1 != s2) break;
        s1 = s2 = 0;
        w = mul_2si(w, 1);
    }
    if (s1 == 0 || s1 == s2) {
        throw refinement_error("refine_zero: could not re-verify a sign change around x_" +
                               std::to_string(n));
    }

    // |x - x*| <= 2 (|f(x)| + err) / |f'|, capped by the verified half-widths
    SeriesValue fpx = eval_f_prime(x, params, ectx);
    Real fp_low = sub(abs(fpx.result.value), fpx.result.abs_err, kBoundPrec, MPFR_RNDD);
    Real newton_err = div(mul_2si(abs(fx.result.value), 1), fp_low, kBoundPrec, MPFR_RNDU);
    newton_err = add(newton_err,
                     div(mul_2si(fx.result.abs_err, 1), fp_low, kBoundPrec, MPFR_RNDU),
                     kBoundPrec, MPFR_RNDU);

    ZeroRecord rec;
    rec.n = n;
    rec.x = {x, min(newton_err, mul_2si(w, 1))};
    rec.bracket_lo = blo;
    rec.bracket_hi = bhi;
    rec.residual = ebv_abs(fx.result);
    rec.working_bits_used = bits_used;
    rec.newton_iters = iters;
    rec.source = bracket.source;
    return rec;
}

void validate_interlacing(const std::vector<ZeroRecord>& records, const Params& params) {
    for (size_t i = 0; i < records.size(); ++i) {
        const ZeroRecord& r = records[i];
        if (r.n != static_cast<long>(i + 1)) {
            throw integrity_error("zero records are not contiguous from n = 1");
        }
        if (r.x.value.sign() >= 0) {
            throw integrity_error("zero x_" + std::to_string(r.n) + " is not negative");
        }
        if (i + 1 < records.size()) {
            const Real& xn = r.x.value;
            const Real& xn1 = records[i + 1].x.value;
            Real ax = mul(params.alpha(), xn, xn.prec());
            if (!(xn1 < ax && ax < xn)) {
                throw integrity_error("interlacing x_{n+1} < alpha x_n < x_n failed at n = " +
                                      std::to_string(r.n));
            }
        }
    }
}

void extend_zeros(std::vector<ZeroRecord>& records, long n_max, const Params& params,
                  const PrecisionContext& ctx, long tol_bits) {
    if (n_max < 1) throw domain_error("enumerate_zeros requires n_max >= 1");
    for (long n = static_cast<long>(records.size()) + 1; n <= n_max; ++n) {
        const ZeroRecord* prev = records.empty() ? nullptr : &records.back();
        Bracket b = bracket_zero(n, params, ctx, prev);
        records.push_back(refine_zero(b, n, params, ctx, tol_bits));
    }
    validate_interlacing(records, params);
}

std::vector<ZeroRecord> enumerate_zeros(long n_max, const Params& params,
                                        const PrecisionContext& ctx, long tol_bits) {
    std::vector<ZeroRecord> records;
    extend_zeros(records, n_max, params, ctx, tol_bits);
    return records;
}

namespace {

const char* source_name(BracketSource s) {
    return s == BracketSource::theorem_interval ? "theorem-interval" : "scan";
}

BracketSource source_from_name(const std::string& s) {
    if (s == "theorem-interval") return BracketSource::theorem_interval;
    if (s == "scan") return BracketSource::scan;
    throw parse_error("unknown bracket source '" + s + "'");
}

} // namespace

void save_cache(const ZeroCache& cache, const std::filesystem::path& path) {
    ordered_json j;
    j["format_version"] = cache.format_version;
    j["q_decimal"] = cache.q_decimal;
    j["working_bits"] = cache.working_bits;
    j["tol_bits"] = cache.tol_bits;
    ordered_json recs = ordered_json::array();
    for (const ZeroRecord& r : cache.records) {
        ordered_json o;
        o["n"] = r.n;
        o["prec"] = static_cast<long>(r.x.value.prec());
        o["x_hex"] = r.x.value.hex();
        o["x_dec"] = r.x.value.decimal(40);
        o["err_hex"] = r.x.abs_err.hex();
        o["lo_hex"] = r.bracket_lo.hex();
        o["hi_hex"] = r.bracket_hi.hex();
        o["residual_dec"] = r.residual.value.decimal(20);
        o["residual_prec"] = static_cast<long>(r.residual.value.prec());
        o["residual_hex"] = r.residual.value.hex();
        o["residual_err_hex"] = r.residual.abs_err.hex();
        o["working_bits_used"] = r.working_bits_used;
        o["newton_iters"] = r.newton_iters;
        o["source"] = source_name(r.source);
        recs.push_back(std::move(o));
    }
    j["records"] = std::move(recs);
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open cache file for writing: " + path.string());
    out << j.dump(2) << '\n';
}

ZeroCache load_cache(const std::filesystem::path& path, const Params& params) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open cache file: " + path.string());
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("malformed cache file " + path.string() + ": " + e.what());
    }
    try {
        ZeroCache cache;
        cache.format_version = j.at("format_version").get<int>();
        if (cache.format_version != kCacheFormatVersion) {
            throw parse_error("unsupported cache format_version " +
                              std::to_string(cache.format_version));
        }
        cache.q_decimal = j.at("q_decimal").get<std::string>();
        cache.working_bits = j.at("working_bits").get<long>();
        cache.tol_bits = j.at("tol_bits").get<long>();
        if (cache.q_decimal != params.q_decimal()) {
            throw cache_error("cache fingerprint mismatch: file has q = '" + cache.q_decimal +
                              "', run uses q = '" + params.q_decimal() + "'");
        }
        for (const auto& o : j.at("records")) {
            ZeroRecord r;
            r.n = o.at("n").get<long>();
            const mpfr_prec_t prec = static_cast<mpfr_prec_t>(o.at("prec").get<long>());
            r.x.value = Real::from_hex(o.at("x_hex").get<std::string>(), prec);
            r.x.abs_err = Real::from_hex(o.at("err_hex").get<std::string>(), kBoundPrec);
            r.bracket_lo = Real::from_hex(o.at("lo_hex").get<std::string>(), prec);
            r.bracket_hi = Real::from_hex(o.at("hi_hex").get<std::string>(), prec);
            const mpfr_prec_t rprec =
                static_cast<mpfr_prec_t>(o.at("residual_prec").get<long>());
            r.residual.value = Real::from_hex(o.at("residual_hex").get<std::string>(), rprec);
            r.residual.abs_err =
                Real::from_hex(o.at("residual_err_hex").get<std::string>(), kBoundPrec);
            r.working_bits_used = o.at("working_bits_used").get<long>();
            r.newton_iters = o.at("newton_iters").get<long>();
            r.source = source_from_name(o.at("source").get<std::string>());
            cache.records.push_back(std::move(r));
        }
        validate_interlacing(cache.records, params);
        return cache;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("cache file " + path.string() + " is missing fields: " + e.what());
    }
}

} // namespace defexp

#pragma once

// Quantization exponents, dimension estimation from error sequences, and
// coefficient subsequence analysis. High-precision floats throughout: the
// geometric error rates underflow hardware doubles long before level 200.

#include "blocks.hpp"
#include "numeric.hpp"
#include "system.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace condquant {

// ---------------------------------------------------------------------------
// Exponent equation: the unique kappa with sum_j (p_j b_j^r)^(kappa/(r+kappa)) = 1

struct ExponentProblem {
    std::vector<Rational> probs;  // p_j in (0,1)
    std::vector<Rational> lower;  // a_j in (0,1); may be empty (no lower root)
    std::vector<Rational> upper;  // b_j in (0,1)
    Rational order = 2;           // r > 0
};

struct NoRoot : std::runtime_error {
    NoRoot() : std::runtime_error("solve_exponent: no root in the bracket") {}
};

struct ExponentResult {
    Real kappa;                // root for the upper ratios
    std::optional<Real> l;     // root for the lower ratios, when given
    Real residual;             // |equation(kappa) - 1|
};

// Both presets: two maps with probability 1/3 and contraction ratio 1/5.
inline ExponentProblem preset_problem(Case, Rational order = 2) {
    return {{Rational(1, 3), Rational(1, 3)},
            {Rational(1, 5), Rational(1, 5)},
            {Rational(1, 5), Rational(1, 5)},
            std::move(order)};
}

namespace detail {

inline void check_problem(const ExponentProblem& pb) {
    if (pb.order <= 0)
        throw std::invalid_argument("ExponentProblem: order r > 0 required");
    if (pb.probs.empty() || pb.probs.size() != pb.upper.size() ||
        (!pb.lower.empty() && pb.lower.size() != pb.probs.size()))
        throw std::invalid_argument("ExponentProblem: mismatched lengths");
    auto in_unit = [](const Rational& x) { return 0 < x && x < 1; };
    for (const Rational& p : pb.probs)
        if (!in_unit(p))
            throw std::invalid_argument("ExponentProblem: probs in (0,1)");
    for (const Rational& b : pb.upper)
        if (!in_unit(b))
            throw std::invalid_argument("ExponentProblem: ratios in (0,1)");
    for (const Rational& a : pb.lower)
        if (!in_unit(a))
            throw std::invalid_argument("ExponentProblem: ratios in (0,1)");
}

// f(x) = sum_j (p_j ratio_j^r)^(x/(r+x)) - 1, strictly decreasing in x
inline Real exponent_equation(const std::vector<Real>& terms, const Real& r,
                              const Real& x) {
    Real total = 0;
    for (const Real& t : terms) total += pow(t, x / (r + x));
    return total - 1;
}

inline Real bisect_exponent(const std::vector<Real>& terms, const Real& r) {
    Real lo(Real("1e-9")), hi(10);
    if (exponent_equation(terms, r, lo) <= 0) throw NoRoot();
    while (exponent_equation(terms, r, hi) > 0) {
        hi *= 2;
        if (hi > Real("1e6")) throw NoRoot();
    }
    for (int i = 0; i < 300; ++i) {
        Real mid = (lo + hi) / 2;
        if (exponent_equation(terms, r, mid) > 0)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2;
}

inline std::vector<Real> equation_terms(const std::vector<Rational>& probs,
                                        const std::vector<Rational>& ratios,
                                        const Real& r) {
    std::vector<Real> terms;
    terms.reserve(probs.size());
    for (size_t j = 0; j < probs.size(); ++j)
        terms.push_back(to_real(probs[j]) * pow(to_real(ratios[j]), r));
    return terms;
}

}  // namespace detail

inline ExponentResult solve_exponent(const ExponentProblem& pb) {
    detail::check_problem(pb);
    Real r = to_real(pb.order);
    std::vector<Real> upper = detail::equation_terms(pb.probs, pb.upper, r);
    ExponentResult out{detail::bisect_exponent(upper, r), std::nullopt,
                       Real(0)};
    out.residual = abs(detail::exponent_equation(upper, r, out.kappa));
    if (!pb.lower.empty())
        out.l = detail::bisect_exponent(
            detail::equation_terms(pb.probs, pb.lower, r), r);
    return out;
}

// The r=2 exponent of a preset (identical for both).
inline Real preset_kappa(Case c) { return solve_exponent(preset_problem(c)).kappa; }

// ---------------------------------------------------------------------------
// Error series and derived tables

struct SeriesPoint {
    Int n;
    Rational v;
    std::string label;
};

using ErrorSeries = std::vector<SeriesPoint>;

inline void validate_series(const ErrorSeries& series) {
    for (size_t i = 0; i < series.size(); ++i) {
        const SeriesPoint& p = series[i];
        if (p.n < 1 || p.v <= 0 || p.v >= 1)
            throw std::invalid_argument(
                "ErrorSeries: need n >= 1 and 0 < V_n < 1");
        if (i && !(series[i - 1].n < p.n && p.v < series[i - 1].v))
            throw std::invalid_argument(
                "ErrorSeries: n strictly increasing, V strictly decreasing");
    }
}

struct DimRow {
    Int n;
    Real d;  // 2 log n / (-log V_n)
};

struct DimTable {
    std::vector<DimRow> rows;
    std::optional<Real> extrapolate;  // two-point fit of d_n = D - c/log n
};

inline DimTable dim_table(const ErrorSeries& series) {
    validate_series(series);
    DimTable out;
    out.rows.reserve(series.size());
    for (const SeriesPoint& p : series)
        out.rows.push_back({p.n, 2 * log(to_real(p.n)) / -log(to_real(p.v))});
    if (out.rows.size() >= 2) {
        // eliminate c between the last row and the row whose log-count is
        // nearest to half the final one (well-separated, noise-insensitive)
        size_t last = out.rows.size() - 1;
        Real l2 = log(to_real(out.rows[last].n));
        size_t pick = 0;
        Real best = -1;
        for (size_t i = 0; i < last; ++i) {
            Real gap = abs(log(to_real(out.rows[i].n)) - l2 / 2);
            if (best < 0 || gap < best) {
                best = gap;
                pick = i;
            }
        }
        Real l1 = log(to_real(out.rows[pick].n));
        out.extrapolate = (out.rows[last].d * l2 - out.rows[pick].d * l1) /
                          (l2 - l1);
    }
    return out;
}

struct CoeffRow {
    Int n;
    Real value;  // n^(2/D) * V_n
};

inline std::vector<CoeffRow> coeff_table(const ErrorSeries& series,
                                         const Real& dimension) {
    if (dimension <= 0)
        throw std::invalid_argument("coeff_table: dimension D > 0");
    validate_series(series);
    std::vector<CoeffRow> out;
    out.reserve(series.size());
    for (const SeriesPoint& p : series)
        out.push_back(
            {p.n, pow(to_real(p.n), 2 / dimension) * to_real(p.v)});
    return out;
}

// ---------------------------------------------------------------------------
// Series builders from the closed forms and the greedy sweep

// (F(k), closed-form error) for k in [from, to]
inline ErrorSeries f_series(Case c, int from, int to) {
    ErrorSeries out;
    for (int k = from; k <= to; ++k)
        out.push_back({seq(c, k).F, v_F_closed(c, k),
                       "F(" + std::to_string(k) + ")"});
    validate_series(out);
    return out;
}

// mid-transition counts with their closed-form errors
inline ErrorSeries intermediate_series(Case c, int from, int to) {
    ErrorSeries out;
    for (int k = from; k <= to; ++k) {
        Intermediate im = intermediate_sequence(c, k);
        out.push_back({std::move(im.count), std::move(im.error),
                       "mid(" + std::to_string(k) + ")"});
    }
    validate_series(out);
    return out;
}

// every count in [F(from), F(to)] with its exact greedy family error
inline ErrorSeries greedy_sweep_series(Case c, int from, int to) {
    ErrorSeries out;
    BlockFamily start = alpha_F(c, from);
    out.push_back({Int(start.total_count()), start.total_error(), ""});
    Int target = seq(c, to).F;
    greedy_refine(std::move(start), from, target.convert_to<long long>(),
                  [&](long long n, const Rational& err) {
                      out.push_back({Int(n), err, ""});
                  });
    validate_series(out);
    return out;
}

// ---------------------------------------------------------------------------
// Coefficient bounds and subsequence limits

struct BoundsReport {
    Case cse;
    Real power;            // the coefficient exponent 2/D in use
    Real bracket_lo, bracket_hi;
    std::optional<Rational> bracket_lo_exact, bracket_hi_exact;
    Real emp_min, emp_max;  // empirical extremes of n^(2/D) V_n on the sweep
    Int emp_min_n, emp_max_n;
    bool contained;         // empirical range inside the bracket
    Real limit_main;        // limit along the structured counts F(k)
    Real limit_inter;       // limit along the mid-transition counts
    bool coefficient_exists;  // false when the two limits differ
};

namespace detail {

// the mid-transition discrete limit constant: prefactor^(2/kappa) (C - corr)
inline Real discrete_intermediate_limit(const Real& kappa) {
    Rational pref = 6 + Rational(Int(8193), ipow(2, 30));
    Rational q(75, 128);
    Rational corr = Rational(128, 3975) * rpow(q, 31) +
                    Rational(1024, 35775) * (rpow(q, 18) - rpow(q, 31)) +
                    Rational(450241, 5323500);
    Rational c(769208, 5884749);
    Rational scale = c - corr;
    return pow(to_real(pref), 2 / kappa) * to_real(scale);
}

}  // namespace detail

inline BoundsReport bounds_report(Case c, int from = 2, int to = 8) {
    BoundsReport out;
    out.cse = c;
    ErrorSeries sweep = greedy_sweep_series(c, from, to);
    if (c == Case::uniform) {
        out.power = 2;  // D = 1
        out.bracket_lo_exact = Rational(1, 2064);
        out.bracket_hi_exact = Rational(16, 129);
        out.bracket_lo = to_real(*out.bracket_lo_exact);
        out.bracket_hi = to_real(*out.bracket_hi_exact);
        Rational mn, mx;
        bool inside = true;
        for (size_t i = 0; i < sweep.size(); ++i) {
            Rational coeff = sweep[i].n * sweep[i].n * sweep[i].v;
            if (i == 0 || coeff < mn) {
                mn = coeff;
                out.emp_min_n = sweep[i].n;
            }
            if (i == 0 || coeff > mx) {
                mx = coeff;
                out.emp_max_n = sweep[i].n;
            }
            if (coeff < *out.bracket_lo_exact || coeff > *out.bracket_hi_exact)
                inside = false;
        }
        out.emp_min = to_real(mn);
        out.emp_max = to_real(mx);
        out.contained = inside;
        out.limit_main = to_real(Rational(1, 129));
        out.limit_inter = to_real(Rational(171, 17200));
    } else {
        Real kappa = preset_kappa(c);
        Real cc = to_real(Rational(769208, 5884749));
        out.power = 2 / kappa;
        out.bracket_lo = pow(to_real(Rational(25, 4)), 1 / kappa) * cc;
        out.bracket_hi = pow(Real(100), 1 / kappa) * cc;
        bool started = false;
        Real mn(0), mx(0);
        for (const SeriesPoint& p : sweep) {
            Real coeff = pow(to_real(p.n), out.power) * to_real(p.v);
            if (!started || coeff < mn) {
                mn = coeff;
                out.emp_min_n = p.n;
            }
            if (!started || coeff > mx) {
                mx = coeff;
                out.emp_max_n = p.n;
            }
            started = true;
        }
        out.emp_min = mn;
        out.emp_max = mx;
        Real slack(Real("1e-6"));
        out.contained =
            mn >= out.bracket_lo - slack && mx <= out.bracket_hi + slack;
        out.limit_main = pow(Real(5), 2 / kappa) * cc;
        out.limit_inter = detail::discrete_intermediate_limit(kappa);
    }
    Real gap = abs(out.limit_main - out.limit_inter);
    out.coefficient_exists = gap <= 10 * Real("1e-12") * (1 + abs(out.limit_main));
    return out;
}

// ---------------------------------------------------------------------------
// Dimension sandwich: max{l_r, D_r(nu)} <= D_r(P) <= max{kappa_r, D_r(nu)}

struct UnknownNuDimension : std::runtime_error {
    UnknownNuDimension()
        : std::runtime_error(
              "dimension_bounds: the auxiliary measure's quantization "
              "dimension is required") {}
};

struct DimensionBounds {
    Real l;        // lower-ratio exponent
    Real kappa;    // upper-ratio exponent
    Real nu_dim;   // quantization dimension of the auxiliary measure
    Real lower;    // max(l, nu_dim)
    Real upper;    // max(kappa, nu_dim)
};

inline DimensionBounds dimension_bounds(const ExponentProblem& pb,
                                        std::optional<Real> nu_dimension) {
    if (!nu_dimension) throw UnknownNuDimension();
    ExponentResult er = solve_exponent(pb);
    DimensionBounds out;
    out.kappa = er.kappa;
    out.l = er.l ? *er.l : er.kappa;
    out.nu_dim = *nu_dimension;
    out.lower = std::max(out.l, out.nu_dim);
    out.upper = std::max(out.kappa, out.nu_dim);
    return out;
}

inline DimensionBounds dimension_bounds(Case c, Rational order = 2) {
    Real nu_dim = c == Case::discrete ? Real(0) : Real(1);
    return dimension_bounds(preset_problem(c, std::move(order)), nu_dim);
}

}  // namespace condquant

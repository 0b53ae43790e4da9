#pragma once

// Exact 1-D k-means on a discretized measure. Squared-error-optimal clusters
// of a sorted 1-D measure are contiguous, so the optimum is a contiguous
// partition found by dynamic programming over prefix sums (divide-and-conquer
// exploiting the monotonicity of optimal split points). The float DP cost is
// wrapped into a rigorous enclosure of the true V_n(P) through the measure's
// transport bound: |sqrt(V_n(P)) - sqrt(V_n(atoms))| <= W2(P, atoms).

#include "discretize.hpp"
#include "integrals.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace condquant {

struct DPResult {
    std::vector<int> boundaries;    // cell start indices into atoms (size n)
    std::vector<double> codebook;   // cell means
    double cost;                    // between-cluster cost on the atoms
    double cost_estimate;           // cost + total within-piece variance
    Enclosure enclosure;            // rigorous bounds on the true V_n(P)
    bool tie;                       // another top-level split within 1e-14
};

namespace detail {

// [lower, upper] rational bounds on sqrt(x), verified by squaring.
inline std::pair<Rational, Rational> sqrt_bounds(const Rational& x) {
    if (x < 0) throw std::invalid_argument("sqrt_bounds: negative");
    if (x == 0) return {Rational(0), Rational(0)};
    Real root = sqrt(to_real(x));
    Rational s(root);
    Rational guard = Rational(1, Int(1000000)) * Rational(1, Int(1000000));
    Rational lo = s * (1 - guard), hi = s * (1 + guard);
    while (lo * lo > x) lo *= (1 - guard);
    while (hi * hi < x) hi *= (1 + guard);
    return {lo, hi};
}

struct KahanPrefix {
    std::vector<double> sums;  // sums[i] = total of first i values
    double acc = 0, comp = 0;

    explicit KahanPrefix(size_t n) { sums.reserve(n + 1), sums.push_back(0); }

    void push(double v) {
        double y = v - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        sums.push_back(acc);
    }
};

}  // namespace detail

// Optimal contiguous n-partition of the atom measure, float arithmetic.
inline DPResult dp_optimal(const DiscretizedMeasure& measure, int n) {
    const int K = int(measure.atoms.size());
    if (n < 1 || n > K)
        throw std::invalid_argument(
            "dp_optimal: need 1 <= n <= atom count");
    auto s0 = detail::KahanPrefix(size_t(K));
    auto s1 = detail::KahanPrefix(size_t(K));
    auto s2 = detail::KahanPrefix(size_t(K));
    for (const WeightedAtom& a : measure.atoms) {
        double w = a.mass.convert_to<double>();
        double x = a.position.convert_to<double>();
        s0.push(w);
        s1.push(w * x);
        s2.push(w * x * x);
    }
    auto cost = [&](int a, int b) -> double {  // atoms [a, b)
        if (b - a <= 1) return 0;
        double m0 = s0.sums[size_t(b)] - s0.sums[size_t(a)];
        if (m0 <= 0) return 0;
        double m1 = s1.sums[size_t(b)] - s1.sums[size_t(a)];
        double m2 = s2.sums[size_t(b)] - s2.sums[size_t(a)];
        double c = m2 - m1 * m1 / m0;
        return c > 0 ? c : 0;
    };

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(size_t(K) + 1, kInf), cur(size_t(K) + 1, kInf);
    std::vector<std::vector<int>> opt(size_t(n) + 1,
                                      std::vector<int>(size_t(K) + 1, 0));
    prev[0] = 0;

    // one DP layer via divide and conquer on the monotone split points
    auto solve_layer = [&](int k, auto&& self, int lo, int hi, int alo,
                           int ahi) -> void {
        if (lo > hi) return;
        int mid = (lo + hi) / 2;
        double best = kInf;
        int besta = alo;
        for (int a = alo; a <= std::min(mid - 1, ahi); ++a) {
            if (prev[size_t(a)] == kInf) continue;
            double c = prev[size_t(a)] + cost(a, mid);
            if (c < best) {
                best = c;
                besta = a;
            }
        }
        cur[size_t(mid)] = best;
        opt[size_t(k)][size_t(mid)] = besta;
        self(k, self, lo, mid - 1, alo, besta);
        self(k, self, mid + 1, hi, besta, ahi);
    };

    bool tie = false;
    for (int k = 1; k <= n; ++k) {
        std::fill(cur.begin(), cur.end(), kInf);
        if (k < n) {
            solve_layer(k, solve_layer, k, K, k - 1, K - 1);
        } else {
            // final layer: full scan over the top-level split for tie checks
            double best = kInf, second = kInf;
            int besta = n - 1;
            for (int a = n - 1; a <= K - 1; ++a) {
                if (prev[size_t(a)] == kInf) continue;
                double c = prev[size_t(a)] + cost(a, K);
                if (c < best) {
                    second = best;
                    best = c;
                    besta = a;
                } else if (c < second) {
                    second = c;
                }
            }
            cur[size_t(K)] = best;
            opt[size_t(k)][size_t(K)] = besta;
            tie = second - best <= 1e-14 * std::max(1.0, best);
        }
        std::swap(prev, cur);
    }

    DPResult r;
    r.cost = prev[size_t(K)];
    r.tie = tie;
    r.boundaries.assign(size_t(n), 0);
    int i = K;
    for (int k = n; k >= 1; --k) {
        int a = opt[size_t(k)][size_t(i)];
        r.boundaries[size_t(k) - 1] = a;
        i = a;
    }
    r.codebook.reserve(size_t(n));
    for (int k = 0; k < n; ++k) {
        int a = r.boundaries[size_t(k)];
        int b = k + 1 < n ? r.boundaries[size_t(k) + 1] : K;
        double m0 = s0.sums[size_t(b)] - s0.sums[size_t(a)];
        double m1 = s1.sums[size_t(b)] - s1.sums[size_t(a)];
        r.codebook.push_back(m1 / m0);
    }
    double within = measure.w2sq.convert_to<double>();
    r.cost_estimate = r.cost + within;

    // rigorous enclosure: inflate the float cost both ways, then apply the
    // transport bound on sqrt(V_n)
    Rational c(r.cost);
    Rational slack = Rational(1, Int(1000000000));
    Rational c_lo = c * (1 - slack), c_hi = c * (1 + slack);
    if (c_lo < 0) c_lo = 0;
    Rational sc_lo = detail::sqrt_bounds(c_lo).first;
    Rational sc_hi = detail::sqrt_bounds(c_hi).second;
    Rational w2_hi = detail::sqrt_bounds(measure.w2sq).second;
    Rational lo = sc_lo - w2_hi;
    if (lo < 0) lo = 0;
    Rational hi = sc_hi + w2_hi;
    r.enclosure = Enclosure{lo * lo, hi * hi};
    return r;
}

// The same contiguous-partition optimum in exact rational arithmetic
// (small instances; used to validate the float DP).
inline Rational dp_optimal_exact(const DiscretizedMeasure& measure, int n) {
    const int K = int(measure.atoms.size());
    if (n < 1 || n > K)
        throw std::invalid_argument("dp_optimal_exact: need 1 <= n <= atoms");
    std::vector<Rational> s0(size_t(K) + 1, 0), s1(size_t(K) + 1, 0),
        s2(size_t(K) + 1, 0);
    for (int i = 0; i < K; ++i) {
        const WeightedAtom& a = measure.atoms[size_t(i)];
        s0[size_t(i) + 1] = s0[size_t(i)] + a.mass;
        s1[size_t(i) + 1] = s1[size_t(i)] + a.mass * a.position;
        s2[size_t(i) + 1] = s2[size_t(i)] + a.mass * a.position * a.position;
    }
    auto cost = [&](int a, int b) -> Rational {  // atoms [a, b)
        Rational m0 = s0[size_t(b)] - s0[size_t(a)];
        if (m0 == 0) return Rational(0);
        Rational m1 = s1[size_t(b)] - s1[size_t(a)];
        Rational m2 = s2[size_t(b)] - s2[size_t(a)];
        return m2 - m1 * m1 / m0;
    };
    std::vector<std::optional<Rational>> prev(size_t(K) + 1), cur(size_t(K) + 1);
    prev[0] = Rational(0);
    for (int k = 1; k <= n; ++k) {
        std::fill(cur.begin(), cur.end(), std::nullopt);
        for (int i = k; i <= K; ++i) {
            std::optional<Rational> best;
            for (int a = k - 1; a <= i - 1; ++a) {
                if (!prev[size_t(a)]) continue;
                Rational c = *prev[size_t(a)] + cost(a, i);
                if (!best || c < *best) best = c;
            }
            cur[size_t(i)] = best;
        }
        std::swap(prev, cur);
    }
    return *prev[size_t(K)];
}

// Brute-force minimum over every contiguous partition (tiny instances only).
inline Rational exhaustive_optimal(const DiscretizedMeasure& measure, int n) {
    const int K = int(measure.atoms.size());
    if (n < 1 || n > K)
        throw std::invalid_argument("exhaustive_optimal: need 1 <= n <= atoms");
    std::vector<Rational> s0(size_t(K) + 1, 0), s1(size_t(K) + 1, 0),
        s2(size_t(K) + 1, 0);
    for (int i = 0; i < K; ++i) {
        const WeightedAtom& a = measure.atoms[size_t(i)];
        s0[size_t(i) + 1] = s0[size_t(i)] + a.mass;
        s1[size_t(i) + 1] = s1[size_t(i)] + a.mass * a.position;
        s2[size_t(i) + 1] = s2[size_t(i)] + a.mass * a.position * a.position;
    }
    auto cost = [&](int a, int b) -> Rational {
        Rational m0 = s0[size_t(b)] - s0[size_t(a)];
        if (m0 == 0) return Rational(0);
        Rational m1 = s1[size_t(b)] - s1[size_t(a)];
        Rational m2 = s2[size_t(b)] - s2[size_t(a)];
        return m2 - m1 * m1 / m0;
    };
    std::optional<Rational> best;
    // choose n-1 interior boundaries out of K-1 positions
    std::vector<int> cuts(size_t(n) - 1);
    auto rec = [&](int idx, int from, auto&& self) -> void {
        if (idx == n - 1) {
            Rational total = 0;
            int a = 0;
            for (int c : cuts) {
                total += cost(a, c);
                a = c;
            }
            total += cost(a, K);
            if (!best || total < *best) best = total;
            return;
        }
        for (int c = from; c <= K - (n - 1 - idx); ++c) {
            cuts[size_t(idx)] = c;
            self(idx + 1, c + 1, self);
        }
    };
    if (n == 1) return cost(0, K);
    rec(0, 1, rec);
    return *best;
}

}  // namespace condquant

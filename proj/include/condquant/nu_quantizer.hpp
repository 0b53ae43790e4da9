#pragma once

// Optimal quantizers of the companion measure nu.
//
// uniform: the optimal m-point set of a uniform density is the midpoint
//   lattice of m equal pieces, with error (width^2/12)/m^2 = (1/300)/m^2.
// discrete: the optimal m-point set keeps the first m-1 atoms and centers the
//   last point at the tail mean, with error (64/1575) 8^-m. An exact
//   contiguous-group DP (nu_dp_exact) re-derives this independently instead
//   of trusting the closed form.

#include "integrals.hpp"
#include "numeric.hpp"
#include "system.hpp"

#include <vector>

namespace condquant {

// Closed-form optimal m-point error of nu.
inline Rational nu_optimal_error(Case c, int m) {
    if (m < 1) throw std::invalid_argument("nu_optimal_error: m >= 1");
    if (c == Case::uniform) return Rational(1, 300) / (Rational(m) * m);
    return Rational(64, 1575) * rpow(Rational(1, 8), m);
}

// Optimal m-point codebook of nu in native coordinates (support [2/5, 3/5]).
inline std::vector<Rational> nu_optimal_points(Case c, int m) {
    if (m < 1) throw std::invalid_argument("nu_optimal_points: m >= 1");
    std::vector<Rational> pts;
    pts.reserve(size_t(m));
    if (c == Case::uniform) {
        for (int i = 1; i <= m; ++i)
            pts.push_back(Rational(2, 5) + Rational(2 * i - 1, 10 * m));
        return pts;
    }
    for (int j = 1; j < m; ++j) pts.push_back(nu_atom(j));
    pts.push_back(nu_tail_mean(m - 1));
    return pts;
}

struct NuDpResult {
    Rational error;
    std::vector<Rational> points;
    int tail_start;  // atom index where the final (tail) cell begins; 0 if n/a
};

// Exact DP over contiguous cells for the discrete nu: the first cells are
// groups of consecutive atoms, the last cell absorbs the geometric tail. The
// tail start is scanned over a window past m; beyond it the tail error is
// orders of magnitude below any grouped-prefix alternative.
inline NuDpResult nu_dp_exact(Case c, int m) {
    if (m < 1) throw std::invalid_argument("nu_dp_exact: m >= 1");
    if (c == Case::uniform) {
        return {nu_optimal_error(c, m), nu_optimal_points(c, m), 0};
    }
    const int K = m + 64;  // atoms considered individually
    // prefix sums over atoms 1..K of mass, mass*x, mass*x^2
    std::vector<Rational> s0(K + 1, 0), s1(K + 1, 0), s2(K + 1, 0);
    for (int j = 1; j <= K; ++j) {
        Rational mass = nu_atom_mass(j), x = nu_atom(j);
        s0[j] = s0[j - 1] + mass;
        s1[j] = s1[j - 1] + mass * x;
        s2[j] = s2[j - 1] + mass * x * x;
    }
    auto group_cost = [&](int a, int b) -> Rational {  // atoms a..b, 1-indexed inclusive
        Rational m0 = s0[b] - s0[a - 1], m1 = s1[b] - s1[a - 1],
                 m2 = s2[b] - s2[a - 1];
        return m2 - m1 * m1 / m0;
    };
    auto tail_var = [&](int q) -> Rational {  // atoms j > q as one cell
        Rational m0 = nu_tail_mass(q), m1 = nu_tail_first(q),
                 m2 = nu_tail_second(q);
        return m2 - m1 * m1 / m0;
    };
    // dp[k][i] = best cost covering atoms 1..i with k group cells
    auto dp = std::vector<std::vector<Rational>>(size_t(m));
    auto arg = std::vector<std::vector<int>>(size_t(m));
    dp[0].assign(size_t(K + 1), Rational(-1));  // -1 marks "unreachable"
    dp[0][0] = 0;
    for (int k = 1; k < m; ++k) {
        dp[size_t(k)].assign(size_t(K + 1), Rational(-1));
        arg[size_t(k)].assign(size_t(K + 1), 0);
        for (int i = k; i <= K; ++i) {
            Rational best = -1;
            int besta = 0;
            for (int a = k; a <= i; ++a) {
                if (k > 1 && a - 1 < k - 1) continue;
                Rational prev = dp[size_t(k - 1)][size_t(a - 1)];
                if (prev < 0) continue;
                Rational cand = prev + group_cost(a, i);
                if (best < 0 || cand < best) {
                    best = cand;
                    besta = a;
                }
            }
            dp[size_t(k)][size_t(i)] = best;
            arg[size_t(k)][size_t(i)] = besta;
        }
    }
    Rational best = -1;
    int best_i = 0;
    for (int i = m - 1; i <= K; ++i) {
        Rational prev = dp[size_t(m - 1)][size_t(i)];
        if (prev < 0) continue;
        Rational cand = prev + tail_var(i);
        if (best < 0 || cand < best) {
            best = cand;
            best_i = i;
        }
    }
    // reconstruct cell means
    std::vector<Rational> pts;
    pts.push_back(nu_tail_first(best_i) / nu_tail_mass(best_i));
    int i = best_i;
    for (int k = m - 1; k >= 1; --k) {
        int a = arg[size_t(k)][size_t(i)];
        Rational m0 = s0[i] - s0[a - 1], m1 = s1[i] - s1[a - 1];
        pts.push_back(m1 / m0);
        i = a - 1;
    }
    std::reverse(pts.begin(), pts.end());
    return {best, pts, best_i + 1};
}

}  // namespace condquant

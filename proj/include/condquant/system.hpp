#pragma once

// The two condensation systems under study. Both use the contractions
// S1(x) = x/5 and S2(x) = x/5 + 4/5 with weights (1/3, 1/3; 1/3); they differ
// in the companion measure nu supported on [2/5, 3/5]:
//   * discrete: nu = sum_j 2^-j * delta(x_j), x_j = 3/5 - (2/5) 2^-j
//   * uniform:  nu = uniform density on [2/5, 3/5]
// The fixed-point measure P = (1/3) P∘S1^-1 + (1/3) P∘S2^-1 + (1/3) nu lives
// on [0,1]; level-k cylinders J_w = S_w([0,1]) carry mass 3^-|w| and the
// nu-copies C_w = S_w(supp nu) carry mass 3^-(|w|+1).

#include "numeric.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace condquant {

enum class Case { discrete, uniform };

inline const char* case_name(Case c) {
    return c == Case::discrete ? "discrete" : "uniform";
}

inline Case case_from_name(const std::string& s) {
    if (s == "discrete") return Case::discrete;
    if (s == "uniform") return Case::uniform;
    throw std::invalid_argument("unknown measure: " + s);
}

// Address of a cylinder: a string of digits 1/2, at most 64 letters.
using Word = std::vector<unsigned char>;

inline constexpr int kMaxWordLength = 64;

struct Affine {
    Rational scale, shift;
    Rational operator()(const Rational& x) const { return scale * x + shift; }
};

inline const Affine& contraction(int j) {
    static const std::array<Affine, 2> s = {
        Affine{Rational(1, 5), Rational(0)},
        Affine{Rational(1, 5), Rational(4, 5)},
    };
    if (j < 1 || j > 2) throw std::out_of_range("contraction index");
    return s[j - 1];
}

inline Affine word_map(const Word& w) {
    if (w.size() > kMaxWordLength) throw std::length_error("word too long");
    Affine m{Rational(1), Rational(0)};
    for (unsigned char d : w) {
        const Affine& s = contraction(d);
        m = Affine{m.scale * s.scale, m.scale * s.shift + m.shift};
    }
    return m;
}

struct Interval {
    Rational lo, hi;
};

inline Interval cylinder(const Word& w) {
    Affine m = word_map(w);
    return {m.shift, m.shift + m.scale};
}

// Support interval of the nu-copy inside cylinder w.
inline Interval nu_copy(const Word& w) {
    Affine m = word_map(w);
    return {m(Rational(2, 5)), m(Rational(3, 5))};
}

// The two open gaps of cylinder w that carry no mass at all.
inline std::array<Interval, 2> exclusion_gaps(const Word& w) {
    Affine m = word_map(w);
    return {Interval{m(Rational(1, 5)), m(Rational(2, 5))},
            Interval{m(Rational(3, 5)), m(Rational(4, 5))}};
}

// ---------------------------------------------------------------------------
// nu: atoms (discrete case) and exact moments

inline Rational nu_atom(int j) {  // j >= 1
    return Rational(3, 5) - Rational(2, 5) * rpow(Rational(1, 2), j);
}

inline Rational nu_atom_mass(int j) { return rpow(Rational(1, 2), j); }

// Raw tail sums over atoms j > q: mass, first and second moment.
inline Rational nu_tail_mass(int q) { return rpow(Rational(1, 2), q); }

inline Rational nu_tail_first(int q) {
    return Rational(3, 5) * rpow(Rational(1, 2), q) -
           Rational(2, 15) * rpow(Rational(1, 4), q);
}

inline Rational nu_tail_second(int q) {
    return Rational(9, 25) * rpow(Rational(1, 2), q) -
           Rational(4, 25) * rpow(Rational(1, 4), q) +
           Rational(4, 175) * rpow(Rational(1, 8), q);
}

inline Rational nu_tail_mean(int q) { return nu_tail_first(q) / nu_tail_mass(q); }

struct Moments {
    Rational mean, second;
    Rational variance() const { return second - mean * mean; }
};

inline Moments nu_moments(Case c) {
    if (c == Case::discrete)
        return {nu_tail_first(0), nu_tail_second(0)};  // 7/15, 39/175
    return {Rational(1, 2), Rational(19, 75)};
}

// ---------------------------------------------------------------------------
// P: exact moments from the fixed-point identity
//   E[f(P)] = (1/3) E[f(S1 X)] + (1/3) E[f(S2 X)] + (1/3) E[f(nu)]

inline Moments p_moments(Case c) {
    Moments nu = nu_moments(c);
    // mean: E = (1/3)(E/5) + (1/3)(E/5 + 4/5) + (1/3) E_nu
    Rational mean = (Rational(4, 15) + nu.mean / 3) / (1 - Rational(2, 15));
    // second: E2 = (1/3)(E2/25) + (1/3)(E2/25 + (8/25)E + 16/25) + (1/3)E2_nu
    Rational second = (Rational(8, 75) * mean + Rational(16, 75) + nu.second / 3) /
                      (1 - Rational(2, 75));
    return {mean, second};
}

// One-mean quantization error of P (its variance) and of nu.
inline Rational p_variance(Case c) { return p_moments(c).variance(); }
inline Rational nu_variance(Case c) { return nu_moments(c).variance(); }

// Optimal two-mean quantizer of P. These closed values are locked by the
// solver tests (exact DP agreement) before anything downstream trusts them.
inline std::array<Rational, 2> p_two_means_points(Case c) {
    if (c == Case::discrete)
        return {Rational(659, 2730), Rational(1621, 1950)};
    return {Rational(13, 60), Rational(47, 60)};
}

inline Rational p_two_means_error(Case c) {
    return c == Case::discrete ? Rational(499067, 18505500)
                               : Rational(8003, 262800);
}

}  // namespace condquant

#pragma once

// Rigorous discretization of P: the self-similar decomposition is expanded to
// a chosen depth, every collapsed piece becomes a point mass at its
// conditional mean, and the squared L2-transport distance from P to the atom
// measure is bounded by the sum of the collapsed pieces' variances.

#include "numeric.hpp"
#include "system.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace condquant {

struct WeightedAtom {
    Rational position;
    Rational mass;
    Rational within_var;  // variance of the piece this atom replaces
};

struct DiscretizedMeasure {
    Case cse = Case::discrete;
    int depth = 0;   // cylinder depth m
    int nu_res = 0;  // sub-atoms per nu copy (q)
    std::vector<WeightedAtom> atoms;  // sorted by position
    Rational w2sq;  // >= squared L2-transport distance to the true P

    Rational total_mass() const {
        Rational s = 0;
        for (const WeightedAtom& a : atoms) s += a.mass;
        return s;
    }
};

namespace detail {

// Variance of the tail distribution conditioned on landing in the tail.
inline Rational nu_tail_variance(int q) {
    Rational m0 = nu_tail_mass(q), m1 = nu_tail_first(q), m2 = nu_tail_second(q);
    return m2 / m0 - (m1 / m0) * (m1 / m0);
}

inline void discretize_nu_copy(Case c, const Affine& m, const Rational& mass,
                               int q, DiscretizedMeasure& out) {
    if (c == Case::uniform) {
        // q equal-mass pieces of the copy's support
        Rational piece = mass / q;
        Rational native_w = Rational(1, 5) / q;
        Rational var = m.scale * m.scale * native_w * native_w / 12;
        for (int i = 0; i < q; ++i) {
            Rational mid = Rational(2, 5) + native_w * i + native_w / 2;
            out.atoms.push_back({m(mid), piece, var});
            out.w2sq += piece * var;
        }
        return;
    }
    for (int j = 1; j <= q; ++j)
        out.atoms.push_back({m(nu_atom(j)), mass * nu_atom_mass(j), Rational(0)});
    Rational tail_mass = mass * nu_tail_mass(q);
    Rational tail_mean = nu_tail_first(q) / nu_tail_mass(q);
    Rational var = m.scale * m.scale * nu_tail_variance(q);
    out.atoms.push_back({m(tail_mean), tail_mass, var});
    out.w2sq += tail_mass * var;
}

inline void discretize_rec(Case c, const Affine& m, const Rational& mass,
                           int levels_left, int q, const Rational& p_mean,
                           const Rational& p_var, DiscretizedMeasure& out) {
    if (levels_left == 0) {
        Rational var = m.scale * m.scale * p_var;
        out.atoms.push_back({m(p_mean), mass, var});
        out.w2sq += mass * var;
        return;
    }
    Rational third = mass / 3;
    discretize_nu_copy(c, m, third, q, out);
    Affine m1{m.scale / 5, m.shift};
    Affine m2{m.scale / 5, m.shift + m.scale * Rational(4, 5)};
    discretize_rec(c, m1, third, levels_left - 1, q, p_mean, p_var, out);
    discretize_rec(c, m2, third, levels_left - 1, q, p_mean, p_var, out);
}

}  // namespace detail

inline DiscretizedMeasure discretize(Case c, int m, int q) {
    if (m < 1 || q < 1)
        throw std::invalid_argument("discretize: need depth >= 1 and q >= 1");
    DiscretizedMeasure out;
    out.cse = c;
    out.depth = m;
    out.nu_res = q;
    Moments pm = p_moments(c);
    detail::discretize_rec(c, Affine{Rational(1), Rational(0)}, Rational(1), m,
                           q, pm.mean, pm.variance(), out);
    std::sort(out.atoms.begin(), out.atoms.end(),
              [](const WeightedAtom& a, const WeightedAtom& b) {
                  return a.position < b.position;
              });
    return out;
}

}  // namespace condquant

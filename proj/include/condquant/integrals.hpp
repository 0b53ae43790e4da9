#pragma once

// Exact squared-error integrals of codebooks against P.
//
// The evaluator splits [0,1] into Voronoi cells at exact midpoints, then
// walks the self-similar structure: a cylinder wholly inside one cell costs
// mass * ((c - mean)^2 + scale^2 * V(P)) in closed form; a cylinder cut by a
// cell boundary recurses into its three children (the boundary eventually
// lands in a massless gap, in the nu-copy, or exactly on a region edge).
// nu-copies are integrated exactly: piecewise-uniform segments in the uniform
// case, atom sums plus a closed-form geometric tail in the discrete case.

#include "numeric.hpp"
#include "system.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace condquant {

// Cost of the uniform density on [a,b] with total mass `mass` against point c.
inline Rational uniform_segment_cost(const Rational& a, const Rational& b,
                                     const Rational& mass, const Rational& c) {
    if (b <= a) return Rational(0);
    Rational mid = (a + b) / 2, w = b - a;
    return mass * ((c - mid) * (c - mid) + w * w / 12);
}

// Cost of the discrete-nu tail (atoms j >= t) mapped through x -> s*x + u,
// carrying mass `mass * 2^-(t-1)` of the copy's mass `mass`, against point c.
inline Rational discrete_tail_cost(int t, const Rational& s, const Rational& u,
                                   const Rational& mass, const Rational& c) {
    Rational cp = (c - u) / s;  // pull the point back to nu coordinates
    int q = t - 1;
    Rational m0 = nu_tail_mass(q), m1 = nu_tail_first(q), m2 = nu_tail_second(q);
    return mass * s * s * (m2 - 2 * cp * m1 + cp * cp * m0);
}

namespace detail {

struct VoronoiCells {
    std::vector<Rational> points;      // sorted, deduplicated
    std::vector<Rational> boundaries;  // midpoints, size = points.size()-1

    // Index of the first cell intersecting [x, ...). Cells are half-open
    // [b_{i-1}, b_i).
    size_t cell_at(const Rational& x) const {
        auto it = std::upper_bound(boundaries.begin(), boundaries.end(), x);
        return size_t(it - boundaries.begin());
    }

    // Index of the cell containing [lo, hi] if no boundary lies strictly
    // inside; -1 otherwise.
    int covering_cell(const Rational& lo, const Rational& hi) const {
        size_t i = cell_at(lo);
        if (i < boundaries.size() && boundaries[i] < hi) return -1;
        return int(i);
    }
};

inline VoronoiCells make_cells(std::vector<Rational> points) {
    if (points.empty()) throw std::invalid_argument("empty codebook");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    VoronoiCells cells;
    cells.boundaries.reserve(points.size() - 1);
    for (size_t i = 0; i + 1 < points.size(); ++i)
        cells.boundaries.push_back((points[i] + points[i + 1]) / 2);
    cells.points = std::move(points);
    return cells;
}

// Exact cost of the nu-copy sitting inside the cylinder mapped by m, with
// total copy mass `mass`, against the cells.
inline Rational nu_copy_cost(Case cse, const VoronoiCells& cells,
                             const Affine& m, const Rational& mass) {
    Rational a = m(Rational(2, 5)), b = m(Rational(3, 5));
    size_t i = cells.cell_at(a);
    Rational total = 0;
    if (cse == Case::uniform) {
        Rational density_mass = mass / (b - a);
        Rational x = a;
        while (true) {
            bool more = i < cells.boundaries.size() && cells.boundaries[i] < b;
            Rational cut = more ? cells.boundaries[i] : b;
            total += uniform_segment_cost(x, cut, density_mass * (cut - x),
                                          cells.points[i]);
            if (!more) return total;
            x = cut;
            ++i;
        }
    }
    int j = 1;  // next atom index to place
    while (true) {
        bool more = i < cells.boundaries.size() && cells.boundaries[i] < b;
        if (!more) {  // last cell gets the remaining atoms' tail
            return total + discrete_tail_cost(j, m.scale, m.shift, mass,
                                              cells.points[i]);
        }
        const Rational& cut = cells.boundaries[i];
        const Rational& c = cells.points[i];
        while (m(nu_atom(j)) < cut) {
            Rational x = m(nu_atom(j));
            total += mass * nu_atom_mass(j) * (x - c) * (x - c);
            if (++j > 100000)
                throw std::runtime_error(
                    "distortion: boundary splits the atom accumulation point");
        }
        ++i;
    }
}

inline constexpr int kMaxRecursionDepth = 100;

inline Rational cylinder_cost(Case cse, const VoronoiCells& cells,
                              const Affine& m, const Rational& mass,
                              const Rational& p_mean, const Rational& p_var,
                              int depth) {
    Rational lo = m.shift, hi = m.shift + m.scale;
    int cell = cells.covering_cell(lo, hi);
    if (cell >= 0) {
        const Rational& c = cells.points[size_t(cell)];
        Rational mean = m(p_mean);
        return mass * ((c - mean) * (c - mean) + m.scale * m.scale * p_var);
    }
    if (depth >= kMaxRecursionDepth)
        throw std::runtime_error(
            "distortion: cell boundary unresolvable within depth limit");
    Rational third = mass / 3;
    Affine m1{m.scale / 5, m.shift};
    Affine m2{m.scale / 5, m.shift + m.scale * Rational(4, 5)};
    return cylinder_cost(cse, cells, m1, third, p_mean, p_var, depth + 1) +
           nu_copy_cost(cse, cells, m, third) +
           cylinder_cost(cse, cells, m2, third, p_mean, p_var, depth + 1);
}

}  // namespace detail

// Exact distortion (squared-error quantization cost) of a codebook for P.
inline Rational distortion(Case c, std::vector<Rational> points) {
    detail::VoronoiCells cells = detail::make_cells(std::move(points));
    Moments pm = p_moments(c);
    return detail::cylinder_cost(c, cells, Affine{Rational(1), Rational(0)},
                                 Rational(1), pm.mean, pm.variance(), 0);
}

// Exact distortion of a codebook for nu alone.
inline Rational nu_distortion(Case c, std::vector<Rational> points) {
    detail::VoronoiCells cells = detail::make_cells(std::move(points));
    // nu in native coordinates: identity map scaled so that [2/5,3/5] is the
    // copy support, total mass 1.
    return detail::nu_copy_cost(c, cells, Affine{Rational(1), Rational(0)},
                                Rational(1));
}

// ---------------------------------------------------------------------------
// Closed-form single-region integrals

enum class RegionKind { J, C };

// Exact integral of (x - x0)^2 over one region against one center:
//   J_w: 3^-k (25^-k V(P) + (S_w(E(P)) - x0)^2)
//   C_w: 3^-(k+1) (25^-k V(nu) + (S_w(E(nu)) - x0)^2)
// Valid as a distortion contribution when the whole region lies in x0's cell.
inline Rational cyl_quadratic(Case c, const Word& w, RegionKind kind,
                              const Rational& x0) {
    Affine m = word_map(w);
    long k = long(w.size());
    Rational mass = rpow(Rational(1, 3), k);
    Rational var_scale = m.scale * m.scale;
    if (kind == RegionKind::J) {
        Rational d = m(p_moments(c).mean) - x0;
        return mass * (var_scale * p_variance(c) + d * d);
    }
    Rational d = m(nu_moments(c).mean) - x0;
    return mass / 3 * (var_scale * nu_variance(c) + d * d);
}

// Exact cost of a consecutive group of discrete-nu atoms (j = first..last,
// or the whole tail j >= first when last is absent) inside the copy C_w,
// against center c: 3^-(|w|+1) * sum (S_w(a_j) - c)^2 2^-j, closed form.
inline Rational nu_group_cost(int first, std::optional<int> last,
                              const Rational& c, const Word& w) {
    if (first < 1 || (last && *last < first))
        throw std::invalid_argument("nu_group_cost: need 1 <= first <= last");
    Affine m = word_map(w);
    Rational cp = (c - m.shift) / m.scale;
    Rational m0 = nu_tail_mass(first - 1), m1 = nu_tail_first(first - 1),
             m2 = nu_tail_second(first - 1);
    if (last) {
        m0 -= nu_tail_mass(*last);
        m1 -= nu_tail_first(*last);
        m2 -= nu_tail_second(*last);
    }
    Rational native = m2 - 2 * cp * m1 + cp * cp * m0;
    return rpow(Rational(1, 3), long(w.size()) + 1) * m.scale * m.scale *
           native;
}

// Exact cost of the uniform-nu image measure on [l, r] inside C_w against
// center c: 3^-(|w|+1) * integral of the image density times (x - c)^2.
inline Rational uniform_interval_cost(const Rational& l, const Rational& r,
                                      const Rational& c, const Word& w) {
    Affine m = word_map(w);
    Rational lo = m(Rational(2, 5)), hi = m(Rational(3, 5));
    if (l < lo || r > hi || l > r)
        throw std::domain_error(
            "uniform_interval_cost: interval outside the copy support");
    Rational density = 5 / m.scale;  // image density of the unit-mass copy
    return rpow(Rational(1, 3), long(w.size()) + 1) *
           uniform_segment_cost(l, r, density * (r - l), c);
}

// ---------------------------------------------------------------------------
// Rigorous enclosures under a depth cap

struct Enclosure {
    Rational lower, upper;

    bool contains(const Rational& x) const { return lower <= x && x <= upper; }
    Rational width() const { return upper - lower; }
    Rational midpoint() const { return (lower + upper) / 2; }
};

namespace detail {

// Bounds on distance from points of [lo, hi] to their nearest codebook point.
inline std::pair<Rational, Rational> hull_distance_bounds(
    const VoronoiCells& cells, const Rational& lo, const Rational& hi) {
    Rational dmin(-1), dmax(0);
    auto dist_at = [&](const Rational& x) -> Rational {
        size_t i = cells.cell_at(x);
        return abs(x - cells.points[i]);
    };
    for (const Rational& p : cells.points) {
        Rational d = p < lo ? lo - p : (p > hi ? p - hi : Rational(0));
        if (dmin < 0 || d < dmin) dmin = d;
    }
    dmax = std::max(dist_at(lo), dist_at(hi));
    for (size_t i = 0; i < cells.boundaries.size(); ++i) {
        const Rational& b = cells.boundaries[i];
        if (lo < b && b < hi) {
            Rational half = (cells.points[i + 1] - cells.points[i]) / 2;
            dmax = std::max(dmax, half);
        }
    }
    return {dmin, dmax};
}

inline void enclosure_rec(Case cse, const VoronoiCells& cells, const Affine& m,
                          const Rational& mass, const Rational& p_mean,
                          const Rational& p_var, int depth_left, Rational& lo,
                          Rational& hi) {
    Rational a = m.shift, b = m.shift + m.scale;
    int cell = cells.covering_cell(a, b);
    if (cell >= 0) {
        const Rational& c = cells.points[size_t(cell)];
        Rational mean = m(p_mean);
        Rational v = mass * ((c - mean) * (c - mean) + m.scale * m.scale * p_var);
        lo += v;
        hi += v;
        return;
    }
    if (depth_left == 0) {
        auto [dmin, dmax] = hull_distance_bounds(cells, a, b);
        lo += mass * dmin * dmin;
        hi += mass * dmax * dmax;
        return;
    }
    Rational third = mass / 3;
    Rational nu_part = nu_copy_cost(cse, cells, m, third);
    lo += nu_part;
    hi += nu_part;
    Affine m1{m.scale / 5, m.shift};
    Affine m2{m.scale / 5, m.shift + m.scale * Rational(4, 5)};
    enclosure_rec(cse, cells, m1, third, p_mean, p_var, depth_left - 1, lo, hi);
    enclosure_rec(cse, cells, m2, third, p_mean, p_var, depth_left - 1, lo, hi);
}

}  // namespace detail

inline constexpr int kDefaultEnclosureDepth = 12;

// Rigorous two-sided bound on the distortion of a codebook: regions resolved
// within `depth` levels enter exactly; deeper unresolved cylinders enter via
// hull-distance bounds. lower == upper whenever every cell boundary separates
// whole regions.
inline Enclosure distortion_enclosure(Case c, std::vector<Rational> points,
                                      int depth = kDefaultEnclosureDepth) {
    if (depth < 0) throw std::invalid_argument("distortion_enclosure: depth >= 0");
    detail::VoronoiCells cells = detail::make_cells(std::move(points));
    Moments pm = p_moments(c);
    Rational lo = 0, hi = 0;
    detail::enclosure_rec(c, cells, Affine{Rational(1), Rational(0)},
                          Rational(1), pm.mean, pm.variance(), depth, lo, hi);
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Per-cell (mass, first moment) enclosures — the Lloyd centroid inputs

struct CellMoments {
    Enclosure mass;
    Enclosure first;
};

namespace detail {

// Exact per-cell (mass, first moment) contributions of the nu-copy under m.
inline void nu_copy_moments(Case cse, const VoronoiCells& cells,
                            const Affine& m, const Rational& mass,
                            std::vector<CellMoments>& out) {
    Rational a = m(Rational(2, 5)), b = m(Rational(3, 5));
    size_t i = cells.cell_at(a);
    auto add = [&](size_t cell, const Rational& m0, const Rational& m1) {
        out[cell].mass.lower += m0;
        out[cell].mass.upper += m0;
        out[cell].first.lower += m1;
        out[cell].first.upper += m1;
    };
    if (cse == Case::uniform) {
        Rational density_mass = mass / (b - a);
        Rational x = a;
        while (true) {
            bool more = i < cells.boundaries.size() && cells.boundaries[i] < b;
            Rational cut = more ? cells.boundaries[i] : b;
            Rational m0 = density_mass * (cut - x);
            add(i, m0, m0 * (x + cut) / 2);
            if (!more) return;
            x = cut;
            ++i;
        }
    }
    int j = 1;
    while (true) {
        bool more = i < cells.boundaries.size() && cells.boundaries[i] < b;
        if (!more) {
            int q = j - 1;  // remaining tail: atoms > q
            Rational m0 = nu_tail_mass(q), m1 = nu_tail_first(q);
            add(i, mass * m0, mass * (m.scale * m1 + m.shift * m0));
            return;
        }
        const Rational& cut = cells.boundaries[i];
        while (m(nu_atom(j)) < cut) {
            Rational x = m(nu_atom(j));
            Rational m0 = mass * nu_atom_mass(j);
            add(i, m0, m0 * x);
            if (++j > 100000)
                throw std::runtime_error(
                    "moments: boundary splits the atom accumulation point");
        }
        ++i;
    }
}

inline void moments_rec(Case cse, const VoronoiCells& cells, const Affine& m,
                        const Rational& mass, const Rational& p_mean,
                        int depth_left, std::vector<CellMoments>& out) {
    Rational a = m.shift, b = m.shift + m.scale;
    int cell = cells.covering_cell(a, b);
    if (cell >= 0) {
        Rational m1 = mass * m(p_mean);
        out[size_t(cell)].mass.lower += mass;
        out[size_t(cell)].mass.upper += mass;
        out[size_t(cell)].first.lower += m1;
        out[size_t(cell)].first.upper += m1;
        return;
    }
    if (depth_left == 0) {
        // the region may land anywhere across the cells it overlaps
        size_t first = cells.cell_at(a);
        for (size_t i = first; i < cells.points.size(); ++i) {
            out[i].mass.upper += mass;
            out[i].first.upper += mass * b;
            if (i < cells.boundaries.size() && !(cells.boundaries[i] < b))
                break;
        }
        return;
    }
    Rational third = mass / 3;
    nu_copy_moments(cse, cells, m, third, out);
    Affine m1{m.scale / 5, m.shift};
    Affine m2{m.scale / 5, m.shift + m.scale * Rational(4, 5)};
    moments_rec(cse, cells, m1, third, p_mean, depth_left - 1, out);
    moments_rec(cse, cells, m2, third, p_mean, depth_left - 1, out);
}

}  // namespace detail

// Rigorous per-Voronoi-cell mass and first-moment enclosures for a codebook,
// ordered by the sorted codebook points.
inline std::vector<CellMoments> region_mean_enclosure(
    Case c, std::vector<Rational> points,
    int depth = kDefaultEnclosureDepth) {
    if (depth < 0) throw std::invalid_argument("region_mean_enclosure: depth >= 0");
    detail::VoronoiCells cells = detail::make_cells(std::move(points));
    std::vector<CellMoments> out(cells.points.size());
    detail::moments_rec(c, cells, Affine{Rational(1), Rational(0)},
                        Rational(1), p_moments(c).mean, depth, out);
    return out;
}

}  // namespace condquant

#pragma once

// Voronoi / Lloyd fixed-point search for optimal n-point quantizers.
//
// Two layers:
//   * lloyd_step — one exact centroid iteration on the measure itself, with
//     rigorous per-cell mean enclosures (slow, bias-free; used to certify
//     fixed points and monotone descent).
//   * solve_n_means — fast multi-start Lloyd in double precision on a
//     discretized approximation, cross-checked against the exact DP optimum
//     and finished with a rigorous distortion enclosure of the winner.

#include "discretize.hpp"
#include "integrals.hpp"
#include "kmeans.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace condquant {

struct Codebook {
    std::vector<Rational> points;  // strictly increasing
    Enclosure distortion;
};

struct EmptyCell : std::runtime_error {
    EmptyCell()
        : std::runtime_error("lloyd_step: a Voronoi cell has mass bound 0") {}
};

template <class Number>
inline std::vector<Number> voronoi_boundaries(
    const std::vector<Number>& points) {
    if (points.empty())
        throw std::invalid_argument("voronoi_boundaries: need >= 1 point");
    std::vector<Number> mids;
    mids.reserve(points.size() - 1);
    for (size_t i = 0; i + 1 < points.size(); ++i)
        mids.push_back((points[i] + points[i + 1]) / 2);
    return mids;
}

// One exact Lloyd iteration: move every point to the midpoint of the rigorous
// enclosure of its cell's conditional mean.
inline Codebook lloyd_step(Case c, const std::vector<Rational>& points,
                           int depth = kDefaultEnclosureDepth) {
    std::vector<CellMoments> cells = region_mean_enclosure(c, points, depth);
    std::vector<Rational> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Rational> bounds = voronoi_boundaries(sorted);
    std::vector<Rational> next;
    next.reserve(points.size());
    for (size_t i = 0; i < cells.size(); ++i) {
        const CellMoments& cm = cells[i];
        if (cm.mass.upper == 0) throw EmptyCell();
        // conditional mean lies in the cell clipped to the support hull, and
        // in [first/mass] interval arithmetic where mass bounds allow
        Rational lo = i == 0 ? Rational(0) : bounds[i - 1];
        Rational hi = i + 1 == cells.size() ? Rational(1) : bounds[i];
        if (lo < 0) lo = 0;
        if (hi > 1) hi = 1;
        if (cm.mass.upper > 0) {
            Rational mean_lo = cm.first.lower / cm.mass.upper;
            lo = std::max(lo, mean_lo);
        }
        if (cm.mass.lower > 0) {
            Rational mean_hi = cm.first.upper / cm.mass.lower;
            hi = std::min(hi, mean_hi);
        }
        next.push_back((lo + hi) / 2);
    }
    Enclosure d = distortion_enclosure(c, next, depth);
    return Codebook{std::move(next), d};
}

struct SolveResult {
    Codebook best;                   // winning codebook with rigorous enclosure
    std::vector<double> best_points;
    double atom_cost;                // Lloyd distortion on the discretized atoms
    double cost_estimate;            // atom_cost + collapsed within-piece variance
    int best_restart;
    bool converged;                  // winning restart hit the residual target
    DPResult dp;                     // exact discretized optimum, for cross-check
    bool agree;                      // Lloyd reached the DP optimum on the atoms
    std::vector<std::vector<double>> optima;  // distinct cost-minimal codebooks
};

namespace detail {

struct AtomLloyd {
    std::vector<double> xs, ms;
    std::vector<double> cum;  // cumulative mass, cum[i] = mass of atoms < i

    explicit AtomLloyd(const DiscretizedMeasure& measure) {
        xs.reserve(measure.atoms.size());
        ms.reserve(measure.atoms.size());
        cum.reserve(measure.atoms.size() + 1);
        cum.push_back(0);
        for (const WeightedAtom& a : measure.atoms) {
            xs.push_back(a.position.convert_to<double>());
            ms.push_back(a.mass.convert_to<double>());
            cum.push_back(cum.back() + ms.back());
        }
    }

    // position of the mass quantile: first atom where cumulative mass >= q
    double quantile(double q) const {
        size_t i =
            size_t(std::upper_bound(cum.begin() + 1, cum.end(), q) -
                   (cum.begin() + 1));
        if (i >= xs.size()) i = xs.size() - 1;
        return xs[i];
    }

    // conditional quantile within the atom range [from, to)
    double range_quantile(size_t from, size_t to, double q) const {
        double target = cum[from] + q * (cum[to] - cum[from]);
        size_t i = size_t(std::upper_bound(cum.begin() + 1 + long(from),
                                           cum.begin() + 1 + long(to),
                                           target) -
                          (cum.begin() + 1));
        if (i >= to) i = to - 1;
        return xs[i];
    }

    // nearest-point assignment; per-cell (mass, mass*x) accumulation
    void assign(const std::vector<double>& pts, std::vector<double>& m0,
                std::vector<double>& m1) const {
        size_t n = pts.size();
        m0.assign(n, 0.0);
        m1.assign(n, 0.0);
        size_t cell = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            while (cell + 1 < n && xs[i] > (pts[cell] + pts[cell + 1]) / 2)
                ++cell;
            m0[cell] += ms[i];
            m1[cell] += ms[i] * xs[i];
        }
    }

    double cost(const std::vector<double>& pts) const {
        size_t n = pts.size();
        double acc = 0, comp = 0;
        size_t cell = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            while (cell + 1 < n && xs[i] > (pts[cell] + pts[cell + 1]) / 2)
                ++cell;
            double d = xs[i] - pts[cell];
            double y = ms[i] * d * d - comp;
            double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        return acc;
    }

    // Lloyd to fixed point; returns final residual's convergence status
    bool run(std::vector<double>& pts, int max_iters = 300) const {
        std::vector<double> m0, m1;
        for (int it = 0; it < max_iters; ++it) {
            std::sort(pts.begin(), pts.end());
            assign(pts, m0, m1);
            // re-seed empty cells at the worst-served atom of the worst cell
            bool reseeded = false;
            for (size_t k = 0; k < pts.size(); ++k) {
                if (m0[k] > 0) continue;
                size_t cell = 0, worst_atom = 0;
                double worst = -1;
                for (size_t i = 0; i < xs.size(); ++i) {
                    while (cell + 1 < pts.size() &&
                           xs[i] > (pts[cell] + pts[cell + 1]) / 2)
                        ++cell;
                    double d = xs[i] - pts[cell];
                    if (cell != k && ms[i] * d * d > worst) {
                        worst = ms[i] * d * d;
                        worst_atom = i;
                    }
                }
                pts[k] = xs[worst_atom];
                reseeded = true;
            }
            if (reseeded) continue;
            double residual = 0;
            for (size_t k = 0; k < pts.size(); ++k) {
                double next = m1[k] / m0[k];
                residual = std::max(residual, std::abs(next - pts[k]));
                pts[k] = next;
            }
            if (residual < 1e-12) {
                std::sort(pts.begin(), pts.end());
                return true;
            }
        }
        std::sort(pts.begin(), pts.end());
        return false;
    }
};

inline double next_uniform(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

namespace detail {

// All ways to spread n points over the three top-level regions, most
// mass-balanced first. Jittered quantiles alone can never move two points
// into one fifth-scale side copy, yet some optimal codebooks (the paper's
// mirror pair of four-means) demand exactly that; enumerating region
// compositions reaches them deterministically.
inline std::vector<std::array<int, 3>> region_compositions(
    int n, const double region_mass[3]) {
    std::vector<std::array<int, 3>> comps;
    for (int k1 = 0; k1 <= n; ++k1)
        for (int k2 = 0; k2 + k1 <= n; ++k2)
            comps.push_back({k1, k2, n - k1 - k2});
    auto score = [&](const std::array<int, 3>& k) {
        double s = 0;
        for (int i = 0; i < 3; ++i)
            s += std::abs(k[size_t(i)] - n * region_mass[i]);
        return s;
    };
    std::stable_sort(comps.begin(), comps.end(),
                     [&](const auto& a, const auto& b) {
                         return score(a) < score(b);
                     });
    return comps;
}

}  // namespace detail

// Multi-start Lloyd on the depth-m discretization, cross-checked against the
// exact contiguous-partition DP and finished with a rigorous enclosure.
// Starts: measure quantiles, deterministic top-level region compositions,
// seeded jitters of the quantiles (within +-10% of the quantile cell width),
// and mass*dist^2-weighted random seeding for the remaining restarts.
inline SolveResult solve_n_means(Case c, int n, int restarts = 20,
                                 int depth = 8, std::uint64_t seed = 0,
                                 int nu_res = 8) {
    if (n < 1) throw std::invalid_argument("solve_n_means: need n >= 1");
    if (restarts < 1)
        throw std::invalid_argument("solve_n_means: need restarts >= 1");
    DiscretizedMeasure measure = discretize(c, depth, nu_res);
    const size_t K = measure.atoms.size();
    if (size_t(n) > K)
        throw std::invalid_argument(
            "solve_n_means: n exceeds the atom count at this depth");
    detail::AtomLloyd atoms(measure);
    std::mt19937_64 rng(seed);

    auto qleft = std::vector<double>(size_t(n));
    auto qright = std::vector<double>(size_t(n));
    auto qmid = std::vector<double>(size_t(n));
    for (int i = 0; i < n; ++i) {
        qleft[size_t(i)] = atoms.quantile(double(i) / n);
        qright[size_t(i)] = atoms.quantile(double(i + 1) / n);
        qmid[size_t(i)] = atoms.quantile((2.0 * i + 1) / (2.0 * n));
    }

    // region split at the exclusion-gap midpoints
    size_t r1 = size_t(std::lower_bound(atoms.xs.begin(), atoms.xs.end(), 0.3) -
                       atoms.xs.begin());
    size_t r2 = size_t(std::lower_bound(atoms.xs.begin(), atoms.xs.end(), 0.7) -
                       atoms.xs.begin());
    const size_t region_edge[4] = {0, r1, r2, K};
    double region_mass[3];
    for (int i = 0; i < 3; ++i)
        region_mass[i] =
            atoms.cum[region_edge[i + 1]] - atoms.cum[region_edge[i]];
    std::vector<std::array<int, 3>> comps =
        detail::region_compositions(n, region_mass);
    // drop compositions a region cannot host
    comps.erase(std::remove_if(comps.begin(), comps.end(),
                               [&](const std::array<int, 3>& k) {
                                   for (int i = 0; i < 3; ++i)
                                       if (size_t(k[size_t(i)]) >
                                           region_edge[i + 1] - region_edge[i])
                                           return true;
                                   return false;
                               }),
                comps.end());
    int comp_budget = std::min<int>(int(comps.size()), (restarts - 1) / 2);
    int jitter_budget = (restarts - 1 - comp_budget + 1) / 2;

    std::vector<double> best_pts;
    double best_cost = 0;
    int best_restart = -1;
    bool best_converged = false;
    std::vector<std::pair<double, std::vector<double>>> runs;
    runs.reserve(size_t(restarts));

    for (int r = 0; r < restarts; ++r) {
        std::vector<double> pts;
        if (r == 0) {
            pts = qmid;
        } else if (r <= comp_budget) {
            const std::array<int, 3>& k = comps[size_t(r) - 1];
            for (int region = 0; region < 3; ++region)
                for (int i = 0; i < k[size_t(region)]; ++i)
                    pts.push_back(atoms.range_quantile(
                        region_edge[region], region_edge[region + 1],
                        (2.0 * i + 1) / (2.0 * k[size_t(region)])));
        } else if (r <= comp_budget + jitter_budget) {
            pts = qmid;
            for (int i = 0; i < n; ++i) {
                double w = qright[size_t(i)] - qleft[size_t(i)];
                pts[size_t(i)] +=
                    (2 * detail::next_uniform(rng) - 1) * 0.1 * w;
            }
        } else {
            // weighted k-means++ style seeding over the atoms
            std::vector<double> d2(K,
                                   std::numeric_limits<double>::infinity());
            for (int i = 0; i < n; ++i) {
                double total = 0;
                for (size_t a = 0; a < K; ++a)
                    total += i == 0 ? atoms.ms[a]
                                    : atoms.ms[a] * d2[a];
                size_t pick = 0;
                if (total > 0) {
                    double target = detail::next_uniform(rng) * total;
                    double acc = 0;
                    for (size_t a = 0; a < K; ++a) {
                        acc += i == 0 ? atoms.ms[a] : atoms.ms[a] * d2[a];
                        if (acc >= target) {
                            pick = a;
                            break;
                        }
                        pick = a;
                    }
                } else {
                    while (pick + 1 < K && d2[pick] == 0) ++pick;
                }
                pts.push_back(atoms.xs[pick]);
                for (size_t a = 0; a < K; ++a) {
                    double d = atoms.xs[a] - atoms.xs[pick];
                    d2[a] = std::min(d2[a], d * d);
                }
            }
        }
        std::sort(pts.begin(), pts.end());
        bool ok = atoms.run(pts);
        double cost = atoms.cost(pts);
        runs.emplace_back(cost, pts);
        if (best_restart < 0 || cost < best_cost) {
            best_cost = cost;
            best_pts = pts;
            best_restart = r;
            best_converged = ok;
        }
    }

    SolveResult out;
    out.best_points = best_pts;
    out.atom_cost = best_cost;
    out.cost_estimate = best_cost + measure.w2sq.convert_to<double>();
    out.best_restart = best_restart;
    out.converged = best_converged;
    for (const auto& [cost, pts] : runs) {
        if (cost > best_cost + 1e-12) continue;
        bool fresh = true;
        for (const std::vector<double>& kept : out.optima) {
            double diff = 0;
            for (size_t i = 0; i < kept.size(); ++i)
                diff = std::max(diff, std::abs(kept[i] - pts[i]));
            if (diff <= 1e-6) {
                fresh = false;
                break;
            }
        }
        if (fresh) out.optima.push_back(pts);
    }
    out.dp = dp_optimal(measure, n);
    out.agree = best_cost <= out.dp.cost + 1e-9 * std::max(1.0, out.dp.cost);
    std::vector<Rational> exact;
    exact.reserve(best_pts.size());
    for (double p : best_pts) exact.emplace_back(p);
    out.best.distortion = distortion_enclosure(c, exact);
    out.best.points = std::move(exact);
    return out;
}

}  // namespace condquant

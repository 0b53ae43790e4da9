#pragma once

// The acceptance suite: ten checks covering every layer of the library, from
// exact moment identities to the asymptotic bracket sweeps. The CLI `verify`
// command, the standalone acceptance binary, and the unit tests all run the
// same functions, so there is exactly one definition of "the build is good".

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "blocks.hpp"
#include "discretize.hpp"
#include "integrals.hpp"
#include "kmeans.hpp"
#include "lloyd.hpp"
#include "nu_quantizer.hpp"
#include "numeric.hpp"
#include "system.hpp"

namespace condquant {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  // short summary; on failure, the first mismatches
    double seconds = 0;
};

struct VerifySettings {
    // Added to each computed V(P) before the moment equality checks. Nonzero
    // values simulate a corrupted build (negative control for the suite).
    Rational vp_perturbation = 0;
    std::uint64_t seed = 0;  // base seed for the randomized property suites
};

namespace detail {

class Failures {
public:
    void add(const std::string& msg) {
        ++count_;
        if (count_ <= 3) {
            if (!text_.empty()) text_ += "; ";
            text_ += msg;
        }
    }
    bool empty() const { return count_ == 0; }
    std::string text() const {
        if (count_ <= 3) return text_;
        return text_ + "; (+" + std::to_string(count_ - 3) + " more)";
    }

private:
    int count_ = 0;
    std::string text_;
};

inline CheckResult finish(const std::string& name, const Failures& f,
                          const std::string& ok_detail,
                          std::chrono::steady_clock::time_point t0) {
    CheckResult r;
    r.name = name;
    r.pass = f.empty();
    r.detail = f.empty() ? ok_detail : f.text();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
    return r;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Random strictly increasing codebook on the grid k/4096 (comparisons exact).
inline std::vector<Rational> random_codebook(std::uint64_t& state, int n) {
    std::vector<long> ks;
    while (int(ks.size()) < n) {
        long k = long(splitmix64(state) % 4097);
        bool dup = false;
        for (long other : ks) dup = dup || other == k;
        if (!dup) ks.push_back(k);
    }
    std::sort(ks.begin(), ks.end());
    std::vector<Rational> pts;
    pts.reserve(ks.size());
    for (long k : ks) pts.push_back(Rational(k, 4096));
    return pts;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Reference table: the exactly-known small optimal sets and their errors.
// The five-point uniform set is the library's exhibited upper-bound set; its
// exact cost decomposes as (2/75) V_2 + (1/3) W.

struct PinnedOptimum {
    Case cse;
    std::vector<Rational> points;
    Rational error;
};

inline const std::vector<PinnedOptimum>& pinned_small_optima() {
    static const std::vector<PinnedOptimum> table = [] {
        std::vector<PinnedOptimum> t;
        Case D = Case::discrete, U = Case::uniform;
        // discrete two/three/four means
        t.push_back({D,
                     {Rational(659, 2730), Rational(1621, 1950)},
                     Rational(499067, 18505500)});
        t.push_back({D,
                     {Rational(19, 195), Rational(7, 15), Rational(35, 39)},
                     Rational(30232, 6476925)});
        t.push_back({D,
                     {Rational(19, 195), Rational(2, 5), Rational(8, 15),
                      Rational(35, 39)},
                     Rational(185729, 58292325)});
        // uniform two through seven means (both four-point optima; the
        // seven-point set has a mirror image with the same cost)
        t.push_back({U,
                     {Rational(13, 60), Rational(47, 60)},
                     Rational(8003, 262800)});
        t.push_back({U,
                     {Rational(1, 10), Rational(1, 2), Rational(9, 10)},
                     Rational(89, 21900)});
        t.push_back({U,
                     {Rational(13, 300), Rational(47, 300), Rational(1, 2),
                      Rational(9, 10)},
                     Rational(59003, 19710000)});
        t.push_back({U,
                     {Rational(1, 10), Rational(1, 2), Rational(253, 300),
                      Rational(287, 300)},
                     Rational(59003, 19710000)});
        t.push_back({U,
                     {Rational(13, 300), Rational(47, 300), Rational(1, 2),
                      Rational(253, 300), Rational(287, 300)},
                     Rational(37906, 19710000)});
        t.push_back({U,
                     {Rational(13, 300), Rational(47, 300), Rational(9, 20),
                      Rational(11, 20), Rational(253, 300), Rational(287, 300)},
                     Rational(21481, 19710000)});
        t.push_back({U,
                     {Rational(1, 50), Rational(1, 10), Rational(9, 50),
                      Rational(9, 20), Rational(11, 20), Rational(253, 300),
                      Rational(287, 300)},
                     Rational(7273, 9855000)});
        return t;
    }();
    return table;
}

// The half-cost shorthand for the five-point uniform set: the symmetric
// decomposition that counts the first cylinder once. Kept because the n = 5
// row of the reference error table is stated in this form.
inline Rational five_means_half_decomposition() {
    return Rational(1, 75) * p_two_means_error(Case::uniform) +
           Rational(1, 3) * nu_variance(Case::uniform);
}

// ---------------------------------------------------------------------------
// 1. Exact moments of both base measures and both fixed-point measures.

inline CheckResult check_moments(const VerifySettings& s = {}) {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;
    auto expect_eq = [&](const Rational& got, const Rational& want,
                         const char* what) {
        if (got != want) f.add(std::string(what) + " mismatch");
    };
    Moments d = p_moments(Case::discrete);
    Moments u = p_moments(Case::uniform);
    expect_eq(d.mean, Rational(19, 39), "discrete E(P)");
    expect_eq(d.variance() + s.vp_perturbation, Rational(86696, 777231),
              "discrete V(P)");
    expect_eq(u.mean, Rational(1, 2), "uniform E(P)");
    expect_eq(u.variance() + s.vp_perturbation, Rational(97, 876),
              "uniform V(P)");
    expect_eq(nu_variance(Case::uniform), Rational(1, 300), "uniform W");
    return detail::finish("moments", f, "5 exact identities", t0);
}

// ---------------------------------------------------------------------------
// 2. Small optimal sets: exact distortion of every pinned codebook.

inline CheckResult check_small_optima() {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;
    for (const PinnedOptimum& p : pinned_small_optima()) {
        Rational got = distortion(p.cse, p.points);
        if (got != p.error)
            f.add(std::string(case_name(p.cse)) + " n=" +
                  std::to_string(p.points.size()) + " distortion mismatch");
    }
    // the five-point set's half-cost shorthand and its exact full cost
    if (five_means_half_decomposition() != Rational(29903, 19710000))
        f.add("five-means half decomposition mismatch");
    if (Rational(2, 75) * p_two_means_error(Case::uniform) +
            Rational(1, 3) * nu_variance(Case::uniform) !=
        Rational(37906, 19710000))
        f.add("five-means full decomposition mismatch");
    return detail::finish("small-optima", f, "10 codebooks exact", t0);
}

// ---------------------------------------------------------------------------
// 3. Family errors match the closed forms exactly, levels 0..12.

inline CheckResult check_family_closed_forms(int max_level = 12) {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;
    for (Case c : {Case::discrete, Case::uniform})
        for (int n = 0; n <= max_level; ++n) {
            BlockFamily fam = alpha_F(c, n);
            if (fam.total_count() != seq(c, n).F)
                f.add(std::string(case_name(c)) + " level " +
                      std::to_string(n) + " count mismatch");
            if (fam.total_error() != v_F_closed(c, n))
                f.add(std::string(case_name(c)) + " level " +
                      std::to_string(n) + " error mismatch");
        }
    return detail::finish("family-closed-forms", f,
                          "levels 0..12 exact, both measures", t0);
}

// ---------------------------------------------------------------------------
// 4. Greedy endpoint fidelity: refining one family into the next reproduces
//    it as an exact point multiset; the uniform mid-transition errors match
//    their closed form exactly.

inline CheckResult check_greedy_endpoints(int max_level = 8) {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;
    for (Case c : {Case::discrete, Case::uniform})
        for (int n = 0; n <= max_level; ++n) {
            long long target = (long long)(seq(c, n + 1).F);
            // the mid-transition count of index n sits strictly between the
            // level-n and level-(n+1) family counts
            Rational mid_error(-1);
            long long mid_count = -1;
            if (c == Case::uniform && n >= 1)
                mid_count = (long long)(intermediate_sequence(c, n).count);
            BlockFamily fam = greedy_refine_from(
                c, n, target,
                [&](long long count, const Rational& err) {
                    if (count == mid_count) mid_error = err;
                });
            if (fam.points() != alpha_F(c, n + 1).points())
                f.add(std::string(case_name(c)) + " endpoint " +
                      std::to_string(n) + "->" + std::to_string(n + 1) +
                      " multiset mismatch");
            if (mid_count >= 0 &&
                mid_error != intermediate_sequence(c, n).error)
                f.add(std::string(case_name(c)) + " mid-transition " +
                      std::to_string(n) + " error mismatch");
        }
    return detail::finish("greedy-endpoints", f,
                          "transitions 0..8 exact, both measures", t0);
}

// ---------------------------------------------------------------------------
// 5. DP oracle agreement at the default discretization: rigorous enclosures
//    contain every pinned small-n error, and the DP cost estimate lands
//    within 1e-6 of it.

inline CheckResult check_dp_oracle() {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;
    DiscretizedMeasure md = discretize(Case::discrete, 8, 8);
    DiscretizedMeasure mu = discretize(Case::uniform, 8, 8);
    for (const PinnedOptimum& p : pinned_small_optima()) {
        const DiscretizedMeasure& m = p.cse == Case::discrete ? md : mu;
        DPResult dp = dp_optimal(m, int(p.points.size()));
        std::string tag = std::string(case_name(p.cse)) + " n=" +
                          std::to_string(p.points.size());
        if (!dp.enclosure.contains(p.error)) f.add(tag + " enclosure miss");
        double err = std::abs(dp.cost_estimate -
                              double(to_real(p.error)));
        if (err > 1e-6) f.add(tag + " cost gap " + std::to_string(err));
    }
    return detail::finish("dp-oracle", f,
                          "enclosures + 1e-6 cost agreement at depth 8", t0);
}

// ---------------------------------------------------------------------------
// 6. Multi-start Lloyd recovers the pinned optima (20 restarts, fixed seed),
//    including both distinct four-point uniform optima across seeds.

inline CheckResult check_lloyd_recovery(const VerifySettings& s = {}) {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;
    auto matches = [](const std::vector<double>& got,
                      const std::vector<Rational>& want) {
        if (got.size() != want.size()) return false;
        for (size_t i = 0; i < got.size(); ++i)
            if (std::abs(got[i] - double(to_real(want[i]))) > 1e-5)
                return false;
        return true;
    };
    // single-point optimum of each measure: its mean
    std::vector<PinnedOptimum> targets = {
        {Case::discrete, {p_moments(Case::discrete).mean}, p_variance(Case::discrete)},
        {Case::uniform, {p_moments(Case::uniform).mean}, p_variance(Case::uniform)}};
    for (const PinnedOptimum& p : pinned_small_optima()) targets.push_back(p);
    for (const PinnedOptimum& p : targets) {
        int n = int(p.points.size());
        if (p.cse == Case::discrete && n > 3) continue;
        if (p.cse == Case::uniform && n > 5) continue;
        if (p.cse == Case::uniform && n == 4) continue;  // handled below
        SolveResult r = solve_n_means(p.cse, n, 20, 8, s.seed);
        if (!matches(r.best_points, p.points))
            f.add(std::string(case_name(p.cse)) + " n=" + std::to_string(n) +
                  " positions off");
        if (!r.agree)
            f.add(std::string(case_name(p.cse)) + " n=" + std::to_string(n) +
                  " Lloyd/DP disagree");
    }
    // the two distinct four-point uniform optima must both appear across seeds
    const std::vector<Rational> optA = {Rational(13, 300), Rational(47, 300),
                                        Rational(1, 2), Rational(9, 10)};
    const std::vector<Rational> optB = {Rational(1, 10), Rational(1, 2),
                                        Rational(253, 300), Rational(287, 300)};
    bool found_a = false, found_b = false;
    for (std::uint64_t seed : {s.seed, s.seed + 1}) {
        SolveResult r = solve_n_means(Case::uniform, 4, 20, 8, seed);
        if (!matches(r.best_points, optA) && !matches(r.best_points, optB))
            f.add("uniform n=4 best matches neither optimum (seed " +
                  std::to_string(seed) + ")");
        for (const std::vector<double>& o : r.optima) {
            found_a = found_a || matches(o, optA);
            found_b = found_b || matches(o, optB);
        }
    }
    if (!found_a || !found_b) f.add("uniform n=4: a distinct optimum missing");
    return detail::finish("lloyd-recovery", f,
                          "pinned optima recovered; both 4-point optima found",
                          t0);
}

// ---------------------------------------------------------------------------
// 7. Dimension extrapolation from the closed-form series up to level 200.

inline CheckResult check_dimension_extrapolation() {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;
    DimTable dd = dim_table(f_series(Case::discrete, 1, 200));
    DimTable du = dim_table(f_series(Case::uniform, 1, 200));
    if (!dd.extrapolate || abs(*dd.extrapolate - Real("0.382496")) > Real("0.005"))
        f.add("discrete dimension estimate off");
    if (!du.extrapolate || abs(*du.extrapolate - 1) > Real("0.005"))
        f.add("uniform dimension estimate off");
    return detail::finish("dimension-extrapolation", f,
                          "level-200 estimates within 0.005", t0);
}

// ---------------------------------------------------------------------------
// 8. Coefficient subsequence limits, and the flags recording that the full
//    scaled sequence has no single limit.

inline CheckResult check_coefficient_limits() {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;
    // uniform, level 20: exact rationals against both subsequence limits
    {
        Seq s = seq(Case::uniform, 20);
        Rational gap = s.F * s.F * v_F_closed(Case::uniform, 20) -
                       Rational(1, 129);
        if (abs(to_real(gap)) > Real("1e-7"))
            f.add("uniform structured-count coefficient off at level 20");
        Intermediate mid = intermediate_sequence(Case::uniform, 20);
        Rational gap2 = mid.count * mid.count * mid.error -
                        Rational(171, 17200);
        if (abs(to_real(gap2)) > Real("1e-7"))
            f.add("uniform mid-transition coefficient off at level 20");
    }
    // discrete, level 30: within 1e-3 relative of the structured-count limit
    {
        Real kappa = preset_kappa(Case::discrete);
        Real val = pow(to_real(Rational(seq(Case::discrete, 30).F)), 2 / kappa) *
                   to_real(v_F_closed(Case::discrete, 30));
        Real lim = pow(Real(5), 2 / kappa) * to_real(Rational(769208, 5884749));
        if (abs(val - lim) / lim > Real("1e-3"))
            f.add("discrete structured-count coefficient off at level 30");
    }
    for (Case c : {Case::discrete, Case::uniform})
        if (bounds_report(c).coefficient_exists)
            f.add(std::string(case_name(c)) +
                  " coefficient-exists flag not set to false");
    return detail::finish("coefficient-limits", f,
                          "subsequence limits hit; non-existence flagged", t0);
}

// ---------------------------------------------------------------------------
// 9. Bracket containment of the scaled errors over the full greedy sweep.

inline CheckResult check_bracket_containment() {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;
    BoundsReport ru = bounds_report(Case::uniform, 2, 8);
    if (!ru.bracket_lo_exact || *ru.bracket_lo_exact != Rational(1, 2064) ||
        !ru.bracket_hi_exact || *ru.bracket_hi_exact != Rational(16, 129))
        f.add("uniform bracket endpoints wrong");
    if (!ru.contained) f.add("uniform sweep leaves the bracket");
    BoundsReport rd = bounds_report(Case::discrete, 2, 8);
    if (!rd.contained) f.add("discrete sweep leaves the bracket");
    return detail::finish("bracket-containment", f,
                          "sweeps levels 2..8 inside their brackets", t0);
}

// ---------------------------------------------------------------------------
// 10. Property suites: enclosure nesting, Lloyd monotonicity, DP versus
//     exhaustive search, exclusion zones, and the splitting identity.

inline CheckResult check_property_suites(const VerifySettings& s = {}) {
    auto t0 = std::chrono::steady_clock::now();
    detail::Failures f;

    // (a) enclosure nesting: deeper enclosures sit inside shallower ones
    {
        std::uint64_t state = s.seed ^ 0xa5a5a5a5a5a5a5a5ULL;
        for (int i = 0; i < 50; ++i) {
            Case c = i % 2 ? Case::uniform : Case::discrete;
            int n = 1 + int(detail::splitmix64(state) % 6);
            std::vector<Rational> pts = detail::random_codebook(state, n);
            Enclosure prev = distortion_enclosure(c, pts, 4);
            for (int depth : {6, 8, 10, 12}) {
                Enclosure next = distortion_enclosure(c, pts, depth);
                if (next.lower < prev.lower || next.upper > prev.upper) {
                    f.add("enclosure nesting broken (codebook " +
                          std::to_string(i) + ", depth " +
                          std::to_string(depth) + ")");
                    break;
                }
                prev = next;
            }
        }
    }

    // (b) Lloyd monotonicity: the true distortion cannot increase, so each
    // step's lower bound stays below the previous step's upper bound
    {
        std::uint64_t state = s.seed ^ 0x5bd1e995ULL;
        int done = 0, attempts = 0;
        while (done < 100 && attempts < 400) {
            ++attempts;
            Case c = done % 2 ? Case::uniform : Case::discrete;
            int n = 1 + int(detail::splitmix64(state) % 5);
            std::vector<Rational> pts = detail::random_codebook(state, n);
            try {
                Enclosure prev = distortion_enclosure(c, pts, 8);
                std::vector<Rational> cur = pts;
                for (int step = 0; step < 5; ++step) {
                    Codebook next = lloyd_step(c, cur, 8);
                    if (next.distortion.lower > prev.upper) {
                        f.add("Lloyd step increased distortion (run " +
                              std::to_string(done) + ")");
                        break;
                    }
                    prev = next.distortion;
                    cur = next.points;
                }
                ++done;
            } catch (const EmptyCell&) {
                continue;  // degenerate start; draw another codebook
            }
        }
        if (done < 100) f.add("too few non-degenerate Lloyd runs");
    }

    // (c) DP equals exhaustive search on every small instance
    for (Case c : {Case::discrete, Case::uniform})
        for (int m = 1; m <= 3; ++m)
            for (int q = 1; q <= 10; ++q) {
                DiscretizedMeasure measure = discretize(c, m, q);
                int atoms = int(measure.atoms.size());
                if (atoms > 12) continue;
                for (int n = 1; n <= std::min(4, atoms); ++n)
                    if (dp_optimal_exact(measure, n) !=
                        exhaustive_optimal(measure, n))
                        f.add(std::string(case_name(c)) + " DP!=exhaustive (m=" +
                              std::to_string(m) + ",q=" + std::to_string(q) +
                              ",n=" + std::to_string(n) + ")");
            }

    // (d) exclusion zones: constructed codebooks with >= 3 points keep out of
    // the open gaps (1/5, 2/5) and (3/5, 4/5)
    {
        auto check_gaps = [&](const std::vector<Rational>& pts,
                              const std::string& tag) {
            for (const Rational& x : pts) {
                bool in_gap = (x > Rational(1, 5) && x < Rational(2, 5)) ||
                              (x > Rational(3, 5) && x < Rational(4, 5));
                if (in_gap) f.add(tag + " has a point in an exclusion gap");
            }
        };
        for (Case c : {Case::discrete, Case::uniform}) {
            for (int n = 0; n <= 6; ++n)
                check_gaps(alpha_F(c, n).points(),
                           std::string(case_name(c)) + " family " +
                               std::to_string(n));
            for (long long n = 3; n <= 60; ++n)
                check_gaps(candidate_optimal(c, n).family.points(),
                           std::string(case_name(c)) + " candidate " +
                               std::to_string(n));
        }
        for (const PinnedOptimum& p : pinned_small_optima())
            if (p.points.size() >= 3)
                check_gaps(p.points, std::string(case_name(p.cse)) + " pinned " +
                                         std::to_string(p.points.size()));
    }

    // (e) splitting identity: each family's error is (2/75) times the
    // previous family's plus a third of its central block's error
    for (Case c : {Case::discrete, Case::uniform}) {
        for (int n = 0; n + 1 <= 12; ++n) {
            Rational lhs = alpha_F(c, n + 1).total_error();
            Rational rhs = Rational(2, 75) * alpha_F(c, n).total_error() +
                           Rational(1, 3) *
                               nu_optimal_error(c, int(nu_ladder_size(c, n + 1)));
            if (lhs != rhs)
                f.add(std::string(case_name(c)) + " splitting identity fails at " +
                      std::to_string(n + 1));
        }
        // the same identity against the direct integral, small levels
        for (int n = 1; n <= 2; ++n)
            if (distortion(c, alpha_F(c, n).points()) != v_F_closed(c, n))
                f.add(std::string(case_name(c)) +
                      " family distortion != closed form at " +
                      std::to_string(n));
    }

    return detail::finish("property-suites", f,
                          "nesting, monotonicity, DP=exhaustive, gaps, splitting",
                          t0);
}

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_verification(const VerifySettings& s = {}) {
    std::vector<CheckResult> out;
    out.push_back(check_moments(s));
    out.push_back(check_small_optima());
    out.push_back(check_family_closed_forms());
    out.push_back(check_greedy_endpoints());
    out.push_back(check_dp_oracle());
    out.push_back(check_lloyd_recovery(s));
    out.push_back(check_dimension_extrapolation());
    out.push_back(check_coefficient_limits());
    out.push_back(check_bracket_containment());
    out.push_back(check_property_suites(s));
    return out;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace condquant

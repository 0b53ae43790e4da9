// The numeric solver stack: exact-support DP with rigorous enclosures, the
// exact Lloyd iteration, and the multi-start solver with its DP cross-check.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <condquant/kmeans.hpp>
#include <condquant/lloyd.hpp>

using namespace condquant;

static const unsigned kPrecision = init_precision();

namespace {
bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("square-root bounds by squaring") {
    std::uint64_t state = 12345;
    for (int i = 0; i < 200; ++i) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        Rational x(long(state % 1000000), long(1 + (state >> 40) % 1000));
        auto [lo, hi] = detail::sqrt_bounds(x);
        REQUIRE(lo >= 0);
        REQUIRE(lo * lo <= x);
        REQUIRE(hi * hi >= x);
    }
}

TEST_CASE("DP reproduces the pinned errors at the default discretization") {
    DiscretizedMeasure mu = discretize(Case::uniform, 8, 8);
    struct Row {
        int n;
        Rational v;
    };
    std::vector<Row> rows = {{2, Rational(8003, 262800)},
                             {3, Rational(89, 21900)},
                             {4, Rational(59003, 19710000)},
                             {5, Rational(37906, 19710000)}};
    for (const Row& r : rows) {
        DPResult dp = dp_optimal(mu, r.n);
        REQUIRE(dp.enclosure.contains(r.v));
        REQUIRE(close(dp.cost_estimate, double(to_real(r.v)), 1e-6));
    }
    DiscretizedMeasure md = discretize(Case::discrete, 8, 8);
    DPResult d2 = dp_optimal(md, 2);
    REQUIRE(d2.enclosure.contains(Rational(499067, 18505500)));
    REQUIRE(close(d2.cost_estimate,
                  double(to_real(Rational(499067, 18505500))), 1e-6));
}

TEST_CASE("DP cost decreases strictly and hits zero at full support") {
    DiscretizedMeasure m = discretize(Case::uniform, 2, 2);
    int atoms = int(m.atoms.size());
    double prev = -1;
    for (int n = 1; n <= atoms; ++n) {
        DPResult dp = dp_optimal(m, n);
        if (n > 1) REQUIRE(dp.cost < prev);
        prev = dp.cost;
        REQUIRE(int(dp.boundaries.size()) == n);
        REQUIRE(dp.boundaries[0] == 0);
    }
    REQUIRE(dp_optimal(m, atoms).cost == 0.0);
}

TEST_CASE("exact DP equals exhaustive search on small instances") {
    for (Case c : {Case::discrete, Case::uniform}) {
        DiscretizedMeasure m = discretize(c, 1, 2);
        for (int n = 1; n <= std::min<int>(4, int(m.atoms.size())); ++n)
            REQUIRE(dp_optimal_exact(m, n) == exhaustive_optimal(m, n));
    }
}

TEST_CASE("voronoi boundaries") {
    std::vector<Rational> pts = {Rational(1, 10), Rational(1, 2),
                                 Rational(9, 10)};
    std::vector<Rational> mids = voronoi_boundaries(pts);
    REQUIRE(mids == std::vector<Rational>{Rational(3, 10), Rational(7, 10)});
    REQUIRE_THROWS_AS(voronoi_boundaries(std::vector<Rational>{}),
                      std::invalid_argument);
}

TEST_CASE("exact Lloyd step: fixed points stay put") {
    // the three-point uniform optimum maps to itself exactly
    std::vector<Rational> pts = {Rational(1, 10), Rational(1, 2),
                                 Rational(9, 10)};
    Codebook next = lloyd_step(Case::uniform, pts);
    REQUIRE(next.points == pts);
    REQUIRE(next.distortion.contains(Rational(89, 21900)));
    // one step from any single point lands on the mean exactly
    for (Case c : {Case::discrete, Case::uniform}) {
        Codebook one = lloyd_step(c, {Rational(1, 3)});
        REQUIRE(one.points == std::vector<Rational>{p_moments(c).mean});
    }
}

TEST_CASE("Lloyd converges to the discrete two-point optimum") {
    std::vector<Rational> cur = {Rational(1, 4), Rational(82, 100)};
    for (int i = 0; i < 40; ++i) cur = lloyd_step(Case::discrete, cur).points;
    auto target = p_two_means_points(Case::discrete);
    REQUIRE(abs(to_real(cur[0] - target[0])) < Real("1e-6"));
    REQUIRE(abs(to_real(cur[1] - target[1])) < Real("1e-6"));
}

TEST_CASE("Lloyd step rejects empty cells") {
    // both points beyond the support: the second cell has no mass
    REQUIRE_THROWS_AS(lloyd_step(Case::uniform, {Rational(5), Rational(6)}),
                      EmptyCell);
}

TEST_CASE("Lloyd step never increases the distortion") {
    std::vector<Rational> cur = {Rational(1, 7), Rational(2, 5),
                                 Rational(5, 6)};
    Enclosure prev = distortion_enclosure(Case::discrete, cur, 8);
    for (int i = 0; i < 5; ++i) {
        Codebook next = lloyd_step(Case::discrete, cur, 8);
        REQUIRE(next.distortion.lower <= prev.upper);
        prev = next.distortion;
        cur = next.points;
    }
}

TEST_CASE("multi-start solver recovers pinned optima") {
    SolveResult u3 = solve_n_means(Case::uniform, 3, 20, 8, 7);
    REQUIRE(u3.best_points.size() == 3);
    REQUIRE(close(u3.best_points[0], 0.1, 1e-6));
    REQUIRE(close(u3.best_points[1], 0.5, 1e-6));
    REQUIRE(close(u3.best_points[2], 0.9, 1e-6));
    REQUIRE(u3.agree);
    REQUIRE(u3.converged);
    // the found codebook's exact distortion exceeds the optimum by O(eps^2)
    REQUIRE(u3.best.distortion.upper >= Rational(89, 21900));
    REQUIRE(to_real(u3.best.distortion.upper - Rational(89, 21900)) <
            Real("1e-20"));

    SolveResult d2 = solve_n_means(Case::discrete, 2, 20, 8, 0);
    REQUIRE(close(d2.best_points[0], 0.241392, 1e-5));
    REQUIRE(close(d2.best_points[1], 0.831282, 1e-5));
    REQUIRE(d2.agree);
}

TEST_CASE("multi-start solver finds both four-point uniform optima") {
    SolveResult r = solve_n_means(Case::uniform, 4, 20, 8, 11);
    auto is_a = [](const std::vector<double>& o) {
        return close(o[0], 13.0 / 300, 1e-5) && close(o[1], 47.0 / 300, 1e-5) &&
               close(o[2], 0.5, 1e-5) && close(o[3], 0.9, 1e-5);
    };
    auto is_b = [](const std::vector<double>& o) {
        return close(o[0], 0.1, 1e-5) && close(o[1], 0.5, 1e-5) &&
               close(o[2], 253.0 / 300, 1e-5) && close(o[3], 287.0 / 300, 1e-5);
    };
    bool found_a = false, found_b = false;
    for (const auto& o : r.optima) {
        found_a = found_a || is_a(o);
        found_b = found_b || is_b(o);
    }
    REQUIRE(found_a);
    REQUIRE(found_b);
    REQUIRE((is_a(r.best_points) || is_b(r.best_points)));
    REQUIRE(r.agree);
}

TEST_CASE("solver is deterministic for a fixed seed") {
    SolveResult a = solve_n_means(Case::discrete, 3, 10, 6, 42);
    SolveResult b = solve_n_means(Case::discrete, 3, 10, 6, 42);
    REQUIRE(a.best_points == b.best_points);
    REQUIRE(a.atom_cost == b.atom_cost);
    REQUIRE(a.best_restart == b.best_restart);
    REQUIRE(a.best.points == b.best.points);
    REQUIRE(a.optima == b.optima);
}

TEST_CASE("solver argument validation") {
    REQUIRE_THROWS_AS(solve_n_means(Case::uniform, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(solve_n_means(Case::uniform, 2, 0),
                      std::invalid_argument);
    REQUIRE(kPrecision >= 50);
}

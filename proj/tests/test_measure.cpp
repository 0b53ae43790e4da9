// Core measure layer: contractions, words, regions, exact moments, and the
// atom discretization used by the numeric solver.

#include <catch2/catch_amalgamated.hpp>

#include <condquant/discretize.hpp>
#include <condquant/system.hpp>

using namespace condquant;

static const unsigned kPrecision = init_precision();

TEST_CASE("contractions and word maps") {
    REQUIRE(contraction(1).scale == Rational(1, 5));
    REQUIRE(contraction(1).shift == 0);
    REQUIRE(contraction(2).shift == Rational(4, 5));
    REQUIRE_THROWS_AS(contraction(0), std::out_of_range);
    REQUIRE_THROWS_AS(contraction(3), std::out_of_range);

    Word w = {1, 2};  // S1 after S2: x/25 + 4/25
    Affine m = word_map(w);
    REQUIRE(m.scale == Rational(1, 25));
    REQUIRE(m.shift == Rational(4, 25));
    REQUIRE(m(Rational(1, 2)) == Rational(1, 50) + Rational(4, 25));

    Word long_word(kMaxWordLength + 1, 1);
    REQUIRE_THROWS_AS(word_map(long_word), std::length_error);
}

TEST_CASE("regions: cylinders, central copies, exclusion gaps") {
    Word root;
    Interval j1 = cylinder({1});
    REQUIRE(j1.lo == 0);
    REQUIRE(j1.hi == Rational(1, 5));
    Interval j2 = cylinder({2});
    REQUIRE(j2.lo == Rational(4, 5));
    REQUIRE(j2.hi == 1);
    Interval c = nu_copy(root);
    REQUIRE(c.lo == Rational(2, 5));
    REQUIRE(c.hi == Rational(3, 5));
    auto gaps = exclusion_gaps(root);
    REQUIRE(gaps[0].lo == Rational(1, 5));
    REQUIRE(gaps[0].hi == Rational(2, 5));
    REQUIRE(gaps[1].lo == Rational(3, 5));
    REQUIRE(gaps[1].hi == Rational(4, 5));
    // scaled once: the gaps of the first cylinder
    auto g1 = exclusion_gaps({1});
    REQUIRE(g1[0].lo == Rational(1, 25));
    REQUIRE(g1[1].hi == Rational(4, 25));
}

TEST_CASE("atom chain of the discrete base measure") {
    REQUIRE(nu_atom(1) == Rational(2, 5));
    REQUIRE(nu_atom(2) == Rational(1, 2));
    REQUIRE(nu_atom_mass(3) == Rational(1, 8));
    // tail sums are geometric; check against direct summation
    for (int q : {0, 1, 2, 5}) {
        Rational mass = 0, first = 0, second = 0;
        for (int j = q + 1; j <= q + 200; ++j) {
            mass += nu_atom_mass(j);
            first += nu_atom(j) * nu_atom_mass(j);
            second += nu_atom(j) * nu_atom(j) * nu_atom_mass(j);
        }
        // truncation after 200 further atoms is far below rational equality,
        // so compare within the truncated tail bound instead
        REQUIRE(nu_tail_mass(q) - mass == rpow(Rational(1, 2), q + 200));
        REQUIRE(nu_tail_first(q) - first < rpow(Rational(1, 2), q + 190));
        REQUIRE(nu_tail_second(q) - second < rpow(Rational(1, 2), q + 190));
        REQUIRE(nu_tail_first(q) > first);
        REQUIRE(nu_tail_second(q) > second);
    }
    REQUIRE(nu_tail_mean(0) == Rational(7, 15));
    REQUIRE(nu_tail_mean(1) == Rational(8, 15));
}

TEST_CASE("exact moments of both base measures") {
    Moments d = nu_moments(Case::discrete);
    REQUIRE(d.mean == Rational(7, 15));
    REQUIRE(d.variance() == Rational(8, 1575));
    Moments u = nu_moments(Case::uniform);
    REQUIRE(u.mean == Rational(1, 2));
    REQUIRE(u.variance() == Rational(1, 300));
}

TEST_CASE("exact moments of both fixed-point measures") {
    Moments d = p_moments(Case::discrete);
    REQUIRE(d.mean == Rational(19, 39));
    REQUIRE(d.variance() == Rational(86696, 777231));
    Moments u = p_moments(Case::uniform);
    REQUIRE(u.mean == Rational(1, 2));
    REQUIRE(u.variance() == Rational(97, 876));
    // the fixed-point identity itself, second moments included
    for (Case c : {Case::discrete, Case::uniform}) {
        Moments p = p_moments(c), nu = nu_moments(c);
        Rational mean = (p.mean / 5 + (p.mean / 5 + Rational(4, 5)) + nu.mean) / 3;
        REQUIRE(mean == p.mean);
        Rational s1 = p.second / 25;
        Rational s2 = p.second / 25 + Rational(8, 25) * p.mean + Rational(16, 25);
        REQUIRE((s1 + s2 + nu.second) / 3 == p.second);
    }
}

TEST_CASE("two-point optima of the fixed-point measures") {
    auto d = p_two_means_points(Case::discrete);
    REQUIRE(d[0] == Rational(659, 2730));
    REQUIRE(d[1] == Rational(1621, 1950));
    REQUIRE(p_two_means_error(Case::discrete) == Rational(499067, 18505500));
    auto u = p_two_means_points(Case::uniform);
    REQUIRE(u[0] == Rational(13, 60));
    REQUIRE(u[1] == Rational(47, 60));
    REQUIRE(p_two_means_error(Case::uniform) == Rational(8003, 262800));
}

TEST_CASE("discretization: smallest uniform instance is exact") {
    DiscretizedMeasure m = discretize(Case::uniform, 1, 1);
    REQUIRE(m.atoms.size() == 3);
    REQUIRE(m.atoms[0].position == Rational(1, 10));
    REQUIRE(m.atoms[1].position == Rational(1, 2));
    REQUIRE(m.atoms[2].position == Rational(9, 10));
    for (const WeightedAtom& a : m.atoms) REQUIRE(a.mass == Rational(1, 3));
    // collapsed within-piece variance: two depth-1 copies plus the center
    Rational expect = Rational(2, 75) * p_variance(Case::uniform) +
                      Rational(1, 3) * nu_variance(Case::uniform);
    REQUIRE(m.w2sq == expect);
}

TEST_CASE("discretization conserves mass and refines variance") {
    for (Case c : {Case::discrete, Case::uniform}) {
        for (int depth = 1; depth <= 5; ++depth)
            for (int q : {1, 3, 8}) {
                DiscretizedMeasure m = discretize(c, depth, q);
                REQUIRE(m.total_mass() == 1);
                for (size_t i = 1; i < m.atoms.size(); ++i)
                    REQUIRE(m.atoms[i - 1].position < m.atoms[i].position);
                REQUIRE(m.w2sq >= 0);
            }
        // refining the base-measure resolution shrinks the collapsed variance
        REQUIRE(discretize(c, 4, 8).w2sq < discretize(c, 4, 4).w2sq);
        // first moment is preserved exactly
        DiscretizedMeasure m = discretize(c, 3, 4);
        Rational mean = 0;
        for (const WeightedAtom& a : m.atoms) mean += a.position * a.mass;
        REQUIRE(mean == p_moments(c).mean);
    }
}

TEST_CASE("discretization second moment splits exactly") {
    // sum of atom variances-around-the-mean plus w2sq equals V(P)
    for (Case c : {Case::discrete, Case::uniform}) {
        DiscretizedMeasure m = discretize(c, 4, 6);
        Rational second = 0;
        for (const WeightedAtom& a : m.atoms)
            second += a.position * a.position * a.mass;
        Rational between = second - p_moments(c).mean * p_moments(c).mean;
        REQUIRE(between + m.w2sq == p_variance(c));
    }
}

TEST_CASE("case names round-trip") {
    REQUIRE(case_from_name("discrete") == Case::discrete);
    REQUIRE(case_from_name("uniform") == Case::uniform);
    REQUIRE(std::string(case_name(Case::uniform)) == "uniform");
    REQUIRE_THROWS_AS(case_from_name("other"), std::invalid_argument);
    REQUIRE(kPrecision >= 50);
}

// Exact structured integrals, the full distortion functional, and the
// rigorous enclosure machinery.

#include <catch2/catch_amalgamated.hpp>

#include <condquant/integrals.hpp>
#include <condquant/system.hpp>

using namespace condquant;

static const unsigned kPrecision = init_precision();

TEST_CASE("single-region quadratic integrals") {
    // at the root, against the mean: exactly the variance
    for (Case c : {Case::discrete, Case::uniform}) {
        REQUIRE(cyl_quadratic(c, {}, RegionKind::J, p_moments(c).mean) ==
                p_variance(c));
        REQUIRE(cyl_quadratic(c, {}, RegionKind::C, nu_moments(c).mean) ==
                nu_variance(c) / 3);
    }
    // one level down, against a displaced center
    REQUIRE(cyl_quadratic(Case::discrete, {1}, RegionKind::J, Rational(2, 5)) ==
            Rational(47833, 1494675));
    REQUIRE(cyl_quadratic(Case::uniform, {1}, RegionKind::J, Rational(1, 5)) ==
            Rational(79, 16425));
}

TEST_CASE("discrete atom-group costs") {
    // whole chain against its mean: a third of the base variance at the root
    REQUIRE(3 * nu_group_cost(1, std::nullopt, Rational(7, 15), {}) ==
            Rational(8, 1575));
    // group cost decomposes: atoms 1..k plus tail k+1.. equals the whole
    for (int k : {1, 2, 5}) {
        Rational c(9, 20);
        Rational whole = nu_group_cost(1, std::nullopt, c, {});
        Rational head = nu_group_cost(1, k, c, {});
        Rational tail = nu_group_cost(k + 1, std::nullopt, c, {});
        REQUIRE(head + tail == whole);
    }
    // a single atom's cost is mass times squared distance (at the root)
    Rational c(1, 2);
    Rational one = nu_group_cost(2, 2, c, {});
    REQUIRE(one == Rational(1, 3) * nu_atom_mass(2) *
                       (nu_atom(2) - c) * (nu_atom(2) - c));
    REQUIRE_THROWS_AS(nu_group_cost(0, std::nullopt, c, {}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(nu_group_cost(3, 2, c, {}), std::invalid_argument);
}

TEST_CASE("uniform interval costs") {
    REQUIRE(3 * uniform_interval_cost(Rational(2, 5), Rational(3, 5),
                                      Rational(1, 2), {}) ==
            Rational(1, 300));
    REQUIRE(uniform_interval_cost(Rational(2, 5), Rational(1, 2),
                                  Rational(9, 20), {}) == Rational(1, 7200));
    // halves add up to the whole
    Rational left = uniform_interval_cost(Rational(2, 5), Rational(1, 2),
                                          Rational(1, 2), {});
    Rational right = uniform_interval_cost(Rational(1, 2), Rational(3, 5),
                                           Rational(1, 2), {});
    REQUIRE(left + right == Rational(1, 900));
    REQUIRE_THROWS_AS(uniform_interval_cost(Rational(1, 5), Rational(1, 2),
                                            Rational(1, 2), {}),
                      std::domain_error);
}

TEST_CASE("structured two-point distortion matches the direct functional") {
    {
        Case c = Case::discrete;
        auto pts = p_two_means_points(c);
        Rational a1 = pts[0], a2 = pts[1];
        Rational structured = cyl_quadratic(c, {1}, RegionKind::J, a1) +
                              nu_group_cost(1, 2, a1, {}) +
                              nu_group_cost(3, std::nullopt, a2, {}) +
                              cyl_quadratic(c, {2}, RegionKind::J, a2);
        REQUIRE(structured == Rational(499067, 18505500));
        REQUIRE(distortion(c, {a1, a2}) == structured);
    }
    {
        Case c = Case::uniform;
        auto pts = p_two_means_points(c);
        Rational a1 = pts[0], a2 = pts[1];
        Rational mid = (a1 + a2) / 2;  // = 1/2, the cell boundary
        Rational structured =
            cyl_quadratic(c, {1}, RegionKind::J, a1) +
            uniform_interval_cost(Rational(2, 5), mid, a1, {}) +
            uniform_interval_cost(mid, Rational(3, 5), a2, {}) +
            cyl_quadratic(c, {2}, RegionKind::J, a2);
        REQUIRE(structured == Rational(8003, 262800));
        REQUIRE(distortion(c, {a1, a2}) == structured);
    }
}

TEST_CASE("distortion of the single-point codebook is the variance") {
    for (Case c : {Case::discrete, Case::uniform})
        REQUIRE(distortion(c, {p_moments(c).mean}) == p_variance(c));
}

TEST_CASE("base-measure distortion functional") {
    for (Case c : {Case::discrete, Case::uniform})
        REQUIRE(nu_distortion(c, {nu_moments(c).mean}) == nu_variance(c));
}

TEST_CASE("voronoi cells from unsorted points") {
    detail::VoronoiCells cells = detail::make_cells(
        {Rational(9, 10), Rational(1, 10), Rational(1, 2)});
    REQUIRE(cells.points.size() == 3);
    REQUIRE(cells.points[0] == Rational(1, 10));
    REQUIRE(cells.boundaries[0] == Rational(3, 10));
    REQUIRE(cells.boundaries[1] == Rational(7, 10));
}

TEST_CASE("enclosures collapse to a point for resolved codebooks") {
    for (Case c : {Case::discrete, Case::uniform}) {
        Enclosure e = distortion_enclosure(c, {p_moments(c).mean}, 0);
        REQUIRE(e.lower == p_variance(c));
        REQUIRE(e.upper == p_variance(c));
    }
}

TEST_CASE("enclosures bracket the exact distortion tightly") {
    for (Case c : {Case::discrete, Case::uniform}) {
        auto pts2 = p_two_means_points(c);
        std::vector<Rational> pts = {pts2[0], pts2[1]};
        Rational exact = distortion(c, pts);
        Enclosure e = distortion_enclosure(c, pts, 8);
        REQUIRE(e.contains(exact));
        REQUIRE(e.width() < Rational(1, 1000000));
        // a genuinely straddling codebook still gets a valid bracket
        std::vector<Rational> odd = {Rational(3, 10), Rational(4, 7)};
        Rational exact_odd = distortion(c, odd);
        Enclosure eo = distortion_enclosure(c, odd, 10);
        REQUIRE(eo.contains(exact_odd));
    }
}

TEST_CASE("enclosures nest as depth grows") {
    std::vector<std::vector<Rational>> books = {
        {Rational(3, 10), Rational(4, 7)},
        {Rational(1, 7), Rational(2, 5), Rational(5, 6)},
        {Rational(1, 3)},
    };
    for (Case c : {Case::discrete, Case::uniform})
        for (const auto& pts : books) {
            Enclosure prev = distortion_enclosure(c, pts, 3);
            for (int depth : {5, 7, 9, 12}) {
                Enclosure next = distortion_enclosure(c, pts, depth);
                REQUIRE(next.lower >= prev.lower);
                REQUIRE(next.upper <= prev.upper);
                prev = next;
            }
        }
}

TEST_CASE("cell mean enclosures are exact for resolved cells") {
    for (Case c : {Case::discrete, Case::uniform}) {
        std::vector<CellMoments> cells =
            region_mean_enclosure(c, {p_moments(c).mean}, 0);
        REQUIRE(cells.size() == 1);
        REQUIRE(cells[0].mass.lower == 1);
        REQUIRE(cells[0].mass.upper == 1);
        REQUIRE(cells[0].first.lower == p_moments(c).mean);
        REQUIRE(cells[0].first.upper == p_moments(c).mean);
    }
}

TEST_CASE("cell mean enclosures cover the split measure") {
    // two cells split at 1/2: masses and first moments add up to the totals
    for (Case c : {Case::discrete, Case::uniform}) {
        std::vector<CellMoments> cells = region_mean_enclosure(
            c, {Rational(1, 4), Rational(3, 4)}, 10);
        REQUIRE(cells.size() == 2);
        Rational mass_lo = cells[0].mass.lower + cells[1].mass.lower;
        Rational mass_hi = cells[0].mass.upper + cells[1].mass.upper;
        REQUIRE(mass_lo <= 1);
        REQUIRE(mass_hi >= 1);
        Rational first_lo = cells[0].first.lower + cells[1].first.lower;
        Rational first_hi = cells[0].first.upper + cells[1].first.upper;
        REQUIRE(first_lo <= p_moments(c).mean);
        REQUIRE(first_hi >= p_moments(c).mean);
    }
    REQUIRE(kPrecision >= 50);
}

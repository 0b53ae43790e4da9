// Exponent equation, dimension tables, coefficient sweeps, and the
// dimension sandwich, pinned against high-precision reference values.

#include <catch2/catch_amalgamated.hpp>

#include <condquant/asymptotics.hpp>

using namespace condquant;

static const unsigned kPrecision = init_precision();

namespace {
bool near(const Real& a, const Real& b, const Real& tol) {
    return abs(a - b) <= tol;
}
const Real kKappa("0.382495572783061590503412433046");
}  // namespace

TEST_CASE("exponent equation: preset roots match the closed forms") {
    ExponentResult r2 = solve_exponent(preset_problem(Case::discrete));
    REQUIRE(near(r2.kappa, kKappa, Real("1e-25")));
    REQUIRE(near(r2.kappa, 2 * log(Real(2)) / log(Real(75) / 2), Real("1e-40")));
    REQUIRE(r2.residual < Real("1e-14"));
    REQUIRE(r2.l.has_value());  // preset carries identical lower ratios
    REQUIRE(near(*r2.l, r2.kappa, Real("1e-40")));

    ExponentResult r1 = solve_exponent(preset_problem(Case::uniform, 1));
    REQUIRE(near(r1.kappa, Real("0.344010194780193790609403245201"),
                 Real("1e-25")));
    REQUIRE(near(r1.kappa, log(Real(2)) / log(Real(15) / 2), Real("1e-40")));

    REQUIRE(near(preset_kappa(Case::uniform), kKappa, Real("1e-25")));
}

TEST_CASE("exponent equation: validation and root existence") {
    ExponentProblem bad = preset_problem(Case::discrete);
    bad.order = 0;
    REQUIRE_THROWS_AS(solve_exponent(bad), std::invalid_argument);
    bad = preset_problem(Case::discrete);
    bad.probs.pop_back();
    REQUIRE_THROWS_AS(solve_exponent(bad), std::invalid_argument);
    bad = preset_problem(Case::discrete);
    bad.upper[0] = 1;
    REQUIRE_THROWS_AS(solve_exponent(bad), std::invalid_argument);
    bad = preset_problem(Case::discrete);
    bad.probs[0] = Rational(0);
    REQUIRE_THROWS_AS(solve_exponent(bad), std::invalid_argument);

    // smaller ratios give a smaller exponent, and omitting the lower
    // ratios omits the lower root
    ExponentProblem mixed{{Rational(1, 3), Rational(1, 3)},
                          {Rational(1, 6), Rational(1, 6)},
                          {Rational(1, 5), Rational(1, 5)},
                          2};
    ExponentResult mr = solve_exponent(mixed);
    REQUIRE(mr.l.has_value());
    REQUIRE(*mr.l < mr.kappa);
    mixed.lower.clear();
    REQUIRE_FALSE(solve_exponent(mixed).l.has_value());

    // sum of p_j b_j^r >= 1: the defining equation never crosses 1
    ExponentProblem heavy{{Rational(9, 10), Rational(9, 10)},
                          {},
                          {Rational(19, 20), Rational(19, 20)},
                          2};
    REQUIRE_THROWS_AS(solve_exponent(heavy), NoRoot);
}

TEST_CASE("series validation") {
    REQUIRE_THROWS_AS(validate_series({{Int(0), Rational(1, 2), ""}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(validate_series({{Int(2), Rational(1), ""}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        validate_series(
            {{Int(2), Rational(1, 2), ""}, {Int(3), Rational(1, 2), ""}}),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        validate_series(
            {{Int(3), Rational(1, 2), ""}, {Int(2), Rational(1, 3), ""}}),
        std::invalid_argument);
    REQUIRE_NOTHROW(validate_series(
        {{Int(2), Rational(1, 2), ""}, {Int(3), Rational(1, 3), ""}}));
}

TEST_CASE("dimension table on an exact n^-2 series gives d = 1") {
    ErrorSeries s = {{Int(10), Rational(1, 100), ""},
                     {Int(100), Rational(1, 10000), ""}};
    DimTable t = dim_table(s);
    REQUIRE(t.rows.size() == 2);
    REQUIRE(near(t.rows[0].d, Real(1), Real("1e-40")));
    REQUIRE(near(t.rows[1].d, Real(1), Real("1e-40")));
    REQUIRE(t.extrapolate.has_value());
    REQUIRE(near(*t.extrapolate, Real(1), Real("1e-40")));
    REQUIRE_FALSE(dim_table({s[0]}).extrapolate.has_value());
}

TEST_CASE("dimension table matches the reference values at levels 100, 200") {
    struct Pin {
        Case c;
        Real d100, d200, extrap;
    };
    std::vector<Pin> pins = {
        {Case::discrete, Real("0.389191864956"), Real("0.385853091052"),
         Real("0.382436793218")},
        {Case::uniform, Real("0.982773872596"), Real("0.991312106922"),
         Real("0.999850341247")}};
    for (const Pin& p : pins) {
        ErrorSeries s = {f_series(p.c, 100, 100)[0], f_series(p.c, 200, 200)[0]};
        DimTable t = dim_table(s);
        REQUIRE(near(t.rows[0].d, p.d100, Real("1e-11")));
        REQUIRE(near(t.rows[1].d, p.d200, Real("1e-11")));
        REQUIRE(t.extrapolate.has_value());
        REQUIRE(near(*t.extrapolate, p.extrap, Real("1e-11")));
    }
}

TEST_CASE("structured-count extrapolation approaches the true dimensions") {
    DimTable d = dim_table(f_series(Case::discrete, 1, 200));
    REQUIRE(d.extrapolate.has_value());
    REQUIRE(near(*d.extrapolate, kKappa, Real("0.005")));
    DimTable u = dim_table(f_series(Case::uniform, 1, 200));
    REQUIRE(u.extrapolate.has_value());
    REQUIRE(near(*u.extrapolate, Real(1), Real("0.005")));
}

TEST_CASE("series builders label and order their rows") {
    ErrorSeries f = f_series(Case::discrete, 1, 5);
    REQUIRE(f.size() == 5);
    REQUIRE(f[0].label == "F(1)");
    REQUIRE(f[4].label == "F(5)");
    REQUIRE(f[0].n == 4);
    REQUIRE(f[0].v == v_F_closed(Case::discrete, 1));
    ErrorSeries m = intermediate_series(Case::uniform, 1, 3);
    REQUIRE(m[0].label == "mid(1)");
    REQUIRE(m[0].n == 10);
    REQUIRE(m[2].label == "mid(3)");
    REQUIRE_THROWS_AS(intermediate_series(Case::discrete, 1, 3),
                      std::domain_error);
    ErrorSeries g = greedy_sweep_series(Case::uniform, 1, 2);
    REQUIRE(g.front().n == 8);
    REQUIRE(g.back().n == 24);
    REQUIRE(g.size() == 17);
}

TEST_CASE("coefficient sweep along the structured counts") {
    Real kappa = preset_kappa(Case::discrete);

    // discrete: F(30)^(2/kappa) V_F(30) is close to the limit 5^(2/kappa) C
    std::vector<CoeffRow> dt =
        coeff_table(f_series(Case::discrete, 30, 30), kappa);
    REQUIRE(dt.size() == 1);
    REQUIRE(near(dt[0].value, Real("590.34139525525435934"), Real("1e-12")));
    Real limit = bounds_report(Case::discrete).limit_main;
    REQUIRE(near(limit, Real("590.34144144748631105"), Real("1e-12")));
    REQUIRE(abs(dt[0].value - limit) / limit < Real("1e-7"));

    // uniform: n^2 V_n converges to 1/129 along F and 171/17200 between
    std::vector<CoeffRow> ut =
        coeff_table(f_series(Case::uniform, 20, 20), Real(1));
    Real gap_f = abs(ut[0].value - to_real(Rational(1, 129)));
    REQUIRE(gap_f > 0);
    REQUIRE(gap_f < Real("1e-7"));
    std::vector<CoeffRow> it =
        coeff_table(intermediate_series(Case::uniform, 20, 20), Real(1));
    Real gap_i = abs(it[0].value - to_real(Rational(171, 17200)));
    REQUIRE(gap_i < Real("1e-7"));

    REQUIRE_THROWS_AS(coeff_table(f_series(Case::uniform, 1, 2), Real(0)),
                      std::invalid_argument);
}

TEST_CASE("coefficient bounds report: uniform") {
    BoundsReport r = bounds_report(Case::uniform, 2, 8);
    REQUIRE(r.bracket_lo_exact.has_value());
    REQUIRE(*r.bracket_lo_exact == Rational(1, 2064));
    REQUIRE(*r.bracket_hi_exact == Rational(16, 129));
    REQUIRE(r.contained);
    REQUIRE(near(r.limit_main, to_real(Rational(1, 129)), Real("1e-40")));
    REQUIRE(near(r.limit_inter, to_real(Rational(171, 17200)), Real("1e-40")));
    REQUIRE_FALSE(r.coefficient_exists);
    REQUIRE(r.emp_min >= r.bracket_lo);
    REQUIRE(r.emp_max <= r.bracket_hi);
}

TEST_CASE("coefficient bounds report: discrete") {
    BoundsReport r = bounds_report(Case::discrete, 2, 8);
    REQUIRE(near(r.bracket_lo, Real("15.742438438599634961"), Real("1e-12")));
    REQUIRE(near(r.bracket_hi, Real("22137.804054280736664"), Real("1e-9")));
    REQUIRE(r.contained);
    REQUIRE(near(r.limit_inter, Real("540.55102749572918848"), Real("1e-12")));
    REQUIRE_FALSE(r.coefficient_exists);
    REQUIRE_FALSE(r.bracket_lo_exact.has_value());
}

TEST_CASE("dimension sandwich") {
    DimensionBounds u = dimension_bounds(Case::uniform);
    REQUIRE(u.nu_dim == 1);
    REQUIRE(u.lower == 1);
    REQUIRE(u.upper == 1);

    DimensionBounds d = dimension_bounds(Case::discrete);
    REQUIRE(d.nu_dim == 0);
    REQUIRE(near(d.lower, kKappa, Real("1e-25")));
    REQUIRE(d.upper == d.lower);

    REQUIRE_THROWS_AS(dimension_bounds(preset_problem(Case::discrete),
                                       std::nullopt),
                      UnknownNuDimension);
    REQUIRE(kPrecision >= 50);
}

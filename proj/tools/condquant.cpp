// condquant — exact optimal quantizers, quantization errors, and error
// asymptotics for two self-referential measures on [0, 1] built from the
// contractions x/5 and x/5 + 4/5 with a central base measure (a geometric
// atom chain, or the uniform density on [2/5, 3/5]).
//
// Every exact quantity is emitted as {"num", "den", "approx"}; every
// floating-point quantity is wrapped as {"float": "<decimal>"}. Identical
// command line + seed produces byte-identical output.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <condquant/asymptotics.hpp>
#include <condquant/verify.hpp>

namespace cq = condquant;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolName = "condquant";
constexpr const char* kToolVersion = "1.0.0";

std::string double_repr(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ordered_json rational_json(const cq::Rational& q) {
    ordered_json j;
    j["num"] = numerator(q).str();
    j["den"] = denominator(q).str();
    j["approx"] = q.convert_to<double>();
    return j;
}

ordered_json float_json(double x) {
    return ordered_json{{"float", double_repr(x)}};
}

ordered_json real_json(const cq::Real& x) {
    return ordered_json{{"float", cq::decimal_string(x, 30)}};
}

ordered_json enclosure_json(const cq::Enclosure& e) {
    ordered_json j;
    j["lower"] = rational_json(e.lower);
    j["upper"] = rational_json(e.upper);
    return j;
}

ordered_json envelope(const std::string& command, const std::string& preset,
                      ordered_json parameters, ordered_json results,
                      std::uint64_t seed) {
    ordered_json j;
    j["command"] = command;
    j["preset"] = preset;
    j["parameters"] = std::move(parameters);
    j["results"] = std::move(results);
    j["tool"] = ordered_json{{"name", kToolName}, {"version", kToolVersion}};
    j["seed"] = seed;
    return j;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

// The scaled-error exponent 2/D with the known limiting dimension of each
// measure: 1 for the uniform case, the root of the moment equation otherwise.
cq::Real coefficient_power(cq::Case c) {
    if (c == cq::Case::uniform) return cq::Real(2);
    cq::Real kappa = cq::preset_kappa(c);
    cq::Real p = 2 / kappa;
    return p;
}

// Shared CSV schema: n, V_n (30 digits), d_n, coeff — one row per n.
void write_csv(const std::string& path, const cq::ErrorSeries& rows,
               const cq::Real& power) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open CSV path: " + path);
    out << "n,V_n,d_n,coeff\n";
    for (const cq::SeriesPoint& p : rows) {
        cq::Real n = cq::to_real(p.n);
        cq::Real v = cq::to_real(p.v);
        cq::Real d = 2 * log(n) / -log(v);
        cq::Real coeff = pow(n, power) * v;
        out << p.n.str() << "," << cq::decimal_string(p.v, 30) << ","
            << cq::decimal_string(d, 30) << "," << cq::decimal_string(coeff, 30)
            << "\n";
    }
}

int cmd_moments(const std::string& measure) {
    cq::Case c = cq::case_from_name(measure);
    cq::Moments p = cq::p_moments(c);
    cq::Moments nu = cq::nu_moments(c);
    ordered_json results;
    results["E_P"] = rational_json(p.mean);
    results["V_P"] = rational_json(p.variance());
    results["E_nu"] = rational_json(nu.mean);
    results["V_nu"] = rational_json(nu.variance());
    ordered_json params;
    params["measure"] = measure;
    emit(envelope("moments", measure, std::move(params), std::move(results), 0));
    return 0;
}

int cmd_construct(const std::string& measure, long long n,
                  const std::string& csv) {
    cq::Case c = cq::case_from_name(measure);
    cq::Candidate cand = cq::candidate_optimal(c, n);
    ordered_json results;
    results["n"] = n;
    ordered_json pts = ordered_json::array();
    for (const cq::Rational& x : cand.family.points())
        pts.push_back(rational_json(x));
    results["points"] = std::move(pts);
    results["error"] = rational_json(cand.error);
    results["tag"] = cand.tag;
    if (!csv.empty()) {
        cq::ErrorSeries rows = {{cq::Int(n), cand.error, "n"}};
        write_csv(csv, rows, coefficient_power(c));
    }
    ordered_json params;
    params["measure"] = measure;
    params["n"] = n;
    if (!csv.empty()) params["csv"] = csv;
    emit(envelope("construct", measure, std::move(params), std::move(results),
                  0));
    return 0;
}

int cmd_solve(const std::string& measure, int n, int restarts, int depth,
              std::uint64_t seed) {
    cq::Case c = cq::case_from_name(measure);
    cq::SolveResult r = cq::solve_n_means(c, n, restarts, depth, seed);
    ordered_json results;
    results["n"] = n;
    ordered_json pts = ordered_json::array();
    for (double x : r.best_points) pts.push_back(float_json(x));
    results["points"] = std::move(pts);
    ordered_json exact = ordered_json::array();
    for (const cq::Rational& x : r.best.points) exact.push_back(rational_json(x));
    results["points_exact"] = std::move(exact);
    results["distortion"] = enclosure_json(r.best.distortion);
    results["atom_cost"] = float_json(r.atom_cost);
    results["cost_estimate"] = float_json(r.cost_estimate);
    results["converged"] = r.converged;
    results["best_restart"] = r.best_restart;
    ordered_json dp;
    dp["cost"] = float_json(r.dp.cost);
    dp["cost_estimate"] = float_json(r.dp.cost_estimate);
    dp["enclosure"] = enclosure_json(r.dp.enclosure);
    dp["tie"] = r.dp.tie;
    results["dp"] = std::move(dp);
    results["agree"] = r.agree;
    ordered_json optima = ordered_json::array();
    for (const std::vector<double>& o : r.optima) {
        ordered_json one = ordered_json::array();
        for (double x : o) one.push_back(float_json(x));
        optima.push_back(std::move(one));
    }
    results["optima"] = std::move(optima);
    ordered_json params;
    params["measure"] = measure;
    params["n"] = n;
    params["restarts"] = restarts;
    params["depth"] = depth;
    emit(envelope("solve", measure, std::move(params), std::move(results),
                  seed));
    return 0;
}

int cmd_dimension(const std::string& measure, int max_level,
                  const std::string& csv) {
    cq::Case c = cq::case_from_name(measure);
    cq::ErrorSeries series = cq::f_series(c, 1, max_level);
    cq::DimTable table = cq::dim_table(series);
    ordered_json results;
    results["max_level"] = max_level;
    ordered_json rows = ordered_json::array();
    for (size_t i = 0; i < series.size(); ++i) {
        ordered_json row;
        row["label"] = series[i].label;
        row["count"] = series[i].n.str();
        row["error"] = rational_json(series[i].v);
        row["dimension"] = real_json(table.rows[i].d);
        rows.push_back(std::move(row));
    }
    results["rows"] = std::move(rows);
    if (table.extrapolate)
        results["extrapolate"] = real_json(*table.extrapolate);
    if (!csv.empty()) write_csv(csv, series, coefficient_power(c));
    ordered_json params;
    params["measure"] = measure;
    params["max_level"] = max_level;
    if (!csv.empty()) params["csv"] = csv;
    emit(envelope("dimension", measure, std::move(params), std::move(results),
                  0));
    return 0;
}

int cmd_coefficients(const std::string& measure, int max_level,
                     const std::string& csv) {
    cq::Case c = cq::case_from_name(measure);
    cq::Real power = coefficient_power(c);
    cq::ErrorSeries structured = cq::f_series(c, 1, max_level);
    cq::ErrorSeries inter;
    int inter_from = c == cq::Case::uniform ? 1 : 40;
    if (max_level >= inter_from)
        inter = cq::intermediate_series(c, inter_from, max_level);
    auto rows_json = [&](const cq::ErrorSeries& rows) {
        ordered_json arr = ordered_json::array();
        for (const cq::SeriesPoint& p : rows) {
            cq::Real coeff = pow(cq::to_real(p.n), power) * cq::to_real(p.v);
            ordered_json row;
            row["label"] = p.label;
            row["count"] = p.n.str();
            row["error"] = rational_json(p.v);
            row["coeff"] = real_json(coeff);
            arr.push_back(std::move(row));
        }
        return arr;
    };
    ordered_json results;
    results["max_level"] = max_level;
    results["structured"] = rows_json(structured);
    results["intermediate"] = rows_json(inter);
    cq::BoundsReport rep = cq::bounds_report(c, 2, 4);
    ordered_json limits;
    limits["structured"] = real_json(rep.limit_main);
    limits["intermediate"] = real_json(rep.limit_inter);
    limits["coefficient_exists"] = rep.coefficient_exists;
    results["limits"] = std::move(limits);
    if (!csv.empty()) {
        cq::ErrorSeries all = structured;
        all.insert(all.end(), inter.begin(), inter.end());
        write_csv(csv, all, power);
    }
    ordered_json params;
    params["measure"] = measure;
    params["max_level"] = max_level;
    if (!csv.empty()) params["csv"] = csv;
    emit(envelope("coefficients", measure, std::move(params),
                  std::move(results), 0));
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed,
               double perturb_vp) {
    cq::VerifySettings settings;
    settings.seed = seed;
    settings.vp_perturbation = cq::Rational(perturb_vp);
    std::vector<cq::CheckResult> checks = cq::run_verification(settings);
    ordered_json results;
    results["suite"] = suite;
    ordered_json rows = ordered_json::array();
    for (const cq::CheckResult& r : checks) {
        ordered_json row;
        row["name"] = r.name;
        row["pass"] = r.pass;
        row["detail"] = r.detail;
        rows.push_back(std::move(row));
    }
    results["checks"] = std::move(rows);
    bool ok = cq::all_passed(checks);
    results["all_passed"] = ok;
    ordered_json params;
    params["suite"] = suite;
    emit(envelope("verify", "both", std::move(params), std::move(results),
                  seed));
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    cq::init_precision();
    CLI::App app{
        "exact optimal quantizers and error asymptotics for two "
        "self-referential measures"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string measure;
    std::string csv;
    std::string suite;
    long long construct_n = 0;
    int solve_n = 0, restarts = 20, depth = 8, max_level = 0;
    std::uint64_t seed = 0;
    double perturb_vp = 0;

    const auto measure_check = CLI::IsMember({"discrete", "uniform"});

    CLI::App* m = app.add_subcommand("moments",
                                     "exact first and second moments");
    m->add_option("--measure", measure, "measure preset")
        ->required()
        ->check(measure_check);

    CLI::App* con = app.add_subcommand(
        "construct", "structured candidate-optimal codebook for a count");
    con->add_option("--measure", measure, "measure preset")
        ->required()
        ->check(measure_check);
    con->add_option("--n", construct_n, "codebook size (>= 1)")
        ->required()
        ->check(CLI::PositiveNumber);
    con->add_option("--csv", csv, "also write a CSV row to this path");

    CLI::App* sol = app.add_subcommand(
        "solve", "multi-start Lloyd with an exact DP cross-check");
    sol->add_option("--measure", measure, "measure preset")
        ->required()
        ->check(measure_check);
    sol->add_option("--n", solve_n, "codebook size (>= 1)")
        ->required()
        ->check(CLI::PositiveNumber);
    sol->add_option("--restarts", restarts, "independent restarts")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sol->add_option("--depth", depth, "discretization depth")
        ->capture_default_str()
        ->check(CLI::Range(1, 16));
    sol->add_option("--seed", seed, "restart seed")->capture_default_str();

    CLI::App* dim = app.add_subcommand(
        "dimension", "quantization-dimension table from the closed forms");
    dim->add_option("--measure", measure, "measure preset")
        ->required()
        ->check(measure_check);
    dim->add_option("--max-level", max_level, "last structured level (>= 1)")
        ->required()
        ->check(CLI::PositiveNumber);
    dim->add_option("--csv", csv, "also write the table to this path");

    CLI::App* coef = app.add_subcommand(
        "coefficients", "scaled-error coefficients along both subsequences");
    coef->add_option("--measure", measure, "measure preset")
        ->required()
        ->check(measure_check);
    coef->add_option("--max-level", max_level, "last structured level (>= 1)")
        ->required()
        ->check(CLI::PositiveNumber);
    coef->add_option("--csv", csv, "also write the table to this path");

    CLI::App* ver = app.add_subcommand("verify", "run the acceptance suite");
    ver->add_option("--suite", suite, "suite name (paper)")
        ->required()
        ->check(CLI::IsMember({"paper"}));
    ver->add_option("--seed", seed, "seed for the randomized suites")
        ->capture_default_str();
    ver->add_option("--perturb-vp", perturb_vp,
                    "negative-control hook: offset added to each V(P)")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (m->parsed()) return cmd_moments(measure);
        if (con->parsed()) return cmd_construct(measure, construct_n, csv);
        if (sol->parsed())
            return cmd_solve(measure, solve_n, restarts, depth, seed);
        if (dim->parsed()) return cmd_dimension(measure, max_level, csv);
        if (coef->parsed()) return cmd_coefficients(measure, max_level, csv);
        if (ver->parsed()) return cmd_verify(suite, seed, perturb_vp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

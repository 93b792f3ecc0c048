// Command line front end: solve single problems, sweep beta0 ranges,
// discretize optimal designs, and verify optimality certificates.
// Data goes to stdout, diagnostics to stderr.
// Exit codes: 0 ok / KW pass, 1 usage error, 2 KW fail.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ballopt/ballopt.hpp"

using nlohmann::json;
using namespace ballopt;

namespace {

// serialize with 12 significant digits for reproducible output files
double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

json round12(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(round12(x));
    return a;
}

struct ProblemSpec {
    std::string model = "logit";
    int k = 0;
    std::vector<double> beta;  // full beta of length k+1
};

void add_problem_flags(CLI::App* cmd, std::string* model, int* k,
                       std::string* beta_csv, double* beta0, double* beta1,
                       std::string* problem_file) {
    cmd->add_option("--model", *model, "intensity model: logit|probit|exponential");
    cmd->add_option("--k", *k, "dimension of the ball");
    cmd->add_option("--beta", *beta_csv, "comma separated beta of length k+1");
    cmd->add_option("--beta0", *beta0, "canonical intercept (with --beta1)");
    cmd->add_option("--beta1", *beta1, "canonical slope, >= 0");
    cmd->add_option("--problem", *problem_file,
                    "JSON problem file {model, k, beta}");
}

ProblemSpec resolve_problem(const std::string& model, int k,
                            const std::string& beta_csv,
                            std::optional<double> beta0,
                            std::optional<double> beta1,
                            const std::string& problem_file) {
    ProblemSpec p;
    p.model = model;
    p.k = k;
    if (!problem_file.empty()) {
        std::ifstream in(problem_file);
        if (!in) throw CLI::ValidationError("--problem", "cannot open file");
        json doc = json::parse(in);
        p.model = doc.value("model", p.model);
        p.k = doc.value("k", p.k);
        if (doc.contains("beta"))
            p.beta = doc["beta"].get<std::vector<double>>();
    }
    if (!beta_csv.empty()) {
        p.beta.clear();
        std::stringstream ss(beta_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) p.beta.push_back(std::stod(tok));
    }
    if (p.beta.empty()) {
        if (!beta0 || !beta1)
            throw CLI::ValidationError(
                "--beta", "give --beta, --beta0/--beta1, or --problem");
        if (p.k < 1) throw CLI::ValidationError("--k", "k >= 1 required");
        p.beta.assign(std::size_t(p.k) + 1, 0.0);
        p.beta[0] = *beta0;
        p.beta[1] = *beta1;
    }
    if (p.k < 1) p.k = int(p.beta.size()) - 1;
    if (int(p.beta.size()) != p.k + 1)
        throw CLI::ValidationError("--beta", "beta must have length k+1");
    return p;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), long(v.size()));
}

json report_to_json(const ProblemSpec& p, const SolveReport& rep) {
    json out;
    out["model"] = p.model;
    out["k"] = p.k;
    out["beta"] = round12(p.beta);
    out["case"] = to_string(rep.case_label);
    out["canonical"] = {{"beta0", round12(rep.canonical.beta0)},
                        {"beta1", round12(rep.canonical.beta1_tilde)}};
    out["marginal"] = {{"points", round12(rep.marginal.points)},
                       {"weights", round12(rep.marginal.weights)}};
    out["log_det"] = round12(rep.log_det);
    out["kw_max"] = round12(rep.kw_max);
    out["kw_argmax"] = round12(rep.kw_argmax);
    out["kw_pass"] = rep.kw_pass;
    return out;
}

MarginalDesign marginal_from_json(const json& doc) {
    const json& m = doc.contains("marginal") ? doc["marginal"] : doc;
    return MarginalDesign(m["points"].get<std::vector<double>>(),
                          m["weights"].get<std::vector<double>>());
}

int run(int argc, char** argv) {
    CLI::App app{"locally D-optimal designs on the k-dimensional unit ball"};
    app.require_subcommand(1);

    std::string model = "logit", beta_csv, problem_file, format = "json";
    int k = 0;
    double beta0 = 0.0, beta1 = 0.0;
    bool has_beta0 = false, has_beta1 = false;

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve one design problem");
    add_problem_flags(solve_cmd, &model, &k, &beta_csv, &beta0, &beta1,
                      &problem_file);
    solve_cmd->add_option("--format", format, "json|csv");
    solve_cmd->get_option("--beta0")->each([&](const std::string&) { has_beta0 = true; });
    solve_cmd->get_option("--beta1")->each([&](const std::string&) { has_beta1 = true; });

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep beta0 over a range, CSV out");
    std::string range;
    double sweep_beta1 = 1.0;
    double interval_tol = 1e-3;
    sweep_cmd->add_option("--model", model);
    sweep_cmd->add_option("--k", k)->required();
    sweep_cmd->add_option("--beta1", sweep_beta1);
    sweep_cmd->add_option("--beta0-range", range, "a:b:step")->required();
    sweep_cmd->add_option("--interval-tol", interval_tol,
                          "bisection tolerance for the case-c interval");

    // discretize
    auto* disc_cmd = app.add_subcommand("discretize", "exact design + efficiency");
    add_problem_flags(disc_cmd, &model, &k, &beta_csv, &beta0, &beta1,
                      &problem_file);
    std::string strategy = "auto";
    std::string counts_csv;
    std::uint64_t seed = 0;
    disc_cmd->add_option("--strategy", strategy, "auto|simplex|cross|cube");
    disc_cmd->add_option("--counts", counts_csv, "per-orbit vertex counts, comma separated");
    disc_cmd->add_option("--seed", seed, "orbit orientation seed (0 = canonical)");
    disc_cmd->get_option("--beta0")->each([&](const std::string&) { has_beta0 = true; });
    disc_cmd->get_option("--beta1")->each([&](const std::string&) { has_beta1 = true; });

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "KW certificate and grid oracle");
    add_problem_flags(verify_cmd, &model, &k, &beta_csv, &beta0, &beta1,
                      &problem_file);
    int grid = 10001, oracle_resolution = 2001;
    std::string force_design;
    verify_cmd->add_option("--grid", grid, "KW grid size");
    verify_cmd->add_option("--oracle-resolution", oracle_resolution);
    verify_cmd->add_option("--force-design", force_design,
                           "verify this marginal design JSON instead of solving");
    verify_cmd->get_option("--beta0")->each([&](const std::string&) { has_beta0 = true; });
    verify_cmd->get_option("--beta1")->each([&](const std::string&) { has_beta1 = true; });

    CLI11_PARSE(app, argc, argv);

    auto problem = [&]() {
        return resolve_problem(
            model, k, beta_csv,
            has_beta0 ? std::optional<double>(beta0) : std::nullopt,
            has_beta1 ? std::optional<double>(beta1) : std::nullopt,
            problem_file);
    };

    if (solve_cmd->parsed()) {
        const ProblemSpec p = problem();
        const auto& m = model_by_name(p.model);
        const SolveReport rep = solve(m, to_vec(p.beta));
        if (format == "csv") {
            std::printf("case,x11,x12,w1,w2,log_det,kw_max,kw_pass\n");
            const auto& xi = rep.marginal;
            std::printf("%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n",
                        to_string(rep.case_label).c_str(), xi.points.front(),
                        xi.points.back(), xi.weights.front(), xi.weights.back(),
                        rep.log_det, rep.kw_max, rep.kw_pass ? 1 : 0);
        } else {
            std::cout << report_to_json(p, rep).dump(2) << "\n";
        }
        return rep.kw_pass ? 0 : 2;
    }

    if (sweep_cmd->parsed()) {
        double lo, hi, step;
        if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
            step <= 0 || hi < lo) {
            std::cerr << "invalid --beta0-range, expected a:b:step\n";
            return 1;
        }
        const auto& m = model_by_name(model);
        std::printf("beta0,x11,x12,w1,w2,case\n");
        bool all_pass = true;
        for (double b0 = lo; b0 <= hi + 0.5 * step; b0 += step) {
            const SolveReport rep = solve_canonical(m, b0, sweep_beta1, k);
            all_pass = all_pass && rep.kw_pass;
            std::printf("%.12g,%.12g,%.12g,%.12g,%.12g,%s\n", b0,
                        rep.marginal.points.front(), rep.marginal.points.back(),
                        rep.marginal.weights.front(), rep.marginal.weights.back(),
                        to_string(rep.case_label).c_str());
        }
        if (std::isfinite(m.mode)) {
            const auto iv = case_c_interval(m, k, sweep_beta1, interval_tol);
            std::fprintf(stderr, "case_c_interval,%.6f,%.6f\n", iv.first,
                         iv.second);
        }
        return all_pass ? 0 : 2;
    }

    if (disc_cmd->parsed()) {
        const ProblemSpec p = problem();
        const auto& m = model_by_name(p.model);
        const SolveReport rep = solve(m, to_vec(p.beta));
        DiscretizeStrategy strat = DiscretizeStrategy::Auto;
        if (strategy == "simplex") strat = DiscretizeStrategy::Simplex;
        else if (strategy == "cross") strat = DiscretizeStrategy::Cross;
        else if (strategy == "cube") strat = DiscretizeStrategy::Cube;
        else if (strategy != "auto") {
            std::cerr << "unknown --strategy\n";
            return 1;
        }
        std::vector<std::size_t> counts;
        if (!counts_csv.empty()) {
            std::stringstream ss(counts_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) counts.push_back(std::stoul(tok));
        }
        const auto disc = discretize_design(m, rep.canonical.beta0,
                                            rep.canonical.beta1_tilde,
                                            rep.marginal, p.k, strat, counts, seed);
        const ExactDesign pushed = push_forward(disc.design, rep.canonical);
        json out = report_to_json(p, rep);
        json pts = json::array();
        for (const auto& pt : pushed.points) {
            json row = json::array();
            for (int i = 0; i < pt.size(); ++i) row.push_back(round12(pt(i)));
            pts.push_back(row);
        }
        json kinds = json::array();
        for (auto kk : disc.orbit_kinds) kinds.push_back(to_string(kk));
        out["design"] = {{"points", pts},
                         {"weights", round12(pushed.weights)},
                         {"orbit_polytopes", kinds}};
        out["d_efficiency"] = round12(disc.d_efficiency);
        std::cout << out.dump(2) << "\n";
        return rep.kw_pass ? 0 : 2;
    }

    if (verify_cmd->parsed()) {
        const ProblemSpec p = problem();
        const auto& m = model_by_name(p.model);
        const CanonicalProblem cp = canonicalize(to_vec(p.beta));
        const ShiftedIntensity s(m, cp.beta0, cp.beta1_tilde);
        MarginalDesign xi;
        double solver_log_det;
        if (!force_design.empty()) {
            std::ifstream in(force_design);
            if (!in) {
                std::cerr << "cannot open --force-design file\n";
                return 1;
            }
            xi = marginal_from_json(json::parse(in));
            solver_log_det = log_det_marginal(s, xi, p.k);
        } else {
            const SolveReport rep = solve_canonical(m, cp.beta0, cp.beta1_tilde, p.k);
            xi = rep.marginal;
            solver_log_det = rep.log_det;
        }
        const auto kw = kw_check(s, xi, p.k, grid);
        const MarginalDesign oracle =
            cp.beta1_tilde < 1e-14
                ? degenerate_marginal(p.k)
                : oracle_two_point(s, p.k, oracle_resolution);
        const double oracle_log_det = log_det_marginal(s, oracle, p.k);
        json out;
        out["model"] = p.model;
        out["k"] = p.k;
        out["marginal"] = {{"points", round12(xi.points)},
                           {"weights", round12(xi.weights)}};
        out["log_det"] = round12(solver_log_det);
        out["kw_max"] = round12(kw.max_psi);
        out["kw_argmax"] = round12(kw.argmax_x1);
        out["kw_pass"] = kw.pass;
        out["oracle_log_det"] = round12(oracle_log_det);
        out["oracle_gap"] = round12(solver_log_det - oracle_log_det);
        std::cout << out.dump(2) << "\n";
        return kw.pass ? 0 : 2;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

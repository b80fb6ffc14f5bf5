// Batch experiment runner for the poroelasticity solver suite.
//
// Subcommands:
//   run         execute the experiments of a config file (or the default
//               small-deformation benchmark) and write report tables
//   sweep       vary one axis (tau, h, L_s, case, scheme) over a value list
//   verify      run the Jacobian / kinematics / consistency suites
//   list-cases  print the nonlinearity cases of the small-deformation benchmark

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "porofem/errors.hpp"
#include "porofem/runconfig.hpp"
#include "porofem/verify.hpp"

namespace {

std::string read_file(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// flag > config > environment > default
std::string resolve_out_dir(const std::string &flag_value, const std::string &config_value) {
    if (!flag_value.empty()) return flag_value;
    if (!config_value.empty()) return config_value;
    if (const char *env = std::getenv("POROFEM_OUT"); env && *env) return env;
    return "reports";
}

porofem::RunConfig default_run_config() {
    porofem::RunConfig cfg;
    cfg.experiments.push_back(porofem::default_spec(porofem::Problem::TestProblem1));
    cfg.experiments.back().id = "test1_case1_newton";
    return cfg;
}

void print_rows(const std::vector<porofem::ReportRow> &rows) {
    for (const auto &row : rows) {
        std::printf("%-32s %-20s iters=%-3d order=%-8.3g contraction=%-8.3g status=%s\n",
                    row.spec.id.c_str(), porofem::to_string(row.spec.scheme), row.iters,
                    row.fit.defined ? row.fit.order : std::nan(""),
                    row.fit.defined ? row.fit.contraction : std::nan(""),
                    row.solver_error ? "error" : porofem::to_string(row.status));
    }
}

int run_command(const std::string &config_path, const std::string &out_flag, int threads_flag) {
    porofem::RunConfig cfg =
        config_path.empty() ? default_run_config() : porofem::parse_config(read_file(config_path));
    if (threads_flag > 0) cfg.threads = threads_flag;
    const std::string out = resolve_out_dir(out_flag, cfg.out_dir);
    const porofem::RunOutcome outcome = porofem::run_all(cfg, out);
    print_rows(outcome.rows);
    std::printf("reports written to %s\n", out.c_str());
    return outcome.all_ok ? 0 : 1;
}

int sweep_command(const std::string &config_path, const std::string &out_flag,
                  const std::string &axis_name, const std::vector<double> &values,
                  const std::string &scheme_pin) {
    const auto axis = porofem::sweep_axis_from_string(axis_name);
    if (!axis) {
        std::fprintf(stderr, "error: unknown sweep axis '%s'\n", axis_name.c_str());
        return 2;
    }

    porofem::ExperimentSpec base;
    std::string config_out;
    if (!config_path.empty()) {
        const porofem::RunConfig cfg = porofem::parse_config(read_file(config_path));
        base = cfg.experiments.front();
        config_out = cfg.out_dir;
    } else {
        base = porofem::default_spec(porofem::Problem::TestProblem1);
        base.id = "sweep";
    }

    std::vector<porofem::SchemeKind> schemes;
    if (!scheme_pin.empty()) {
        porofem::RunConfig probe = porofem::parse_config("problem = test1\nscheme = " + scheme_pin);
        schemes = {probe.experiments.front().scheme};
    } else if (*axis == porofem::SweepAxis::Scheme) {
        schemes = {base.scheme};
    } else {
        schemes = {porofem::SchemeKind::MonolithicNewton, porofem::SchemeKind::SplittingNewton,
                   porofem::SchemeKind::MonolithicLScheme, porofem::SchemeKind::SplittingLScheme};
    }

    std::vector<porofem::ReportRow> rows;
    for (const porofem::SchemeKind kind : schemes) {
        porofem::ExperimentSpec spec = base;
        spec.scheme = kind;
        spec.id = base.id + "_" + porofem::to_string(kind);
        auto part = porofem::sweep(spec, *axis, values);
        rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                    std::make_move_iterator(part.end()));
    }

    const std::string out = resolve_out_dir(out_flag, config_out);
    std::filesystem::create_directories(out);
    porofem::write_summary_csv(out + "/sweep_summary.csv", rows);
    porofem::write_iterations_csv(out + "/sweep_iterations.csv", rows);
    print_rows(rows);
    std::printf("reports written to %s\n", out.c_str());

    for (const auto &row : rows)
        if (!row.converged() && row.spec.expect_converged) return 1;
    return 0;
}

int verify_command(const std::string &config_path, std::uint64_t seed) {
    bool jac = true, kin = true, cons = true;
    if (!config_path.empty()) {
        const porofem::RunConfig cfg = porofem::parse_config(read_file(config_path));
        jac = cfg.verify_jacobian;
        kin = cfg.verify_kinematics;
        cons = cfg.verify_consistency;
    }
    std::vector<porofem::CheckResult> checks;
    if (jac) {
        auto r = porofem::verify_jacobian(seed);
        checks.insert(checks.end(), r.begin(), r.end());
    }
    if (kin) {
        auto r = porofem::verify_kinematics(seed);
        checks.insert(checks.end(), r.begin(), r.end());
    }
    if (cons) {
        auto r = porofem::verify_consistency();
        checks.insert(checks.end(), r.begin(), r.end());
    }
    bool all = true;
    for (const auto &c : checks) {
        std::printf("%s %-32s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        all = all && c.pass;
    }
    return all ? 0 : 1;
}

int list_cases_command() {
    std::printf("nonlinearity cases of the small-deformation benchmark\n");
    std::printf("  case  b(p)      c(xi)\n");
    std::printf("  1     exp(p)    xi^3 + xi\n");
    std::printf("  2     exp(p)    xi^3\n");
    std::printf("  3     exp(p)    |xi|^(5/3) sign(xi) + xi\n");
    std::printf("  4     p^2       xi^2\n");
    for (int c = 1; c <= 4; ++c) {
        const porofem::NonlinearityModel m = porofem::nonlinearity_case(c);
        std::printf("  case %d estimates: alpha_b=%.6g alpha_c=%.6g L_b=%.6g L_c=%.6g%s\n", c,
                    m.alpha_b, m.alpha_c, m.lipschitz_func_b, m.lipschitz_func_c,
                    m.holder_derivative ? " (Hoelder derivative)" : "");
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"poroelasticity solver benchmarks"};
    app.require_subcommand(1);

    std::string config_path, out_dir, axis, scheme_pin;
    std::vector<double> values;
    int threads = 0;
    std::uint64_t seed = 1;

    CLI::App *run = app.add_subcommand("run", "execute experiments from a config");
    run->add_option("--config", config_path, "config file path");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--threads", threads, "parallel experiments");

    CLI::App *sw = app.add_subcommand("sweep", "vary one axis over a value list");
    sw->add_option("--config", config_path, "base experiment config");
    sw->add_option("--out", out_dir, "output directory");
    sw->add_option("--axis", axis, "tau | h | L_s | case | scheme")->required();
    sw->add_option("--values", values, "comma-separated values")
        ->required()
        ->delimiter(',');
    sw->add_option("--scheme", scheme_pin, "pin a single scheme");

    CLI::App *ver = app.add_subcommand("verify", "run the verification suites");
    ver->add_option("--config", config_path, "config with verification toggles");
    ver->add_option("--seed", seed, "seed for the randomized suites");

    app.add_subcommand("list-cases", "print the nonlinearity cases");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path, out_dir, threads);
        if (sw->parsed()) return sweep_command(config_path, out_dir, axis, values, scheme_pin);
        if (ver->parsed()) return verify_command(config_path, seed);
        return list_cases_command();
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

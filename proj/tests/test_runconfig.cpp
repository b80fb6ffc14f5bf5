#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "porofem/errors.hpp"
#include "porofem/runconfig.hpp"

using namespace porofem;

TEST_CASE("minimal config fills the benchmark defaults") {
    const RunConfig cfg = parse_config("problem = test1\ncase = 1\nscheme = newton\n");
    REQUIRE(cfg.experiments.size() == 1);
    const ExperimentSpec &s = cfg.experiments.front();
    CHECK(s.id == "default");
    CHECK(s.problem == Problem::TestProblem1);
    CHECK(s.case_id == 1);
    CHECK(s.scheme == SchemeKind::MonolithicNewton);
    CHECK(s.h == 0.1);
    CHECK(s.tau == 0.1);
    CHECK(s.T == 1.0);
    CHECK(s.tol == 1e-8);
    CHECK(s.expect_converged);
}

TEST_CASE("unknown keys are hard errors naming the key") {
    try {
        parse_config("problem = test1\nschme = newton\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(std::string(e.what()).find("schme") != std::string::npos);
        CHECK(e.line == 2);
    }
}

TEST_CASE("empty config reports no experiments") {
    try {
        parse_config("# only a comment\n\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(std::string(e.what()).find("no experiments") != std::string::npos);
    }
}

TEST_CASE("sections, global overrides, and local wins") {
    const std::string text = R"(
out = somewhere
tol = 1e-6
max_iter = 50

[experiment a]
problem = test1
case = 2
scheme = splitting_newton
Ls = 0.5

[experiment b]
problem = large2d
scheme = lscheme
tol = 1e-10
expect = any
)";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.out_dir == "somewhere");
    REQUIRE(cfg.experiments.size() == 2);

    const ExperimentSpec &a = cfg.experiments[0];
    CHECK(a.id == "a");
    CHECK(a.case_id == 2);
    CHECK(a.scheme == SchemeKind::SplittingNewton);
    REQUIRE(a.Ls.has_value());
    CHECK(*a.Ls == 0.5);
    CHECK(a.tol == 1e-6);       // global override
    CHECK(a.max_iter == 50);

    const ExperimentSpec &b = cfg.experiments[1];
    CHECK(b.problem == Problem::LargeDeformation2D);
    CHECK(b.h == 0.125);        // large2d defaults
    CHECK(b.tol == 1e-10);      // local wins over global
    CHECK_FALSE(b.expect_converged);
}

TEST_CASE("parse errors carry line numbers") {
    try {
        parse_config("problem = test1\nh = abc\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(e.line == 2);
    }
    try {
        parse_config("[bogus section]\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(e.line == 1);
    }
    CHECK_THROWS_AS(parse_config("problem = test1\nscheme = simplex\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("problem = mars\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("problem = test1\nexpect = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("problem = test1\npaper_rotation = sometimes\n"), ConfigError);
}

TEST_CASE("experiment keys outside a section are rejected when sections exist") {
    const std::string text = R"(
h = 0.25
[experiment a]
problem = test1
)";
    CHECK_THROWS_AS(parse_config(text), ConfigError);
}

TEST_CASE("duplicate experiment names rejected") {
    const std::string text = R"(
[experiment a]
problem = test1
[experiment a]
problem = test1
)";
    CHECK_THROWS_AS(parse_config(text), ConfigError);
}

TEST_CASE("invalid spec values surface as config errors") {
    CHECK_THROWS_AS(parse_config("problem = test1\ncase = 9\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("problem = test1\nh = 0.3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("problem = test1\nthreads = 0\n"), ConfigError);
}

TEST_CASE("runner writes reports and tracks expectations") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "porofem_runconfig_test";
    fs::remove_all(dir);

    // A quick converging run plus a capped run marked expect = any.
    const std::string text = R"(
[experiment good]
problem = test1
scheme = newton
h = 0.25
tau = 0.25

[experiment capped]
problem = test1
scheme = splitting_lscheme
h = 0.25
tau = 0.25
max_iter = 2
expect = any
)";
    const RunConfig cfg = parse_config(text);
    const RunOutcome outcome = run_all(cfg, dir.string());
    CHECK(outcome.all_ok);  // the failure was expected
    REQUIRE(outcome.rows.size() == 2);
    CHECK(outcome.rows[0].converged());
    CHECK(outcome.rows[1].status == TermStatus::MaxIter);
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "iterations.csv"));
    CHECK(fs::file_size(dir / "summary.csv") > 0);

    // The same capped run without the marker fails the invocation.
    RunConfig strict = cfg;
    strict.experiments[1].expect_converged = true;
    const RunOutcome failed = run_all(strict, dir.string());
    CHECK_FALSE(failed.all_ok);

    fs::remove_all(dir);
}

TEST_CASE("parallel runner yields the same rows") {
    const std::string text = R"(
threads = 3
[experiment a]
problem = test1
h = 0.25
tau = 0.25
[experiment b]
problem = test1
scheme = lscheme
h = 0.25
tau = 0.25
[experiment c]
problem = test1
scheme = splitting_newton
h = 0.25
tau = 0.25
)";
    namespace fs = std::filesystem;
    const fs::path d1 = fs::temp_directory_path() / "porofem_par1";
    const fs::path d2 = fs::temp_directory_path() / "porofem_par2";
    RunConfig cfg = parse_config(text);
    const RunOutcome par = run_all(cfg, d1.string());
    cfg.threads = 1;
    const RunOutcome ser = run_all(cfg, d2.string());
    REQUIRE(par.rows.size() == ser.rows.size());
    auto slurp = [](const fs::path &p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
    CHECK(slurp(d1 / "iterations.csv") == slurp(d2 / "iterations.csv"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

// End-to-end checks of the command-line runner: spawns the installed binary
// and inspects exit codes and report files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run(const std::string &args) {
    const std::string cmd = std::string(POROFEM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path &p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int count_lines(const std::string &s) {
    int n = 0;
    for (const char c : s)
        if (c == '\n') ++n;
    return n;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char *name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path &p, const std::string &text) {
    std::ofstream os(p);
    os << text;
}

}  // namespace

TEST_CASE("verify exits cleanly on a healthy build") { CHECK(run("verify") == 0); }

TEST_CASE("list-cases prints the coefficient table") { CHECK(run("list-cases") == 0); }

TEST_CASE("run with the default benchmark writes non-empty reports") {
    TempDir dir("porofem_cli_run");
    write(dir.path / "exp.cfg",
          "problem = test1\ncase = 1\nscheme = newton\nh = 0.25\ntau = 0.25\n");
    CHECK(run("run --config " + (dir.path / "exp.cfg").string() + " --out " +
              (dir.path / "out").string()) == 0);
    CHECK(fs::exists(dir.path / "out" / "summary.csv"));
    CHECK(fs::exists(dir.path / "out" / "iterations.csv"));
    CHECK(fs::file_size(dir.path / "out" / "summary.csv") > 0);
    CHECK(fs::file_size(dir.path / "out" / "iterations.csv") > 0);
}

TEST_CASE("run without a config uses the built-in default benchmark") {
    TempDir dir("porofem_cli_default");
    CHECK(run("run --out " + (dir.path / "out").string()) == 0);
    CHECK(fs::exists(dir.path / "out" / "summary.csv"));
}

TEST_CASE("sweep expands the axis for every scheme") {
    TempDir dir("porofem_cli_sweep");
    write(dir.path / "base.cfg", "problem = test1\nh = 0.25\ntau = 0.25\n");
    CHECK(run("sweep --config " + (dir.path / "base.cfg").string() +
              " --axis tau --values 0.25,0.5 --out " + (dir.path / "out").string()) == 0);
    const std::string summary = slurp(dir.path / "out" / "sweep_summary.csv");
    // Header plus 2 values for each of the 4 schemes.
    CHECK(count_lines(summary) == 1 + 2 * 4);
}

TEST_CASE("sweep can pin a single scheme") {
    TempDir dir("porofem_cli_sweep_pin");
    write(dir.path / "base.cfg", "problem = test1\nh = 0.25\ntau = 0.25\n");
    CHECK(run("sweep --config " + (dir.path / "base.cfg").string() +
              " --axis tau --values 0.25,0.5 --scheme newton --out " +
              (dir.path / "out").string()) == 0);
    CHECK(count_lines(slurp(dir.path / "out" / "sweep_summary.csv")) == 1 + 2);
}

TEST_CASE("unknown axis is a usage error") {
    CHECK(run("sweep --axis bogus --values 1") == 2);
}

TEST_CASE("config errors exit nonzero") {
    TempDir dir("porofem_cli_bad");
    write(dir.path / "bad.cfg", "problem = test1\nschme = newton\n");
    CHECK(run("run --config " + (dir.path / "bad.cfg").string()) == 2);
}

TEST_CASE("repeated runs are byte-identical") {
    TempDir dir("porofem_cli_repeat");
    write(dir.path / "exp.cfg",
          "problem = test1\ncase = 3\nscheme = splitting_newton\nh = 0.25\ntau = 0.25\n");
    const std::string cfg = (dir.path / "exp.cfg").string();
    CHECK(run("run --config " + cfg + " --out " + (dir.path / "o1").string()) == 0);
    CHECK(run("run --config " + cfg + " --out " + (dir.path / "o2").string()) == 0);
    CHECK(slurp(dir.path / "o1" / "summary.csv") == slurp(dir.path / "o2" / "summary.csv"));
    CHECK(slurp(dir.path / "o1" / "iterations.csv") ==
          slurp(dir.path / "o2" / "iterations.csv"));
}

TEST_CASE("environment variable supplies the default output directory") {
    TempDir dir("porofem_cli_env");
    write(dir.path / "exp.cfg", "problem = test1\nh = 0.25\ntau = 0.25\n");
    const std::string out = (dir.path / "envout").string();
    const std::string cmd = "POROFEM_OUT=" + out + " " + std::string(POROFEM_CLI_PATH) +
                            " run --config " + (dir.path / "exp.cfg").string() +
                            " >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(fs::path(out) / "summary.csv"));
}

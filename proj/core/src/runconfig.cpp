#include "porofem/runconfig.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <optional>

#include "porofem/errors.hpp"

namespace porofem {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_double(const std::string &v, const std::string &key, int line) {
    char *end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("invalid number '" + v + "' for key '" + key + "'", line);
    return d;
}

int parse_int(const std::string &v, const std::string &key, int line) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("invalid integer '" + v + "' for key '" + key + "'", line);
    return out;
}

bool parse_bool(const std::string &v, const std::string &key, int line) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError("invalid boolean '" + v + "' for key '" + key + "'", line);
}

SchemeKind parse_scheme(const std::string &v, int line) {
    if (v == "newton" || v == "monolithic_newton") return SchemeKind::MonolithicNewton;
    if (v == "splitting_newton") return SchemeKind::SplittingNewton;
    if (v == "lscheme" || v == "monolithic_lscheme") return SchemeKind::MonolithicLScheme;
    if (v == "splitting_lscheme") return SchemeKind::SplittingLScheme;
    throw ConfigError("unknown scheme '" + v + "'", line);
}

Problem parse_problem(const std::string &v, int line) {
    if (v == "test1") return Problem::TestProblem1;
    if (v == "large2d") return Problem::LargeDeformation2D;
    throw ConfigError("unknown problem '" + v + "'", line);
}

struct KeyValue {
    std::string key, value;
    int line;
};

struct Section {
    std::string name;  // empty for the global block
    int line = 0;
    std::vector<KeyValue> entries;
};

const char *kExperimentKeys[] = {"problem", "case",  "scheme",      "h",
                                 "tau",     "T",     "Ls",          "Lp",
                                 "Lu",      "tol",   "max_iter",    "theta_final",
                                 "paper_rotation",   "expect"};
const char *kGlobalKeys[] = {"out",  "threads", "seed", "tol", "max_iter",
                             "verify_jacobian", "verify_kinematics", "verify_consistency"};

bool is_experiment_key(const std::string &k) {
    return std::find_if(std::begin(kExperimentKeys), std::end(kExperimentKeys),
                        [&](const char *s) { return k == s; }) != std::end(kExperimentKeys);
}
bool is_global_key(const std::string &k) {
    return std::find_if(std::begin(kGlobalKeys), std::end(kGlobalKeys),
                        [&](const char *s) { return k == s; }) != std::end(kGlobalKeys);
}

ExperimentSpec build_experiment(const std::string &name, const std::vector<KeyValue> &entries,
                                std::optional<double> global_tol, std::optional<int> global_iter) {
    // The problem key selects the per-problem defaults, so find it first.
    Problem problem = Problem::TestProblem1;
    bool have_problem = false;
    for (const KeyValue &kv : entries)
        if (kv.key == "problem") {
            problem = parse_problem(kv.value, kv.line);
            have_problem = true;
        }
    if (!have_problem)
        throw ConfigError("experiment '" + name + "' is missing the 'problem' key");

    ExperimentSpec spec = default_spec(problem);
    spec.id = name;
    if (global_tol) spec.tol = *global_tol;
    if (global_iter) spec.max_iter = *global_iter;

    for (const KeyValue &kv : entries) {
        const std::string &k = kv.key;
        const std::string &v = kv.value;
        if (k == "problem") continue;
        if (k == "case") spec.case_id = parse_int(v, k, kv.line);
        else if (k == "scheme") spec.scheme = parse_scheme(v, kv.line);
        else if (k == "h") spec.h = parse_double(v, k, kv.line);
        else if (k == "tau") spec.tau = parse_double(v, k, kv.line);
        else if (k == "T") spec.T = parse_double(v, k, kv.line);
        else if (k == "Ls") spec.Ls = parse_double(v, k, kv.line);
        else if (k == "Lp") spec.Lp = parse_double(v, k, kv.line);
        else if (k == "Lu") spec.Lu = parse_double(v, k, kv.line);
        else if (k == "tol") spec.tol = parse_double(v, k, kv.line);
        else if (k == "max_iter") spec.max_iter = parse_int(v, k, kv.line);
        else if (k == "theta_final") spec.theta_final = parse_double(v, k, kv.line);
        else if (k == "paper_rotation") spec.paper_rotation = parse_bool(v, k, kv.line);
        else if (k == "expect") {
            if (v == "converged") spec.expect_converged = true;
            else if (v == "any") spec.expect_converged = false;
            else throw ConfigError("expect must be 'converged' or 'any'", kv.line);
        } else {
            throw ConfigError("unknown key '" + k + "'", kv.line);
        }
    }
    try {
        spec.validate();
    } catch (const std::exception &e) {
        throw ConfigError("experiment '" + name + "': " + e.what());
    }
    return spec;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    std::vector<Section> sections(1);  // [0] is the global block
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string line = trim(raw);
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
            const std::string inner = trim(line.substr(1, line.size() - 2));
            const size_t sp = inner.find(' ');
            const std::string kind = sp == std::string::npos ? inner : inner.substr(0, sp);
            if (kind != "experiment")
                throw ConfigError("unknown section '" + inner + "'", line_no);
            const std::string name = sp == std::string::npos ? "" : trim(inner.substr(sp + 1));
            if (name.empty()) throw ConfigError("experiment section needs a name", line_no);
            for (size_t i = 1; i < sections.size(); ++i)
                if (sections[i].name == name)
                    throw ConfigError("duplicate experiment '" + name + "'", line_no);
            sections.push_back({name, line_no, {}});
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (value.empty()) throw ConfigError("empty value for key '" + key + "'", line_no);
        sections.back().entries.push_back({key, value, line_no});
    }

    RunConfig cfg;
    std::optional<double> global_tol;
    std::optional<int> global_iter;
    const bool has_sections = sections.size() > 1;
    std::vector<KeyValue> implicit;

    for (const KeyValue &kv : sections[0].entries) {
        const std::string &k = kv.key;
        if (is_global_key(k)) {
            if (k == "out") cfg.out_dir = kv.value;
            else if (k == "threads") cfg.threads = parse_int(kv.value, k, kv.line);
            else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(
                         parse_int(kv.value, k, kv.line));
            else if (k == "tol") global_tol = parse_double(kv.value, k, kv.line);
            else if (k == "max_iter") global_iter = parse_int(kv.value, k, kv.line);
            else if (k == "verify_jacobian") cfg.verify_jacobian = parse_bool(kv.value, k, kv.line);
            else if (k == "verify_kinematics")
                cfg.verify_kinematics = parse_bool(kv.value, k, kv.line);
            else if (k == "verify_consistency")
                cfg.verify_consistency = parse_bool(kv.value, k, kv.line);
        } else if (is_experiment_key(k)) {
            if (has_sections)
                throw ConfigError("experiment key '" + k + "' outside a section", kv.line);
            implicit.push_back(kv);
        } else {
            throw ConfigError("unknown key '" + k + "'", kv.line);
        }
    }

    if (!implicit.empty())
        cfg.experiments.push_back(build_experiment("default", implicit, global_tol, global_iter));
    for (size_t i = 1; i < sections.size(); ++i)
        cfg.experiments.push_back(
            build_experiment(sections[i].name, sections[i].entries, global_tol, global_iter));

    if (cfg.experiments.empty()) throw ConfigError("no experiments");
    if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
    return cfg;
}

RunOutcome run_all(const RunConfig &config, const std::string &out_dir) {
    std::filesystem::create_directories(out_dir);

    RunOutcome outcome;
    outcome.rows.resize(config.experiments.size());
    const int threads = std::max(1, config.threads);
    if (threads == 1 || config.experiments.size() < 2) {
        for (size_t i = 0; i < config.experiments.size(); ++i)
            outcome.rows[i] = run_experiment(config.experiments[i]);
    } else {
        // Independent experiments; each writes only its own slot, and the
        // report merge below is by fixed index, so the output is
        // thread-count independent.
        std::vector<std::future<void>> futures;
        std::atomic<size_t> next{0};
        for (int t = 0; t < threads; ++t)
            futures.push_back(std::async(std::launch::async, [&]() {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= config.experiments.size()) return;
                    outcome.rows[i] = run_experiment(config.experiments[i]);
                }
            }));
        for (auto &f : futures) f.get();
    }

    for (size_t i = 0; i < outcome.rows.size(); ++i)
        if (!outcome.rows[i].converged() && config.experiments[i].expect_converged)
            outcome.all_ok = false;

    write_summary_csv(out_dir + "/summary.csv", outcome.rows);
    write_iterations_csv(out_dir + "/iterations.csv", outcome.rows);
    return outcome;
}

}  // namespace porofem

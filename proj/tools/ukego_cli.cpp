// ukego: fit a surrogate, run EGO, or run a benchmark batch.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "ukego/bench/experiment.hpp"
#include "ukego/bench/problems.hpp"
#include "ukego/surrogate.hpp"

namespace {

using namespace ukego;
using namespace ukego::bench;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string problem;
    std::vector<std::string> algos;
    int pmax = -1;
    std::string scheme;
    int n_init = -1;
    int n_upd = -1;
    int reps = 1;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::string out = "out";
    std::string preset;
    std::string tune = "simplified";
    long nv = 10000;
    int ga_pop = 100, ga_gen = 200, ei_pop = 100, ei_gen = 200;
};

void add_common(CLI::App* cmd, Options& o, bool batch) {
    cmd->add_option("--problem", o.problem, "branin | sasena | hosaki | hartman6 | borehole");
    cmd->add_option("--algo", o.algos,
                    "ok | uk1 | uk2 | bk | pck-to | pck-tf | pck-tensor | uk1-freq | pck (uses --scheme); repeatable");
    cmd->add_option("--pmax", o.pmax, "Maximum order for bk/pck scans (default: problem default)");
    cmd->add_option("--scheme", o.scheme, "Dictionary for plain 'pck': tensor | total-order | two-factor");
    cmd->add_option("--n-init,--n", o.n_init, "Initial design size (default: problem default)");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--tune", o.tune, "exhaustive | simplified | bfgs")->check(CLI::IsMember({"exhaustive", "simplified", "bfgs"}));
    cmd->add_option("--ga-pop", o.ga_pop, "Likelihood GA population");
    cmd->add_option("--ga-gen", o.ga_gen, "Likelihood GA generations");
    if (batch) {
        cmd->add_option("--n-upd", o.n_upd, "Number of infill updates (default: problem default)");
        cmd->add_option("--reps", o.reps, "Repetitions");
        cmd->add_option("--jobs", o.jobs, "Parallel runs (default: available cores)");
        cmd->add_option("--out", o.out, "Output directory");
        cmd->add_option("--nv", o.nv, "Validation points for the initial-surrogate RMSE (0 disables)");
        cmd->add_option("--ei-pop", o.ei_pop, "EI GA population");
        cmd->add_option("--ei-gen", o.ei_gen, "EI GA generations");
    }
}

Problem resolve_problem(const std::string& name) {
    if (name.empty()) throw ConfigError("--problem is required");
    auto p = find_problem(name);
    if (!p) throw ConfigError("unknown problem '" + name + "'");
    return *p;
}

Variant resolve_variant(const std::string& id, const Problem& problem, const Options& o, int n_init) {
    std::string key = id;
    if (key == "pck") {
        const std::string s = o.scheme.empty() ? to_string(problem.pck_scheme) : o.scheme;
        if (s == "tensor") key = "pck-tensor";
        else if (s == "total-order") key = "pck-to";
        else if (s == "two-factor") key = "pck-tf";
        else throw ConfigError("unknown --scheme '" + s + "'");
    }
    auto kind = parse_surrogate_kind(key);
    if (!kind) throw ConfigError("unknown algorithm '" + id + "'");
    Variant v{*kind, o.pmax >= 0 ? o.pmax : problem.p_max};
    if (v.p_max > 8) throw ConfigError("--pmax must be <= 8");
    try {
        check_surrogate_feasible(v.kind, problem.m, n_init);
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    return v;
}

TuneStrategy resolve_tune(const Options& o) {
    TuneStrategy t;
    t.kind = o.tune == "exhaustive" ? TuneKind::ExhaustiveGaBfgs
             : o.tune == "bfgs"     ? TuneKind::BfgsOnly
                                    : TuneKind::SimplifiedGaBfgs;
    t.ga_population = o.ga_pop;
    t.ga_generations = o.ga_gen;
    try {
        t.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    return t;
}

ExperimentConfig make_config(const Problem& problem, const Options& o, const std::vector<std::string>& algos,
                             const std::filesystem::path& out) {
    ExperimentConfig cfg;
    cfg.problem = problem;
    cfg.run.n_init = o.n_init > 0 ? o.n_init : problem.n_init;
    cfg.run.n_upd = o.n_upd >= 0 ? o.n_upd : problem.n_upd;
    if (cfg.run.n_init < 2) throw ConfigError("--n-init must be >= 2");
    if (algos.empty()) throw ConfigError("no algorithm variants given (use --algo)");
    for (const auto& a : algos) cfg.variants.push_back(resolve_variant(a, problem, o, cfg.run.n_init));
    if (o.reps < 1) throw ConfigError("--reps must be >= 1");
    if (o.ei_pop < 4 || o.ei_gen < 1) throw ConfigError("EI GA needs population >= 4 and generations >= 1");
    if (o.nv < 0) throw ConfigError("--nv must be >= 0");
    cfg.run.tune = resolve_tune(o);
    cfg.run.ei = {o.ei_pop, o.ei_gen};
    cfg.run.n_validation = o.nv;
    cfg.reps = o.reps;
    cfg.master_seed = o.seed;
    cfg.out_dir = out;
    cfg.jobs = o.jobs > 0 ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
    return cfg;
}

int cmd_fit(const Options& o) {
    const Problem problem = resolve_problem(o.problem);
    const int n = o.n_init > 0 ? o.n_init : problem.n_init;
    if (n < 3) throw ConfigError("--n must be >= 3");
    const std::string algo = o.algos.empty() ? "ok" : o.algos.front();
    const Variant v = resolve_variant(algo, problem, o, n);
    const TuneStrategy tune = resolve_tune(o);

    const std::uint64_t seed_r = rep_seed(o.seed, 0);
    const Eigen::MatrixXd X = initial_design(problem, n, seed_r);
    const NormalizedObjective f = normalized_objective(problem);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = f(X.row(i).transpose()).model_value;
    const ExperimentalDesign design(X, y, problem.raw_bounds);
    const SurrogateResult sr = build_surrogate(design, SurrogateConfig{v.kind, v.p_max, tune},
                                               derive_seed(seed_r, hash_label(v.id())));
    const KrigingModel& model = sr.model;

    std::printf("problem: %s\nalgorithm: %s\nn: %d\n", problem.name.c_str(), v.id().c_str(), n);
    std::printf("loocv_rmse: %.10g\n", model.has_loocv() ? model.loocv_rmse() : -1.0);
    std::printf("p_chosen: %d\n", sr.trace.p_chosen);
    std::printf("trend_terms:");
    for (const auto& a : model.basis().index_set.indices) std::printf(" %s", to_string(a).c_str());
    std::printf("\ntheta:");
    for (Eigen::Index k = 0; k < model.theta().size(); ++k) std::printf(" %.10g", model.theta()(k));
    std::printf("\nsigma2: %.10g\nnugget: %.3g\n", model.sigma2(), model.nugget());
    return 0;
}

int report(const ExperimentResult& r, const std::filesystem::path& out) {
    std::printf("wrote %zu record files to %s\n", r.record_files.size(), out.string().c_str());
    for (const auto& rec : r.records)
        if (!rec.completed())
            std::fprintf(stderr, "run failed: %s rep %d: %s\n", rec.algorithm.c_str(), rec.rep, rec.error.c_str());
    return r.failures == 0 ? 0 : 1;
}

int cmd_optimize(const Options& o) {
    const Problem problem = resolve_problem(o.problem);
    const std::vector<std::string> algos = o.algos.empty() ? std::vector<std::string>{"ok"} : o.algos;
    const ExperimentConfig cfg = make_config(problem, o, algos, o.out);
    return report(run_experiment(cfg), cfg.out_dir);
}

/// Default variant list of the synthetic preset for one problem.
std::vector<std::string> preset_algos(const Problem& p) {
    if (p.m == 2) return {"ok", "uk1", "uk2", "bk", "pck-tensor"};
    if (p.name == "borehole") return {"ok", "uk1", "bk", "pck-to", "pck-tf"};
    return {"ok", "uk1", "uk2", "bk", "pck-to", "pck-tf"};
}

int cmd_benchmark(const Options& o, bool reps_given) {
    std::vector<ExperimentConfig> cfgs;
    if (!o.preset.empty()) {
        if (o.preset != "paper-synthetic") throw ConfigError("unknown preset '" + o.preset + "'");
        Options po = o;
        if (!reps_given) po.reps = 20;
        for (const auto& name : problem_names()) {
            if (!o.problem.empty() && o.problem != name) continue;
            const Problem p = *find_problem(name);
            cfgs.push_back(make_config(p, po, o.algos.empty() ? preset_algos(p) : o.algos,
                                       std::filesystem::path(o.out) / name));
        }
        if (cfgs.empty()) throw ConfigError("--problem does not match any preset problem");
    } else {
        const Problem problem = resolve_problem(o.problem);
        cfgs.push_back(make_config(problem, o, o.algos, o.out));
    }
    int rc = 0;
    for (const auto& c : cfgs) rc = std::max(rc, report(run_experiment(c), c.out_dir));
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Universal-Kriging EGO toolkit"};
    app.set_config("--config", "", "TOML/INI config file with [fit]/[optimize]/[benchmark] sections; command-line flags take precedence");
    app.require_subcommand(1);
    Options o;
    auto* fit = app.add_subcommand("fit", "Fit one surrogate on an LHS design and report it");
    add_common(fit, o, false);
    auto* opt = app.add_subcommand("optimize", "Run EGO and write run records");
    add_common(opt, o, true);
    auto* bench = app.add_subcommand("benchmark", "Run a comparison batch with shared initial designs");
    add_common(bench, o, true);
    bench->add_option("--preset", o.preset, "paper-synthetic");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*fit) return cmd_fit(o);
        if (*opt) return cmd_optimize(o);
        return cmd_benchmark(o, bench->count("--reps") > 0);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 1;
    }
}

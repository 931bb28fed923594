#pragma once

// Repeated EGO runs with shared initial designs, run records and summaries.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "ukego/bench/metrics.hpp"
#include "ukego/bench/problems.hpp"
#include "ukego/design.hpp"
#include "ukego/ego.hpp"
#include "ukego/seeding.hpp"
#include "ukego/surrogate.hpp"

namespace ukego::bench {

inline constexpr const char* kVersion = "0.1.0";

struct Variant {
    SurrogateKind kind = SurrogateKind::OK;
    int p_max = 2;

    std::string id() const { return to_string(kind); }
};

struct RunOptions {
    int n_init = 0;
    int n_upd = 0;
    TuneStrategy tune;
    EiSearchOptions ei;
    Eigen::Index n_validation = 0;  // 0 disables the initial-surrogate RMSE
};

struct RecordRow {
    int iteration;  // 0 for the initial design, k for the k-th infill
    bool initial;
    Eigen::VectorXd x_raw;
    double y_raw;
    double best_so_far;
    double improvement;
};

struct RunRecord {
    std::string problem;
    std::string algorithm;
    int rep = 0;
    std::uint64_t seed = 0;
    std::size_t m = 0;
    std::vector<RecordRow> rows;
    std::vector<double> best_trajectory;         // index 0: initial design
    std::vector<double> improvement_trajectory;  // same indexing
    std::vector<SelectionTrace> traces;
    std::optional<double> initial_rmse;
    std::string error;  // empty when the run completed

    bool completed() const { return error.empty(); }
};

/// Seed of repetition r; the initial design and each variant derive from it.
inline std::uint64_t rep_seed(std::uint64_t master, int rep) {
    return derive_seed(master, static_cast<std::uint64_t>(rep));
}

inline Eigen::MatrixXd initial_design(const Problem& problem, int n_init, std::uint64_t seed_r) {
    const Eigen::MatrixXd s = lhs_sample(n_init, static_cast<Eigen::Index>(problem.m),
                                         derive_seed(seed_r, hash_label("lhs")));
    return (2.0 * s.array() - 1.0).matrix();
}

inline NormalizedObjective normalized_objective(const Problem& problem) {
    return [&problem](const Eigen::VectorXd& u) {
        const Eigen::VectorXd x = denormalize_point(u, problem.raw_bounds);
        const double raw = problem.objective(std::span<const double>(x.data(), problem.m));
        return Evaluation{problem.model_value(raw), raw};
    };
}

/// One EGO repetition from a given normalized initial design.
inline RunRecord ego_run(const Problem& problem, const Variant& variant, const RunOptions& opt,
                         const Eigen::MatrixXd& initial_points, int rep, std::uint64_t seed_r) {
    RunRecord rec;
    rec.problem = problem.name;
    rec.algorithm = variant.id();
    rec.rep = rep;
    rec.seed = seed_r;
    rec.m = problem.m;
    const std::uint64_t vseed = derive_seed(seed_r, hash_label(rec.algorithm));
    const NormalizedObjective f = normalized_objective(problem);

    auto push_row = [&](int it, bool init, const Eigen::VectorXd& u, double raw) {
        const double prev = rec.rows.empty() ? raw : rec.rows.back().best_so_far;
        const double best = std::min(prev, raw);
        rec.rows.push_back({it, init, denormalize_point(u, problem.raw_bounds), raw, best,
                            improvement(best, problem.known_optimum)});
    };

    try {
        if (opt.n_init < 2) throw PreconditionError("n_init must be >= 2");
        if (opt.n_upd < 0) throw PreconditionError("n_upd must be >= 0");
        check_surrogate_feasible(variant.kind, problem.m, opt.n_init);
        const Eigen::Index n0 = initial_points.rows();
        Eigen::VectorXd y_model(n0), y_raw(n0);
        for (Eigen::Index i = 0; i < n0; ++i) {
            const Eigen::VectorXd u = initial_points.row(i).transpose();
            const Evaluation ev = f(u);
            y_model(i) = ev.model_value;
            y_raw(i) = ev.raw_value;
            push_row(0, true, u, ev.raw_value);
        }
        rec.best_trajectory.push_back(rec.rows.back().best_so_far);
        rec.improvement_trajectory.push_back(rec.rows.back().improvement);

        EgoState state = make_ego_state(ExperimentalDesign(initial_points, y_model, problem.raw_bounds), y_raw);
        EgoStepOptions step_opt{SurrogateConfig{variant.kind, variant.p_max, opt.tune}, opt.ei};

        auto record_rmse = [&](const KrigingModel& model) {
            if (opt.n_validation <= 0) return;
            rec.initial_rmse = validation_rmse(
                [&](const Eigen::VectorXd& u) { return model.predict(u); },
                [&](const Eigen::VectorXd& u) { return f(u).model_value; },
                static_cast<Eigen::Index>(problem.m), opt.n_validation,
                derive_seed(seed_r, hash_label("validation")));
        };

        if (opt.n_upd == 0 && opt.n_validation > 0)
            record_rmse(build_surrogate(state.design, step_opt.surrogate, derive_seed(vseed, 0, 1)).model);

        for (int k = 1; k <= opt.n_upd; ++k) {
            std::optional<KrigingModel> model;
            ego_step(state, step_opt, f, derive_seed(vseed, static_cast<std::uint64_t>(k)),
                     k == 1 ? &model : nullptr);
            if (k == 1 && model) record_rmse(*model);
            const HistoryEntry& h = state.history.back();
            push_row(k, false, h.point, h.raw_value);
            rec.best_trajectory.push_back(rec.rows.back().best_so_far);
            rec.improvement_trajectory.push_back(rec.rows.back().improvement);
        }
        rec.traces = std::move(state.traces);
    } catch (const std::exception& e) {
        rec.error = e.what();
        if (rec.error.empty()) rec.error = "unknown failure";
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Persistence.

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string record_csv(const RunRecord& rec) {
    std::ostringstream os;
    os << "problem,algorithm,rep,iteration,phase";
    for (std::size_t j = 1; j <= rec.m; ++j) os << ",x_" << j;
    os << ",y_raw,best_so_far,improvement\n";
    for (const auto& r : rec.rows) {
        os << rec.problem << ',' << rec.algorithm << ',' << rec.rep << ',' << r.iteration << ','
           << (r.initial ? "init" : "update");
        for (Eigen::Index j = 0; j < r.x_raw.size(); ++j) os << ',' << fmt_double(r.x_raw(j));
        os << ',' << fmt_double(r.y_raw) << ',' << fmt_double(r.best_so_far) << ','
           << fmt_double(r.improvement) << '\n';
    }
    return os.str();
}

inline std::string record_file_name(const RunRecord& rec) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%03d", rec.rep);
    return rec.problem + "__" + rec.algorithm + "__rep" + buf + ".csv";
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << s;
}

inline std::string boxplot_row(const std::string& prefix, const BoxplotStats& b) {
    std::ostringstream os;
    os << prefix << ',' << b.count << ',' << fmt_double(b.q1) << ',' << fmt_double(b.median) << ','
       << fmt_double(b.q3) << ',' << fmt_double(b.whisker_low) << ',' << fmt_double(b.whisker_high)
       << ',' << fmt_double(b.mean) << ',';
    for (std::size_t i = 0; i < b.outliers.size(); ++i) os << (i ? ";" : "") << fmt_double(b.outliers[i]);
    os << '\n';
    return os.str();
}

inline constexpr const char* kBoxplotHeader =
    "problem,algorithm,n,q1,median,q3,whisker_low,whisker_high,mean,outliers\n";

/// Per-iteration quartiles/mean of I per algorithm, completed runs only.
inline std::string summary_csv(const std::vector<RunRecord>& recs, const std::vector<std::string>& algos) {
    std::ostringstream os;
    os << "problem,algorithm,iteration,n,median,q1,q3,mean\n";
    for (const auto& a : algos) {
        std::size_t len = 0;
        std::string prob;
        for (const auto& r : recs)
            if (r.algorithm == a && r.completed()) {
                len = std::max(len, r.improvement_trajectory.size());
                prob = r.problem;
            }
        for (std::size_t k = 0; k < len; ++k) {
            std::vector<double> v;
            for (const auto& r : recs)
                if (r.algorithm == a && r.completed() && k < r.improvement_trajectory.size())
                    v.push_back(r.improvement_trajectory[k]);
            const BoxplotStats b = boxplot_stats(v);
            os << prob << ',' << a << ',' << k << ',' << v.size() << ',' << fmt_double(b.median) << ','
               << fmt_double(b.q1) << ',' << fmt_double(b.q3) << ',' << fmt_double(b.mean) << '\n';
        }
    }
    return os.str();
}

struct ExperimentConfig {
    Problem problem;
    std::vector<Variant> variants;
    RunOptions run;
    int reps = 1;
    std::uint64_t master_seed = 1;
    std::filesystem::path out_dir = "out";
    int jobs = 1;
};

struct ExperimentResult {
    std::vector<RunRecord> records;  // rep-major, variant order within a rep
    std::vector<std::string> record_files;
    int failures = 0;
};

inline nlohmann::json selection_json(const SelectionTrace& t) {
    nlohmann::json j;
    j["p_chosen"] = t.p_chosen;
    j["chosen_prefix_length"] = t.chosen_prefix_length;
    std::vector<std::string> terms;
    for (const auto& a : t.ordered_terms) terms.push_back(to_string(a));
    j["ordered_terms"] = terms;
    std::vector<std::string> loo;
    for (double v : t.loocv_per_step) loo.push_back(fmt_double(v));
    j["loocv_per_step"] = loo;
    j["fell_back_to_ok"] = t.fell_back_to_ok;
    return j;
}

/// Runs every (rep, variant) pair, writes one record file per run plus the
/// summary, boxplot tables and manifest. Per-run failures are recorded and
/// the batch continues.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.variants.empty()) throw PreconditionError("no algorithm variants configured");
    if (cfg.reps < 1) throw PreconditionError("reps must be >= 1");
    namespace fs = std::filesystem;
    const fs::path rec_dir = cfg.out_dir / "records";
    fs::create_directories(rec_dir);

    const std::size_t nv = cfg.variants.size();
    const std::size_t total = nv * static_cast<std::size_t>(cfg.reps);
    std::vector<Eigen::MatrixXd> designs;
    for (int r = 0; r < cfg.reps; ++r)
        designs.push_back(initial_design(cfg.problem, cfg.run.n_init, rep_seed(cfg.master_seed, r)));

    ExperimentResult res;
    res.records.resize(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < total; job = next++) {
            const int r = static_cast<int>(job / nv);
            const Variant& v = cfg.variants[job % nv];
            res.records[job] = ego_run(cfg.problem, v, cfg.run, designs[static_cast<std::size_t>(r)], r,
                                       rep_seed(cfg.master_seed, r));
            write_text(rec_dir / record_file_name(res.records[job]), record_csv(res.records[job]));
        }
    };
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(total)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<std::string> algos;
    for (const auto& v : cfg.variants) algos.push_back(v.id());
    write_text(cfg.out_dir / "summary.csv", summary_csv(res.records, algos));

    std::string final_box = kBoxplotHeader, rmse_box = kBoxplotHeader;
    for (const auto& a : algos) {
        std::vector<double> fin, rm;
        for (const auto& r : res.records) {
            if (r.algorithm != a || !r.completed()) continue;
            fin.push_back(r.improvement_trajectory.back());
            if (r.initial_rmse) rm.push_back(*r.initial_rmse);
        }
        if (!fin.empty()) final_box += boxplot_row(cfg.problem.name + "," + a, boxplot_stats(fin));
        if (!rm.empty()) rmse_box += boxplot_row(cfg.problem.name + "," + a, boxplot_stats(rm));
    }
    write_text(cfg.out_dir / "final_boxplot.csv", final_box);
    write_text(cfg.out_dir / "rmse_boxplot.csv", rmse_box);

    nlohmann::json man;
    man["software"] = "ukego";
    man["version"] = kVersion;
    man["master_seed"] = cfg.master_seed;
    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < cfg.reps; ++r) seeds.push_back(rep_seed(cfg.master_seed, r));
    man["rep_seeds"] = seeds;
    nlohmann::json c;
    c["problem"] = cfg.problem.name;
    c["n_init"] = cfg.run.n_init;
    c["n_upd"] = cfg.run.n_upd;
    c["reps"] = cfg.reps;
    c["tune"] = to_string(cfg.run.tune.kind);
    c["ga_population"] = cfg.run.tune.ga_population;
    c["ga_generations"] = cfg.run.tune.ga_generations;
    c["ei_population"] = cfg.run.ei.population;
    c["ei_generations"] = cfg.run.ei.generations;
    c["n_validation"] = cfg.run.n_validation;
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : cfg.variants) vs.push_back({{"algorithm", v.id()}, {"p_max", v.p_max}});
    c["variants"] = vs;
    man["config"] = c;
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : res.records) {
        nlohmann::json j;
        j["algorithm"] = r.algorithm;
        j["rep"] = r.rep;
        j["seed"] = r.seed;
        j["file"] = "records/" + record_file_name(r);
        j["status"] = r.completed() ? "ok" : "failed";
        if (!r.completed()) {
            j["error"] = r.error;
            ++res.failures;
        }
        if (r.initial_rmse) j["initial_rmse"] = fmt_double(*r.initial_rmse);
        if (!r.traces.empty()) j["first_selection"] = selection_json(r.traces.front());
        runs.push_back(j);
        res.record_files.push_back(j["file"].get<std::string>());
    }
    man["runs"] = runs;
    write_text(cfg.out_dir / "manifest.json", man.dump(2) + "\n");
    return res;
}

}  // namespace ukego::bench

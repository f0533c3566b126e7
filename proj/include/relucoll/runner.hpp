#pragma once
// Pipeline stages behind the command-line tool.  Every stage writes its
// artifacts deterministically: reruns with unchanged inputs are
// byte-identical regardless of the thread count.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relucoll/config.hpp"
#include "relucoll/error_lab.hpp"
#include "relucoll/fem.hpp"
#include "relucoll/surrogate.hpp"

namespace rc {

struct RunOptions {
    std::string out;  // empty: the config's output directory
    int threads = 1;
    bool dump_solutions = false;
    bool timing = false;  // wall-clock column; off keeps outputs byte-identical
    std::optional<std::uint64_t> seed;
};

// Resolved per-experiment schedule: omega and delta for each xi.
class Experiment {
public:
    explicit Experiment(ExperimentConfig cfg, RunOptions opts = {});

    const ExperimentConfig& config() const { return cfg_; }
    const RunOptions& options() const { return opts_; }
    std::string out_dir() const;
    std::uint64_t seed() const;

    CollocationPlan plan(double xi) const;
    // omega: fixed, or floor(K xi) with K = max m1(xi)/xi^{1/(theta q)} over
    // the first two sweep values.
    double omega(double xi) const;
    DeltaInfo delta(const CollocationPlan& plan, double omega) const;

    const FemSolver& solver() const { return coarse_; }
    const FemSolver& truth_solver() const { return fine_; }
    // Coarse FEM nodal vectors at every grid point of the plan.
    Mat solve(const CollocationPlan& plan) const;
    // Fine FEM restricted to the coarse nodes, one row per point.
    Mat truth(const Mat& Y) const;
    BatchFn truth_fn() const;
    NormFn norm() const;

private:
    ExperimentConfig cfg_;
    RunOptions opts_;
    FemSolver coarse_;
    FemSolver fine_;
    mutable std::optional<double> omega_k_;
    std::shared_ptr<struct TruthCache> truth_cache_;
};

struct SweepRow {
    double xi = 0.0;
    bool ok = true;
    std::string error;
    std::size_t lambda_size = 0, n_solvers = 0, n_unique = 0, W = 0, W_unpadded = 0, L = 0;
    int m1 = 0, m_active = 0;
    std::size_t units = 0, components = 0;
    double omega = 0.0, delta = 0.0, log_inv_delta_formula = 0.0;
    Estimate l2, l2_interp;
    double sup_error = 0.0;
    Decomposition terms;
    double gap_bound = 0.0;
    double wall_ms = -1.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<RateFit> error_vs_solvers;
    std::optional<RateFit> error_vs_size;
    std::optional<RateFit> interp_error_vs_solvers;
    std::size_t sample_dims = 0;
};

SweepResult run_sweep(const Experiment& ex);
std::string sweep_csv(const SweepResult& r, bool timing);
std::string sweep_details_csv(const SweepResult& r);
Json rates_json(const SweepResult& r);

// Subcommands; each returns a process exit code and reports on stderr.
int cmd_plan(const Experiment& ex);
int cmd_solve(const Experiment& ex, const std::string& plan_path);
int cmd_compile(const Experiment& ex, const std::string& plan_path, const std::string& samples_path);
int cmd_evaluate(const Experiment& ex, const std::string& plan_path, const std::string& samples_path,
                 const std::string& mode);
int cmd_sweep(const Experiment& ex);
int cmd_net_eval(const std::string& net_path, const std::string& points_path, const std::string& out_path);

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

// Maps an exception to its exit code and prints it.
int report_failure(const std::exception& ex);

}  // namespace rc

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sparsense/adaptive.hpp"
#include "sparsense/baselines.hpp"
#include "sparsense/config_file.hpp"
#include "sparsense/metrics.hpp"
#include "sparsense/model.hpp"
#include "sparsense/result.hpp"

namespace sparsense {

/// Declarative Monte Carlo experiment grid. The cross product
/// sparsity_levels x snr_grid_db x epsilon_grid is run with `trials`
/// independent instances per grid point, every requested solver consuming
/// the identical instance (paired comparison).
struct ExperimentSpec {
  Eigen::Index n_dim = 40;
  Eigen::Index m_dim = 20;
  std::vector<Eigen::Index> sparsity_levels{2, 6, 10};
  std::vector<double> snr_grid_db{0, 2, 4, 6, 8, 10, 12};
  std::vector<double> epsilon_grid{2, 20, 200, 2000, 20000};
  std::vector<SolverId> solvers{SolverId::ass_rza_nlmf, SolverId::nss_omp,
                                SolverId::nss_bpdn};
  std::size_t trials = 200;
  std::uint64_t master_seed = 20140704;
  SnrConvention snr_convention = SnrConvention::power10;
  RhoConvention rho_convention = RhoConvention::gradient_consistent;
  bool no_noise = false;     // force sigma_n^2 = 0 regardless of the SNR grid
  std::size_t workers = 1;   // trial workers; results do not depend on this

  RzaNlmfConfig rza_config{1.5, 5e-8, 2000.0, 1e-6, 20000,
                           RhoConvention::gradient_consistent};
  BpdnConfig bpdn_config{0.1, 5000, 1e-10};
  /// When set, BPDN uses the universal threshold sigma_n * sqrt(2 ln N)
  /// per grid point instead of bpdn_config.lambda.
  bool bpdn_auto_lambda = true;
  double omp_residual_tol = 1e-12;
  std::uint64_t oracle_cap = 100000;

  void validate() const;
  double noise_variance_for(double snr_db) const;
  double bpdn_lambda_for(double noise_variance) const;
};

/// Overlay "key = value" config entries onto a spec. Unknown keys error.
void apply_key_values(ExperimentSpec& spec, const KeyValueMap& values);

struct GridPoint {
  Eigen::Index k = 0;
  double snr_db = 0.0;
  double epsilon = 0.0;
};

std::string experiment_id(const GridPoint& point);

/// One problem instance of a trial, reproducible from
/// (master_seed, trial_index) alone.
struct TrialInstance {
  SparseSignal truth;
  SensingEnsemble ensemble;
};

TrialInstance make_trial_instance(const ExperimentSpec& spec, const GridPoint& point,
                                  std::uint32_t trial_index);

/// One solver's outcome on one trial instance.
struct TrialSolverRun {
  SolverId solver = SolverId::ass_rza_nlmf;
  bool diverged = false;
  std::size_t diverged_at = 0;
  double final_squared_error = 0.0;
  double residual = 0.0;        // ||y - X h||
  std::size_t iterations_used = 0;
  bool converged = false;
  std::vector<double> mse_trajectory;  // adaptive solver only
  Eigen::VectorXd estimate;
};

struct TrialResult {
  std::vector<TrialSolverRun> runs;  // in spec.solvers order
};

/// Runs every requested solver on the trial's instance. Divergence is
/// recorded in the run, never thrown.
TrialResult run_trial(const ExperimentSpec& spec, const GridPoint& point,
                      std::uint32_t trial_index);

/// Per-grid-point aggregates: the averaged trajectory (adaptive) or the
/// averaged final error (batch solvers), with divergent trials excluded
/// and tallied.
struct SolverAggregate {
  SolverId solver = SolverId::ass_rza_nlmf;
  std::size_t trials_used = 0;
  std::size_t divergences = 0;
  std::vector<double> avg_mse_trajectory;  // adaptive: one entry per iteration
  double steady_state_mse = 0.0;  // adaptive: mean of the last full row-cycle
};

struct GridPointSummary {
  GridPoint point;
  std::string id;
  std::size_t trials = 0;
  double noise_variance = 0.0;
  double bpdn_lambda = 0.0;
  double crlb_nss_value = 0.0;
  double crlb_ass_value = 0.0;  // NaN when the formula is singular
  std::vector<SolverAggregate> solvers;

  std::size_t divergence_count() const;
  const SolverAggregate& aggregate(SolverId id) const;
};

/// Deterministic grid run: trials execute on spec.workers threads but are
/// reduced in strict trial order, so the outputs are byte-stable for any
/// worker count.
std::vector<GridPointSummary> run_grid(const ExperimentSpec& spec);

struct ResultRow {
  std::string experiment_id;
  std::string solver_id;
  Eigen::Index k = 0;
  double snr_db = 0.0;
  double epsilon = 0.0;
  std::size_t iteration = 0;  // 0 marks a batch solver's single final point
  double avg_mse = 0.0;
  std::size_t trials = 0;
  double crlb_nss = 0.0;
  double crlb_ass = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;  // sorted by (experiment_id, solver_id, iteration)
  std::size_t divergence_count = 0;
  std::size_t total_trials = 0;  // trials x grid points x solvers
};

/// Full experiment: run_grid plus row materialization (adaptive solvers
/// contribute one row per iteration, batch solvers one row at iteration 0).
ResultTable run_experiment(const ExperimentSpec& spec);

ResultTable rows_from_summaries(const std::vector<GridPointSummary>& summaries);

/// CSV with the fixed header
///   experiment_id,solver_id,k,snr_db,epsilon,iteration,avg_mse,trials,crlb_nss,crlb_ass
/// reals rendered with 17 significant digits, a trailing summary footer row
/// carrying the divergence tally, and a newline-terminated final line.
void emit_csv(const ResultTable& table, const std::filesystem::path& path);
ResultTable read_csv(const std::filesystem::path& path);

/// Mean of the last `cycle` entries (the final full row-cycle).
double steady_state_mse(const std::vector<double>& avg_trajectory, std::size_t cycle);

}  // namespace sparsense

#include "sparsense/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

#include "sparsense/errors.hpp"
#include "sparsense/matrix_io.hpp"

namespace sparsense {

namespace {

constexpr std::size_t kChunkSize = 32;  // bounds per-chunk trajectory memory

constexpr const char* kCsvHeader =
    "experiment_id,solver_id,k,snr_db,epsilon,iteration,avg_mse,trials,crlb_nss,"
    "crlb_ass";

std::string format_grid_value(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", value);
  return buffer;
}

/// Runs body(i) for i in [0, count) on up to `workers` threads. The caller
/// is responsible for order-independent storage; exceptions are rethrown
/// for the lowest failing index.
void run_indexed(std::size_t count, std::size_t workers,
                 const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& thread : pool) thread.join();
  for (std::size_t i = 0; i < count; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }
}

/// Order-fixed reduction of adaptive trajectories with ragged lengths:
/// a trial contributes its final value at every iteration past its stop.
class TrajectoryAccumulator {
 public:
  void add(const std::vector<double>& trajectory) {
    if (trajectory.empty()) return;
    if (trajectory.size() > sums_.size()) {
      sums_.resize(trajectory.size(), finals_sum_);
    }
    for (std::size_t i = 0; i < trajectory.size(); ++i) sums_[i] += trajectory[i];
    const double final_value = trajectory.back();
    for (std::size_t i = trajectory.size(); i < sums_.size(); ++i) {
      sums_[i] += final_value;
    }
    finals_sum_ += final_value;
    ++count_;
  }

  std::size_t count() const { return count_; }

  std::vector<double> mean() const {
    std::vector<double> result(sums_.size());
    for (std::size_t i = 0; i < sums_.size(); ++i) {
      result[i] = sums_[i] / static_cast<double>(count_);
    }
    return result;
  }

 private:
  std::vector<double> sums_;
  double finals_sum_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace

void ExperimentSpec::validate() const {
  if (n_dim < 1 || m_dim < 1) throw InvalidArgumentError("spec: dimensions must be >= 1");
  if (m_dim > n_dim) throw InvalidArgumentError("spec: m_dim must not exceed n_dim");
  if (trials < 1) throw InvalidArgumentError("spec: trials must be >= 1");
  if (sparsity_levels.empty() || snr_grid_db.empty() || epsilon_grid.empty()) {
    throw InvalidArgumentError("spec: grid lists must be non-empty");
  }
  if (solvers.empty()) throw InvalidArgumentError("spec: solver list must be non-empty");
  for (const Eigen::Index k : sparsity_levels) {
    if (k < 1 || k > n_dim) {
      throw InvalidArgumentError("spec: sparsity level " + std::to_string(k) +
                                 " outside [1, N]");
    }
  }
  for (const double epsilon : epsilon_grid) {
    if (!(epsilon > 0.0)) throw InvalidArgumentError("spec: epsilon values must be positive");
  }
  rza_config.validate();
  if (!bpdn_auto_lambda) bpdn_config.validate();
}

double ExperimentSpec::noise_variance_for(double snr_db) const {
  if (no_noise) return 0.0;
  return snr_to_noise_variance(snr_db, snr_convention);
}

double ExperimentSpec::bpdn_lambda_for(double noise_variance) const {
  if (!bpdn_auto_lambda) return bpdn_config.lambda;
  return std::sqrt(noise_variance) *
         std::sqrt(2.0 * std::log(static_cast<double>(n_dim)));
}

void apply_key_values(ExperimentSpec& spec, const KeyValueMap& values) {
  for (const auto& [key, value] : values) {
    if (key == "n_dim") {
      spec.n_dim = static_cast<Eigen::Index>(parse_unsigned(values, key));
    } else if (key == "m_dim") {
      spec.m_dim = static_cast<Eigen::Index>(parse_unsigned(values, key));
    } else if (key == "sparsity_levels") {
      spec.sparsity_levels.clear();
      for (const double k : parse_real_list(values, key)) {
        spec.sparsity_levels.push_back(static_cast<Eigen::Index>(k));
      }
    } else if (key == "snr_grid_db") {
      spec.snr_grid_db = parse_real_list(values, key);
    } else if (key == "epsilon_grid") {
      spec.epsilon_grid = parse_real_list(values, key);
    } else if (key == "solvers") {
      spec.solvers.clear();
      for (const std::string& name : split_list(value)) {
        spec.solvers.push_back(solver_from_string(name));
      }
    } else if (key == "trials") {
      spec.trials = parse_unsigned(values, key);
    } else if (key == "master_seed") {
      spec.master_seed = parse_unsigned(values, key);
    } else if (key == "workers") {
      spec.workers = parse_unsigned(values, key);
    } else if (key == "snr_convention") {
      if (value == "power10") {
        spec.snr_convention = SnrConvention::power10;
      } else if (value == "paper20") {
        spec.snr_convention = SnrConvention::paper20;
      } else {
        throw InvalidArgumentError("snr_convention must be power10 or paper20, got " +
                                   value);
      }
    } else if (key == "rho_convention") {
      if (value == "gradient") {
        spec.rho_convention = RhoConvention::gradient_consistent;
      } else if (value == "paper") {
        spec.rho_convention = RhoConvention::paper_literal;
      } else {
        throw InvalidArgumentError("rho_convention must be gradient or paper, got " +
                                   value);
      }
    } else if (key == "no_noise") {
      spec.no_noise = parse_bool(values, key);
    } else if (key == "mu_iss") {
      spec.rza_config.mu_iss = parse_real(values, key);
    } else if (key == "lambda_ass") {
      spec.rza_config.lambda_ass = parse_real(values, key);
    } else if (key == "epsilon") {
      spec.rza_config.epsilon = parse_real(values, key);
    } else if (key == "zeta") {
      spec.rza_config.zeta = parse_real(values, key);
    } else if (key == "n_max") {
      spec.rza_config.n_max = parse_unsigned(values, key);
    } else if (key == "bpdn_lambda") {
      if (value == "auto") {
        spec.bpdn_auto_lambda = true;
      } else {
        spec.bpdn_auto_lambda = false;
        spec.bpdn_config.lambda = parse_real(values, key);
      }
    } else if (key == "bpdn_max_iterations") {
      spec.bpdn_config.max_iterations = parse_unsigned(values, key);
    } else if (key == "bpdn_tolerance") {
      spec.bpdn_config.tolerance = parse_real(values, key);
    } else if (key == "omp_residual_tol") {
      spec.omp_residual_tol = parse_real(values, key);
    } else if (key == "oracle_cap") {
      spec.oracle_cap = parse_unsigned(values, key);
    } else {
      throw InvalidArgumentError("unknown config key: " + key);
    }
  }
}

std::string experiment_id(const GridPoint& point) {
  return "k" + std::to_string(point.k) + "_snr" + format_grid_value(point.snr_db) +
         "_eps" + format_grid_value(point.epsilon);
}

TrialInstance make_trial_instance(const ExperimentSpec& spec, const GridPoint& point,
                                  std::uint32_t trial_index) {
  RandomStream rng = RandomStream::for_trial({spec.master_seed, trial_index});
  TrialInstance instance;
  instance.truth = generate_sparse_signal(spec.n_dim, point.k, rng);
  const Eigen::MatrixXd sensing = generate_sensing_matrix(spec.m_dim, spec.n_dim, rng);
  instance.ensemble = synthesize_with_noise_variance(
      sensing, instance.truth, spec.noise_variance_for(point.snr_db), rng);
  return instance;
}

TrialResult run_trial(const ExperimentSpec& spec, const GridPoint& point,
                      std::uint32_t trial_index) {
  const TrialInstance instance = make_trial_instance(spec, point, trial_index);
  const Eigen::MatrixXd& sensing = instance.ensemble.sensing_matrix;
  const Eigen::VectorXd& observations = instance.ensemble.observations;

  TrialResult result;
  result.runs.reserve(spec.solvers.size());
  for (const SolverId solver : spec.solvers) {
    TrialSolverRun run;
    run.solver = solver;
    try {
      switch (solver) {
        case SolverId::ass_rza_nlmf: {
          RzaNlmfConfig config = spec.rza_config;
          config.epsilon = point.epsilon;
          config.rho_convention = spec.rho_convention;
          auto [recovery, trace] = run_ass(instance.ensemble, config, &instance.truth);
          run.mse_trajectory = std::move(trace.per_iteration_mse);
          run.estimate = std::move(recovery.estimate);
          run.iterations_used = recovery.iterations_used;
          run.converged = recovery.converged;
          break;
        }
        case SolverId::nss_omp: {
          RecoveryResult recovery = omp(sensing, observations,
                                        static_cast<std::size_t>(point.k),
                                        spec.omp_residual_tol);
          run.estimate = std::move(recovery.estimate);
          run.iterations_used = recovery.iterations_used;
          run.converged = recovery.converged;
          break;
        }
        case SolverId::nss_bpdn: {
          BpdnConfig config = spec.bpdn_config;
          config.lambda = spec.bpdn_lambda_for(instance.ensemble.noise_variance);
          RecoveryResult recovery = bpdn_shrinkage(sensing, observations, config);
          run.estimate = std::move(recovery.estimate);
          run.iterations_used = recovery.iterations_used;
          run.converged = recovery.converged;
          break;
        }
        case SolverId::oracle_exhaustive: {
          RecoveryResult recovery = oracle_exhaustive(
              sensing, observations, static_cast<std::size_t>(point.k), spec.oracle_cap);
          run.estimate = std::move(recovery.estimate);
          run.iterations_used = recovery.iterations_used;
          run.converged = recovery.converged;
          break;
        }
      }
      run.final_squared_error = mse(instance.truth.coefficients, run.estimate);
      run.residual = residual_norm(sensing, observations, run.estimate);
    } catch (const DivergenceError& error) {
      run.diverged = true;
      run.diverged_at = error.iteration();
      run.mse_trajectory.clear();
      run.final_squared_error = std::numeric_limits<double>::quiet_NaN();
      run.residual = std::numeric_limits<double>::quiet_NaN();
    }
    result.runs.push_back(std::move(run));
  }
  return result;
}

std::size_t GridPointSummary::divergence_count() const {
  std::size_t count = 0;
  for (const auto& aggregate : solvers) count += aggregate.divergences;
  return count;
}

const SolverAggregate& GridPointSummary::aggregate(SolverId id) const {
  for (const auto& aggregate : solvers) {
    if (aggregate.solver == id) return aggregate;
  }
  throw InvalidArgumentError("summary has no aggregate for solver " +
                             std::string(to_string(id)));
}

std::vector<GridPointSummary> run_grid(const ExperimentSpec& spec) {
  spec.validate();

  std::vector<GridPoint> grid;
  for (const Eigen::Index k : spec.sparsity_levels) {
    for (const double snr_db : spec.snr_grid_db) {
      for (const double epsilon : spec.epsilon_grid) {
        grid.push_back({k, snr_db, epsilon});
      }
    }
  }

  std::vector<GridPointSummary> summaries;
  summaries.reserve(grid.size());

  for (const GridPoint& point : grid) {
    GridPointSummary summary;
    summary.point = point;
    summary.id = experiment_id(point);
    summary.trials = spec.trials;
    summary.noise_variance = spec.noise_variance_for(point.snr_db);
    summary.bpdn_lambda = spec.bpdn_lambda_for(summary.noise_variance);
    summary.crlb_nss_value = crlb_nss(static_cast<std::size_t>(point.k),
                                      static_cast<std::size_t>(spec.n_dim),
                                      summary.noise_variance);
    try {
      RzaNlmfConfig rho_config = spec.rza_config;
      rho_config.epsilon = point.epsilon;
      rho_config.rho_convention = spec.rho_convention;
      summary.crlb_ass_value = crlb_ass(
          {static_cast<std::size_t>(point.k), static_cast<std::size_t>(spec.n_dim),
           summary.noise_variance, spec.rza_config.mu_iss,
           1.0 / static_cast<double>(point.k), rho_config.attractor_gain()});
    } catch (const Error&) {
      summary.crlb_ass_value = std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<TrajectoryAccumulator> trajectories(spec.solvers.size());
    std::vector<double> final_error_sums(spec.solvers.size(), 0.0);
    std::vector<std::size_t> used(spec.solvers.size(), 0);
    std::vector<std::size_t> divergences(spec.solvers.size(), 0);

    // Trials run in chunks: any number of workers inside a chunk, strict
    // trial-order reduction afterwards, so averages are byte-stable.
    std::vector<TrialResult> chunk(std::min<std::size_t>(kChunkSize, spec.trials));
    for (std::size_t chunk_start = 0; chunk_start < spec.trials;
         chunk_start += kChunkSize) {
      const std::size_t chunk_count = std::min(kChunkSize, spec.trials - chunk_start);
      run_indexed(chunk_count, spec.workers, [&](std::size_t offset) {
        chunk[offset] = run_trial(spec, point,
                                  static_cast<std::uint32_t>(chunk_start + offset));
      });
      for (std::size_t offset = 0; offset < chunk_count; ++offset) {
        const TrialResult& trial = chunk[offset];
        for (std::size_t s = 0; s < trial.runs.size(); ++s) {
          const TrialSolverRun& run = trial.runs[s];
          if (run.diverged) {
            ++divergences[s];
            continue;
          }
          ++used[s];
          final_error_sums[s] += run.final_squared_error;
          if (run.solver == SolverId::ass_rza_nlmf) {
            trajectories[s].add(run.mse_trajectory);
          }
        }
      }
    }

    for (std::size_t s = 0; s < spec.solvers.size(); ++s) {
      SolverAggregate aggregate;
      aggregate.solver = spec.solvers[s];
      aggregate.trials_used = used[s];
      aggregate.divergences = divergences[s];
      if (used[s] == 0) {
        aggregate.steady_state_mse = std::numeric_limits<double>::quiet_NaN();
      } else if (aggregate.solver == SolverId::ass_rza_nlmf) {
        aggregate.avg_mse_trajectory = trajectories[s].mean();
        aggregate.steady_state_mse = steady_state_mse(
            aggregate.avg_mse_trajectory, static_cast<std::size_t>(spec.m_dim));
      } else {
        const double avg = final_error_sums[s] / static_cast<double>(used[s]);
        aggregate.avg_mse_trajectory = {avg};
        aggregate.steady_state_mse = avg;
      }
      summary.solvers.push_back(std::move(aggregate));
    }
    summaries.push_back(std::move(summary));
  }
  return summaries;
}

double steady_state_mse(const std::vector<double>& avg_trajectory, std::size_t cycle) {
  if (avg_trajectory.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t window = std::min(cycle, avg_trajectory.size());
  double sum = 0.0;
  for (std::size_t i = avg_trajectory.size() - window; i < avg_trajectory.size(); ++i) {
    sum += avg_trajectory[i];
  }
  return sum / static_cast<double>(window);
}

ResultTable rows_from_summaries(const std::vector<GridPointSummary>& summaries) {
  ResultTable table;
  for (const GridPointSummary& summary : summaries) {
    for (const SolverAggregate& aggregate : summary.solvers) {
      table.divergence_count += aggregate.divergences;
      table.total_trials += summary.trials;
      if (aggregate.trials_used == 0) continue;

      ResultRow row;
      row.experiment_id = summary.id;
      row.solver_id = std::string(to_string(aggregate.solver));
      row.k = summary.point.k;
      row.snr_db = summary.point.snr_db;
      row.epsilon = summary.point.epsilon;
      row.trials = aggregate.trials_used;
      row.crlb_nss = summary.crlb_nss_value;
      row.crlb_ass = summary.crlb_ass_value;

      if (aggregate.solver == SolverId::ass_rza_nlmf) {
        for (std::size_t i = 0; i < aggregate.avg_mse_trajectory.size(); ++i) {
          row.iteration = i + 1;
          row.avg_mse = aggregate.avg_mse_trajectory[i];
          table.rows.push_back(row);
        }
      } else {
        row.iteration = 0;  // batch solvers contribute their final point
        row.avg_mse = aggregate.steady_state_mse;
        table.rows.push_back(row);
      }
    }
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const ResultRow& a, const ResultRow& b) {
              return std::tie(a.experiment_id, a.solver_id, a.iteration) <
                     std::tie(b.experiment_id, b.solver_id, b.iteration);
            });
  return table;
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  return rows_from_summaries(run_grid(spec));
}

void emit_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open for writing", path.string());
  out << kCsvHeader << '\n';
  for (const ResultRow& row : table.rows) {
    out << row.experiment_id << ',' << row.solver_id << ',' << row.k << ','
        << format_real(row.snr_db) << ',' << format_real(row.epsilon) << ','
        << row.iteration << ',' << format_real(row.avg_mse) << ',' << row.trials << ','
        << format_real(row.crlb_nss) << ',' << format_real(row.crlb_ass) << '\n';
  }
  // Summary footer: the divergence tally rides in the avg_mse column.
  // An empty table (no tally to report) stays header-only.
  if (table.total_trials > 0 || table.divergence_count > 0) {
    out << "summary,divergence_tally,0,0,0,0," << table.divergence_count << ','
        << table.total_trials << ",0,0\n";
  }
  if (!out) throw FileError("write failed", path.string());
}

ResultTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open for reading", path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw FileError("unexpected CSV header", path.string());
  }

  auto next_field = [&path](std::istringstream& stream) {
    std::string field;
    if (!std::getline(stream, field, ',')) {
      throw FileError("truncated CSV row", path.string());
    }
    return field;
  };

  ResultTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream stream(line);
    ResultRow row;
    row.experiment_id = next_field(stream);
    row.solver_id = next_field(stream);
    row.k = static_cast<Eigen::Index>(std::stoll(next_field(stream)));
    row.snr_db = std::strtod(next_field(stream).c_str(), nullptr);
    row.epsilon = std::strtod(next_field(stream).c_str(), nullptr);
    row.iteration = static_cast<std::size_t>(std::stoull(next_field(stream)));
    const std::string avg_mse_field = next_field(stream);
    row.avg_mse = std::strtod(avg_mse_field.c_str(), nullptr);
    row.trials = static_cast<std::size_t>(std::stoull(next_field(stream)));
    row.crlb_nss = std::strtod(next_field(stream).c_str(), nullptr);
    row.crlb_ass = std::strtod(next_field(stream).c_str(), nullptr);

    if (row.experiment_id == "summary" && row.solver_id == "divergence_tally") {
      table.divergence_count = static_cast<std::size_t>(std::stoull(avg_mse_field));
      table.total_trials = row.trials;
      continue;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace sparsense

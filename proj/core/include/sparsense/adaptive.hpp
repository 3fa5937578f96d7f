#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "sparsense/model.hpp"
#include "sparsense/result.hpp"

namespace sparsense {

/// How the attractor gain rho is derived from (mu_iss, lambda_ass, epsilon).
/// gradient_consistent follows the cost-function gradient (rho = mu * lambda * eps);
/// paper_literal keeps the printed rho = mu * lambda / eps for comparison runs.
enum class RhoConvention { gradient_consistent, paper_literal };

struct RzaNlmfConfig {
  double mu_iss = 1.5;       // initial step-size
  double lambda_ass = 5e-8;  // sparsity regularization weight
  double epsilon = 2000.0;   // reweighted factor (attraction threshold ~ 1/epsilon)
  double zeta = 1e-6;        // stopping tolerance on ||h(n+1) - h(n)||
  std::size_t n_max = 0;     // iteration cap; 0 derives 20 * M * ceil(N/M)
  RhoConvention rho_convention = RhoConvention::gradient_consistent;

  double attractor_gain() const;  // rho under the configured convention
  void validate() const;
};

/// The evolving estimate with iteration bookkeeping.
struct EstimatorState {
  Eigen::VectorXd estimate;
  std::size_t iteration = 0;
  double last_delta_norm = 0.0;
  bool converged = false;
};

/// Per-iteration record of one adaptive run.
struct IterationTrace {
  std::vector<double> per_iteration_mse;  // filled only when the truth is supplied
  std::vector<double> per_iteration_error;
  std::size_t final_iteration = 0;
};

/// Row cycled at iteration n (1-based): mod(n, M) + 1.
std::size_t select_row(std::size_t n, std::size_t m_total);

/// Observation error e_m(n) = y_m - x_m^T h(n).
double iteration_error(const Eigen::VectorXd& row, double observation,
                       const Eigen::VectorXd& estimate);

/// Variable step-size mu_iss e^2 / (||x||^2 + e^2), always in [0, mu_iss).
/// Throws DegenerateSampleError when both the row and the error vanish.
double variable_step_size(double mu_iss, const Eigen::VectorXd& row, double error);

/// Elementwise reweighted attractor rho * sgn(h_i) / (1 + eps |h_i|),
/// with sgn(0) = 0 so exact zeros are fixed points.
Eigen::VectorXd zero_attractor(const Eigen::VectorXd& estimate, double rho, double epsilon);

/// One update of the estimate from sample (x_m, y_m):
///   h <- h + mu_ass(n) e x / ||x||^2 - rho sgn(h) / (1 + eps |h|).
/// An all-zero row is skipped: the iteration count still advances and the
/// estimate is untouched. Throws DivergenceError when |e| runs away.
EstimatorState rza_nlmf_step(const EstimatorState& state, const Eigen::VectorXd& row,
                             double observation, const RzaNlmfConfig& config);

/// Full driver loop: h(0) = 0, rows cycled via select_row, stops when
/// ||h(n+1) - h(n)|| < zeta (converged) or the iteration cap is reached.
/// Records the error sequence and, when the true signal is supplied, the
/// per-iteration squared estimation error.
std::pair<RecoveryResult, IterationTrace> run_ass(const SensingEnsemble& ensemble,
                                                  const RzaNlmfConfig& config,
                                                  const SparseSignal* truth = nullptr);

namespace detail {

/// |e| beyond which the recursion is declared divergent (e^4 overflows long
/// before double range, so the guard trips early).
inline constexpr double kDivergenceThreshold = 1e6;

struct StepOutcome {
  double error = 0.0;
  double step_size = 0.0;
  double delta_norm = 0.0;
  bool skipped = false;  // all-zero row: nothing applied
};

/// Shared update kernel used by both rza_nlmf_step and run_ass, so the
/// single-step operation and the driver cannot drift apart. `delta` is a
/// caller-provided scratch vector of matching length.
StepOutcome apply_step(Eigen::VectorXd& estimate, const Eigen::VectorXd& row,
                       double observation, const RzaNlmfConfig& config, double rho,
                       std::size_t iteration, Eigen::VectorXd& delta);

}  // namespace detail

}  // namespace sparsense

#include "sparsense/adaptive.hpp"

#include <cmath>
#include <string>

#include "sparsense/errors.hpp"
#include "sparsense/metrics.hpp"

namespace sparsense {

double RzaNlmfConfig::attractor_gain() const {
  if (rho_convention == RhoConvention::gradient_consistent) {
    return mu_iss * lambda_ass * epsilon;
  }
  return mu_iss * lambda_ass / epsilon;
}

void RzaNlmfConfig::validate() const {
  if (!(mu_iss > 0.0)) throw InvalidArgumentError("mu_iss must be positive");
  if (!(lambda_ass >= 0.0)) throw InvalidArgumentError("lambda_ass must be nonnegative");
  if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be positive");
  if (!(zeta > 0.0)) throw InvalidArgumentError("zeta must be positive");
  if (!std::isfinite(attractor_gain())) {
    throw InvalidArgumentError("attractor gain rho is not finite");
  }
}

std::size_t select_row(std::size_t n, std::size_t m_total) {
  return n % m_total + 1;
}

double iteration_error(const Eigen::VectorXd& row, double observation,
                       const Eigen::VectorXd& estimate) {
  if (row.size() != estimate.size()) {
    throw ShapeError("iteration_error: row length " + std::to_string(row.size()) +
                     " vs estimate length " + std::to_string(estimate.size()));
  }
  return observation - row.dot(estimate);
}

double variable_step_size(double mu_iss, const Eigen::VectorXd& row, double error) {
  const double input_power = row.squaredNorm();
  const double denominator = input_power + error * error;
  if (denominator <= 0.0) {
    throw DegenerateSampleError("variable_step_size: zero row and zero error");
  }
  return mu_iss * error * error / denominator;
}

Eigen::VectorXd zero_attractor(const Eigen::VectorXd& estimate, double rho,
                               double epsilon) {
  return (rho * estimate.array().sign() / (1.0 + epsilon * estimate.array().abs()))
      .matrix();
}

namespace detail {

StepOutcome apply_step(Eigen::VectorXd& estimate, const Eigen::VectorXd& row,
                       double observation, const RzaNlmfConfig& config, double rho,
                       std::size_t iteration, Eigen::VectorXd& delta) {
  StepOutcome outcome;
  const double input_power = row.squaredNorm();
  if (input_power == 0.0) {
    outcome.skipped = true;
    outcome.error = observation;  // e = y - 0
    return outcome;
  }

  const double error = observation - row.dot(estimate);
  if (!std::isfinite(error) || std::abs(error) > kDivergenceThreshold) {
    throw DivergenceError("rza_nlmf_step: error magnitude " + std::to_string(error) +
                              " at iteration " + std::to_string(iteration),
                          iteration);
  }
  const double step_size =
      config.mu_iss * error * error / (input_power + error * error);
  const double gradient_coeff = step_size * error / input_power;

  delta = gradient_coeff * row -
          (rho * estimate.array().sign() / (1.0 + config.epsilon * estimate.array().abs()))
              .matrix();
  estimate += delta;

  outcome.error = error;
  outcome.step_size = step_size;
  outcome.delta_norm = delta.norm();
  return outcome;
}

}  // namespace detail

EstimatorState rza_nlmf_step(const EstimatorState& state, const Eigen::VectorXd& row,
                             double observation, const RzaNlmfConfig& config) {
  if (row.size() != state.estimate.size()) {
    throw ShapeError("rza_nlmf_step: row length " + std::to_string(row.size()) +
                     " vs estimate length " + std::to_string(state.estimate.size()));
  }
  config.validate();

  EstimatorState next = state;
  Eigen::VectorXd delta(row.size());
  const auto outcome = detail::apply_step(next.estimate, row, observation, config,
                                          config.attractor_gain(),
                                          state.iteration + 1, delta);
  next.iteration = state.iteration + 1;
  next.last_delta_norm = outcome.skipped ? 0.0 : outcome.delta_norm;
  return next;
}

std::pair<RecoveryResult, IterationTrace> run_ass(const SensingEnsemble& ensemble,
                                                  const RzaNlmfConfig& config,
                                                  const SparseSignal* truth) {
  config.validate();
  const std::size_t m_total = static_cast<std::size_t>(ensemble.measurements());
  const Eigen::Index n_dim = ensemble.dimension();
  if (m_total == 0 || n_dim == 0) {
    throw InvalidArgumentError("run_ass: empty ensemble");
  }
  if (ensemble.observations.size() != ensemble.sensing_matrix.rows()) {
    throw ShapeError("run_ass: observation count does not match the sensing matrix");
  }
  if (truth != nullptr && truth->dimension() != n_dim) {
    throw ShapeError("run_ass: truth length does not match the sensing matrix");
  }

  std::size_t iteration_cap = config.n_max;
  if (iteration_cap == 0) {
    const std::size_t cycles_per_pass =
        (static_cast<std::size_t>(n_dim) + m_total - 1) / m_total;
    iteration_cap = 20 * m_total * cycles_per_pass;
  }

  const double rho = config.attractor_gain();
  EstimatorState state;
  state.estimate = Eigen::VectorXd::Zero(n_dim);

  IterationTrace trace;
  trace.per_iteration_error.reserve(iteration_cap);
  if (truth != nullptr) trace.per_iteration_mse.reserve(iteration_cap);

  Eigen::VectorXd delta(n_dim);
  Eigen::VectorXd row(n_dim);
  for (std::size_t n = 1; n <= iteration_cap; ++n) {
    const std::size_t row_index = select_row(n, m_total);  // 1-based
    row = ensemble.sensing_matrix.row(static_cast<Eigen::Index>(row_index - 1));
    const double observation =
        ensemble.observations[static_cast<Eigen::Index>(row_index - 1)];

    const auto outcome =
        detail::apply_step(state.estimate, row, observation, config, rho, n, delta);
    state.iteration = n;
    state.last_delta_norm = outcome.skipped ? 0.0 : outcome.delta_norm;

    trace.per_iteration_error.push_back(outcome.error);
    if (truth != nullptr) {
      trace.per_iteration_mse.push_back(
          (truth->coefficients - state.estimate).squaredNorm());
    }

    // A skipped degenerate sample applied no update, so its zero delta says
    // nothing about convergence.
    if (!outcome.skipped && state.last_delta_norm < config.zeta) {
      state.converged = true;
      break;
    }
  }
  trace.final_iteration = state.iteration;

  RecoveryResult result;
  result.estimate = state.estimate;
  result.solver_id = SolverId::ass_rza_nlmf;
  result.iterations_used = state.iteration;
  result.converged = state.converged;
  return {std::move(result), std::move(trace)};
}

}  // namespace sparsense

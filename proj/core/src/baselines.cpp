#include "sparsense/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsense/errors.hpp"
#include "sparsense/model.hpp"

namespace sparsense {

namespace {

/// Largest eigenvalue of X^T X by power iteration on the Gram operator.
double lipschitz_constant(const Eigen::MatrixXd& sensing,
                          const Eigen::VectorXd& observations) {
  const Eigen::Index n = sensing.cols();
  Eigen::VectorXd v = sensing.transpose() * observations;
  if (v.norm() == 0.0) v = Eigen::VectorXd::Ones(n);
  v.normalize();

  double rayleigh = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Eigen::VectorXd w = sensing.transpose() * (sensing * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // X^T X annihilates v: spectrum is 0 on this cycle
    w /= norm;
    const double next = w.dot(sensing.transpose() * (sensing * w));
    if (std::abs(next - rayleigh) <= 1e-12 * std::max(1.0, std::abs(next))) {
      return next;
    }
    rayleigh = next;
    v = std::move(w);
  }
  return rayleigh;
}

double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

}  // namespace

void BpdnConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgumentError("bpdn lambda must be finite and nonnegative");
  }
  if (max_iterations == 0) throw InvalidArgumentError("bpdn max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw InvalidArgumentError("bpdn tolerance must be positive");
}

RecoveryResult omp(const Eigen::MatrixXd& sensing, const Eigen::VectorXd& observations,
                   std::size_t k, double residual_tol) {
  const Eigen::Index m = sensing.rows();
  const Eigen::Index n = sensing.cols();
  if (observations.size() != m) {
    throw ShapeError("omp: observation length does not match the sensing matrix");
  }
  if (k < 1 || k > static_cast<std::size_t>(m)) {
    throw InvalidArgumentError("omp: target sparsity k = " + std::to_string(k) +
                               " outside [1, M]");
  }

  RecoveryResult result;
  result.solver_id = SolverId::nss_omp;
  result.estimate = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd residual = observations;
  std::vector<Eigen::Index> support;
  std::vector<char> selected(static_cast<std::size_t>(n), 0);
  Eigen::MatrixXd submatrix(m, static_cast<Eigen::Index>(k));
  Eigen::VectorXd coefficients;

  // Correlations are scored per unit column norm, i.e. the selection
  // maximizes the residual reduction a single column can achieve; plain
  // inner products would bias the greedy step toward long columns.
  Eigen::VectorXd column_norms(n);
  for (Eigen::Index j = 0; j < n; ++j) column_norms[j] = sensing.col(j).norm();

  while (support.size() < k && residual.norm() > residual_tol) {
    // Lowest index wins ties, for a fully deterministic selection order.
    const Eigen::VectorXd correlations = sensing.transpose() * residual;
    Eigen::Index best = -1;
    double best_value = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (selected[static_cast<std::size_t>(j)] || column_norms[j] == 0.0) continue;
      const double value = std::abs(correlations[j]) / column_norms[j];
      if (value > best_value) {
        best_value = value;
        best = j;
      }
    }
    if (best < 0) break;  // every column already selected (k == n)

    selected[static_cast<std::size_t>(best)] = 1;
    support.push_back(best);
    const auto size = static_cast<Eigen::Index>(support.size());
    submatrix.col(size - 1) = sensing.col(best);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(submatrix.leftCols(size));
    if (qr.rank() < size) {
      throw RankError("omp: selected submatrix rank-deficient at iteration " +
                          std::to_string(support.size()),
                      support.size());
    }
    coefficients = qr.solve(observations);
    residual = observations - submatrix.leftCols(size) * coefficients;
  }

  for (std::size_t i = 0; i < support.size(); ++i) {
    result.estimate[support[i]] = coefficients[static_cast<Eigen::Index>(i)];
  }
  result.iterations_used = support.size();
  result.converged = true;
  return result;
}

RecoveryResult bpdn_shrinkage(const Eigen::MatrixXd& sensing,
                              const Eigen::VectorXd& observations,
                              const BpdnConfig& config,
                              std::vector<double>* objective_trace) {
  config.validate();
  if (observations.size() != sensing.rows()) {
    throw ShapeError("bpdn: observation length does not match the sensing matrix");
  }
  const Eigen::Index n = sensing.cols();

  RecoveryResult result;
  result.solver_id = SolverId::nss_bpdn;
  result.estimate = Eigen::VectorXd::Zero(n);

  auto objective = [&](const Eigen::VectorXd& h) {
    return 0.5 * (observations - sensing * h).squaredNorm() +
           config.lambda * h.lpNorm<1>();
  };

  double lipschitz = lipschitz_constant(sensing, observations);
  if (lipschitz <= 0.0) {
    // X is the zero matrix; h = 0 is the minimizer.
    result.converged = true;
    result.objective_value = objective(result.estimate);
    if (objective_trace != nullptr) objective_trace->push_back(*result.objective_value);
    return result;
  }

  Eigen::VectorXd iterate = result.estimate;
  double current_objective = objective(iterate);
  if (objective_trace != nullptr) objective_trace->push_back(current_objective);

  Eigen::VectorXd candidate(n);
  std::size_t accepted = 0;
  int safeguard_doublings = 0;
  while (accepted < config.max_iterations) {
    const Eigen::VectorXd gradient =
        sensing.transpose() * (sensing * iterate - observations);
    candidate = iterate - gradient / lipschitz;
    const double threshold = config.lambda / lipschitz;
    for (Eigen::Index i = 0; i < n; ++i) {
      candidate[i] = soft_threshold(candidate[i], threshold);
    }

    const double candidate_objective = objective(candidate);
    if (!std::isfinite(candidate_objective) || candidate_objective > current_objective) {
      // Power iteration under-estimated L; retry the same point with a
      // larger constant instead of accepting an ascent step.
      if (++safeguard_doublings > 60) {
        throw DivergenceError("bpdn: objective not decreasing after 60 step halvings",
                              accepted + 1);
      }
      lipschitz *= 2.0;
      continue;
    }

    const double decrease = current_objective - candidate_objective;
    iterate = candidate;
    ++accepted;
    current_objective = candidate_objective;
    if (objective_trace != nullptr) objective_trace->push_back(current_objective);

    if (decrease <= config.tolerance * std::max(std::abs(current_objective), 1e-300)) {
      result.converged = true;
      break;
    }
  }

  result.estimate = iterate;
  result.iterations_used = accepted;
  result.objective_value = current_objective;
  return result;
}

RecoveryResult oracle_exhaustive(const Eigen::MatrixXd& sensing,
                                 const Eigen::VectorXd& observations, std::size_t k,
                                 std::uint64_t enumeration_cap) {
  const Eigen::Index m = sensing.rows();
  const Eigen::Index n = sensing.cols();
  if (observations.size() != m) {
    throw ShapeError("oracle: observation length does not match the sensing matrix");
  }
  const auto kk = static_cast<Eigen::Index>(k);
  if (kk > n) throw InvalidArgumentError("oracle: k exceeds the signal length");

  RecoveryResult result;
  result.solver_id = SolverId::oracle_exhaustive;
  result.estimate = Eigen::VectorXd::Zero(n);
  result.converged = true;
  if (k == 0) return result;

  if (support_count(n, kk, enumeration_cap) > enumeration_cap) {
    throw InstanceTooLargeError("oracle: C(" + std::to_string(n) + ", " +
                                std::to_string(k) + ") exceeds the enumeration cap " +
                                std::to_string(enumeration_cap));
  }

  std::vector<Eigen::Index> support(k);
  for (std::size_t i = 0; i < k; ++i) support[i] = static_cast<Eigen::Index>(i);

  Eigen::MatrixXd submatrix(m, kk);
  double best_residual_sq = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> best_support;
  Eigen::VectorXd best_coefficients;
  std::uint64_t evaluated = 0;

  while (true) {
    for (Eigen::Index i = 0; i < kk; ++i) {
      submatrix.col(i) = sensing.col(support[static_cast<std::size_t>(i)]);
    }
    const Eigen::VectorXd coefficients =
        submatrix.colPivHouseholderQr().solve(observations);
    const double residual_sq = (observations - submatrix * coefficients).squaredNorm();
    ++evaluated;
    if (residual_sq < best_residual_sq) {
      best_residual_sq = residual_sq;
      best_support = support;
      best_coefficients = coefficients;
    }

    Eigen::Index pos = kk - 1;
    while (pos >= 0 && support[static_cast<std::size_t>(pos)] == n - kk + pos) --pos;
    if (pos < 0) break;
    ++support[static_cast<std::size_t>(pos)];
    for (Eigen::Index i = pos + 1; i < kk; ++i) {
      support[static_cast<std::size_t>(i)] = support[static_cast<std::size_t>(i - 1)] + 1;
    }
  }

  for (std::size_t i = 0; i < best_support.size(); ++i) {
    result.estimate[best_support[i]] = best_coefficients[static_cast<Eigen::Index>(i)];
  }
  result.iterations_used = static_cast<std::size_t>(evaluated);
  return result;
}

double residual_norm(const Eigen::MatrixXd& sensing, const Eigen::VectorXd& observations,
                     const Eigen::VectorXd& estimate) {
  if (estimate.size() != sensing.cols() || observations.size() != sensing.rows()) {
    throw ShapeError("residual_norm: dimension mismatch");
  }
  return (observations - sensing * estimate).norm();
}

}  // namespace sparsense

#include "sparsense/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsense/errors.hpp"
#include "sparsense/metrics.hpp"

namespace sparsense {

SparseSignal generate_sparse_signal(Eigen::Index n, Eigen::Index k, RandomStream& rng) {
  if (n < 1) {
    throw InvalidArgumentError("signal length must be at least 1, got " + std::to_string(n));
  }
  if (k < 0 || k > n) {
    throw InvalidArgumentError("sparsity k = " + std::to_string(k) +
                               " outside [0, " + std::to_string(n) + "]");
  }

  SparseSignal signal;
  signal.coefficients = Eigen::VectorXd::Zero(n);
  if (k == 0) {
    signal.per_nonzero_variance = 0.0;
    return signal;
  }

  // Partial Fisher-Yates: the first k slots of a full index permutation.
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Eigen::Index>(
                           rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
  }
  signal.support.assign(indices.begin(), indices.begin() + k);
  std::sort(signal.support.begin(), signal.support.end());

  signal.per_nonzero_variance = 1.0 / static_cast<double>(k);
  const double stddev = std::sqrt(signal.per_nonzero_variance);
  for (Eigen::Index idx : signal.support) {
    double value = rng.gaussian(stddev);
    while (value == 0.0) value = rng.gaussian(stddev);  // keep the count exactly k
    signal.coefficients[idx] = value;
  }
  return signal;
}

Eigen::MatrixXd generate_sensing_matrix(Eigen::Index m, Eigen::Index n, RandomStream& rng) {
  if (m < 1 || n < 1) {
    throw ShapeError("sensing matrix shape must be positive, got " + std::to_string(m) +
                     " x " + std::to_string(n));
  }
  Eigen::MatrixXd matrix(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    do {
      for (Eigen::Index j = 0; j < n; ++j) matrix(i, j) = rng.gaussian();
    } while (matrix.row(i).isZero(0.0));
  }
  return matrix;
}

SensingEnsemble synthesize_with_noise_variance(const Eigen::MatrixXd& sensing,
                                               const SparseSignal& signal,
                                               double noise_variance, RandomStream& rng) {
  if (sensing.cols() != signal.dimension()) {
    throw ShapeError("sensing matrix has " + std::to_string(sensing.cols()) +
                     " columns but the signal has length " +
                     std::to_string(signal.dimension()));
  }
  if (!(noise_variance >= 0.0)) {
    throw InvalidArgumentError("noise variance must be nonnegative");
  }

  SensingEnsemble ensemble;
  ensemble.measurement_matrix = sensing;
  ensemble.dictionary = Eigen::MatrixXd::Identity(sensing.cols(), sensing.cols());
  ensemble.sensing_matrix = sensing;  // identity dictionary: X = W, bit-exact
  ensemble.noise_variance = noise_variance;
  ensemble.observations = sensing * signal.coefficients;
  if (noise_variance > 0.0) {
    const double stddev = std::sqrt(noise_variance);
    for (Eigen::Index i = 0; i < ensemble.observations.size(); ++i) {
      ensemble.observations[i] += rng.gaussian(stddev);
    }
  }
  return ensemble;
}

SensingEnsemble synthesize_with_noise_variance(const Eigen::MatrixXd& measurement,
                                               const Eigen::MatrixXd& dictionary,
                                               const SparseSignal& signal,
                                               double noise_variance, RandomStream& rng) {
  if (dictionary.rows() != measurement.cols() || dictionary.rows() != dictionary.cols()) {
    throw ShapeError("dictionary must be square with side equal to the measurement "
                     "matrix column count");
  }
  Eigen::MatrixXd sensing = measurement * dictionary;
  SensingEnsemble ensemble =
      synthesize_with_noise_variance(sensing, signal, noise_variance, rng);
  ensemble.measurement_matrix = measurement;
  ensemble.dictionary = dictionary;
  return ensemble;
}

SensingEnsemble synthesize_measurements(const Eigen::MatrixXd& sensing,
                                        const SparseSignal& signal, double snr_db,
                                        RandomStream& rng) {
  return synthesize_with_noise_variance(sensing, signal, snr_to_noise_variance(snr_db),
                                        rng);
}

SensingEnsemble synthesize_measurements(const Eigen::MatrixXd& measurement,
                                        const Eigen::MatrixXd& dictionary,
                                        const SparseSignal& signal, double snr_db,
                                        RandomStream& rng) {
  return synthesize_with_noise_variance(measurement, dictionary, signal,
                                        snr_to_noise_variance(snr_db), rng);
}

std::uint64_t support_count(Eigen::Index n, Eigen::Index k, std::uint64_t cap) {
  // C(n, k), clamped to cap + 1 to avoid overflow during the product.
  if (k < 0 || k > n) return 0;
  const Eigen::Index kk = std::min(k, n - k);
  std::uint64_t count = 1;
  for (Eigen::Index i = 1; i <= kk; ++i) {
    const double next = static_cast<double>(count) *
                        static_cast<double>(n - kk + i) / static_cast<double>(i);
    if (next > static_cast<double>(cap)) return cap + 1;
    count = count * static_cast<std::uint64_t>(n - kk + i) / static_cast<std::uint64_t>(i);
  }
  return count;
}

double rip_constant_bruteforce(const Eigen::MatrixXd& sensing, Eigen::Index k,
                               double column_scale, std::uint64_t enumeration_cap) {
  const Eigen::Index m = sensing.rows();
  const Eigen::Index n = sensing.cols();
  if (k < 0 || k > std::min(m, n)) {
    throw InvalidArgumentError("RIP order k = " + std::to_string(k) +
                               " outside [0, min(M, N)]");
  }
  if (k == 0) return 0.0;
  if (support_count(n, k, enumeration_cap) > enumeration_cap) {
    throw InstanceTooLargeError("C(" + std::to_string(n) + ", " + std::to_string(k) +
                                ") exceeds the enumeration cap " +
                                std::to_string(enumeration_cap));
  }

  std::vector<Eigen::Index> support(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) support[static_cast<std::size_t>(i)] = i;

  Eigen::MatrixXd submatrix(m, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolver;
  double delta = 0.0;
  while (true) {
    for (Eigen::Index i = 0; i < k; ++i) {
      submatrix.col(i) = column_scale * sensing.col(support[static_cast<std::size_t>(i)]);
    }
    eigensolver.compute(submatrix.transpose() * submatrix, Eigen::EigenvaluesOnly);
    const auto& eigenvalues = eigensolver.eigenvalues();
    delta = std::max(delta, std::max(1.0 - eigenvalues.minCoeff(),
                                     eigenvalues.maxCoeff() - 1.0));

    // Next combination in lexicographic order.
    Eigen::Index pos = k - 1;
    while (pos >= 0 && support[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++support[static_cast<std::size_t>(pos)];
    for (Eigen::Index i = pos + 1; i < k; ++i) {
      support[static_cast<std::size_t>(i)] = support[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return delta;
}

}  // namespace sparsense

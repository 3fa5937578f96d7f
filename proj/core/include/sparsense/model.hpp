#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sparsense/random.hpp"

namespace sparsense {

/// An exactly K-sparse coefficient vector with its generation metadata.
/// Nonzero entries are i.i.d. N(0, 1/K) so that E{||h||^2} = 1 holds in
/// expectation; individual realizations are not renormalized.
struct SparseSignal {
  Eigen::VectorXd coefficients;
  std::vector<Eigen::Index> support;  // sorted, distinct, in [0, N)
  double per_nonzero_variance = 0.0;  // 1/K (0 when K = 0)

  Eigen::Index dimension() const { return coefficients.size(); }
  Eigen::Index sparsity() const { return static_cast<Eigen::Index>(support.size()); }
};

/// Measurement matrix W, dictionary D, composed sensing matrix X = W D and
/// the noisy observations y = X h + z of one problem instance.
struct SensingEnsemble {
  Eigen::MatrixXd measurement_matrix;  // W, M x N
  Eigen::MatrixXd dictionary;          // D, N x N (identity by default)
  Eigen::MatrixXd sensing_matrix;      // X = W D, M x N
  Eigen::VectorXd observations;        // y, length M
  double noise_variance = 0.0;         // sigma_n^2

  Eigen::Index measurements() const { return sensing_matrix.rows(); }
  Eigen::Index dimension() const { return sensing_matrix.cols(); }
};

/// K-sparse signal with support drawn uniformly without replacement and
/// nonzero values i.i.d. N(0, 1/k). k = 0 yields the all-zero vector.
SparseSignal generate_sparse_signal(Eigen::Index n, Eigen::Index k, RandomStream& rng);

/// M x N matrix with i.i.d. standard-normal entries (variance 1, so the
/// received power E{(x_m^T h)^2} equals the unit transmission power).
/// Rows are redrawn in the probability-zero event they come out all-zero.
Eigen::MatrixXd generate_sensing_matrix(Eigen::Index m, Eigen::Index n, RandomStream& rng);

/// Observations y = X h + z with z i.i.d. N(0, sigma_n^2),
/// sigma_n^2 = 10^(-snr_db/10). snr_db = +infinity means exactly y = X h
/// (no noise draw at all). Dictionary is the identity.
SensingEnsemble synthesize_measurements(const Eigen::MatrixXd& sensing,
                                        const SparseSignal& signal, double snr_db,
                                        RandomStream& rng);

/// Same, with an explicit orthogonal dictionary: X = W D.
SensingEnsemble synthesize_measurements(const Eigen::MatrixXd& measurement,
                                        const Eigen::MatrixXd& dictionary,
                                        const SparseSignal& signal, double snr_db,
                                        RandomStream& rng);

/// Core synthesis with the noise power given directly.
SensingEnsemble synthesize_with_noise_variance(const Eigen::MatrixXd& sensing,
                                               const SparseSignal& signal,
                                               double noise_variance, RandomStream& rng);

SensingEnsemble synthesize_with_noise_variance(const Eigen::MatrixXd& measurement,
                                               const Eigen::MatrixXd& dictionary,
                                               const SparseSignal& signal,
                                               double noise_variance, RandomStream& rng);

/// Exact restricted-isometry constant delta_k of (column_scale * X) by
/// exhaustive enumeration of all size-k column supports:
///   delta_k = max_S max(1 - lambda_min(Xs^T Xs), lambda_max(Xs^T Xs) - 1).
/// A desk-scale oracle, not a certifier: throws InstanceTooLargeError when
/// C(N, k) exceeds enumeration_cap.
double rip_constant_bruteforce(const Eigen::MatrixXd& sensing, Eigen::Index k,
                               double column_scale = 1.0,
                               std::uint64_t enumeration_cap = 100000);

/// C(n, k) clamped to cap+1 so callers can test the cap without overflow.
std::uint64_t support_count(Eigen::Index n, Eigen::Index k, std::uint64_t cap);

}  // namespace sparsense

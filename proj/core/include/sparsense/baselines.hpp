#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sparsense/result.hpp"

namespace sparsense {

struct BpdnConfig {
  double lambda = 0.1;                // l1 weight in 0.5||y - Xh||^2 + lambda ||h||_1
  std::size_t max_iterations = 5000;
  double tolerance = 1e-10;           // relative objective-decrease stop

  void validate() const;
};

/// Orthogonal matching pursuit: greedily select the column most correlated
/// with the residual (per unit column norm, so the choice is scale
/// invariant), refit by least squares on the accumulated support, stop
/// after k selections or once ||r|| <= residual_tol. Off-support entries
/// are exactly zero. Throws RankError if a selected submatrix loses rank.
RecoveryResult omp(const Eigen::MatrixXd& sensing, const Eigen::VectorXd& observations,
                   std::size_t k, double residual_tol = 0.0);

/// Basis pursuit denoising by proximal-gradient (iterative shrinkage):
/// gradient step 1/L on the quadratic (L = largest eigenvalue of X^T X by
/// power iteration) followed by elementwise soft-thresholding at lambda/L.
/// The recorded objective sequence is non-increasing by construction: a
/// step that would raise the objective doubles L and retries instead of
/// advancing. Pass objective_trace to capture the accepted objectives.
RecoveryResult bpdn_shrinkage(const Eigen::MatrixXd& sensing,
                              const Eigen::VectorXd& observations,
                              const BpdnConfig& config,
                              std::vector<double>* objective_trace = nullptr);

/// Exact l0 reference: least-squares fit over every size-k support, keeping
/// the smallest residual. Throws InstanceTooLargeError when C(N, k) exceeds
/// the cap; this is a desk-scale oracle for tests and sanity checks.
RecoveryResult oracle_exhaustive(const Eigen::MatrixXd& sensing,
                                 const Eigen::VectorXd& observations, std::size_t k,
                                 std::uint64_t enumeration_cap = 100000);

/// ||y - X h||_2 of a candidate estimate.
double residual_norm(const Eigen::MatrixXd& sensing, const Eigen::VectorXd& observations,
                     const Eigen::VectorXd& estimate);

}  // namespace sparsense

#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace sparsense {

/// How a decibel SNR maps to noise power. power10 is the conventional
/// 10*log10 power ratio; paper20 divides the exponent by 20 instead and is
/// kept selectable for comparison runs.
enum class SnrConvention { power10, paper20 };

/// Inputs of the adaptive-filter CRLB reference formula.
struct CrlbInputs {
  std::size_t k = 0;            // sparsity
  std::size_t n_dim = 0;        // signal length N
  double noise_variance = 0.0;  // sigma_n^2
  double mu_iss = 0.0;          // initial step-size
  double coeff_variance = 0.0;  // per-nonzero signal variance sigma^2 = 1/K
  double rho = 0.0;             // attractor gain
};

/// Squared estimation error ||truth - estimate||_2^2 for one trial;
/// the harness averages these across trials.
double mse(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate);

/// Batch-recovery reference floor K sigma_n^2 / N.
double crlb_nss(std::size_t k, std::size_t n_dim, double noise_variance);

/// Adaptive-recovery reference curve
///   5 mu sigma_n^4 / (9 mu sigma_n^2 sigma^2 - 2 sigma^2)
///     - rho^2 N K / (27 mu sigma_n^4 - 6 mu sigma_n^2),
/// evaluated verbatim with the grouping as printed. A plotted reference
/// only; throws SingularParametersError when a denominator is within
/// 1e-12 of zero.
double crlb_ass(const CrlbInputs& inputs);

/// sigma_n^2 for a given SNR in dB under the chosen convention.
double snr_to_noise_variance(double snr_db,
                             SnrConvention convention = SnrConvention::power10);

}  // namespace sparsense

#include "sparsense/metrics.hpp"

#include <cmath>
#include <string>

#include "sparsense/errors.hpp"

namespace sparsense {

double mse(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate) {
  if (truth.size() != estimate.size()) {
    throw ShapeError("mse: length mismatch, " + std::to_string(truth.size()) + " vs " +
                     std::to_string(estimate.size()));
  }
  return (truth - estimate).squaredNorm();
}

double crlb_nss(std::size_t k, std::size_t n_dim, double noise_variance) {
  if (n_dim < 1) throw InvalidArgumentError("crlb_nss: N must be at least 1");
  return static_cast<double>(k) * noise_variance / static_cast<double>(n_dim);
}

double crlb_ass(const CrlbInputs& inputs) {
  if (inputs.k < 1 || inputs.n_dim < 1 || inputs.noise_variance <= 0.0 ||
      inputs.mu_iss <= 0.0 || inputs.coeff_variance <= 0.0 || inputs.rho < 0.0) {
    throw InvalidArgumentError("crlb_ass: inputs must be positive (rho >= 0)");
  }
  const double mu = inputs.mu_iss;
  const double noise_var = inputs.noise_variance;      // sigma_n^2
  const double noise_var_sq = noise_var * noise_var;   // sigma_n^4
  const double coeff_var = inputs.coeff_variance;      // sigma^2

  const double first_denominator = 9.0 * mu * noise_var * coeff_var - 2.0 * coeff_var;
  const double second_denominator = 27.0 * mu * noise_var_sq - 6.0 * mu * noise_var;
  if (std::abs(first_denominator) < 1e-12 || std::abs(second_denominator) < 1e-12) {
    throw SingularParametersError("crlb_ass: denominator within 1e-12 of zero");
  }

  const double first_term = 5.0 * mu * noise_var_sq / first_denominator;
  const double second_term = inputs.rho * inputs.rho * static_cast<double>(inputs.n_dim) *
                             static_cast<double>(inputs.k) / second_denominator;
  return first_term - second_term;
}

double snr_to_noise_variance(double snr_db, SnrConvention convention) {
  const double divisor = convention == SnrConvention::power10 ? 10.0 : 20.0;
  return std::pow(10.0, -snr_db / divisor);
}

}  // namespace sparsense

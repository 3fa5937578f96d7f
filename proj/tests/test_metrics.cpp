#include <doctest.h>

#include <cmath>

#include "sparsense/errors.hpp"
#include "sparsense/metrics.hpp"
#include "test_util.hpp"

using namespace sparsense;

TEST_CASE("mse: values and shape error") {
  Eigen::VectorXd a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(Eigen::VectorXd::Zero(2), b) == b.squaredNorm());
  CHECK(mse(a, b) == 2.0);
  CHECK_THROWS_AS(mse(a, Eigen::VectorXd::Zero(3)), ShapeError);
}

TEST_CASE("mse: symmetry and the doubled triangle bound") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Eigen::VectorXd a = test_util::gaussian_vector(7, 3 * seed);
    const Eigen::VectorXd b = test_util::gaussian_vector(7, 3 * seed + 1);
    const Eigen::VectorXd c = test_util::gaussian_vector(7, 3 * seed + 2);
    CHECK(mse(a, b) == mse(b, a));
    CHECK(mse(a, c) <= 2.0 * (mse(a, b) + mse(b, c)) + 1e-12);
  }
}

TEST_CASE("crlb_nss: closed form") {
  CHECK(crlb_nss(0, 40, 0.1) == 0.0);
  CHECK(crlb_nss(40, 40, 0.25) == 0.25);   // dense case: k = N
  CHECK(crlb_nss(2, 40, 0.1) == 0.005);    // Table I at 10 dB
  CHECK_THROWS_AS(crlb_nss(2, 0, 0.1), InvalidArgumentError);

  // Linear in k and in the noise power.
  CHECK(crlb_nss(4, 40, 0.1) == 2.0 * crlb_nss(2, 40, 0.1));
  CHECK(crlb_nss(2, 40, 0.2) == 2.0 * crlb_nss(2, 40, 0.1));
}

TEST_CASE("crlb_ass: verbatim formula") {
  const CrlbInputs table_one{2, 40, 0.1, 1.5, 0.5, 1.5 * 5e-8 * 2000.0};

  SUBCASE("matches an independently coded evaluation") {
    const double mu = 1.5, nv = 0.1, cv = 0.5;
    const double rho = 1.5 * (5e-8 * 2000.0);
    const double first = (5.0 * mu * (nv * nv)) / ((9.0 * mu * nv * cv) - (2.0 * cv));
    const double second =
        ((rho * rho) * 40.0 * 2.0) / ((27.0 * mu * (nv * nv)) - (6.0 * mu * nv));
    CHECK(std::abs(crlb_ass(table_one) - (first - second)) <= 1e-12);
  }

  SUBCASE("denominators are safely nonzero at Table I values") {
    CHECK(std::abs(9.0 * 1.5 * 0.1 * 0.5 - 2.0 * 0.5) > 1e-6);
    CHECK(std::abs(27.0 * 1.5 * 0.01 - 6.0 * 1.5 * 0.1) > 1e-6);
    CHECK_NOTHROW(crlb_ass(table_one));
  }

  SUBCASE("rho = 0 leaves the first term only") {
    CrlbInputs no_attractor = table_one;
    no_attractor.rho = 0.0;
    const double first =
        5.0 * 1.5 * (0.1 * 0.1) / (9.0 * 1.5 * 0.1 * 0.5 - 2.0 * 0.5);
    CHECK(crlb_ass(no_attractor) == doctest::Approx(first).epsilon(1e-15));
  }

  SUBCASE("singular denominators are rejected") {
    // 9 mu sigma_n^2 sigma^2 == 2 sigma^2 at mu = 2 / (9 * 0.1).
    CrlbInputs singular = table_one;
    singular.mu_iss = 2.0 / 0.9;
    CHECK_THROWS_AS(crlb_ass(singular), SingularParametersError);
  }

  SUBCASE("invalid inputs are rejected") {
    CrlbInputs bad = table_one;
    bad.k = 0;
    CHECK_THROWS_AS(crlb_ass(bad), InvalidArgumentError);
  }
}

TEST_CASE("snr mapping: both conventions") {
  CHECK(snr_to_noise_variance(10.0, SnrConvention::power10) ==
        doctest::Approx(0.1).epsilon(1e-15));
  CHECK(snr_to_noise_variance(0.0, SnrConvention::power10) == 1.0);
  CHECK(snr_to_noise_variance(0.0, SnrConvention::paper20) == 1.0);
  CHECK(snr_to_noise_variance(10.0, SnrConvention::paper20) ==
        doctest::Approx(0.31622776601683794).epsilon(1e-15));
  CHECK(snr_to_noise_variance(10.0) == snr_to_noise_variance(10.0, SnrConvention::power10));

  // Strictly decreasing in SNR under both conventions.
  for (const SnrConvention convention :
       {SnrConvention::power10, SnrConvention::paper20}) {
    double previous = snr_to_noise_variance(-6.0, convention);
    for (double snr = -5.0; snr <= 15.0; snr += 1.0) {
      const double value = snr_to_noise_variance(snr, convention);
      CHECK(value < previous);
      previous = value;
    }
  }
}

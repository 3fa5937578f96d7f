#include <doctest.h>

#include <cmath>
#include <limits>

#include "sparsense/adaptive.hpp"
#include "sparsense/errors.hpp"
#include "sparsense/metrics.hpp"
#include "test_util.hpp"

using namespace sparsense;

namespace {

SensingEnsemble hand_ensemble(const Eigen::MatrixXd& sensing,
                              const Eigen::VectorXd& observations,
                              double noise_variance = 0.0) {
  SensingEnsemble ensemble;
  ensemble.measurement_matrix = sensing;
  ensemble.dictionary = Eigen::MatrixXd::Identity(sensing.cols(), sensing.cols());
  ensemble.sensing_matrix = sensing;
  ensemble.observations = observations;
  ensemble.noise_variance = noise_variance;
  return ensemble;
}

}  // namespace

TEST_CASE("select_row follows mod(n, M) + 1") {
  CHECK(select_row(10, 3) == 2);  // mod(10, 3) = 1
  CHECK(select_row(11, 3) == 3);  // mod(11, 3) = 2
  CHECK(select_row(5, 5) == 1);   // mod(M, M) = 0

  // One pass over n = 1..M covers every row exactly once.
  const std::size_t m_total = 7;
  std::vector<bool> seen(m_total + 1, false);
  for (std::size_t n = 1; n <= m_total; ++n) {
    const std::size_t row = select_row(n, m_total);
    REQUIRE(row >= 1);
    REQUIRE(row <= m_total);
    CHECK(!seen[row]);
    seen[row] = true;
  }
}

TEST_CASE("iteration_error") {
  Eigen::VectorXd row(2), estimate(2);
  row << 1, 0;
  estimate << 0, 0;
  CHECK(iteration_error(row, 1.0, estimate) == 1.0);
  CHECK(iteration_error(Eigen::VectorXd::Zero(2), 3.5, estimate) == 3.5);

  Eigen::VectorXd truth(2);
  truth << 0.4, -0.2;
  CHECK(iteration_error(row, row.dot(truth), truth) == 0.0);

  CHECK_THROWS_AS(iteration_error(row, 1.0, Eigen::VectorXd::Zero(3)), ShapeError);
}

TEST_CASE("variable_step_size: values, range, monotonicity") {
  Eigen::VectorXd unit(1);
  unit << 1.0;
  CHECK(variable_step_size(1.5, unit, 0.0) == 0.0);
  CHECK(variable_step_size(1.5, unit, 1.0) == 0.75);
  CHECK(variable_step_size(1.5, unit, 1000.0) ==
        doctest::Approx(1.4999985).epsilon(1e-6));
  CHECK(variable_step_size(1.5, unit, 1000.0) == 1.5 * 1e6 / (1.0 + 1e6));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::VectorXd row = test_util::gaussian_vector(5, seed);
    double previous = -1.0;
    for (double error = 0.0; error < 10.0; error += 0.5) {
      const double step = variable_step_size(1.5, row, error);
      CHECK(step >= 0.0);
      CHECK(step < 1.5);
      CHECK(step >= previous);  // monotone increasing in |e|
      previous = step;
    }
  }

  CHECK_THROWS_AS(variable_step_size(1.5, Eigen::VectorXd::Zero(3), 0.0),
                  DegenerateSampleError);
}

TEST_CASE("zero_attractor: fixed points, examples, bounds") {
  CHECK(zero_attractor(Eigen::VectorXd::Zero(5), 1.5e-4, 2000.0).isZero(0.0));

  Eigen::VectorXd single(1);
  single << 1.0;
  const double rho = 1.5 * 5e-8 * 2000.0;  // 1.5e-4
  CHECK(zero_attractor(single, rho, 2000.0)[0] ==
        doctest::Approx(7.49625e-8).epsilon(1e-3));

  single << 1e-6;  // far below the 1/eps threshold: strongly attracted
  CHECK(zero_attractor(single, rho, 2000.0)[0] ==
        doctest::Approx(1.497006e-4).epsilon(1e-6));

  // Magnitude is bounded by rho and strictly decreasing in |h_i|.
  double previous = rho + 1e-30;
  for (double magnitude = 0.001; magnitude < 10.0; magnitude *= 2.0) {
    single << magnitude;
    const double pull = zero_attractor(single, rho, 2000.0)[0];
    CHECK(pull > 0.0);
    CHECK(pull <= rho);
    CHECK(pull < previous);
    previous = pull;
    single << -magnitude;
    CHECK(zero_attractor(single, rho, 2000.0)[0] == -pull);
  }
}

TEST_CASE("attractor gain conventions") {
  RzaNlmfConfig config;
  config.mu_iss = 1.5;
  config.lambda_ass = 5e-8;
  config.epsilon = 2000.0;
  config.rho_convention = RhoConvention::gradient_consistent;
  CHECK(config.attractor_gain() == 1.5 * 5e-8 * 2000.0);
  config.rho_convention = RhoConvention::paper_literal;
  CHECK(config.attractor_gain() == 1.5 * 5e-8 / 2000.0);
}

TEST_CASE("rza_nlmf_step: hand-checked update") {
  EstimatorState state;
  state.estimate = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd row(2);
  row << 1, 0;

  RzaNlmfConfig config;
  config.mu_iss = 1.0;
  config.lambda_ass = 0.0;

  const EstimatorState next = rza_nlmf_step(state, row, 1.0, config);
  CHECK(next.estimate[0] == 0.5);  // e^3 x / (||x||^2 (||x||^2 + e^2)) = 1/(1*2)
  CHECK(next.estimate[1] == 0.0);
  CHECK(next.iteration == 1);
  CHECK(next.last_delta_norm == 0.5);
}

TEST_CASE("rza_nlmf_step: zero error and zero attractor leave the estimate fixed") {
  Eigen::VectorXd row(3), truth(3);
  row << 0.3, -1.2, 0.8;
  truth << 1.0, 0.0, -2.0;

  EstimatorState state;
  state.estimate = truth;
  RzaNlmfConfig config;
  config.lambda_ass = 0.0;
  const EstimatorState next = rza_nlmf_step(state, row, row.dot(truth), config);
  CHECK(next.estimate == truth);
}

TEST_CASE("rza_nlmf_step: exact zeros stay zero under the attractor") {
  // Zero error and sgn(0) = 0: off-support coordinates never move.
  Eigen::VectorXd row(4), estimate(4);
  row << 1.0, 0.5, -0.25, 2.0;
  estimate << 0.7, 0.0, 0.0, -0.3;

  EstimatorState state;
  state.estimate = estimate;
  RzaNlmfConfig config;  // lambda_ass > 0 by default
  const EstimatorState next = rza_nlmf_step(state, row, row.dot(estimate), config);
  CHECK(next.estimate[1] == 0.0);
  CHECK(next.estimate[2] == 0.0);
  CHECK(next.estimate[0] != estimate[0]);  // on-support entries feel the attractor
}

TEST_CASE("rza_nlmf_step: skipped zero row never alters the estimate") {
  EstimatorState state;
  state.estimate = test_util::gaussian_vector(6, 4);
  const Eigen::VectorXd before = state.estimate;

  RzaNlmfConfig config;
  const EstimatorState next =
      rza_nlmf_step(state, Eigen::VectorXd::Zero(6), 123.0, config);
  CHECK(next.estimate == before);
  CHECK(next.iteration == 1);
  CHECK(next.last_delta_norm == 0.0);
}

TEST_CASE("rza_nlmf_step: runaway error raises a divergence error") {
  EstimatorState state;
  state.estimate = Eigen::VectorXd::Zero(2);
  state.iteration = 6;
  Eigen::VectorXd row(2);
  row << 1, 0;
  RzaNlmfConfig config;
  try {
    rza_nlmf_step(state, row, 1e7, config);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& error) {
    CHECK(error.iteration() == 7);
  }
}

TEST_CASE("update direction matches a finite difference of the quartic cost") {
  // lambda = 0: step = -mu / (||x||^2 (||x||^2 + e^2)) * dG/dh, G = e^4/4.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index n = 6;
    const Eigen::VectorXd row = test_util::gaussian_vector(n, 5000 + seed);
    Eigen::VectorXd estimate = test_util::gaussian_vector(n, 6000 + seed);
    const double target_error = 0.5 + 0.15 * static_cast<double>(seed % 10);
    const double observation = row.dot(estimate) + target_error;

    RzaNlmfConfig config;
    config.mu_iss = 1.5;
    config.lambda_ass = 0.0;

    EstimatorState state;
    state.estimate = estimate;
    const Eigen::VectorXd applied =
        rza_nlmf_step(state, row, observation, config).estimate - estimate;

    const double step = 1e-5;
    Eigen::VectorXd gradient(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd shifted = estimate;
      shifted[i] += step;
      const double up = std::pow(observation - row.dot(shifted), 4) / 4.0;
      shifted[i] = estimate[i] - step;
      const double down = std::pow(observation - row.dot(shifted), 4) / 4.0;
      gradient[i] = (up - down) / (2.0 * step);
    }
    const double power = row.squaredNorm();
    const Eigen::VectorXd expected =
        -config.mu_iss / (power * (power + target_error * target_error)) * gradient;

    CHECK((applied - expected).norm() / expected.norm() < 1e-6);
  }
}

TEST_CASE("run_ass: zero observations converge immediately at zero") {
  RandomStream rng(31);
  const Eigen::MatrixXd sensing = generate_sensing_matrix(3, 5, rng);
  const auto ensemble = hand_ensemble(sensing, Eigen::VectorXd::Zero(3));

  RzaNlmfConfig config;  // attractor enabled; sgn(0) = 0 keeps everything at zero
  const auto [result, trace] = run_ass(ensemble, config);
  CHECK(result.estimate.isZero(0.0));
  CHECK(result.converged);
  CHECK(result.iterations_used == 1);
  CHECK(trace.final_iteration == 1);
  CHECK(trace.per_iteration_error.size() == 1);
}

TEST_CASE("run_ass: scalar instance converges to the fixed point") {
  Eigen::MatrixXd sensing(1, 1);
  sensing << 2.0;
  Eigen::VectorXd observations(1);
  observations << 1.0;  // truth h = 0.5, noiseless
  const auto ensemble = hand_ensemble(sensing, observations);

  RzaNlmfConfig config;
  config.mu_iss = 1.0;
  config.lambda_ass = 0.0;
  config.zeta = 1e-10;
  config.n_max = 5000000;

  const auto [result, trace] = run_ass(ensemble, config);
  CHECK(result.converged);

  // Independent scalar recursion of the same update and stopping rule.
  double oracle = 0.0;
  std::size_t n = 0;
  while (n < config.n_max) {
    ++n;
    const double error = 1.0 - 2.0 * oracle;
    const double step_size = error * error / (4.0 + error * error);
    const double delta = step_size * error * 2.0 / 4.0;
    oracle += delta;
    if (std::abs(delta) < config.zeta) break;
  }
  CHECK(std::abs(result.estimate[0] - oracle) <= 1e-6);
  CHECK(result.iterations_used == n);
  // The zeta = 1e-10 stop lands within ~(zeta/mu)^(1/3)/2 of the truth.
  CHECK(std::abs(result.estimate[0] - 0.5) <= 1e-3);
}

TEST_CASE("run_ass: bit-identical on identical inputs") {
  RandomStream rng(37);
  const SparseSignal truth = generate_sparse_signal(12, 3, rng);
  const Eigen::MatrixXd sensing = generate_sensing_matrix(6, 12, rng);
  const SensingEnsemble ensemble = synthesize_measurements(sensing, truth, 10.0, rng);

  RzaNlmfConfig config;
  config.n_max = 500;
  const auto [first_result, first_trace] = run_ass(ensemble, config, &truth);
  const auto [second_result, second_trace] = run_ass(ensemble, config, &truth);
  CHECK(first_result.estimate == second_result.estimate);
  CHECK(first_trace.per_iteration_mse == second_trace.per_iteration_mse);
  CHECK(first_trace.per_iteration_error == second_trace.per_iteration_error);
}

TEST_CASE("run_ass: driver applies exactly the public single-step operation") {
  RandomStream rng(41);
  const SparseSignal truth = generate_sparse_signal(8, 2, rng);
  const Eigen::MatrixXd sensing = generate_sensing_matrix(4, 8, rng);
  const SensingEnsemble ensemble = synthesize_measurements(sensing, truth, 10.0, rng);

  RzaNlmfConfig config;
  config.n_max = 25;
  config.zeta = 1e-300;
  const auto [result, trace] = run_ass(ensemble, config);

  EstimatorState state;
  state.estimate = Eigen::VectorXd::Zero(8);
  for (std::size_t n = 1; n <= 25; ++n) {
    const std::size_t row_index = select_row(n, 4);
    state = rza_nlmf_step(
        state, sensing.row(static_cast<Eigen::Index>(row_index - 1)),
        ensemble.observations[static_cast<Eigen::Index>(row_index - 1)], config);
  }
  CHECK(result.estimate == state.estimate);
}

TEST_CASE("run_ass: trace lengths equal the final iteration") {
  RandomStream rng(43);
  const SparseSignal truth = generate_sparse_signal(10, 2, rng);
  const Eigen::MatrixXd sensing = generate_sensing_matrix(5, 10, rng);
  const SensingEnsemble ensemble = synthesize_measurements(sensing, truth, 5.0, rng);

  RzaNlmfConfig config;
  config.n_max = 123;
  config.zeta = 1e-300;
  const auto [result, trace] = run_ass(ensemble, config, &truth);
  CHECK(trace.final_iteration == 123);
  CHECK(trace.per_iteration_error.size() == 123);
  CHECK(trace.per_iteration_mse.size() == 123);
  CHECK(result.iterations_used == 123);
}

TEST_CASE("run_ass: default iteration cap is 20 M ceil(N/M)") {
  RandomStream rng(47);
  const SparseSignal truth = generate_sparse_signal(40, 2, rng);
  const Eigen::MatrixXd sensing = generate_sensing_matrix(20, 40, rng);
  const SensingEnsemble ensemble = synthesize_measurements(sensing, truth, 10.0, rng);

  RzaNlmfConfig config;
  config.n_max = 0;  // derive from the ensemble
  config.zeta = 1e-300;
  const auto [result, trace] = run_ass(ensemble, config);
  CHECK(result.iterations_used == 800);
  CHECK(!result.converged);
}

TEST_CASE("run_ass: noiseless error energy decays cycle over cycle") {
  // Square well-conditioned instance, lambda = 0: the per-cycle mean of
  // e^2 trends downward (mean over cycle c+10 <= mean over cycle c).
  RandomStream rng(53);
  const Eigen::Index n = 8;
  const SparseSignal truth = generate_sparse_signal(n, 3, rng);
  const Eigen::MatrixXd sensing = generate_sensing_matrix(n, n, rng);
  const SensingEnsemble ensemble = synthesize_with_noise_variance(sensing, truth, 0.0, rng);

  RzaNlmfConfig config;
  config.lambda_ass = 0.0;
  config.zeta = 1e-300;
  const std::size_t cycles = 30;
  config.n_max = cycles * static_cast<std::size_t>(n);

  const auto [result, trace] = run_ass(ensemble, config, &truth);
  REQUIRE(trace.per_iteration_error.size() == config.n_max);

  std::vector<double> cycle_mean(cycles, 0.0);
  for (std::size_t c = 0; c < cycles; ++c) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
      const double error = trace.per_iteration_error[c * n + i];
      cycle_mean[c] += error * error;
    }
    cycle_mean[c] /= static_cast<double>(n);
  }
  for (std::size_t c = 0; c + 10 < cycles; ++c) {
    CHECK(cycle_mean[c + 10] <= cycle_mean[c]);
  }
}

TEST_CASE("run_ass: zero rows are skipped without faking convergence") {
  // M = 2 with one all-zero row: the run must still reach the solution and
  // the skipped samples must not trip the stopping test.
  Eigen::MatrixXd sensing(2, 1);
  sensing << 2.0, 0.0;
  Eigen::VectorXd observations(2);
  observations << 1.0, 0.0;
  const auto ensemble = hand_ensemble(sensing, observations);

  RzaNlmfConfig config;
  config.mu_iss = 1.0;
  config.lambda_ass = 0.0;
  config.zeta = 1e-8;
  config.n_max = 4000000;
  const auto [result, trace] = run_ass(ensemble, config);
  CHECK(result.converged);
  CHECK(std::abs(result.estimate[0] - 0.5) < 1e-2);
}

TEST_CASE("run_ass: divergence propagates with the iteration index") {
  RandomStream rng(59);
  const SparseSignal truth = generate_sparse_signal(10, 2, rng);
  const Eigen::MatrixXd sensing = generate_sensing_matrix(5, 10, rng);
  const SensingEnsemble ensemble = synthesize_measurements(sensing, truth, 10.0, rng);

  RzaNlmfConfig config;
  config.mu_iss = 50.0;  // far beyond the stability range
  config.n_max = 100000;
  CHECK_THROWS_AS((void)run_ass(ensemble, config), DivergenceError);
}

TEST_CASE("run_ass: empty ensemble rejected") {
  SensingEnsemble empty;
  empty.sensing_matrix = Eigen::MatrixXd(0, 0);
  empty.observations = Eigen::VectorXd(0);
  CHECK_THROWS_AS((void)run_ass(empty, RzaNlmfConfig{}), InvalidArgumentError);
}

TEST_CASE("config validation") {
  RzaNlmfConfig config;
  config.mu_iss = 0.0;
  CHECK_THROWS_AS(config.validate(), InvalidArgumentError);
  config = {};
  config.lambda_ass = -1.0;
  CHECK_THROWS_AS(config.validate(), InvalidArgumentError);
  config = {};
  config.epsilon = 0.0;
  CHECK_THROWS_AS(config.validate(), InvalidArgumentError);
  config = {};
  config.zeta = 0.0;
  CHECK_THROWS_AS(config.validate(), InvalidArgumentError);
  CHECK_NOTHROW(RzaNlmfConfig{}.validate());
}

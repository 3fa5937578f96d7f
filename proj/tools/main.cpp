#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "sparsense/adaptive.hpp"
#include "sparsense/baselines.hpp"
#include "sparsense/errors.hpp"
#include "sparsense/experiment.hpp"
#include "sparsense/matrix_io.hpp"
#include "sparsense/metrics.hpp"
#include "sparsense/model.hpp"

namespace {

using sparsense::ExperimentSpec;
using sparsense::KeyValueMap;

/// Flags shared by the experiment subcommands. Present flags are folded
/// into a KeyValueMap and overlaid through the same code path as --config,
/// so precedence is: built-in defaults < config file < command line.
struct SpecFlags {
  CLI::App* cmd = nullptr;
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t workers = 0;
  std::string snr_convention;
  std::string rho_convention;
  bool no_noise = false;
  std::size_t n_dim = 0, m_dim = 0;
  std::vector<double> k_grid, snr_grid, epsilon_grid;
  std::vector<std::string> solver_names;
  double mu_iss = 0, lambda_ass = 0, epsilon = 0, zeta = 0;
  std::size_t n_max = 0;
  std::string bpdn_lambda;
  std::size_t bpdn_max_iterations = 0;
  double bpdn_tolerance = 0;

  void attach(CLI::App* sub, bool with_grids) {
    cmd = sub;
    sub->add_option("--config", config_path,
                    "flat key = value config file; flags override its values");
    sub->add_option("--seed", seed, "master seed for the trial streams");
    sub->add_option("--trials", trials, "Monte Carlo trials per grid point");
    sub->add_option("--workers", workers,
                    "trial worker threads (output is identical for any count)");
    sub->add_option("--snr-convention", snr_convention, "SNR-to-noise mapping")
        ->check(CLI::IsMember({"power10", "paper20"}));
    sub->add_option("--rho-convention", rho_convention, "attractor gain formula")
        ->check(CLI::IsMember({"gradient", "paper"}));
    sub->add_flag("--no-noise", no_noise, "synthesize noiseless observations");
    sub->add_option("--n", n_dim, "signal length N");
    sub->add_option("--m", m_dim, "measurement count M");
    if (with_grids) {
      sub->add_option("--k-grid", k_grid, "sparsity levels")->delimiter(',');
      sub->add_option("--snr-grid", snr_grid, "SNR grid in dB")->delimiter(',');
      sub->add_option("--epsilon-grid", epsilon_grid, "reweighted factor grid")
          ->delimiter(',');
      sub->add_option("--solvers", solver_names, "solvers to run (ass, omp, bpdn, oracle)")
          ->delimiter(',');
    }
    sub->add_option("--mu-iss", mu_iss, "initial step-size");
    sub->add_option("--lambda-ass", lambda_ass, "sparsity regularization weight");
    sub->add_option("--epsilon", epsilon, "reweighted factor for single runs");
    sub->add_option("--zeta", zeta, "convergence tolerance");
    sub->add_option("--n-max", n_max, "adaptive iteration cap");
    sub->add_option("--bpdn-lambda", bpdn_lambda, "BPDN lambda, or 'auto'");
    sub->add_option("--bpdn-max-iterations", bpdn_max_iterations, "BPDN iteration cap");
    sub->add_option("--bpdn-tolerance", bpdn_tolerance, "BPDN objective-change stop");
  }

  std::size_t count(const std::string& name) const {
    const CLI::Option* option = cmd->get_option_no_throw(name);
    return option == nullptr ? 0 : option->count();
  }

  void overlay(ExperimentSpec& spec) const {
    if (count("--config") > 0) {
      sparsense::apply_key_values(spec, sparsense::parse_key_value_file(config_path));
    }
    KeyValueMap flags;
    auto real_list = [](const std::vector<double>& values) {
      std::string joined;
      for (double v : values) {
        if (!joined.empty()) joined += ",";
        joined += sparsense::format_real(v);
      }
      return joined;
    };
    if (count("--seed")) flags["master_seed"] = std::to_string(seed);
    if (count("--trials")) flags["trials"] = std::to_string(trials);
    if (count("--workers")) flags["workers"] = std::to_string(workers);
    if (count("--snr-convention")) flags["snr_convention"] = snr_convention;
    if (count("--rho-convention")) flags["rho_convention"] = rho_convention;
    if (count("--no-noise")) flags["no_noise"] = "true";
    if (count("--n")) flags["n_dim"] = std::to_string(n_dim);
    if (count("--m")) flags["m_dim"] = std::to_string(m_dim);
    if (count("--k-grid")) flags["sparsity_levels"] = real_list(k_grid);
    if (count("--snr-grid")) flags["snr_grid_db"] = real_list(snr_grid);
    if (count("--epsilon-grid")) flags["epsilon_grid"] = real_list(epsilon_grid);
    if (count("--solvers")) {
      std::string joined;
      for (const auto& name : solver_names) {
        if (!joined.empty()) joined += ",";
        joined += name;
      }
      flags["solvers"] = joined;
    }
    if (count("--mu-iss")) flags["mu_iss"] = sparsense::format_real(mu_iss);
    if (count("--lambda-ass")) flags["lambda_ass"] = sparsense::format_real(lambda_ass);
    if (count("--epsilon")) flags["epsilon"] = sparsense::format_real(epsilon);
    if (count("--zeta")) flags["zeta"] = sparsense::format_real(zeta);
    if (count("--n-max")) flags["n_max"] = std::to_string(n_max);
    if (count("--bpdn-lambda")) flags["bpdn_lambda"] = bpdn_lambda;
    if (count("--bpdn-max-iterations")) {
      flags["bpdn_max_iterations"] = std::to_string(bpdn_max_iterations);
    }
    if (count("--bpdn-tolerance")) {
      flags["bpdn_tolerance"] = sparsense::format_real(bpdn_tolerance);
    }
    sparsense::apply_key_values(spec, flags);
  }
};

void print_summary(const sparsense::ResultTable& table, std::size_t grid_points,
                   std::size_t trials, double wall_seconds, const std::string& out_path) {
  std::printf("grid points: %zu, trials per point: %zu\n", grid_points, trials);
  std::printf("rows: %zu, divergent solver runs: %zu of %zu\n", table.rows.size(),
              table.divergence_count, table.total_trials);
  std::printf("wall time: %.2f s\n", wall_seconds);
  if (!out_path.empty()) std::printf("wrote %s\n", out_path.c_str());
}

void print_steady_states(const std::vector<sparsense::GridPointSummary>& summaries) {
  for (const auto& summary : summaries) {
    std::printf("%s: noise_var=%.6g bpdn_lambda=%.6g crlb_nss=%.6g crlb_ass=%.6g\n",
                summary.id.c_str(), summary.noise_variance, summary.bpdn_lambda,
                summary.crlb_nss_value, summary.crlb_ass_value);
    for (const auto& aggregate : summary.solvers) {
      std::printf("  %-17s steady-state avg MSE %.6g  (trials %zu, divergent %zu)\n",
                  std::string(sparsense::to_string(aggregate.solver)).c_str(),
                  aggregate.steady_state_mse, aggregate.trials_used,
                  aggregate.divergences);
    }
  }
}

int run_single(const SpecFlags& flags, Eigen::Index k, double snr_db,
               const std::string& solver_name, const std::string& out_path,
               const std::string& dump_dir) {
  ExperimentSpec spec;
  spec.trials = 1;
  spec.rza_config.n_max = 0;  // formula default 20 M ceil(N/M) for one-off runs
  flags.overlay(spec);
  spec.sparsity_levels = {k};
  spec.snr_grid_db = {snr_db};
  spec.epsilon_grid = {spec.rza_config.epsilon};
  spec.solvers = {sparsense::solver_from_string(solver_name)};

  const sparsense::GridPoint point{k, snr_db, spec.rza_config.epsilon};
  if (!dump_dir.empty()) {
    const std::filesystem::path dir(dump_dir);
    std::filesystem::create_directories(dir);
    const auto instance = sparsense::make_trial_instance(spec, point, 0);
    sparsense::save_matrix(instance.ensemble.sensing_matrix, dir / "sensing_matrix.txt");
    sparsense::save_vector(instance.ensemble.observations, dir / "observations.txt");
    sparsense::save_vector(instance.truth.coefficients, dir / "truth.txt");
    std::printf("dumped instance to %s\n", dir.string().c_str());
  }
  const auto trial = sparsense::run_trial(spec, point, 0);
  const auto& run = trial.runs.front();

  if (run.diverged) {
    std::printf("solver %s diverged at iteration %zu\n",
                std::string(to_string(run.solver)).c_str(), run.diverged_at);
  } else if (run.solver == sparsense::SolverId::ass_rza_nlmf) {
    std::printf("iteration,mse\n");
    for (std::size_t i = 0; i < run.mse_trajectory.size(); ++i) {
      std::printf("%zu,%s\n", i + 1,
                  sparsense::format_real(run.mse_trajectory[i]).c_str());
    }
    std::printf("# converged=%s iterations=%zu final_mse=%s residual=%s\n",
                run.converged ? "true" : "false", run.iterations_used,
                sparsense::format_real(run.final_squared_error).c_str(),
                sparsense::format_real(run.residual).c_str());
  } else {
    std::printf("solver=%s iterations=%zu squared_error=%s residual=%s\n",
                std::string(to_string(run.solver)).c_str(), run.iterations_used,
                sparsense::format_real(run.final_squared_error).c_str(),
                sparsense::format_real(run.residual).c_str());
  }

  if (!out_path.empty()) {
    sparsense::emit_csv(sparsense::run_experiment(spec), out_path);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

int run_experiment_command(const ExperimentSpec& spec, const std::string& out_path) {
  const auto start = std::chrono::steady_clock::now();
  const auto summaries = sparsense::run_grid(spec);
  const auto table = sparsense::rows_from_summaries(summaries);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print_steady_states(summaries);
  if (!out_path.empty()) sparsense::emit_csv(table, out_path);
  print_summary(table, summaries.size(), spec.trials, wall, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-recovery toolkit: adaptive RZA-NLMF estimation, OMP/BPDN "
               "baselines, CRLB references and a deterministic Monte Carlo harness"};
  app.require_subcommand(1);

  // single-run
  auto* single = app.add_subcommand("single-run", "one instance, one solver; prints the trajectory");
  SpecFlags single_flags;
  Eigen::Index single_k = 2;
  double single_snr = 10.0;
  std::string single_solver = "ass";
  std::string single_out;
  std::string single_dump;
  single_flags.attach(single, false);
  single->add_option("--k", single_k, "sparsity of the generated signal");
  single->add_option("--snr", single_snr, "SNR in dB");
  single->add_option("--solver", single_solver, "ass, omp, bpdn or oracle");
  single->add_option("--out", single_out, "optional CSV output path");
  single->add_option("--dump-instance", single_dump,
                     "directory for plain-text dumps of X, y and the truth");

  // sweep-epsilon
  auto* sweep = app.add_subcommand("sweep-epsilon",
                                   "reweighted-factor sweep at fixed K and SNR");
  SpecFlags sweep_flags;
  Eigen::Index sweep_k = 2;
  double sweep_snr = 10.0;
  std::string sweep_out = "sweep_epsilon.csv";
  sweep_flags.attach(sweep, true);
  sweep->add_option("--k", sweep_k, "sparsity level");
  sweep->add_option("--snr", sweep_snr, "SNR in dB");
  sweep->add_option("--out", sweep_out, "CSV output path");

  // compare
  auto* compare = app.add_subcommand("compare", "solvers x sparsity x SNR grid");
  SpecFlags compare_flags;
  std::string compare_out = "compare.csv";
  compare_flags.attach(compare, true);
  compare->add_option("--out", compare_out, "CSV output path");

  // crlb-table
  auto* crlb = app.add_subcommand("crlb-table", "reference bound values over a grid");
  SpecFlags crlb_flags;
  std::string crlb_out;
  crlb_flags.attach(crlb, true);
  crlb->add_option("--out", crlb_out, "optional CSV output path");

  // rip-check
  auto* rip = app.add_subcommand("rip-check",
                                 "brute-force restricted isometry constant");
  std::string rip_matrix;
  Eigen::Index rip_m = 4, rip_n = 8, rip_k = 2;
  std::uint64_t rip_seed = 1;
  double rip_scale = 1.0;
  std::uint64_t rip_cap = 100000;
  rip->add_option("--matrix", rip_matrix, "matrix file (\"M N\" header text format)");
  rip->add_option("--m", rip_m, "rows of the generated matrix");
  rip->add_option("--n", rip_n, "columns of the generated matrix");
  rip->add_option("--k", rip_k, "support size")->required();
  rip->add_option("--seed", rip_seed, "seed for the generated matrix");
  rip->add_option("--scale", rip_scale, "column scale applied before the check");
  rip->add_option("--cap", rip_cap, "enumeration cap on C(N, k)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (single->parsed()) {
      return run_single(single_flags, single_k, single_snr, single_solver,
                        single_out, single_dump);
    }
    if (sweep->parsed()) {
      ExperimentSpec spec;
      spec.solvers = {sparsense::SolverId::ass_rza_nlmf};
      spec.sparsity_levels = {sweep_k};
      spec.snr_grid_db = {sweep_snr};
      sweep_flags.overlay(spec);
      if (sweep->count("--k")) spec.sparsity_levels = {sweep_k};
      if (sweep->count("--snr")) spec.snr_grid_db = {sweep_snr};
      return run_experiment_command(spec, sweep_out);
    }
    if (compare->parsed()) {
      ExperimentSpec spec;
      spec.epsilon_grid = {spec.rza_config.epsilon};
      compare_flags.overlay(spec);
      return run_experiment_command(spec, compare_out);
    }
    if (crlb->parsed()) {
      ExperimentSpec spec;
      spec.epsilon_grid = {spec.rza_config.epsilon};
      crlb_flags.overlay(spec);
      spec.validate();
      std::string text = "k,snr_db,noise_variance,crlb_nss,crlb_ass\n";
      for (const Eigen::Index k : spec.sparsity_levels) {
        for (const double snr_db : spec.snr_grid_db) {
          const double noise_variance = spec.noise_variance_for(snr_db);
          const double nss = sparsense::crlb_nss(static_cast<std::size_t>(k),
                                                 static_cast<std::size_t>(spec.n_dim),
                                                 noise_variance);
          double ass = std::numeric_limits<double>::quiet_NaN();
          try {
            sparsense::RzaNlmfConfig rho_config = spec.rza_config;
            rho_config.rho_convention = spec.rho_convention;
            ass = sparsense::crlb_ass({static_cast<std::size_t>(k),
                                       static_cast<std::size_t>(spec.n_dim),
                                       noise_variance, spec.rza_config.mu_iss,
                                       1.0 / static_cast<double>(k),
                                       rho_config.attractor_gain()});
          } catch (const sparsense::Error&) {
          }
          text += std::to_string(k) + "," + sparsense::format_real(snr_db) + "," +
                  sparsense::format_real(noise_variance) + "," +
                  sparsense::format_real(nss) + "," + sparsense::format_real(ass) + "\n";
        }
      }
      std::fputs(text.c_str(), stdout);
      if (!crlb_out.empty()) {
        std::ofstream out(crlb_out);
        if (!out) throw sparsense::FileError("cannot open for writing", crlb_out);
        out << text;
        std::printf("wrote %s\n", crlb_out.c_str());
      }
      return 0;
    }
    if (rip->parsed()) {
      Eigen::MatrixXd matrix;
      if (!rip_matrix.empty()) {
        matrix = sparsense::load_matrix(rip_matrix);
      } else {
        sparsense::RandomStream rng(rip_seed);
        matrix = sparsense::generate_sensing_matrix(rip_m, rip_n, rng);
      }
      const double delta =
          sparsense::rip_constant_bruteforce(matrix, rip_k, rip_scale, rip_cap);
      std::printf("delta_%lld = %s  (matrix %lld x %lld, scale %s)\n",
                  static_cast<long long>(rip_k), sparsense::format_real(delta).c_str(),
                  static_cast<long long>(matrix.rows()),
                  static_cast<long long>(matrix.cols()),
                  sparsense::format_real(rip_scale).c_str());
      return 0;
    }
  } catch (const sparsense::Error& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
  return 0;
}

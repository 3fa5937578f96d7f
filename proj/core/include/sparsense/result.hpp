#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string_view>

namespace sparsense {

enum class SolverId { ass_rza_nlmf, nss_omp, nss_bpdn, oracle_exhaustive };

std::string_view to_string(SolverId id);
SolverId solver_from_string(std::string_view name);  // accepts ass/omp/bpdn/oracle aliases

/// Final output of any solver on one problem instance.
struct RecoveryResult {
  Eigen::VectorXd estimate;
  SolverId solver_id = SolverId::ass_rza_nlmf;
  std::size_t iterations_used = 0;
  bool converged = false;
  /// Present iff the solver minimizes an explicit objective (BPDN).
  std::optional<double> objective_value;
};

}  // namespace sparsense

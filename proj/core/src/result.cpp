#include "sparsense/result.hpp"

#include <string>

#include "sparsense/errors.hpp"

namespace sparsense {

std::string_view to_string(SolverId id) {
  switch (id) {
    case SolverId::ass_rza_nlmf: return "ass_rza_nlmf";
    case SolverId::nss_omp: return "nss_omp";
    case SolverId::nss_bpdn: return "nss_bpdn";
    case SolverId::oracle_exhaustive: return "oracle_exhaustive";
  }
  throw InvalidArgumentError("unknown solver id");
}

SolverId solver_from_string(std::string_view name) {
  if (name == "ass_rza_nlmf" || name == "ass" || name == "rza_nlmf") {
    return SolverId::ass_rza_nlmf;
  }
  if (name == "nss_omp" || name == "omp") return SolverId::nss_omp;
  if (name == "nss_bpdn" || name == "bpdn") return SolverId::nss_bpdn;
  if (name == "oracle_exhaustive" || name == "oracle") return SolverId::oracle_exhaustive;
  throw InvalidArgumentError("unknown solver name: " + std::string(name));
}

}  // namespace sparsense

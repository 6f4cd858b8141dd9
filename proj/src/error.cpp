#include "cam/error.hpp"

namespace cam {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kSingularity: return "singularity";
    case ErrorKind::kPropagation: return "propagation";
    case ErrorKind::kCovariance: return "covariance";
    case ErrorKind::kGeometry: return "geometry";
    case ErrorKind::kFrame: return "frame";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kDegenerateGradient: return "degenerate_gradient";
    case ErrorKind::kNonConvergence: return "non_convergence";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kGeneration: return "generation";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kValidation: return "validation";
  }
  return "unknown";
}

}  // namespace cam

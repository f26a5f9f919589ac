#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gausskraft/polytope.hpp"

namespace gausskraft {

inline constexpr double kMassBalanceTol = 1e-9;
inline constexpr double kConeMargin = 1e-10;
inline constexpr std::size_t kDefaultConeMaxK = 12;

struct MassBalanceResult {
  bool ok = false;
  double residual = 0.0;  // |Σμ − σ(Sⁿ)|
};

struct PositivityResult {
  bool ok = false;
  std::optional<std::size_t> worst_index;  // most negative (or zero) mass
};

struct HemisphereResult {
  bool ok = false;
  /// On failure, u with <x_i, u> <= 0 for every direction carrying mass.
  std::optional<UnitVec> witness;
};

struct VertexBoundResult {
  bool ok = false;
  std::size_t worst_index = 0;  // index of the largest mass
};

enum class ConeStatus { NotRun, Passed, FailedWithCone };

struct ConeCheckResult {
  ConeStatus status = ConeStatus::NotRun;
  std::vector<std::size_t> generators;  // violating subset when FailedWithCone
  std::size_t cones_checked = 0;
};

struct AdmissibilityReport {
  MassBalanceResult mass_balance;
  PositivityResult positivity;
  HemisphereResult hemisphere;
  VertexBoundResult vertex_bound;
  ConeCheckResult cone_check;

  /// True when every check that ran passed (NotRun counts as passing).
  bool ok() const;
};

MassBalanceResult check_mass_balance(const ProblemInstance& instance, double tol = kMassBalanceTol);
PositivityResult check_positivity(const ProblemInstance& instance);
HemisphereResult check_hemisphere(const ProblemInstance& instance);
VertexBoundResult check_vertex_bound(const ProblemInstance& instance);

/// Checks μ(Sⁿ \ V) > σ(V*) + margin for every cone V spanned by at most n + 1
/// directions. Subsets are visited by size, then lexicographically; the first
/// violation is returned. Throws TooLarge when K > max_K.
ConeCheckResult check_cone_condition_exhaustive(const ProblemInstance& instance,
                                                std::size_t max_K = kDefaultConeMaxK);

/// All checks. The exhaustive cone check runs only when K <= max_K.
AdmissibilityReport check_admissibility(const ProblemInstance& instance,
                                        std::size_t max_K = kDefaultConeMaxK,
                                        double mass_tol = kMassBalanceTol);

/// Area of the dual section {y : <x, y> <= 0 for all x in the cone spanned by
/// `generators`}. Generators must span a proper cone.
double dual_cone_area(int dimension, const std::vector<UnitVec>& generators);

/// Thrown by the solver when an instance fails validation.
class InvalidInstance : public Error {
 public:
  InvalidInstance(AdmissibilityReport report, const std::string& message)
      : Error(ErrorCode::InvalidInstance, message), report_(std::move(report)) {}

  const AdmissibilityReport& report() const { return report_; }

 private:
  AdmissibilityReport report_;
};

/// One-line summary of the first failing check, for error messages.
std::string describe_failure(const AdmissibilityReport& report);

}  // namespace gausskraft

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gausskraft/admissibility.hpp"
#include "gausskraft/functional.hpp"
#include "gausskraft/ingest.hpp"
#include "gausskraft/polytope.hpp"

namespace gausskraft {

enum class StepPolicy { GradientArmijo, LBFGS };

struct SolveConfig {
  int max_iters = 500;
  /// Stop when max_i |area_i − μ_i| / σ(Sⁿ) is at most this.
  double mass_tol = 1e-8;
  double quad_tol = kDefaultQuadTol;
  StepPolicy policy = StepPolicy::LBFGS;
  int lbfgs_memory = 10;
  /// Spread max ρ̂ − min ρ̂ beyond which a still-decreasing run is declared
  /// degenerate.
  double degeneration_threshold = 20.0;
  /// Largest ∞-norm change of ρ̂ in one step.
  double max_step = 2.0;
  /// Skip the admissibility checks (used to observe degeneration).
  bool skip_validation = false;
  std::size_t cone_max_K = kDefaultConeMaxK;
};

enum class SolveStatus { Converged, Degenerated, MaxIters };

std::string_view to_string(SolveStatus status);
std::string_view to_string(StepPolicy policy);

struct TraceEntry {
  double Q = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  /// Degenerated only: indices whose radii stay bounded (the cone whose
  /// condition fails) and the indices collapsing toward the origin.
  std::vector<std::size_t> witness;
  std::vector<std::size_t> collapsing;
  std::vector<double> log_radii;
  double Q_star = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<TraceEntry> trace;
  std::vector<double> cell_areas;
  std::vector<double> log_dot_integrals;
};

/// Minimizes Q over gauge-fixed log-radii starting from `initial` (zeros by
/// default). Throws InvalidInstance unless the instance passes the
/// admissibility checks or config.skip_validation is set.
SolveReport solve(const ProblemInstance& instance, const SolveConfig& config = {},
                  std::optional<std::vector<double>> initial = std::nullopt);

/// Witness when the spread of ρ̂ exceeds `threshold` and the last accepted
/// step still lowered Q: indices above the widest gap of the sorted ρ̂ form
/// the witness, the rest collapse.
struct DegenerationWitness {
  std::vector<std::size_t> bounded;
  std::vector<std::size_t> collapsing;
};
std::optional<DegenerationWitness> detect_degeneration(std::span<const TraceEntry> trace,
                                                       std::span<const double> log_radii,
                                                       double threshold);

struct LevelResult {
  int level = 0;
  ProblemInstance instance;
  SolveReport report;
  RadialPolytope polytope;
  /// max radial function over vertex directions / min over facet normals − 1.
  double sphere_deviation = 0.0;
  /// |Q_ℓ − Q_{ℓ−1}|, absent at level 0.
  std::optional<double> q_change;
  /// max |log ρ_ℓ − log ρ_{ℓ−1} − c| over this level's directions, with c
  /// the mean difference; absent at level 0.
  std::optional<double> radial_change;
};

/// Discretizes the density at levels 0..levels−1 and solves each.
std::vector<LevelResult> solve_refined(const DensitySpec& density, int levels,
                                       const SolveConfig& config = {});

}  // namespace gausskraft

#pragma once

#include <span>
#include <vector>

#include "gausskraft/polytope.hpp"

namespace gausskraft {

struct EvalReport {
  double Q = 0.0;
  std::vector<double> cell_areas;
  std::vector<double> log_dot_integrals;  // ∫_cell log<x_i, N> dσ(N)
  std::vector<double> gradient;           // cell_areas − μ
};

/// Q = Σ ρ̂_i (area_i − μ_i) + Σ ∫_cell_i log<x_i, N> dσ(N) on a built polytope.
/// `quad_tol` is the absolute tolerance per cell. Throws OriginNotInterior.
EvalReport eval(const RadialPolytope& polytope, double quad_tol = kDefaultQuadTol);

/// Builds the polytope for `log_radii` and evaluates it.
EvalReport eval(const ProblemInstance& instance, std::span<const double> log_radii,
                double quad_tol = kDefaultQuadTol);

/// Cell areas minus masses. Needs no quadrature.
std::vector<double> gradient(const ProblemInstance& instance, std::span<const double> log_radii);

/// ρ̂ − (Σ μ_i ρ̂_i / Σ μ_i)·𝟙, so that Σ μ_i ρ̂_i = 0.
std::vector<double> gauge_project(const ProblemInstance& instance,
                                  std::span<const double> log_radii);

}  // namespace gausskraft

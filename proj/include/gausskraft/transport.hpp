#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gausskraft/polytope.hpp"

namespace gausskraft {

/// Semi-discrete plan of a polytope: source i sends its mass to the normals
/// of its cell, at cost ∫_cell log<x_i, N> dσ(N).
struct TransportPlan {
  std::vector<UnitVec> sources;
  std::vector<double> mu;
  std::vector<NormalCell> cells;
  std::vector<double> cost_terms;
  double total_cost = 0.0;  // Σ cost_terms
};

/// Throws OriginNotInterior.
TransportPlan plan_from_polytope(const RadialPolytope& polytope, double quad_tol = kDefaultQuadTol);

/// Q(ρ̂) − total cost of the polytope's plan, i.e. Σ ρ̂_i (area_i − μ_i).
double duality_gap(const ProblemInstance& instance, const RadialPolytope& polytope);

struct PlanEntry {
  std::size_t source = 0;
  std::size_t sample = 0;
  double mass = 0.0;
};

struct DiscretePlan {
  int dimension = 2;
  std::vector<UnitVec> samples;
  std::vector<double> weights;
  std::vector<PlanEntry> entries;  // nonzero masses, sorted by (source, sample)
};

struct LpResult {
  double value = 0.0;  // Σ γ_ij log<x_i, N_j>
  DiscretePlan plan;
  std::size_t pivots = 0;
};

/// Sample normals for the oracle: geodesic partition cells (count rounded up
/// to the next 20·4^L) for n = 2, equal arcs for n = 1, rotated by a
/// seed-dependent random rotation (seed 0 keeps the partition as is).
/// Weights are cell areas.
void sample_normals(int dimension, std::size_t count, std::uint64_t seed,
                    std::vector<UnitVec>& samples, std::vector<double>& weights);

/// Discrete transport LP between the instance masses and sampled normals,
/// maximizing Σ γ_ij log<x_i, N_j> over arcs with <x_i, N_j> > 0.
/// Throws Infeasible when the allowed arcs cannot carry the marginals.
LpResult lp_oracle(const ProblemInstance& instance, std::size_t samples, std::uint64_t seed);

struct TransportArc {
  std::size_t source = 0;
  std::size_t sink = 0;
  double profit = 0.0;
};

struct TransportSolution {
  double value = 0.0;
  std::vector<double> flow;  // per arc, in input order
  std::size_t pivots = 0;
};

/// Balanced transportation problem maximizing Σ profit·flow, solved by the
/// network simplex method with Bland's rule. Throws InvalidInput when the
/// supply and demand totals differ by more than 1e-9 relative, Infeasible
/// when the arcs cannot carry them.
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const TransportArc> arcs);

}  // namespace gausskraft

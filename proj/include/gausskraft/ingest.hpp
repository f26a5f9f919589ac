#pragma once

#include <variant>
#include <vector>

#include "gausskraft/polytope.hpp"

namespace gausskraft {

/// m ≡ 1.
struct UniformDensity {};

/// m(N) = floor + max(0, <axis, N>)^power.
struct CosinePowerBump {
  UnitVec axis = UnitVec::trusted({0, 0, 1});
  double power = 1.0;
  double floor = 0.1;
};

/// Piecewise constant on the cells of geodesic_partition(level), in cell order.
struct TabulatedDensity {
  int level = 0;
  std::vector<double> values;
};

using DensitySpec = std::variant<UniformDensity, CosinePowerBump, TabulatedDensity>;

/// Throws NonPositiveDensity or InvalidInput when the spec cannot describe a
/// density bounded below by a positive constant.
void validate_density(const DensitySpec& density);

/// Density value at a point of S².
double density_value(const DensitySpec& density, const UnitVec& n);

struct Discretization {
  ProblemInstance instance;
  double raw_total = 0.0;  // Σ μ_i before rescaling to 4π
};

/// One direction per cell of geodesic_partition(level) (its representative),
/// with μ_i the density integral over the cell to `rel_tol` relative
/// accuracy, then rescaled so Σ μ_i = 4π. Tabulated densities are integrated
/// exactly through the nested cell indexing.
Discretization discretize_detailed(const DensitySpec& density, int level, double rel_tol = 1e-9);

ProblemInstance discretize(const DensitySpec& density, int level, double rel_tol = 1e-9);

}  // namespace gausskraft

#include "gausskraft/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gausskraft/parallel.hpp"

namespace gausskraft {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t locate_cell(const std::vector<PartitionCell>& base, int level, const UnitVec& n) {
  // Descend from the icosahedron faces; children of c are 4c..4c+3.
  const std::size_t face_count = base.size();
  std::size_t best = 0;
  for (std::size_t c = 0; c < face_count; ++c) {
    if (contains(base[c].cell, n, 1e-12)) {
      best = c;
      break;
    }
  }
  std::size_t cell = best;
  SphericalPolygon tri = base[best].cell;
  for (int l = 0; l < level; ++l) {
    const Vec3 a = tri.vertices[0];
    const Vec3 b = tri.vertices[1];
    const Vec3 c = tri.vertices[2];
    const UnitVec ab = normalize(a + b);
    const UnitVec bc = normalize(b + c);
    const UnitVec ca = normalize(c + a);
    const std::vector<std::vector<UnitVec>> kids = {{tri.vertices[0], ab, ca},
                                                    {ab, tri.vertices[1], bc},
                                                    {ca, bc, tri.vertices[2]},
                                                    {ab, bc, ca}};
    std::size_t pick = 3;
    for (std::size_t k = 0; k < 3; ++k) {
      if (contains(SphericalPolygon{2, kids[k]}, n, 1e-12)) {
        pick = k;
        break;
      }
    }
    cell = 4 * cell + pick;
    tri = SphericalPolygon{2, kids[pick]};
  }
  return cell;
}

}  // namespace

void validate_density(const DensitySpec& density) {
  std::visit(overloaded{
                 [](const UniformDensity&) {},
                 [](const CosinePowerBump& b) {
                   if (!(b.floor > 0.0) || !std::isfinite(b.floor)) {
                     throw Error(ErrorCode::NonPositiveDensity, "bump floor must be positive");
                   }
                   if (!(b.power >= 0.0) || !std::isfinite(b.power)) {
                     throw Error(ErrorCode::InvalidInput, "bump power must be nonnegative");
                   }
                 },
                 [](const TabulatedDensity& t) {
                   if (t.level < 0) throw Error(ErrorCode::InvalidInput, "negative level");
                   const std::size_t expected = std::size_t{20} << (2 * t.level);
                   if (t.values.size() != expected) {
                     throw Error(ErrorCode::InvalidInput,
                                 "tabulated density at level " + std::to_string(t.level) +
                                     " needs " + std::to_string(expected) + " values");
                   }
                   for (std::size_t i = 0; i < t.values.size(); ++i) {
                     if (!std::isfinite(t.values[i])) {
                       throw Error(ErrorCode::InvalidInput, "non-finite tabulated value");
                     }
                     if (!(t.values[i] > 0.0)) {
                       throw Error(ErrorCode::NonPositiveDensity,
                                   "tabulated value " + std::to_string(i) + " is not positive");
                     }
                   }
                 },
             },
             density);
}

double density_value(const DensitySpec& density, const UnitVec& n) {
  return std::visit(overloaded{
                        [](const UniformDensity&) { return 1.0; },
                        [&](const CosinePowerBump& b) {
                          const double c = std::max(0.0, dot(b.axis, n));
                          return b.floor + (c > 0.0 ? std::pow(c, b.power) : 0.0);
                        },
                        [&](const TabulatedDensity& t) {
                          static const std::vector<PartitionCell> base = geodesic_partition(0);
                          return t.values.at(locate_cell(base, t.level, n));
                        },
                    },
                    density);
}

Discretization discretize_detailed(const DensitySpec& density, int level, double rel_tol) {
  if (level < 0) throw Error(ErrorCode::InvalidInput, "level must be nonnegative");
  validate_density(density);
  const std::vector<PartitionCell> cells = geodesic_partition(level);
  std::vector<double> mu(cells.size(), 0.0);

  if (const auto* tab = std::get_if<TabulatedDensity>(&density)) {
    if (level >= tab->level) {
      const int shift = 2 * (level - tab->level);
      for (std::size_t c = 0; c < cells.size(); ++c) mu[c] = tab->values[c >> shift] * cells[c].area;
    } else {
      const std::vector<PartitionCell> fine = geodesic_partition(tab->level);
      const int shift = 2 * (tab->level - level);
      for (std::size_t c = 0; c < fine.size(); ++c) mu[c >> shift] += tab->values[c] * fine[c].area;
    }
  } else if (std::holds_alternative<UniformDensity>(density)) {
    for (std::size_t c = 0; c < cells.size(); ++c) mu[c] = cells[c].area;
  } else {
    const auto& bump = std::get<CosinePowerBump>(density);
    parallel_for(cells.size(), [&](std::size_t c) {
      const auto& v = cells[c].cell.vertices;
      // The floor bounds the integral from below, so this tolerance is
      // relative to the cell mass.
      const double tol = rel_tol * bump.floor * cells[c].area;
      mu[c] = integrate_over_triangle(
          v[0], v[1], v[2], [&](const UnitVec& n) { return density_value(density, n); }, tol);
    });
  }

  double total = 0.0;
  for (std::size_t c = 0; c < mu.size(); ++c) {
    if (!(mu[c] > 0.0)) {
      throw Error(ErrorCode::NonPositiveDensity, "cell " + std::to_string(c) + " has no mass");
    }
    total += mu[c];
  }
  const double scale = sphere_measure(2) / total;
  std::vector<UnitVec> dirs;
  dirs.reserve(cells.size());
  for (std::size_t c = 0; c < mu.size(); ++c) {
    mu[c] *= scale;
    dirs.push_back(cells[c].representative);
  }
  return {ProblemInstance::create(2, std::move(dirs), std::move(mu)), total};
}

ProblemInstance discretize(const DensitySpec& density, int level, double rel_tol) {
  return discretize_detailed(density, level, rel_tol).instance;
}

}  // namespace gausskraft

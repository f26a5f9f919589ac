#pragma once

// Instance generators and independent reference computations shared by the
// unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gausskraft/admissibility.hpp"
#include "gausskraft/functional.hpp"
#include "gausskraft/polytope.hpp"
#include "gausskraft/sphgeom.hpp"

namespace gk_test {

using namespace gausskraft;

inline constexpr double kPi = std::numbers::pi;

inline std::vector<UnitVec> octahedron_dirs() {
  return {UnitVec::trusted({1, 0, 0}), UnitVec::trusted({-1, 0, 0}), UnitVec::trusted({0, 1, 0}),
          UnitVec::trusted({0, -1, 0}), UnitVec::trusted({0, 0, 1}), UnitVec::trusted({0, 0, -1})};
}

inline std::vector<UnitVec> tetra_dirs() {
  return {normalize(Vec3{1, 1, 1}), normalize(Vec3{1, -1, -1}), normalize(Vec3{-1, 1, -1}),
          normalize(Vec3{-1, -1, 1})};
}

inline ProblemInstance octahedron_instance() {
  return ProblemInstance::create(2, octahedron_dirs(), std::vector<double>(6, 4.0 * kPi / 6.0));
}

inline ProblemInstance tetra_instance() {
  return ProblemInstance::create(2, tetra_dirs(), std::vector<double>(4, kPi));
}

inline UnitVec random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return normalize(Vec3{g(rng), g(rng), g(rng)});
}

/// Uniform random directions with pairwise separation at least min_sep.
inline std::vector<UnitVec> random_directions(std::size_t K, std::mt19937_64& rng,
                                              double min_sep = 0.15) {
  std::vector<UnitVec> d;
  while (d.size() < K) {
    const UnitVec u = random_unit(rng);
    bool ok = true;
    for (const UnitVec& v : d) ok = ok && angular_distance(u, v) >= min_sep;
    if (ok) d.push_back(u);
  }
  return d;
}

/// Random rotation as a 3x3 matrix (rows), from a uniform random quaternion.
struct Rotation {
  Vec3 r0, r1, r2;
  Vec3 apply(const Vec3& v) const { return {dot(r0, v), dot(r1, v), dot(r2, v)}; }
  UnitVec apply(const UnitVec& v) const { return UnitVec::trusted(apply(v.vec())); }
};

inline Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
  const double s = std::sqrt(w * w + x * x + y * y + z * z);
  w /= s, x /= s, y /= s, z /= s;
  return {{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
          {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
          {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
}

/// Random convex spherical polygon with m vertices within `radius` of a
/// random center, counterclockwise from outside.
inline SphericalPolygon random_convex_polygon(std::mt19937_64& rng, std::size_t m,
                                              double radius) {
  const UnitVec c = random_unit(rng);
  const Vec3 helper = std::abs(c.x()) < 0.6 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 e1 = normalize(cross(c, helper));
  const Vec3 e2 = cross(c, e1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> ang(m);
  for (double& a : ang) a = 2.0 * kPi * u(rng);
  std::sort(ang.begin(), ang.end());
  SphericalPolygon poly;
  // Vertices on a small circle are always in convex position.
  for (double a : ang) {
    poly.vertices.push_back(normalize(std::cos(radius) * c.vec() +
                                      std::sin(radius) * (std::cos(a) * e1 + std::sin(a) * e2)));
  }
  return poly;
}

inline std::vector<double> cell_areas(const RadialPolytope& P) {
  std::vector<double> a;
  for (const NormalCell& c : P.normal_cells()) a.push_back(c.area);
  return a;
}

/// A random polytope whose points are all hull vertices with cells of area
/// at least min_area, or nothing if the draw fails.
inline std::optional<RadialPolytope> random_full_polytope(const ProblemInstance& shape,
                                                          std::mt19937_64& rng, double spread,
                                                          double min_area) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<double> rho(shape.size());
  for (double& r : rho) r = u(rng);
  try {
    RadialPolytope P = RadialPolytope::build(shape, rho);
    if (!P.origin_interior() || P.hull_vertex_count() != shape.size()) return std::nullopt;
    for (const NormalCell& c : P.normal_cells()) {
      if (c.area < min_area) return std::nullopt;
    }
    return P;
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct RoundTrip {
  ProblemInstance instance;
  std::vector<double> truth;  // gauge-fixed log-radii of the generating polytope
};

/// Random polytope on K random directions; μ := its cell areas.
inline RoundTrip random_round_trip(std::size_t K, std::uint64_t seed, double spread = 0.3) {
  std::mt19937_64 rng(seed);
  const double min_area = 0.05 * 4.0 * kPi / static_cast<double>(K);
  while (true) {
    const auto dirs = random_directions(K, rng, 1.2 / std::sqrt(static_cast<double>(K)));
    const ProblemInstance shape =
        ProblemInstance::create(2, dirs, std::vector<double>(K, 4.0 * kPi / K));
    for (int attempt = 0; attempt < 50; ++attempt) {
      if (auto P = random_full_polytope(shape, rng, spread, min_area)) {
        const ProblemInstance inst = shape.with_mu(cell_areas(*P));
        return {inst, gauge_project(inst, P->log_radii())};
      }
    }
  }
}

/// Admissible instance: a convex combination of two realized curvature
/// measures on the same directions.
inline ProblemInstance random_admissible(std::size_t K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double min_area = 0.05 * 4.0 * kPi / static_cast<double>(K);
  while (true) {
    const auto dirs = random_directions(K, rng, 1.2 / std::sqrt(static_cast<double>(K)));
    const ProblemInstance shape =
        ProblemInstance::create(2, dirs, std::vector<double>(K, 4.0 * kPi / K));
    std::optional<RadialPolytope> a = random_full_polytope(shape, rng, 0.0, min_area);
    if (!a) continue;
    for (int attempt = 0; attempt < 50; ++attempt) {
      // Large K rarely keeps every point on the hull at full spread.
      const double spread = 0.4 * std::pow(0.5, attempt / 10);
      if (auto b = random_full_polytope(shape, rng, spread, min_area)) {
        const double t = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
        std::vector<double> mu(K);
        for (std::size_t i = 0; i < K; ++i) {
          mu[i] = t * a->normal_cell(i).area + (1.0 - t) * b->normal_cell(i).area;
        }
        return shape.with_mu(mu);
      }
    }
  }
}

/// Instance breaking μ_0 < 2π: μ_0 = 2.1π, the rest rescaled to keep 4π.
inline ProblemInstance vertex_bound_violation(std::size_t K, std::uint64_t seed) {
  const ProblemInstance base = random_admissible(K, seed);
  std::vector<double> mu = base.mu();
  double rest = 0.0;
  for (std::size_t i = 1; i < K; ++i) rest += mu[i];
  mu[0] = 2.1 * kPi;
  for (std::size_t i = 1; i < K; ++i) mu[i] *= (4.0 * kPi - mu[0]) / rest;
  return base.with_mu(mu);
}

inline UnitVec circle_point(double angle) {
  return UnitVec::trusted({std::cos(angle), std::sin(angle), 0.0});
}

/// Random admissible circle instance with K points: masses are the arc
/// lengths of a random polygon's normal cells, so every mass is below π.
inline ProblemInstance random_circle_instance(std::size_t K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> r(-0.25, 0.25);
  while (true) {
    std::vector<double> a(K);
    for (double& v : a) v = ang(rng);
    std::sort(a.begin(), a.end());
    bool ok = true;
    for (std::size_t k = 0; k < K; ++k) {
      const double gap = (k + 1 < K ? a[k + 1] : a[0] + 2.0 * kPi) - a[k];
      ok = ok && gap > 0.3 && gap < kPi - 0.3;
    }
    if (!ok) continue;
    std::vector<UnitVec> dirs;
    for (double v : a) dirs.push_back(circle_point(v));
    const ProblemInstance shape =
        ProblemInstance::create(1, dirs, std::vector<double>(K, 2.0 * kPi / K));
    std::vector<double> rho(K);
    for (double& v : rho) v = r(rng);
    try {
      const RadialPolytope P = RadialPolytope::build(shape, rho);
      if (!P.origin_interior() || P.hull_vertex_count() != K) continue;
      const auto areas = cell_areas(P);
      if (*std::min_element(areas.begin(), areas.end()) < 0.1) continue;
      return shape.with_mu(areas);
    } catch (const Error&) {
    }
  }
}

// ---------------------------------------------------------------------------
// Reference computations that do not use the hull or cell machinery.

/// Q on the circle from the direct form ∫ log h dθ − Σ μ_i ρ̂_i, with h the
/// support function max_i ρ_i cos(θ − θ_i). The integral is split at every
/// pairwise crossing so each piece is smooth. Returns +∞ if h is not positive.
inline double circle_q_direct(const std::vector<double>& angles, const std::vector<double>& mu,
                              const std::vector<double>& rho_hat) {
  const std::size_t K = angles.size();
  std::vector<double> cuts = {0.0, 2.0 * kPi};
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = i + 1; j < K; ++j) {
      // ρ_i cos(θ − a_i) = ρ_j cos(θ − a_j)  ⇔  A cos θ + B sin θ = 0.
      const double ri = std::exp(rho_hat[i]);
      const double rj = std::exp(rho_hat[j]);
      const double A = ri * std::cos(angles[i]) - rj * std::cos(angles[j]);
      const double B = ri * std::sin(angles[i]) - rj * std::sin(angles[j]);
      double t = std::atan2(-A, B);
      for (int k = 0; k < 2; ++k) {
        double c = std::fmod(t + k * kPi, 2.0 * kPi);
        if (c < 0.0) c += 2.0 * kPi;
        cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto h = [&](double th) {
    double best = -1e300;
    for (std::size_t i = 0; i < K; ++i) {
      best = std::max(best, std::exp(rho_hat[i]) * std::cos(th - angles[i]));
    }
    return best;
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    if (hi - lo < 1e-15) continue;
    if (h(0.5 * (lo + hi)) <= 0.0) return std::numeric_limits<double>::infinity();
    total += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        [&](double th) { return std::log(h(th)); }, lo, hi, 10, 1e-13);
  }
  for (std::size_t i = 0; i < K; ++i) total -= mu[i] * rho_hat[i];
  return total;
}

/// Gauge-fixed minimizer of circle_q_direct by coarse-to-fine exhaustive grid
/// search down to step `final_step`. Coordinate 0 is fixed by the gauge.
inline std::vector<double> circle_grid_minimizer(const std::vector<double>& angles,
                                                 const std::vector<double>& mu,
                                                 double final_step = 1e-4) {
  const std::size_t K = angles.size();
  const std::size_t d = K - 1;
  auto full = [&](const std::vector<double>& free) {
    std::vector<double> x(K);
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      x[i + 1] = free[i];
      s += mu[i + 1] * free[i];
    }
    x[0] = -s / mu[0];
    return x;
  };
  std::vector<double> center(d, 0.0);
  double step = 0.25;
  // Q is convex, so a smaller box that recenters still finds the minimum.
  const int half = d >= 3 ? 2 : 4;
  while (true) {
    std::vector<double> best = center;
    double best_q = circle_q_direct(angles, mu, full(center));
    std::vector<int> idx(d, -half);
    while (true) {
      std::vector<double> trial(d);
      for (std::size_t i = 0; i < d; ++i) trial[i] = center[i] + idx[i] * step;
      const double q = circle_q_direct(angles, mu, full(trial));
      if (q < best_q) {
        best_q = q;
        best = trial;
      }
      std::size_t p = 0;
      while (p < d && idx[p] == half) idx[p++] = -half;
      if (p == d) break;
      ++idx[p];
    }
    // Recenter without shrinking while the best point sits on the box edge.
    bool on_edge = false;
    for (std::size_t i = 0; i < d; ++i) {
      on_edge = on_edge || std::abs(best[i] - center[i]) > (half - 0.5) * step;
    }
    center = best;
    if (on_edge) continue;
    if (step <= final_step * 1.0000001) break;
    step = std::max(final_step, step / 4.0);
  }
  return full(center);
}

}  // namespace gk_test

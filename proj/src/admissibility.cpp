#include "gausskraft/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace gausskraft {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMembershipTol = 1e-12;

double planar_angle(const Vec3& v) {
  double a = std::atan2(v.y, v.x);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

/// Whether x lies in the closed cone spanned by `gens`.
bool in_cone(int dimension, const std::vector<UnitVec>& gens, const Vec3& x) {
  if (gens.size() == 1) return angular_distance(gens[0], x) <= kMergeAngle;
  if (gens.size() == 2) {
    const Vec3& a = gens[0];
    const Vec3& b = gens[1];
    const Vec3 n = cross(a, b);
    const double nn = dot(n, n);
    if (dimension == 2 && std::abs(dot(n, x)) > kMembershipTol * std::sqrt(nn)) return false;
    // x = α a + β b restricted to the plane of a, b.
    const double alpha = dot(cross(x, b), n) / nn;
    const double beta = dot(cross(a, x), n) / nn;
    return alpha >= -kMembershipTol && beta >= -kMembershipTol;
  }
  const double d = det3(gens[0], gens[1], gens[2]);
  const double c0 = det3(x, gens[1], gens[2]) / d;
  const double c1 = det3(gens[0], x, gens[2]) / d;
  const double c2 = det3(gens[0], gens[1], x) / d;
  return c0 >= -kMembershipTol && c1 >= -kMembershipTol && c2 >= -kMembershipTol;
}

/// Whether `gens` span a proper (pointed, full-rank for their count) cone.
bool is_proper(int dimension, const std::vector<UnitVec>& gens) {
  if (gens.size() == 1) return true;
  if (gens.size() == 2) return kPi - angular_distance(gens[0], gens[1]) > kMergeAngle;
  if (dimension != 2 || gens.size() != 3) return false;
  return std::abs(det3(gens[0], gens[1], gens[2])) > 1e-12;
}

}  // namespace

bool AdmissibilityReport::ok() const {
  return mass_balance.ok && positivity.ok && hemisphere.ok && vertex_bound.ok &&
         cone_check.status != ConeStatus::FailedWithCone;
}

MassBalanceResult check_mass_balance(const ProblemInstance& instance, double tol) {
  const double total = std::accumulate(instance.mu().begin(), instance.mu().end(), 0.0);
  MassBalanceResult r;
  r.residual = std::abs(total - sphere_measure(instance.dimension()));
  r.ok = r.residual <= tol;
  return r;
}

PositivityResult check_positivity(const ProblemInstance& instance) {
  PositivityResult r;
  r.ok = true;
  const auto& mu = instance.mu();
  if (mu.empty()) {
    r.ok = false;
    return r;
  }
  const auto it = std::min_element(mu.begin(), mu.end());
  if (!(*it > 0.0)) {
    r.ok = false;
    r.worst_index = static_cast<std::size_t>(it - mu.begin());
  }
  return r;
}

HemisphereResult check_hemisphere(const ProblemInstance& instance) {
  std::vector<UnitVec> dirs;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    if (instance.mu(i) > 0.0) dirs.push_back(instance.direction(i));
  }
  HemisphereResult r;
  const int n = instance.dimension();

  if (n == 1) {
    if (dirs.empty()) {
      r.witness = UnitVec::trusted({1, 0, 0});
      return r;
    }
    std::vector<double> ang;
    for (const UnitVec& d : dirs) ang.push_back(planar_angle(d));
    std::sort(ang.begin(), ang.end());
    double best_gap = -1.0;
    double best_start = 0.0;
    for (std::size_t k = 0; k < ang.size(); ++k) {
      const double next = k + 1 < ang.size() ? ang[k + 1] : ang[0] + 2.0 * kPi;
      if (next - ang[k] > best_gap) {
        best_gap = next - ang[k];
        best_start = ang[k];
      }
    }
    r.ok = best_gap < kPi - 1e-12;
    if (!r.ok) {
      const double mid = best_start + 0.5 * best_gap;
      r.witness = UnitVec::trusted({std::cos(mid), std::sin(mid), 0.0});
    }
    return r;
  }

  if (dirs.empty()) {
    r.witness = UnitVec::trusted({0, 0, -1});
    return r;
  }
  if (dirs.size() == 1) {
    r.witness = UnitVec::trusted(-dirs[0].vec());
    return r;
  }
  try {
    const ProblemInstance sub =
        ProblemInstance::create(2, dirs, std::vector<double>(dirs.size(), 1.0));
    const RadialPolytope hull = RadialPolytope::build(sub, std::vector<double>(dirs.size(), 0.0));
    if (hull.origin_interior()) {
      r.ok = true;
      return r;
    }
    const auto& facets = hull.facets();
    const auto worst = std::min_element(facets.begin(), facets.end(), [](const Facet& a, const Facet& b) {
      return a.offset < b.offset;
    });
    r.witness = worst->normal;
    return r;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::HullDegenerate) throw;
  }
  // Coplanar or collinear: a normal of the common plane (oriented away from
  // the points) or of the common line works.
  const Vec3& a = dirs[0];
  Vec3 normal;
  for (std::size_t i = 1; i < dirs.size() && norm(normal) == 0.0; ++i) {
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      const Vec3 c = cross(dirs[i].vec() - a, dirs[j].vec() - a);
      if (norm(c) > 1e-12) {
        normal = c;
        break;
      }
    }
  }
  if (norm(normal) == 0.0) {
    normal = cross(dirs[0], dirs[1]);
    if (norm(normal) <= 1e-12) {
      normal = std::abs(a.x) < 0.9 ? cross(a, Vec3{1, 0, 0}) : cross(a, Vec3{0, 1, 0});
    }
  }
  UnitVec u = normalize(normal);
  if (dot(u, a) > 0.0) u = UnitVec::trusted(-u.vec());
  r.witness = u;
  return r;
}

VertexBoundResult check_vertex_bound(const ProblemInstance& instance) {
  VertexBoundResult r;
  const auto& mu = instance.mu();
  if (mu.empty()) return r;
  const auto it = std::max_element(mu.begin(), mu.end());
  r.worst_index = static_cast<std::size_t>(it - mu.begin());
  r.ok = *it < 0.5 * sphere_measure(instance.dimension()) - 1e-12;
  return r;
}

double dual_cone_area(int dimension, const std::vector<UnitVec>& generators) {
  if (!is_proper(dimension, generators)) {
    throw Error(ErrorCode::InvalidInput, "generators do not span a proper cone");
  }
  const double half = 0.5 * sphere_measure(dimension);
  if (generators.size() == 1) return half;
  if (generators.size() == 2) {
    const double theta = angular_distance(generators[0], generators[1]);
    return dimension == 2 ? 2.0 * (kPi - theta) : kPi - theta;
  }
  const double perimeter = angular_distance(generators[0], generators[1]) +
                           angular_distance(generators[1], generators[2]) +
                           angular_distance(generators[2], generators[0]);
  return std::max(0.0, 2.0 * kPi - perimeter);
}

ConeCheckResult check_cone_condition_exhaustive(const ProblemInstance& instance, std::size_t max_K) {
  const std::size_t K = instance.size();
  if (K > max_K) {
    throw Error(ErrorCode::TooLarge, "exhaustive cone check limited to " + std::to_string(max_K) +
                                         " directions, got " + std::to_string(K));
  }
  const int n = instance.dimension();
  const std::size_t max_size = static_cast<std::size_t>(n) + 1;
  ConeCheckResult r;

  std::vector<std::size_t> subset;
  std::vector<UnitVec> gens;
  for (std::size_t size = 1; size <= std::min(max_size, K); ++size) {
    subset.resize(size);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
      gens.clear();
      for (std::size_t i : subset) gens.push_back(instance.direction(i));
      if (is_proper(n, gens)) {
        ++r.cones_checked;
        double outside = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
          if (!in_cone(n, gens, instance.direction(j))) outside += instance.mu(j);
        }
        if (!(outside > dual_cone_area(n, gens) + kConeMargin)) {
          r.status = ConeStatus::FailedWithCone;
          r.generators = subset;
          return r;
        }
      }
      // Next lexicographic combination.
      std::size_t pos = size;
      while (pos > 0 && subset[pos - 1] == K - size + pos - 1) --pos;
      if (pos == 0) break;
      ++subset[pos - 1];
      for (std::size_t q = pos; q < size; ++q) subset[q] = subset[q - 1] + 1;
    }
  }
  r.status = ConeStatus::Passed;
  return r;
}

AdmissibilityReport check_admissibility(const ProblemInstance& instance, std::size_t max_K,
                                        double mass_tol) {
  AdmissibilityReport rep;
  rep.mass_balance = check_mass_balance(instance, mass_tol);
  rep.positivity = check_positivity(instance);
  rep.hemisphere = check_hemisphere(instance);
  rep.vertex_bound = check_vertex_bound(instance);
  if (instance.size() <= max_K) rep.cone_check = check_cone_condition_exhaustive(instance, max_K);
  return rep;
}

std::string describe_failure(const AdmissibilityReport& report) {
  if (!report.mass_balance.ok) {
    return "mass balance fails (residual " + std::to_string(report.mass_balance.residual) + ")";
  }
  if (!report.positivity.ok) {
    return report.positivity.worst_index
               ? "mass " + std::to_string(*report.positivity.worst_index) + " is not positive"
               : "instance is empty";
  }
  if (!report.hemisphere.ok) return "directions with mass lie in a closed hemisphere";
  if (!report.vertex_bound.ok) {
    return "mass " + std::to_string(report.vertex_bound.worst_index) +
           " reaches half the sphere measure";
  }
  if (report.cone_check.status == ConeStatus::FailedWithCone) {
    std::string s = "cone condition fails for generators {";
    for (std::size_t k = 0; k < report.cone_check.generators.size(); ++k) {
      if (k) s += ", ";
      s += std::to_string(report.cone_check.generators[k]);
    }
    return s + "}";
  }
  return "all checks passed";
}

}  // namespace gausskraft

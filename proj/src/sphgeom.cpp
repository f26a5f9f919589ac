#include "gausskraft/sphgeom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gausskraft {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dimension(int dimension) {
  if (dimension != 1 && dimension != 2) {
    throw Error(ErrorCode::UnsupportedDimension, "dimension must be 1 or 2, got " +
                                                     std::to_string(dimension));
  }
}

/// Counterclockwise angle from a to b in [0, 2π), for vectors in the xy-plane.
double ccw_angle(const Vec3& a, const Vec3& b) {
  double t = std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

/// Interior points of the two minor arcs ab and cd coincide somewhere.
bool arcs_cross(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 n1 = cross(a, b);
  const Vec3 n2 = cross(c, d);
  const Vec3 line = cross(n1, n2);
  const double len = norm(line);
  if (len < 1e-14) return false;
  constexpr double eps = 1e-13;
  for (const Vec3& q : {line / len, -line / len}) {
    const bool on_ab = dot(cross(a, q), n1) > eps && dot(cross(q, b), n1) > eps;
    const bool on_cd = dot(cross(c, q), n2) > eps && dot(cross(q, d), n2) > eps;
    if (on_ab && on_cd) return true;
  }
  return false;
}

// Seven-point degree-5 rule on a triangle (Radon / Dunavant), barycentric
// coordinates with weights normalized to sum 1.
struct TriRule {
  std::array<std::array<double, 3>, 7> bary;
  std::array<double, 7> weight;
};

TriRule make_seven_point_rule() {
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 - s15) / 21.0;
  const double b1 = (9.0 + 2.0 * s15) / 21.0;
  const double w1 = (155.0 - s15) / 1200.0;
  const double a2 = (6.0 + s15) / 21.0;
  const double b2 = (9.0 - 2.0 * s15) / 21.0;
  const double w2 = (155.0 + s15) / 1200.0;
  TriRule r{};
  r.bary[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  r.weight[0] = 9.0 / 40.0;
  r.bary[1] = {a1, a1, b1};
  r.bary[2] = {a1, b1, a1};
  r.bary[3] = {b1, a1, a1};
  r.bary[4] = {a2, a2, b2};
  r.bary[5] = {a2, b2, a2};
  r.bary[6] = {b2, a2, a2};
  for (int k = 1; k <= 3; ++k) r.weight[k] = w1;
  for (int k = 4; k <= 6; ++k) r.weight[k] = w2;
  return r;
}

const TriRule& seven_point_rule() {
  static const TriRule rule = make_seven_point_rule();
  return rule;
}

struct FlatTriangle {
  Vec3 p0, p1, p2;
};

// One application of the rule on a flat sub-triangle lying in the plane at
// distance `plane_dist` from the origin.
double apply_rule(const FlatTriangle& t, double plane_dist,
                  const std::function<double(const UnitVec&)>& f) {
  const double flat_area = 0.5 * norm(cross(t.p1 - t.p0, t.p2 - t.p0));
  const TriRule& rule = seven_point_rule();
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.weight.size(); ++k) {
    const auto& b = rule.bary[k];
    const Vec3 p = b[0] * t.p0 + b[1] * t.p1 + b[2] * t.p2;
    const double r = norm(p);
    sum += rule.weight[k] * f(UnitVec::trusted(p / r)) * plane_dist / (r * r * r);
  }
  return flat_area * sum;
}

struct Refinement {
  FlatTriangle tri;
  std::array<double, 4> kids{};
  double fine = 0.0;
  double err = 0.0;
  int depth = 0;
};

std::array<FlatTriangle, 4> split(const FlatTriangle& t) {
  const Vec3 m01 = 0.5 * (t.p0 + t.p1);
  const Vec3 m12 = 0.5 * (t.p1 + t.p2);
  const Vec3 m20 = 0.5 * (t.p2 + t.p0);
  return {FlatTriangle{t.p0, m01, m20}, FlatTriangle{m01, t.p1, m12},
          FlatTriangle{m20, m12, t.p2}, FlatTriangle{m01, m12, m20}};
}

Refinement refine(const FlatTriangle& t, double coarse, int depth, double plane_dist,
                  const std::function<double(const UnitVec&)>& f) {
  Refinement r{t, {}, 0.0, 0.0, depth};
  const auto kids = split(t);
  for (std::size_t k = 0; k < 4; ++k) {
    r.kids[k] = apply_rule(kids[k], plane_dist, f);
    r.fine += r.kids[k];
  }
  r.err = std::abs(r.fine - coarse);
  return r;
}

constexpr int kMinSplitLevel = 2;

// Globally adaptive: always split the piece with the largest two-level
// difference until the differences sum to at most tol.
double adapt_triangle(const FlatTriangle& t, double plane_dist,
                      const std::function<double(const UnitVec&)>& f, double coarse, double tol,
                      int max_depth) {
  auto worse = [](const Refinement& a, const Refinement& b) { return a.err < b.err; };
  // Start from a uniform split so a lucky agreement between the first two
  // levels cannot end the refinement early.
  std::vector<FlatTriangle> start = {t};
  for (int level = 0; level < kMinSplitLevel; ++level) {
    std::vector<FlatTriangle> next;
    for (const FlatTriangle& s : start) {
      for (const FlatTriangle& k : split(s)) next.push_back(k);
    }
    start = std::move(next);
  }
  std::vector<Refinement> heap;
  double err = 0.0;
  for (const FlatTriangle& s : start) {
    const double base = start.size() == 1 ? coarse : apply_rule(s, plane_dist, f);
    heap.push_back(refine(s, base, kMinSplitLevel, plane_dist, f));
    err += heap.back().err;
  }
  std::make_heap(heap.begin(), heap.end(), worse);
  while (err > tol) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Refinement top = heap.back();
    heap.pop_back();
    if (top.depth >= max_depth) {
      throw Error(ErrorCode::ToleranceNotReached,
                  "triangle subdivision budget exhausted at depth " + std::to_string(top.depth));
    }
    err -= top.err;
    const auto kids = split(top.tri);
    for (std::size_t k = 0; k < 4; ++k) {
      heap.push_back(refine(kids[k], top.kids[k], top.depth + 1, plane_dist, f));
      err += heap.back().err;
      std::push_heap(heap.begin(), heap.end(), worse);
    }
    // Recompute occasionally to keep the running sum free of drift.
    if (heap.size() % 256 == 0) {
      err = 0.0;
      for (const Refinement& r : heap) err += r.err;
    }
  }
  std::sort(heap.begin(), heap.end(), worse);
  double total = 0.0;
  for (const Refinement& r : heap) total += r.fine;
  return total;
}

// Bisection on single Gauss-Kronrod panels until each panel's error estimate
// fits its share of the absolute tolerance. Accumulates the estimates in err.
template <class F>
double adaptive_gk15(const F& f, double lo, double hi, double tol, int depth, double& err) {
  double e = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0.0, &e);
  // With no refinement the reported error is on the reference interval [-1, 1].
  e *= 0.5 * (hi - lo);
  if (e <= tol || e <= 1e-15 * (hi - lo) || depth >= 40 || hi - lo < 1e-14) {
    err += e;
    return v;
  }
  const double mid = 0.5 * (lo + hi);
  return adaptive_gk15(f, lo, mid, 0.5 * tol, depth + 1, err) +
         adaptive_gk15(f, mid, hi, 0.5 * tol, depth + 1, err);
}

// ∫_0^Θ log(cos θ) sin θ dθ expressed through c = cos Θ.
double radial_log_integral(double c) {
  if (c <= 0.0) return -1.0;
  return -1.0 + c - c * std::log(c);
}

// ∫_0^y log(sin s) ds for y in [0, π/2], split into a smooth part and the
// explicit y·log y − y singular part.
double integral_log_sin(double y) {
  if (y <= 0.0) return 0.0;
  auto smooth = [](double s) {
    if (s < 1e-4) return std::log1p(-s * s / 6.0 + s * s * s * s / 120.0);
    return std::log(std::sin(s) / s);
  };
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      smooth, 0.0, y, 15, 1e-15, &err);
  return v + y * std::log(y) - y;
}

// F(x) = ∫_0^x log cos t dt for |x| <= π/2.
double integral_log_cos(double x) {
  const double ax = std::min(std::abs(x), 0.5 * kPi);
  const double full = -0.5 * kPi * std::numbers::ln2;
  const double v = full - integral_log_sin(0.5 * kPi - ax);
  return x < 0.0 ? -v : v;
}

double integrate_log_dot_circle(const UnitVec& apex, const SphericalPolygon& region) {
  if (region.vertices.size() != 2) {
    throw Error(ErrorCode::DegeneratePolygon, "a circle arc needs exactly two endpoints");
  }
  const double length = polygon_area(region);
  double t0 = std::atan2(region.vertices[0].y(), region.vertices[0].x()) -
              std::atan2(apex.y(), apex.x());
  t0 = std::remainder(t0, 2.0 * kPi);
  const double t1 = t0 + length;
  constexpr double slack = 1e-12;
  if (t0 < -0.5 * kPi - slack || t1 > 0.5 * kPi + slack) {
    throw Error(ErrorCode::NonPositiveDot, "arc leaves the open half-circle around the apex");
  }
  return integral_log_cos(std::min(t1, 0.5 * kPi)) - integral_log_cos(std::max(t0, -0.5 * kPi));
}

}  // namespace

UnitVec UnitVec::from(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 1e-300) || !std::isfinite(n)) {
    throw Error(ErrorCode::ZeroVector, "cannot normalize a zero or non-finite vector");
  }
  return UnitVec(v / n);
}

UnitVec UnitVec::from(std::span<const double> coords) {
  if (coords.size() == 2) return from(Vec3{coords[0], coords[1], 0.0});
  if (coords.size() == 3) return from(Vec3{coords[0], coords[1], coords[2]});
  throw Error(ErrorCode::UnsupportedDimension,
              "expected 2 or 3 coordinates, got " + std::to_string(coords.size()));
}

UnitVec normalize(const Vec3& v) { return UnitVec::from(v); }
UnitVec normalize(std::span<const double> coords) { return UnitVec::from(coords); }

double sphere_measure(int dimension) {
  require_dimension(dimension);
  return dimension == 1 ? 2.0 * kPi : 4.0 * kPi;
}

double hemisphere_log_bound(int dimension) {
  require_dimension(dimension);
  return dimension == 1 ? kPi * std::numbers::ln2 : 2.0 * kPi;
}

double polygon_area(const SphericalPolygon& poly) {
  require_dimension(poly.dimension);
  const auto& v = poly.vertices;
  if (poly.dimension == 1) {
    if (v.size() != 2) throw Error(ErrorCode::DegeneratePolygon, "arc needs two endpoints");
    return ccw_angle(v[0], v[1]);
  }

  const std::size_t m = v.size();
  if (m < 3) {
    throw Error(ErrorCode::DegeneratePolygon,
                "spherical polygon needs at least 3 vertices, got " + std::to_string(m));
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (angular_distance(v[k], v[(k + 1) % m]) <= kMergeAngle) {
      throw Error(ErrorCode::DegeneratePolygon,
                  "consecutive vertices " + std::to_string(k) + " coincide");
    }
  }
  for (std::size_t i = 0; i + 2 < m; ++i) {
    for (std::size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      if (arcs_cross(v[i], v[i + 1], v[j], v[(j + 1) % m])) {
        throw Error(ErrorCode::DegeneratePolygon, "edges " + std::to_string(i) + " and " +
                                                      std::to_string(j) + " cross");
      }
    }
  }

  double angle_sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3& b = v[k];
    const Vec3& a = v[(k + m - 1) % m];
    const Vec3& c = v[(k + 1) % m];
    const Vec3 ta = a - dot(a, b) * b;
    const Vec3 tc = c - dot(c, b) * b;
    double theta = std::atan2(dot(b, cross(tc, ta)), dot(tc, ta));
    if (theta < 0.0) theta += 2.0 * kPi;
    angle_sum += theta;
  }
  return std::max(0.0, angle_sum - static_cast<double>(m - 2) * kPi);
}

double integrate_log_dot(const UnitVec& apex, const SphericalPolygon& region, double tol) {
  require_dimension(region.dimension);
  if (region.empty()) return 0.0;
  if (region.dimension == 1) return integrate_log_dot_circle(apex, region);

  const auto& v = region.vertices;
  const std::size_t m = v.size();
  if (m < 3) throw Error(ErrorCode::DegeneratePolygon, "region needs at least 3 vertices");
  for (const UnitVec& p : v) {
    if (dot(apex, p) < -1e-14) {
      throw Error(ErrorCode::NonPositiveDot, "region leaves the hemisphere around the apex");
    }
  }

  // Orthonormal frame (e1, e2) of the tangent plane at the apex.
  const Vec3 helper = std::abs(apex.x()) < 0.6 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 e1 = normalize(cross(apex, helper));
  const Vec3 e2 = cross(apex, e1);
  auto polar_angle = [&](const Vec3& p) { return std::atan2(dot(p, e2), dot(p, e1)); };

  const double edge_tol = tol / static_cast<double>(m);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3& a = v[k];
    const Vec3& b = v[(k + 1) % m];
    if (angular_distance(a, apex) < 1e-15 || angular_distance(b, apex) < 1e-15) continue;
    const Vec3 nab = cross(a, b);
    const double nlen = norm(nab);
    if (nlen < 1e-300) continue;
    const Vec3 n = nab / nlen;
    const double phi_a = polar_angle(a);
    const double delta = std::remainder(polar_angle(b) - phi_a, 2.0 * kPi);
    if (std::abs(delta) < 1e-300) continue;

    const double an = dot(apex, n);
    const double e1n = dot(e1, n);
    const double e2n = dot(e2, n);
    auto integrand = [&](double phi) {
      const double bn = std::cos(phi) * e1n + std::sin(phi) * e2n;
      const double h = std::hypot(an, bn);
      const double c = h > 0.0 ? std::abs(bn) / h : 1.0;
      return radial_log_integral(c);
    };
    const double lo = std::min(phi_a, phi_a + delta);
    const double hi = std::max(phi_a, phi_a + delta);
    double err = 0.0;
    const double part = adaptive_gk15(integrand, lo, hi, edge_tol, 0, err);
    if (!(err <= edge_tol + 1e-14 * (hi - lo))) {
      throw Error(ErrorCode::ToleranceNotReached,
                  "edge integral error estimate " + std::to_string(err));
    }
    total += delta > 0.0 ? part : -part;
  }
  return std::min(total, 0.0);
}

double integrate_log_dot_subdivision(const UnitVec& apex, const SphericalPolygon& region,
                                     double tol, int max_depth) {
  if (region.dimension != 2) {
    throw Error(ErrorCode::UnsupportedDimension, "subdivision route is two-dimensional only");
  }
  if (region.empty()) return 0.0;
  const auto& v = region.vertices;
  const std::size_t m = v.size();
  if (m < 3) throw Error(ErrorCode::DegeneratePolygon, "region needs at least 3 vertices");

  Vec3 sum;
  for (const UnitVec& p : v) sum += p.vec();
  const UnitVec center = normalize(sum);
  auto f = [&](const UnitVec& n) {
    const double d = dot(apex, n);
    if (d <= 1e-14) throw Error(ErrorCode::NonPositiveDot, "quadrature node outside hemisphere");
    return std::log(d);
  };
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    total += integrate_over_triangle(center, v[k], v[(k + 1) % m], f,
                                     tol / static_cast<double>(m), max_depth);
  }
  return total;
}

double integrate_over_triangle(const UnitVec& a, const UnitVec& b, const UnitVec& c,
                               const std::function<double(const UnitVec&)>& f, double abs_tol,
                               int max_depth) {
  const Vec3 nn = cross(b.vec() - a.vec(), c.vec() - a.vec());
  const double nlen = norm(nn);
  if (nlen < 1e-300) return 0.0;
  const double plane_dist = std::abs(dot(a.vec(), nn)) / nlen;
  const FlatTriangle t{a.vec(), b.vec(), c.vec()};
  const double coarse = apply_rule(t, plane_dist, f);
  return adapt_triangle(t, plane_dist, f, coarse, abs_tol, max_depth);
}

bool contains(const SphericalPolygon& poly, const UnitVec& p, double tol) {
  require_dimension(poly.dimension);
  const auto& v = poly.vertices;
  if (v.empty()) return false;
  if (poly.dimension == 1) {
    const double length = polygon_area(poly);
    double t = ccw_angle(v[0], p);
    if (t > 2.0 * kPi - tol) t -= 2.0 * kPi;
    return t >= -tol && t <= length + tol;
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (det3(v[k], v[(k + 1) % v.size()], p) < -tol) return false;
  }
  return true;
}

std::vector<PartitionCell> geodesic_partition(int level) {
  if (level < 0) throw Error(ErrorCode::InvalidInput, "partition level must be nonnegative");
  const double g = std::numbers::phi;
  const std::array<Vec3, 12> ico = {Vec3{-1, g, 0}, Vec3{1, g, 0},  Vec3{-1, -g, 0},
                                    Vec3{1, -g, 0}, Vec3{0, -1, g}, Vec3{0, 1, g},
                                    Vec3{0, -1, -g}, Vec3{0, 1, -g}, Vec3{g, 0, -1},
                                    Vec3{g, 0, 1},  Vec3{-g, 0, -1}, Vec3{-g, 0, 1}};
  constexpr std::array<std::array<int, 3>, 20> faces = {{
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1},
  }};

  using Tri = std::array<Vec3, 3>;
  std::vector<Tri> tris;
  tris.reserve(20);
  for (const auto& f : faces) {
    Tri t = {normalize(ico[f[0]]).vec(), normalize(ico[f[1]]).vec(), normalize(ico[f[2]]).vec()};
    if (det3(t[0], t[1], t[2]) < 0.0) std::swap(t[1], t[2]);
    tris.push_back(t);
  }
  for (int l = 0; l < level; ++l) {
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const Tri& t : tris) {
      const Vec3 ab = normalize(t[0] + t[1]).vec();
      const Vec3 bc = normalize(t[1] + t[2]).vec();
      const Vec3 ca = normalize(t[2] + t[0]).vec();
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }

  std::vector<PartitionCell> cells;
  cells.reserve(tris.size());
  for (const Tri& t : tris) {
    SphericalPolygon poly{2, {UnitVec::trusted(t[0]), UnitVec::trusted(t[1]),
                              UnitVec::trusted(t[2])}};
    const UnitVec rep = normalize(t[0] + t[1] + t[2]);
    const double area = polygon_area(poly);
    cells.push_back(PartitionCell{std::move(poly), rep, area});
  }
  return cells;
}

std::vector<PartitionCell> arc_partition(std::size_t count) {
  if (count == 0) throw Error(ErrorCode::InvalidInput, "arc partition needs at least one arc");
  std::vector<PartitionCell> cells;
  cells.reserve(count);
  const double step = 2.0 * kPi / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double a0 = step * static_cast<double>(k);
    const double a1 = a0 + step;
    const double mid = a0 + 0.5 * step;
    SphericalPolygon arc{1, {UnitVec::trusted({std::cos(a0), std::sin(a0), 0.0}),
                             UnitVec::trusted({std::cos(a1), std::sin(a1), 0.0})}};
    cells.push_back(
        PartitionCell{std::move(arc), UnitVec::trusted({std::cos(mid), std::sin(mid), 0.0}), step});
  }
  return cells;
}

}  // namespace gausskraft

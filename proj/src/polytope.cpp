#include "gausskraft/polytope.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_map>

namespace gausskraft {

namespace {

/// Adjacent hull faces whose normals differ by less than this are one facet.
constexpr double kFacetMergeAngle = 1e-9;

/// Orientation tolerance for points rescaled to max radius 1.
constexpr double kHullEps = 1e-12;

/// Minimum facet support distance (rescaled units) for an interior origin.
constexpr double kInteriorEps = 1e-12;

std::uint64_t edge_key(std::size_t a, std::size_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

std::size_t lookup(const std::unordered_map<std::uint64_t, std::size_t>& map, std::uint64_t key) {
  const auto it = map.find(key);
  if (it == map.end()) throw Error(ErrorCode::HullDegenerate, "hull surface is not closed");
  return it->second;
}

struct HullTri {
  std::array<std::size_t, 3> v;
  Vec3 normal;
  double offset;
};

HullTri make_tri(const std::vector<Vec3>& pts, std::size_t a, std::size_t b, std::size_t c) {
  const Vec3 n = normalize(cross(pts[b] - pts[a], pts[c] - pts[a])).vec();
  const double d = (dot(n, pts[a]) + dot(n, pts[b]) + dot(n, pts[c])) / 3.0;
  return HullTri{{a, b, c}, n, d};
}

/// Incremental convex hull. Points on or within kHullEps of an existing face
/// are not inserted, so earlier indices win ties.
std::vector<HullTri> incremental_hull(const std::vector<Vec3>& pts) {
  const std::size_t count = pts.size();
  if (count < 4) throw Error(ErrorCode::HullDegenerate, "need at least 4 points in 3-space");

  const std::size_t i0 = 0;
  auto argmax = [&](auto&& score) {
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double s = score(pts[i]);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    return std::pair{best, best_score};
  };
  const auto [i1, d1] = argmax([&](const Vec3& p) { return norm(p - pts[i0]); });
  if (d1 <= kHullEps) throw Error(ErrorCode::HullDegenerate, "all points coincide");
  const Vec3 axis = (pts[i1] - pts[i0]) / d1;
  const auto [i2, d2] = argmax([&](const Vec3& p) { return norm(cross(axis, p - pts[i0])); });
  if (d2 <= kHullEps) throw Error(ErrorCode::HullDegenerate, "all points are collinear");
  const Vec3 pn = normalize(cross(pts[i1] - pts[i0], pts[i2] - pts[i0])).vec();
  const auto [i3, d3] = argmax([&](const Vec3& p) { return std::abs(dot(pn, p - pts[i0])); });
  if (d3 <= kHullEps) throw Error(ErrorCode::HullDegenerate, "all points are coplanar");

  std::vector<HullTri> tris;
  std::vector<char> alive;
  std::unordered_map<std::uint64_t, std::size_t> edge_face;
  auto add_face = [&](const HullTri& t) {
    const std::size_t id = tris.size();
    tris.push_back(t);
    alive.push_back(1);
    for (int k = 0; k < 3; ++k) edge_face[edge_key(t.v[k], t.v[(k + 1) % 3])] = id;
  };
  const std::array<std::array<std::size_t, 4>, 4> simplex = {{
      {i0, i1, i2, i3}, {i0, i3, i1, i2}, {i1, i3, i2, i0}, {i0, i2, i3, i1}}};
  for (const auto& f : simplex) {
    HullTri t = make_tri(pts, f[0], f[1], f[2]);
    if (dot(t.normal, pts[f[3]]) - t.offset > 0.0) t = make_tri(pts, f[0], f[2], f[1]);
    add_face(t);
  }

  std::vector<double> dist;
  std::vector<char> visible;
  std::vector<std::size_t> region;
  std::vector<std::pair<std::size_t, std::size_t>> horizon;
  std::unordered_map<std::size_t, std::size_t> horizon_next;
  for (std::size_t p = 0; p < count; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    dist.assign(tris.size(), 0.0);
    std::size_t start = tris.size();
    double best = kHullEps;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!alive[t]) continue;
      dist[t] = dot(tris[t].normal, pts[p]) - tris[t].offset;
      if (dist[t] > best) {
        best = dist[t];
        start = t;
      }
    }
    if (start == tris.size()) continue;

    // Grow the visible region from the farthest face so it stays connected.
    visible.assign(tris.size(), 0);
    region.assign(1, start);
    visible[start] = 1;
    for (std::size_t q = 0; q < region.size(); ++q) {
      const HullTri& t = tris[region[q]];
      for (int k = 0; k < 3; ++k) {
        const std::size_t u = lookup(edge_face, edge_key(t.v[(k + 1) % 3], t.v[k]));
        if (!visible[u] && dist[u] > kHullEps) {
          visible[u] = 1;
          region.push_back(u);
        }
      }
    }
    // Faces hidden from the point must form one connected patch. Any other
    // hidden patch is enclosed by the region and within rounding of the
    // point's plane, so it joins the region.
    std::size_t anchor = tris.size();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (alive[t] && !visible[t] && (anchor == tris.size() || dist[t] < dist[anchor])) anchor = t;
    }
    if (anchor == tris.size()) throw Error(ErrorCode::HullDegenerate, "every face is visible");
    std::vector<char> hidden(tris.size(), 0);
    std::vector<std::size_t> stack = {anchor};
    hidden[anchor] = 1;
    while (!stack.empty()) {
      const HullTri& t = tris[stack.back()];
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        const std::size_t u = lookup(edge_face, edge_key(t.v[(k + 1) % 3], t.v[k]));
        if (!visible[u] && !hidden[u]) {
          hidden[u] = 1;
          stack.push_back(u);
        }
      }
    }
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (alive[t] && !visible[t] && !hidden[t]) {
        visible[t] = 1;
        region.push_back(t);
      }
    }

    horizon.clear();
    horizon_next.clear();
    for (std::size_t t : region) {
      for (int k = 0; k < 3; ++k) {
        const std::size_t a = tris[t].v[k];
        const std::size_t b = tris[t].v[(k + 1) % 3];
        if (!visible[lookup(edge_face, edge_key(b, a))]) {
          horizon.emplace_back(a, b);
          if (!horizon_next.emplace(a, b).second) {
            throw Error(ErrorCode::HullDegenerate, "visible region is not a disk");
          }
        }
      }
    }
    // The horizon must be one simple cycle.
    std::size_t steps = 0;
    for (std::size_t cur = horizon.front().first;;) {
      const auto it = horizon_next.find(cur);
      if (it == horizon_next.end()) {
        throw Error(ErrorCode::HullDegenerate, "open horizon");
      }
      cur = it->second;
      ++steps;
      if (cur == horizon.front().first || steps > horizon.size()) break;
    }
    if (steps != horizon.size()) {
      throw Error(ErrorCode::HullDegenerate, "visible region is not a disk");
    }

    for (std::size_t t : region) {
      alive[t] = 0;
      for (int k = 0; k < 3; ++k) edge_face.erase(edge_key(tris[t].v[k], tris[t].v[(k + 1) % 3]));
    }
    for (const auto& [a, b] : horizon) add_face(make_tri(pts, a, b, p));
  }

  std::vector<HullTri> out;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (alive[t]) out.push_back(tris[t]);
  }
  return out;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double ccw_turn(const Vec3& a, const Vec3& b) {
  double t = std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y);
  if (t < 0.0) t += 2.0 * std::numbers::pi;
  return t;
}

}  // namespace

ProblemInstance ProblemInstance::create(int dimension, std::vector<UnitVec> directions,
                                        std::vector<double> mu) {
  if (dimension != 1 && dimension != 2) {
    throw Error(ErrorCode::UnsupportedDimension, "dimension must be 1 or 2");
  }
  if (directions.size() != mu.size()) {
    throw Error(ErrorCode::InvalidInput, "directions and masses differ in length");
  }
  for (double m : mu) {
    if (!std::isfinite(m)) throw Error(ErrorCode::InvalidInput, "non-finite mass");
  }
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (dimension == 1) {
      const Vec3& d = directions[i];
      if (std::abs(d.z) > 1e-12) {
        throw Error(ErrorCode::InvalidInput, "direction " + std::to_string(i) + " is not planar");
      }
      directions[i] = normalize(Vec3{d.x, d.y, 0.0});
    }
  }
  for (std::size_t i = 0; i < directions.size(); ++i) {
    for (std::size_t j = i + 1; j < directions.size(); ++j) {
      if (norm(directions[i].vec() - directions[j].vec()) <= kMergeAngle) {
        throw Error(ErrorCode::InvalidInput, "directions " + std::to_string(i) + " and " +
                                                 std::to_string(j) + " coincide");
      }
    }
  }
  ProblemInstance inst;
  inst.dimension_ = dimension;
  inst.directions_ = std::move(directions);
  inst.mu_ = std::move(mu);
  return inst;
}

ProblemInstance ProblemInstance::with_mu(std::vector<double> mu) const {
  if (mu.size() != directions_.size()) {
    throw Error(ErrorCode::InvalidInput, "mass vector length mismatch");
  }
  ProblemInstance copy = *this;
  copy.mu_ = std::move(mu);
  return copy;
}

RadialPolytope RadialPolytope::build(const ProblemInstance& instance,
                                     std::vector<double> log_radii) {
  const std::size_t count = instance.size();
  if (log_radii.size() != count) {
    throw Error(ErrorCode::InvalidInput, "log_radii length does not match the instance");
  }
  for (double r : log_radii) {
    if (!std::isfinite(r)) throw Error(ErrorCode::InvalidInput, "non-finite log radius");
  }

  RadialPolytope P;
  P.instance_ = instance;
  P.log_radii_ = std::move(log_radii);
  P.log_scale_ = *std::max_element(P.log_radii_.begin(), P.log_radii_.end());
  P.scaled_points_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    P.scaled_points_[i] = std::exp(P.log_radii_[i] - P.log_scale_) * instance.direction(i).vec();
  }
  P.status_.assign(count, VertexStatus::Absorbed);
  const auto& pts = P.scaled_points_;

  if (instance.dimension() == 1) {
    if (count < 3) throw Error(ErrorCode::HullDegenerate, "need at least 3 points in the plane");
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
      if (pts[a].y != pts[b].y) return pts[a].y < pts[b].y;
      return a < b;
    });
    auto turn = [&](std::size_t o, std::size_t a, std::size_t b) {
      const Vec3 u = pts[a] - pts[o];
      const Vec3 w = pts[b] - pts[o];
      return u.x * w.y - u.y * w.x;
    };
    std::vector<std::size_t> chain(2 * count);
    std::size_t k = 0;
    for (std::size_t idx : order) {
      while (k >= 2 && turn(chain[k - 2], chain[k - 1], idx) <= kHullEps) --k;
      chain[k++] = idx;
    }
    for (std::size_t t = count - 1, lower = k + 1; t-- > 0;) {
      const std::size_t idx = order[t];
      while (k >= lower && turn(chain[k - 2], chain[k - 1], idx) <= kHullEps) --k;
      chain[k++] = idx;
    }
    chain.resize(k - 1);
    auto edge_normal = [&](std::size_t a, std::size_t b) {
      const Vec3 d = pts[b] - pts[a];
      return normalize(Vec3{d.y, -d.x, 0.0});
    };
    // Drop vertices whose two edges are parallel to merge tolerance.
    bool changed = true;
    while (changed && chain.size() >= 3) {
      changed = false;
      for (std::size_t j = 0; j < chain.size(); ++j) {
        const std::size_t m = chain.size();
        const UnitVec in = edge_normal(chain[(j + m - 1) % m], chain[j]);
        const UnitVec out = edge_normal(chain[j], chain[(j + 1) % m]);
        if (angular_distance(in, out) < kFacetMergeAngle) {
          chain.erase(chain.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
      }
    }
    if (chain.size() < 3) throw Error(ErrorCode::HullDegenerate, "all points are collinear");

    const std::size_t m = chain.size();
    P.origin_interior_ = true;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t a = chain[j];
      const std::size_t b = chain[(j + 1) % m];
      const UnitVec n = edge_normal(a, b);
      const double offset = std::max(dot(n, pts[a]), dot(n, pts[b]));
      P.facets_.push_back(Facet{n, offset, {a, b}});
      if (!(offset > kInteriorEps)) P.origin_interior_ = false;
      P.status_[a] = VertexStatus::HullVertex;
    }
    P.edge_count_ = m;
    P.cells_.resize(count);
    for (std::size_t i = 0; i < count; ++i) P.cells_[i] = NormalCell{i, {1, {}}, 0.0};
    if (P.origin_interior_) {
      for (std::size_t j = 0; j < m; ++j) {
        const Facet& in = P.facets_[(j + m - 1) % m];
        const Facet& out = P.facets_[j];
        NormalCell& cell = P.cells_[chain[j]];
        cell.polygon = SphericalPolygon{1, {in.normal, out.normal}};
        cell.area = ccw_turn(in.normal, out.normal);
      }
    }
    return P;
  }

  const std::vector<HullTri> tris = incremental_hull(pts);
  std::unordered_map<std::uint64_t, std::size_t> owner;
  owner.reserve(tris.size() * 3);
  std::vector<std::vector<std::size_t>> incident(count);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      owner[edge_key(tris[t].v[k], tris[t].v[(k + 1) % 3])] = t;
      incident[tris[t].v[k]].push_back(t);
    }
  }

  UnionFind uf(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t u = lookup(owner, edge_key(tris[t].v[(k + 1) % 3], tris[t].v[k]));
      if (angular_distance(tris[t].normal, tris[u].normal) < kFacetMergeAngle) uf.unite(t, u);
    }
  }
  std::vector<std::size_t> group(tris.size());
  std::unordered_map<std::size_t, std::size_t> group_id;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const std::size_t root = uf.find(t);
    auto [it, inserted] = group_id.emplace(root, group_id.size());
    group[t] = it->second;
  }
  const std::size_t group_count = group_id.size();

  std::vector<Vec3> weighted(group_count);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& v = tris[t].v;
    weighted[group[t]] += cross(pts[v[1]] - pts[v[0]], pts[v[2]] - pts[v[0]]);
  }

  // Walk the triangle fan around every vertex to get its incident facets in
  // counterclockwise order.
  std::vector<std::vector<std::size_t>> around(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (incident[i].empty()) continue;
    const std::size_t start = incident[i].front();
    std::size_t t = start;
    std::vector<std::size_t> seq;
    for (std::size_t guard = 0; guard <= incident[i].size(); ++guard) {
      const auto& v = tris[t].v;
      const int pos = v[0] == i ? 0 : (v[1] == i ? 1 : 2);
      seq.push_back(group[t]);
      const std::size_t next_vertex = v[(pos + 2) % 3];
      t = lookup(owner, edge_key(i, next_vertex));
      if (t == start) break;
    }
    std::vector<std::size_t> collapsed;
    for (std::size_t g : seq) {
      if (collapsed.empty() || collapsed.back() != g) collapsed.push_back(g);
    }
    while (collapsed.size() > 1 && collapsed.front() == collapsed.back()) collapsed.pop_back();
    if (collapsed.size() >= 3) {
      P.status_[i] = VertexStatus::HullVertex;
      around[i] = std::move(collapsed);
    }
  }

  P.facets_.resize(group_count);
  P.origin_interior_ = true;
  for (std::size_t g = 0; g < group_count; ++g) {
    P.facets_[g].normal = normalize(weighted[g]);
  }
  // Boundary cycle of each merged facet, restricted to hull vertices.
  std::vector<std::unordered_map<std::size_t, std::size_t>> next_on_boundary(group_count);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = tris[t].v[k];
      const std::size_t b = tris[t].v[(k + 1) % 3];
      if (group[lookup(owner, edge_key(b, a))] != group[t] &&
          !next_on_boundary[group[t]].emplace(a, b).second) {
        throw Error(ErrorCode::HullDegenerate, "merged facet boundary is not a simple cycle");
      }
    }
  }
  std::size_t degree_sum = 0;
  for (std::size_t g = 0; g < group_count; ++g) {
    Facet& f = P.facets_[g];
    const auto& nxt = next_on_boundary[g];
    std::size_t first = std::numeric_limits<std::size_t>::max();
    for (const auto& [a, b] : nxt) first = std::min(first, a);
    std::size_t cur = first;
    double offset = -std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    do {
      offset = std::max(offset, dot(f.normal, pts[cur]));
      if (P.status_[cur] == VertexStatus::HullVertex) f.vertices.push_back(cur);
      const auto it = nxt.find(cur);
      if (it == nxt.end() || ++steps > nxt.size()) {
        throw Error(ErrorCode::HullDegenerate, "merged facet boundary is not a simple cycle");
      }
      cur = it->second;
    } while (cur != first);
    if (steps != nxt.size()) {
      throw Error(ErrorCode::HullDegenerate, "merged facet boundary is not a simple cycle");
    }
    f.offset = offset;
    degree_sum += f.vertices.size();
    if (!(offset > kInteriorEps)) P.origin_interior_ = false;
  }
  P.edge_count_ = degree_sum / 2;

  P.cells_.resize(count);
  for (std::size_t i = 0; i < count; ++i) P.cells_[i] = NormalCell{i, {2, {}}, 0.0};
  if (P.origin_interior_) {
    for (std::size_t i = 0; i < count; ++i) {
      if (P.status_[i] != VertexStatus::HullVertex) continue;
      NormalCell& cell = P.cells_[i];
      for (std::size_t g : around[i]) cell.polygon.vertices.push_back(P.facets_[g].normal);
      cell.area = polygon_area(cell.polygon);
    }
  }
  return P;
}

double RadialPolytope::radius(std::size_t i) const { return std::exp(log_radii_.at(i)); }

Vec3 RadialPolytope::point(std::size_t i) const {
  return std::exp(log_scale_) * scaled_points_.at(i);
}

std::size_t RadialPolytope::hull_vertex_count() const {
  return static_cast<std::size_t>(
      std::count(status_.begin(), status_.end(), VertexStatus::HullVertex));
}

std::size_t RadialPolytope::edge_count() const { return edge_count_; }

void RadialPolytope::check_interior() const {
  if (!origin_interior_) {
    throw Error(ErrorCode::OriginNotInterior, "the origin is not strictly inside the hull");
  }
}

double RadialPolytope::support(const Vec3& n) const {
  check_interior();
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec3& q : scaled_points_) best = std::max(best, dot(q, n));
  return std::exp(log_scale_) * best;
}

double RadialPolytope::radial_function(const Vec3& x) const {
  check_interior();
  double best = 0.0;
  for (const Facet& f : facets_) best = std::max(best, dot(x, f.normal) / f.offset);
  return std::exp(log_scale_) / best;
}

double RadialPolytope::radial_from_support(std::size_t i) const {
  check_interior();
  const Vec3& x = instance_.direction(i);
  double best = 0.0;
  for (const Facet& f : facets_) best = std::max(best, dot(x, f.normal) / support(f.normal));
  return 1.0 / best;
}

const NormalCell& RadialPolytope::normal_cell(std::size_t i) const {
  check_interior();
  return cells_.at(i);
}

const std::vector<NormalCell>& RadialPolytope::normal_cells() const {
  check_interior();
  return cells_;
}

UnitVec gauss_from_subdifferential(const UnitVec& x, double rho, const Vec3& v) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidInput, "radius must be positive");
  if (std::abs(dot(v, x)) > 1e-10 * std::max(1.0, norm(v))) {
    throw Error(ErrorCode::NonTangent, "subdifferential vector is not tangent at x");
  }
  const Vec3 m = rho * x.vec() - v;
  return UnitVec::trusted(m / std::sqrt(dot(v, v) + rho * rho));
}

Vec3 subdifferential_from_normal(const UnitVec& x, double rho, const UnitVec& normal) {
  const double c = dot(normal, x);
  if (!(c > 0.0)) throw Error(ErrorCode::NonPositiveDot, "normal is not in the open hemisphere of x");
  const Vec3 v = rho * x.vec() - (rho / c) * normal.vec();
  // Remove the rounding residue along x so the result is exactly tangent.
  return v - dot(v, x) * x.vec();
}

std::string export_obj(const RadialPolytope& polytope) {
  if (polytope.dimension() != 2) {
    throw Error(ErrorCode::UnsupportedDimension, "OBJ export needs a polytope in 3-space");
  }
  if (!polytope.origin_interior()) {
    throw Error(ErrorCode::OriginNotInterior, "the origin is not strictly inside the hull");
  }
  std::string out;
  std::vector<std::size_t> obj_index(polytope.size(), 0);
  std::size_t next = 1;
  char buf[128];
  for (std::size_t i = 0; i < polytope.size(); ++i) {
    if (polytope.status(i) != VertexStatus::HullVertex) continue;
    obj_index[i] = next++;
    const Vec3 p = polytope.point(i);
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
    out += buf;
  }
  for (const Facet& f : polytope.facets()) {
    for (std::size_t k = 1; k + 1 < f.vertices.size(); ++k) {
      std::snprintf(buf, sizeof buf, "f %zu %zu %zu\n", obj_index[f.vertices[0]],
                    obj_index[f.vertices[k]], obj_index[f.vertices[k + 1]]);
      out += buf;
    }
  }
  return out;
}

}  // namespace gausskraft

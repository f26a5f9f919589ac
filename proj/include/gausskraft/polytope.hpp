#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gausskraft/sphgeom.hpp"
#include "gausskraft/vec.hpp"

namespace gausskraft {

/// Directions x_i on S^n with prescribed curvature masses μ_i.
///
/// Construction normalizes the directions and rejects mismatched lengths,
/// non-finite values and coincident directions. Mass balance and positivity are
/// not enforced here; the admissibility checks report them.
class ProblemInstance {
 public:
  ProblemInstance() = default;

  static ProblemInstance create(int dimension, std::vector<UnitVec> directions,
                                std::vector<double> mu);

  int dimension() const { return dimension_; }
  std::size_t size() const { return directions_.size(); }
  const std::vector<UnitVec>& directions() const { return directions_; }
  const UnitVec& direction(std::size_t i) const { return directions_[i]; }
  const std::vector<double>& mu() const { return mu_; }
  double mu(std::size_t i) const { return mu_[i]; }

  /// Same directions, different masses.
  ProblemInstance with_mu(std::vector<double> mu) const;

 private:
  int dimension_ = 2;
  std::vector<UnitVec> directions_;
  std::vector<double> mu_;
};

enum class VertexStatus { HullVertex, Absorbed };

/// A face of the hull (an edge when n = 1). `vertices` lists the incident
/// hull vertices counterclockwise as seen from outside; `offset` is the support
/// distance <p, normal> of the face plane in the rescaled coordinates (largest
/// radius 1).
struct Facet {
  UnitVec normal = UnitVec::trusted({0, 0, 1});
  double offset = 0.0;
  std::vector<std::size_t> vertices;
};

/// Normals of supporting planes at vertex `source`: the image of x_source under
/// the generalized Gauss map. Empty for absorbed points.
struct NormalCell {
  std::size_t source = 0;
  SphericalPolygon polygon;
  double area = 0.0;

  bool empty() const { return polygon.empty(); }
};

/// Convex hull of the points ρ_i·x_i with ρ_i = exp(log_radii[i]).
///
/// Immutable after build. Internally the points are stored rescaled so the
/// largest radius is 1. Facets whose
/// normals agree within 1e-9 rad are merged, and a point touching fewer than
/// n + 1 distinct merged facets is reported as Absorbed.
class RadialPolytope {
 public:
  /// Throws HullDegenerate when the points do not span a full-dimensional hull.
  static RadialPolytope build(const ProblemInstance& instance, std::vector<double> log_radii);

  const ProblemInstance& instance() const { return instance_; }
  int dimension() const { return instance_.dimension(); }
  std::size_t size() const { return log_radii_.size(); }
  const std::vector<double>& log_radii() const { return log_radii_; }
  double radius(std::size_t i) const;
  Vec3 point(std::size_t i) const;
  VertexStatus status(std::size_t i) const { return status_[i]; }
  const std::vector<VertexStatus>& statuses() const { return status_; }
  std::size_t hull_vertex_count() const;
  const std::vector<Facet>& facets() const { return facets_; }
  bool origin_interior() const { return origin_interior_; }

  /// Number of edges of the merged facet structure (n = 2); equals the
  /// facet count for n = 1.
  std::size_t edge_count() const;

  /// h(N) = max_i ρ_i<x_i, N>. Throws OriginNotInterior.
  double support(const Vec3& n) const;

  /// 1 / sup_N <x_i, N>/h(N), the sup taken over facet normals.
  double radial_from_support(std::size_t i) const;

  /// Radial function of the hull in an arbitrary direction.
  double radial_function(const Vec3& x) const;

  const NormalCell& normal_cell(std::size_t i) const;
  const std::vector<NormalCell>& normal_cells() const;

 private:
  void check_interior() const;

  ProblemInstance instance_;
  std::vector<double> log_radii_;
  double log_scale_ = 0.0;
  std::vector<Vec3> scaled_points_;
  std::vector<VertexStatus> status_;
  std::vector<Facet> facets_;
  std::vector<NormalCell> cells_;
  std::size_t edge_count_ = 0;
  bool origin_interior_ = false;
};

/// Unit normal (−v + ρx)/sqrt(|v|² + ρ²) from a subdifferential vector v of the
/// radial function at x. Throws NonTangent when |<v, x>| > 1e-10·max(1, |v|).
UnitVec gauss_from_subdifferential(const UnitVec& x, double rho, const Vec3& v);

/// Inverse of gauss_from_subdifferential for an outward normal with
/// <normal, x> > 0: v = ρx − ρ·normal/<normal, x>.
Vec3 subdifferential_from_normal(const UnitVec& x, double rho, const UnitVec& normal);

/// Wavefront OBJ text with `v` lines for hull vertices and fan-triangulated
/// `f` lines, counterclockwise from outside. Throws UnsupportedDimension for n = 1.
std::string export_obj(const RadialPolytope& polytope);

}  // namespace gausskraft

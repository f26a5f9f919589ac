#pragma once

#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "gausskraft/error.hpp"
#include "gausskraft/vec.hpp"

namespace gausskraft {

inline constexpr double kDefaultQuadTol = 1e-10;

/// Points closer than this (radians) are considered the same point.
inline constexpr double kMergeAngle = 1e-10;

/// Total measure of the unit n-sphere: 2π for n = 1, 4π for n = 2.
double sphere_measure(int dimension);

/// Largest possible |∫ log<x,N> dσ(N)| over a subset of the hemisphere
/// <x,N> > 0: 2π on S², π·log 2 on S¹.
double hemisphere_log_bound(int dimension);

UnitVec normalize(const Vec3& v);
UnitVec normalize(std::span<const double> coords);

/// A geodesically convex region of S^n.
///
/// For n = 2 the vertices are listed counterclockwise as seen from outside the
/// sphere and consecutive vertices are joined by minor great-circle arcs.
/// For n = 1 the region is the arc running counterclockwise (in the xy-plane)
/// from vertices[0] to vertices[1].
struct SphericalPolygon {
  int dimension = 2;
  std::vector<UnitVec> vertices;

  bool empty() const { return vertices.empty(); }
};

/// Area in steradians (n = 2) or arc length in radians (n = 1).
///
/// The n = 2 value is the spherical excess Σθ_k − (m − 2)π, where θ_k is the
/// interior angle measured to the left of the direction of travel. Throws
/// DegeneratePolygon for fewer than three vertices, repeated consecutive
/// vertices or crossing edges.
double polygon_area(const SphericalPolygon& poly);

/// ∫_region log<apex, N> dσ(N) to absolute tolerance `tol`.
///
/// The n = 2 path works in polar coordinates about the apex: each edge of the
/// region bounds a geodesic triangle (apex, A, B) whose radial integral has
/// the closed form −1 + c − c·log c (c the cosine of the polar radius of the
/// edge), leaving a smooth one-dimensional integral over the polar angle.
/// This stays exact up to the boundary of the hemisphere where the integrand
/// has a logarithmic singularity.
double integrate_log_dot(const UnitVec& apex, const SphericalPolygon& region,
                         double tol = kDefaultQuadTol);

/// Same integral as integrate_log_dot for n = 2, computed by fan triangulation
/// from the normalized vertex average and adaptive 7-point triangle
/// quadrature. Much slower near the hemisphere boundary; kept as an
/// independent route.
double integrate_log_dot_subdivision(const UnitVec& apex, const SphericalPolygon& region,
                                     double tol = kDefaultQuadTol, int max_depth = 16);

/// Adaptive integral of f over the geodesic triangle (a, b, c). Nodes come from
/// a degree-5 seven-point rule on the flat triangle abc, projected radially,
/// with the Jacobian d/|p|³ of the projection (d = distance of the flat
/// triangle's plane from the origin). The piece whose parent and children
/// estimates differ most is split 4-to-1 until the differences sum to at most
/// abs_tol. Throws ToleranceNotReached if a piece deeper than max_depth needs
/// splitting.
double integrate_over_triangle(const UnitVec& a, const UnitVec& b, const UnitVec& c,
                               const std::function<double(const UnitVec&)>& f, double abs_tol,
                               int max_depth = 16);

/// True when `p` lies in the closed region, with angular slack `tol`.
bool contains(const SphericalPolygon& poly, const UnitVec& p, double tol = 1e-12);

struct PartitionCell {
  SphericalPolygon cell;
  UnitVec representative;
  double area = 0.0;
};

/// Icosahedral geodesic partition of S²: 20·4^level spherical triangles.
/// Children of cell c at the next level are cells 4c, 4c+1, 4c+2, 4c+3.
std::vector<PartitionCell> geodesic_partition(int level);

/// Uniform partition of S¹ into `count` arcs starting at angle 0.
std::vector<PartitionCell> arc_partition(std::size_t count);

}  // namespace gausskraft

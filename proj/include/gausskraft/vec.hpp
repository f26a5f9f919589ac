#pragma once

#include <cmath>
#include <span>

namespace gausskraft {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Scalar triple product det[a b c].
constexpr double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// A point of the unit sphere. Only constructible through normalization, so
/// every instance has unit length up to rounding.
class UnitVec {
 public:
  /// Throws Error(ZeroVector) when |v| <= 1e-300.
  static UnitVec from(const Vec3& v);

  /// Accepts 2 or 3 coordinates; a 2-vector is embedded with z = 0.
  static UnitVec from(std::span<const double> coords);

  /// Wraps a vector already known to be unit length. Caller's responsibility.
  static constexpr UnitVec trusted(const Vec3& v) { return UnitVec(v); }

  constexpr const Vec3& vec() const { return v_; }
  constexpr operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)
  constexpr double x() const { return v_.x; }
  constexpr double y() const { return v_.y; }
  constexpr double z() const { return v_.z; }

  friend constexpr bool operator==(const UnitVec&, const UnitVec&) = default;

 private:
  constexpr explicit UnitVec(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

/// Great-circle distance in radians, accurate for nearly equal and nearly
/// antipodal arguments.
inline double angular_distance(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

}  // namespace gausskraft

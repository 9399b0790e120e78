#pragma once

#include <cmath>
#include <numbers>

namespace belltest {

/// A plane angle. Stored in radians; constructed and displayed in degrees
/// wherever data crosses a file or CLI boundary.
///
/// Polarization angles are identified modulo pi: chi and chi + pi describe
/// the same polarization plane, so canonical() reduces into [0, pi).
class Angle {
 public:
  constexpr Angle() = default;

  static constexpr Angle from_radians(double r) { return Angle(r); }
  static constexpr Angle from_degrees(double d) {
    return Angle(d * std::numbers::pi / 180.0);
  }

  constexpr double radians() const { return rad_; }
  constexpr double degrees() const { return rad_ * 180.0 / std::numbers::pi; }

  /// Representative in [0, pi).
  Angle canonical() const {
    double r = std::fmod(rad_, std::numbers::pi);
    if (r < 0.0) r += std::numbers::pi;
    if (r >= std::numbers::pi) r = 0.0;
    return Angle(r);
  }

  /// Representative in [0, pi/2]: canonicalize, then reflect angles above
  /// 90 degrees to 180 degrees minus the angle.
  Angle folded() const {
    double r = canonical().radians();
    if (r > std::numbers::pi / 2.0) r = std::numbers::pi - r;
    return Angle(r);
  }

 private:
  explicit constexpr Angle(double r) : rad_(r) {}
  double rad_ = 0.0;
};

inline Angle canonicalize(Angle a) { return a.canonical(); }
inline Angle fold_angle(Angle a) { return a.folded(); }

/// Circular distance between two polarization angles (period pi).
inline double polarization_distance(Angle a, Angle b) {
  double d = std::fabs(a.canonical().radians() - b.canonical().radians());
  return std::min(d, std::numbers::pi - d);
}

/// True when two angles describe the same polarization plane.
inline bool same_polarization(Angle a, Angle b, double tol_rad = 1e-9) {
  return polarization_distance(a, b) <= tol_rad;
}

}  // namespace belltest

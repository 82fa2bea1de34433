#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cec {

// Hamilton quaternion w + x*i + y*j + z*k in double precision. Pure
// quaternions (w == 0) double as 3-vectors; an RGB pixel maps to
// r*i + g*j + b*k.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_, double y_, double z_)
      : w(w_), x(x_), y(y_), z(z_) {}

  static constexpr Quaternion pure(double x_, double y_, double z_) {
    return Quaternion(0.0, x_, y_, z_);
  }

  constexpr bool operator==(const Quaternion&) const = default;

  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w;
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w;
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }

  constexpr Quaternion& operator*=(double s) {
    w *= s;
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator-(const Quaternion& q) { return {-q.w, -q.x, -q.y, -q.z}; }
constexpr Quaternion operator*(Quaternion q, double s) { return q *= s; }
constexpr Quaternion operator*(double s, Quaternion q) { return q *= s; }

// Hamilton product; non-commutative.
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quaternion conj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline double norm(const Quaternion& q) {
  return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
}

// R = e^(axis*angle) = cos(angle) + axis*sin(angle). Sandwiching with R
// rotates a pure quaternion by 2*angle about the axis.
struct RotationOperator {
  Quaternion r;     // unit quaternion
  Quaternion axis;  // pure, unit norm
  double angle = 0.0;
};

inline RotationOperator rotation_operator(const Quaternion& axis, double angle) {
  if (axis.w != 0.0) {
    throw std::invalid_argument("rotation axis must be a pure quaternion");
  }
  if (std::abs(norm(axis) - 1.0) > 1e-9) {
    throw std::invalid_argument("rotation axis must have unit norm");
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {Quaternion{c, axis.x * s, axis.y * s, axis.z * s}, axis, angle};
}

// R * v * R~ for pure v; the result rotates v by 2*angle about the axis and
// stays pure up to rounding.
inline Quaternion sandwich_rotate(const RotationOperator& rot, const Quaternion& v) {
  if (v.w != 0.0) {
    throw std::invalid_argument("sandwich_rotate requires a pure quaternion");
  }
  return rot.r * v * conj(rot.r);
}

// Rotation about the achromatic (gray) axis (i+j+k)/sqrt(3) by pi/2, the
// operator every color filter in this library is built from. Gray pixels lie
// on the axis and are left fixed.
inline RotationOperator gray_axis_rotation() {
  const double s = 1.0 / std::sqrt(3.0);
  return rotation_operator(Quaternion::pure(s, s, s), std::numbers::pi / 2.0);
}

}  // namespace cec

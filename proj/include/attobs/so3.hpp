// Core SO(3) primitives: hat/vee maps, exponential, projection, metrics,
// Euler conversions.  Everything operates on Eigen double matrices; the
// Rotation and UnitVec3 wrappers validate their invariants on construction
// so downstream code can assume well-formed inputs.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace attobs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

/// Frobenius-norm distance of M^T M from the identity.
inline double orthonormality_defect(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).norm();
}

/// Hat map: a -> a_x with a_x * b == a.cross(b).
inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
      -a.y(), a.x(), 0.0;
  return s;
}

/// Antisymmetric part (A - A^T) / 2.
inline Mat3 skew_part(const Mat3& a) { return 0.5 * (a - a.transpose()); }

/// Inverse of the hat map.  Rejects inputs that are not skew-symmetric
/// beyond tolerance; use vex(skew_part(A)) to project first.
inline Vec3 vex(const Mat3& s, double tol = 1e-9) {
  const double defect = (s + s.transpose()).norm();
  if (defect > tol * std::max(1.0, s.norm())) {
    throw std::invalid_argument("vex: not skew-symmetric (defect " +
                                std::to_string(defect) + ")");
  }
  return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

/// vex(A - A^T): the unvalidated workhorse for correction terms, equal to
/// 2 * vex(skew_part(A)) without the symmetry check.
inline Vec3 vex2(const Mat3& a) {
  return Vec3(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1));
}

/// Proper rotation matrix.  The checked constructor enforces orthonormality
/// and det = +1 to 1e-9; unchecked() skips validation for integrator hot
/// loops, which re-project periodically instead.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  explicit Rotation(const Mat3& m) : m_(m) {
    const double defect = orthonormality_defect(m);
    if (defect > 1e-9 || std::abs(m.determinant() - 1.0) > 1e-9) {
      throw std::invalid_argument(
          "not a rotation matrix (orthonormality defect " +
          std::to_string(defect) + ", det " +
          std::to_string(m.determinant()) + ")");
    }
  }

  static Rotation identity() { return Rotation(); }

  static Rotation unchecked(const Mat3& m) {
    Rotation r;
    r.m_ = m;
    return r;
  }

  const Mat3& matrix() const { return m_; }

  Rotation transposed() const { return unchecked(m_.transpose()); }

  Rotation operator*(const Rotation& rhs) const {
    return unchecked(m_ * rhs.m_);
  }

  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  Mat3 m_;
};

/// Unit-norm 3-vector (|v| = 1 within 1e-9 on construction).
class UnitVec3 {
 public:
  UnitVec3() : v_(1.0, 0.0, 0.0) {}

  explicit UnitVec3(const Vec3& v) : v_(v) {
    if (std::abs(v.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("not a unit vector (norm " +
                                  std::to_string(v.norm()) + ")");
    }
  }

  /// Normalizes an arbitrary vector; rejects near-zero input.
  static UnitVec3 normalized(const Vec3& v) {
    const double n = v.norm();
    if (n < 1e-12) {
      throw std::invalid_argument("cannot normalize near-zero vector");
    }
    UnitVec3 u;
    u.v_ = v / n;
    return u;
  }

  const Vec3& vec() const { return v_; }

 private:
  Vec3 v_;
};

/// Exponential map so(3) -> SO(3) via Rodrigues' formula.  For |a| < 1e-8
/// the sin/cos coefficients switch to their second-order Taylor expansions
/// to avoid 0/0; the result is exact to machine precision at a = 0.
inline Rotation exp_so3(const Vec3& a) {
  const double th2 = a.squaredNorm();
  const double th = std::sqrt(th2);
  double c1, c2;  // sin(th)/th and (1-cos(th))/th^2
  if (th < 1e-8) {
    c1 = 1.0 - th2 / 6.0;
    c2 = 0.5 - th2 / 24.0;
  } else {
    c1 = std::sin(th) / th;
    c2 = (1.0 - std::cos(th)) / th2;
  }
  const Mat3 ax = skew(a);
  return Rotation::unchecked(Mat3::Identity() + c1 * ax + c2 * (ax * ax));
}

/// Normalized distance from the identity: sqrt(tr(I - R) / 4) in [0, 1],
/// equal to |sin(theta/2)| for a rotation by angle theta.
inline double dist_to_identity(const Rotation& r) {
  const double t = (Mat3::Identity() - r.matrix()).trace() / 4.0;
  return std::sqrt(std::clamp(t, 0.0, 1.0));
}

/// Geodesic angle between two rotations, in radians.
inline double angular_distance(const Rotation& a, const Rotation& b) {
  const double d = dist_to_identity(Rotation::unchecked(
      a.matrix().transpose() * b.matrix()));
  return 2.0 * std::asin(std::clamp(d, 0.0, 1.0));
}

/// Intrinsic Z-Y-X Euler angles (yaw, pitch, roll).  gimbal_lock flags
/// |pitch| = pi/2, where yaw and roll merge; roll is then reported as 0.
struct EulerZyx {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  bool gimbal_lock = false;
};

inline EulerZyx euler_zyx(const Rotation& r) {
  const Mat3& m = r.matrix();
  EulerZyx e;
  const double s = std::clamp(-m(2, 0), -1.0, 1.0);
  e.pitch = std::asin(s);
  if (std::abs(s) > 1.0 - 1e-12) {
    e.gimbal_lock = true;
    e.roll = 0.0;
    e.yaw = std::atan2(-m(0, 1), m(1, 1));
  } else {
    e.yaw = std::atan2(m(1, 0), m(0, 0));
    e.roll = std::atan2(m(2, 1), m(2, 2));
  }
  return e;
}

inline Rotation rotation_from_euler(double yaw, double pitch, double roll) {
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  Mat3 m;
  m << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp,     cp * sr,               cp * cr;
  return Rotation::unchecked(m);
}

/// Nearest rotation to M in Frobenius norm (orthogonal Procrustes with
/// determinant correction).  Rejects near-singular inputs, for which the
/// projection is not unique.
inline Rotation project_so3(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (sv(1) < 1e-12 * std::max(1.0, sv(0))) {
    throw std::invalid_argument("degenerate projection");
  }
  const Mat3 uvt = svd.matrixU() * svd.matrixV().transpose();
  Mat3 d = Mat3::Identity();
  d(2, 2) = uvt.determinant() < 0.0 ? -1.0 : 1.0;
  return Rotation::unchecked(svd.matrixU() * d * svd.matrixV().transpose());
}

}  // namespace attobs

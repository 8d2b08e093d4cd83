#pragma once

#include <Eigen/Dense>

namespace ornithopter {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline const Vec3 kE1 = Vec3::UnitX();
inline const Vec3 kE2 = Vec3::UnitY();
inline const Vec3 kE3 = Vec3::UnitZ();

// Skew-symmetric matrix such that hat(v) * w == v.cross(w).
Mat3 hat(const Vec3& v);

// Inverse of hat on the skew part of m.
Vec3 vee(const Mat3& m);

// Element-wise signum with sgn(0) == 0.
double sgn(double x);

// Orthogonal projector onto the plane normal to z: I - z z^T / |z|^2.
// Throws ZeroVector when |z| < 1e-12.
Mat3 project(const Vec3& z);

// Element of SO(3). The invariant |R^T R - I|_inf <= kOrthonormalityTol is
// restored by Gram-Schmidt whenever an operation pushes it past the tolerance.
class Rotation {
 public:
  static constexpr double kOrthonormalityTol = 1e-9;

  Rotation() : m_(Mat3::Identity()) {}

  // Wraps m, repairing it onto SO(3) if it drifted. Throws std::invalid_argument
  // for non-finite input or a matrix with det <= 0 (not repairable).
  static Rotation from_matrix(const Mat3& m);

  static Rotation identity() { return Rotation(); }

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose(), Unchecked{}); }

  Rotation operator*(const Rotation& other) const;
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  // max |(R^T R - I)_jk|
  double orthonormality_error() const;

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  Mat3 m_;
};

// Gram-Schmidt of the columns of m; the result has det +1 if det(m) > 0.
Mat3 orthonormalize(const Mat3& m);

// Rodrigues formula I + sin(angle) u^ + (1 - cos(angle)) u^2 with u = axis/|axis|.
// Throws ZeroAxis when |axis| < 1e-12 and angle != 0.
Rotation exp_so3(const Vec3& axis, double angle);

// Exponential of a rotation vector (axis * angle). Zero maps to the identity.
Rotation exp_so3(const Vec3& rotation_vector);

// Inverse right Jacobian of the exponential map: for A(t) = A0 exp(u(t)^),
// the body rate Omega satisfies du/dt = dexp_inv(u) * Omega.
Mat3 dexp_inv(const Vec3& u);

}  // namespace ornithopter

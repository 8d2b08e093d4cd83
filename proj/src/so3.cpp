#include "ornithopter/so3.hpp"

#include <cmath>
#include <stdexcept>

#include "ornithopter/errors.hpp"

namespace ornithopter {

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  return Vec3(0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)),
              0.5 * (m(1, 0) - m(0, 1)));
}

double sgn(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

Mat3 project(const Vec3& z) {
  const double n2 = z.squaredNorm();
  if (!(std::sqrt(n2) >= 1e-12)) {
    throw ZeroVector("project: vector norm below 1e-12");
  }
  return Mat3::Identity() - z * z.transpose() / n2;
}

Mat3 orthonormalize(const Mat3& m) {
  Vec3 c0 = m.col(0).normalized();
  Vec3 c1 = m.col(1) - c0.dot(m.col(1)) * c0;
  c1.normalize();
  Vec3 c2 = c0.cross(c1);
  Mat3 r;
  r.col(0) = c0;
  r.col(1) = c1;
  r.col(2) = c2;
  return r;
}

Rotation Rotation::from_matrix(const Mat3& m) {
  if (!m.allFinite()) throw std::invalid_argument("Rotation: non-finite matrix");
  if (m.determinant() <= 0.0) {
    throw std::invalid_argument("Rotation: determinant must be positive");
  }
  Rotation r(m, Unchecked{});
  if (r.orthonormality_error() > kOrthonormalityTol) {
    r.m_ = orthonormalize(m);
  }
  return r;
}

Rotation Rotation::operator*(const Rotation& other) const {
  Rotation r(m_ * other.m_, Unchecked{});
  if (r.orthonormality_error() > kOrthonormalityTol) r.m_ = orthonormalize(r.m_);
  return r;
}

double Rotation::orthonormality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Rotation exp_so3(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n < 1e-12) {
    if (angle == 0.0) return Rotation::identity();
    throw ZeroAxis("exp_so3: rotation axis has zero length");
  }
  const Mat3 u = hat(axis / n);
  const Mat3 m = Mat3::Identity() + std::sin(angle) * u + (1.0 - std::cos(angle)) * u * u;
  return Rotation::from_matrix(m);
}

Rotation exp_so3(const Vec3& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle == 0.0) return Rotation::identity();
  return exp_so3(rotation_vector / angle, angle);
}

Mat3 dexp_inv(const Vec3& u) {
  const double th = u.norm();
  const Mat3 uh = hat(u);
  double c2;
  if (th < 1e-4) {
    c2 = 1.0 / 12.0 + th * th / 720.0;
  } else {
    c2 = 1.0 / (th * th) - (1.0 + std::cos(th)) / (2.0 * th * std::sin(th));
  }
  return Mat3::Identity() + 0.5 * uh + c2 * uh * uh;
}

}  // namespace ornithopter

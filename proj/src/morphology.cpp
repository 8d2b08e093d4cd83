#include "ornithopter/morphology.hpp"

#include <sstream>
#include <stdexcept>

namespace ornithopter {

namespace {

void require_spd(const Mat3& m, const std::string& what) {
  if (!m.allFinite()) throw std::invalid_argument(what + " has non-finite entries");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(what + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(m);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument(what + " is not positive definite");
  }
}

}  // namespace

double Morphology::total_mass() const {
  double m = body_mass;
  for (const auto& w : wings) m += w.mass;
  return m;
}

MorphologyReport Morphology::validate() const {
  if (!(body_mass > 0.0)) throw std::invalid_argument("body_mass must be positive");
  if (!(gravity >= 0.0)) throw std::invalid_argument("gravity must be non-negative");
  require_spd(body_inertia, "body_inertia");
  MorphologyReport report;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const auto& w = wings[i];
    const std::string name = "wing " + std::to_string(i + 1);
    if (!(w.mass > 0.0)) throw std::invalid_argument(name + " mass must be positive");
    require_spd(w.inertia, name + " inertia");
    w.shape.validate();

    const double bound = w.mass * w.shape.span_length * w.shape.span_length;
    const double largest = Eigen::SelfAdjointEigenSolver<Mat3>(w.inertia).eigenvalues().maxCoeff();
    if (largest > bound) {
      std::ostringstream msg;
      msg << name << " inertia " << largest << " kg m^2 exceeds the rigid-body bound m_i l_i^2 = "
          << bound << " kg m^2 by a factor " << largest / bound;
      report.warnings.push_back(msg.str());
    }
    for (const auto& [a, b] : clamped_intervals(w.shape)) {
      std::ostringstream msg;
      msg << name << " chord clamped to zero on r in [" << a << ", " << b << "] m";
      report.diagnostics.push_back(msg.str());
    }
  }
  return report;
}

InertiaMode parse_inertia_mode(const std::string& name) {
  if (name == "paper_literal") return InertiaMode::PaperLiteral;
  if (name == "rescaled") return InertiaMode::Rescaled;
  throw std::invalid_argument("unknown inertia_mode '" + name +
                              "' (expected paper_literal or rescaled)");
}

std::string to_string(InertiaMode mode) {
  return mode == InertiaMode::PaperLiteral ? "paper_literal" : "rescaled";
}

Morphology default_dragonfly(InertiaMode mode) {
  Morphology m;
  m.body_mass = 5.4483e-5;
  m.body_inertia = 1e-8 * Vec3(0.0109, 0.2847, 0.2847).asDiagonal();
  m.gravity = 9.81;

  const std::vector<double> fore_le{-0.873, 5.648, -13.85, 15.16, -6.111, -0.579, 1.789, 0.122};
  const std::vector<double> fore_te{2.133, -12.12, 26.20, -26.25, -11.47, -0.728, -0.429, -0.096};
  const std::vector<double> hind_le{-0.214, 1.8389, -6.153, 9.981, -7.857, 2.625, 0.051, 0.140};
  const std::vector<double> hind_te{0.183, -1.372, 3.574, -3.016, -2.210, 5.627, -3.164, -0.082};

  for (std::size_t i = 0; i < kWingCount; ++i) {
    const bool fore = i < 2;
    const double s = side_parity(i);
    WingBody& w = m.wings[i];
    w.mass = fore ? 1.9069e-6 : 2.3126e-6;
    w.joint_offset = 1e-3 * Vec3(fore ? 2.71 : -2.71, s * 3.8, 0.0);
    w.com_offset = fore ? 1e-3 * Vec3(7.978, s * 4.975, 0.0) : 1e-3 * Vec3(1.175, s * 5.89, 0.0);
    Mat3 j;
    if (fore) {
      j << 0.2303, s * 0.1902, 0.0,
           s * 0.1902, 0.1731, 0.0,
           0.0, 0.0, 0.4034;
    } else {
      j << 0.4164, s * 0.0693, 0.0,
           s * 0.0693, 0.0326, 0.0,
           0.0, 0.0, 0.4489;
    }
    if (mode == InertiaMode::Rescaled) {
      // Rescaled tensor is a CoM inertia; move it to the joint.
      const Vec3& k = w.com_offset;
      w.inertia = 1e-3 * kRescaledInertiaFactor * j +
                  w.mass * (k.squaredNorm() * Mat3::Identity() - k * k.transpose());
    } else {
      w.inertia = 1e-3 * j;
    }

    w.shape.lambda_le = fore ? fore_le : hind_le;
    w.shape.lambda_te = fore ? fore_te : hind_te;
    w.shape.span_length = fore ? 0.0185 : 0.025;
    w.shape.chord_scale = 0.01;
    w.shape.side_parity = static_cast<int>(s);
    w.shape.fit_quality_le = 0.006;
    w.shape.fit_quality_te = fore ? 0.028 : 0.012;
  }
  return m;
}

}  // namespace ornithopter

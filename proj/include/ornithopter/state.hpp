#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "ornithopter/so3.hpp"

namespace ornithopter {

inline constexpr std::size_t kWingCount = 4;

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Vec18 = Eigen::Matrix<double, 18, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat18 = Eigen::Matrix<double, 18, 18>;
using Torques = std::array<Vec3, kWingCount>;

// Index of the first entry of a 3-block inside an 18-vector ordered as
// (p_dot, Omega_B, Omega_1, Omega_2, Omega_3, Omega_4).
inline constexpr Eigen::Index kTranslationBlock = 0;
inline constexpr Eigen::Index kBodyRateBlock = 3;
inline constexpr Eigen::Index wing_block(std::size_t wing) {
  return 6 + 3 * static_cast<Eigen::Index>(wing);
}

// Configuration (p, A_B, A_1..A_4) and group velocity xi of the multibody.
// p and p_dot live in the inertial frame, Omega_B in the body frame and
// Omega_i in the frame of wing i. Wing attitudes are relative to the body.
struct SystemState {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Rotation body_attitude;
  std::array<Rotation, kWingCount> wing_attitudes;
  Vec3 velocity = Vec3::Zero();
  Vec3 body_rate = Vec3::Zero();
  std::array<Vec3, kWingCount> wing_rates{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                          Vec3::Zero()};

  Vec18 xi() const {
    Vec18 x;
    x.segment<3>(kTranslationBlock) = velocity;
    x.segment<3>(kBodyRateBlock) = body_rate;
    for (std::size_t i = 0; i < kWingCount; ++i) x.segment<3>(wing_block(i)) = wing_rates[i];
    return x;
  }

  void set_xi(const Vec18& x) {
    velocity = x.segment<3>(kTranslationBlock);
    body_rate = x.segment<3>(kBodyRateBlock);
    for (std::size_t i = 0; i < kWingCount; ++i) wing_rates[i] = x.segment<3>(wing_block(i));
  }

  bool all_finite() const;
};

// Main-body state of the reduced model; v is the inertial velocity.
struct BodyState {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Rotation attitude;
  Vec3 velocity = Vec3::Zero();
  Vec3 body_rate = Vec3::Zero();

  Vec6 xi() const {
    Vec6 x;
    x << velocity, body_rate;
    return x;
  }
};

inline bool SystemState::all_finite() const {
  if (!std::isfinite(t) || !position.allFinite() || !velocity.allFinite() ||
      !body_rate.allFinite() || !body_attitude.matrix().allFinite()) {
    return false;
  }
  for (std::size_t i = 0; i < kWingCount; ++i) {
    if (!wing_attitudes[i].matrix().allFinite() || !wing_rates[i].allFinite()) return false;
  }
  return true;
}

}  // namespace ornithopter

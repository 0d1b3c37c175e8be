#pragma once

#include <optional>
#include <span>
#include <vector>

#include "baroatt/geom3.hpp"
#include "baroatt/sim.hpp"

namespace baroatt {

struct AttitudeConfig {
  double k_z = 80.0;  // 1/s
  double k_m = 25.0;  // 1/s
  Vec3 m_inertial = Vec3(1.0, 0.0, 1.0).normalized();
  // Reorthonormalize the estimate every this many steps; 0 disables.
  int reorth_every = 0;

  /// Throws std::invalid_argument on k_z <= 0, k_m < 0, non-unit m_inertial or
  /// m_inertial parallel to e3 (heading unobservable).
  void validate() const;
};

/// Innovation sigma_R. The magnetometer term is dropped when m_b is absent.
/// The inertial field is projected onto the horizontal plane and the body
/// field onto the plane orthogonal to zhat, both with the regularized
/// projection, so a vanishing zhat yields a zero correction.
Vec3 correction(const RotationMatrix& rhat, const Vec3& zhat, const std::optional<Vec3>& m_b,
                const AttitudeConfig& cfg);

/// Rhat exp((omega - Rhat^T sigma_R)^x T).
RotationMatrix step(const RotationMatrix& rhat, const Vec3& omega, const Vec3& zhat,
                    const std::optional<Vec3>& m_b, const AttitudeConfig& cfg, double T);

class AttitudeObserver {
 public:
  AttitudeObserver(const AttitudeConfig& cfg, const RotationMatrix& r0, double T);

  void step(const Vec3& omega, const Vec3& zhat, const std::optional<Vec3>& m_b);

  const RotationMatrix& estimate() const { return rhat_; }
  long steps() const { return steps_; }

 private:
  AttitudeConfig cfg_;
  RotationMatrix rhat_;
  double T_;
  long steps_ = 0;
};

/// Runs the observer over IMU-rate streams. zhat[k] is the tilt estimate valid
/// at imu[k].t; a magnetometer sample is used at step k only if its timestamp
/// lies within T/2 of imu[k].t. Returns imu.size() + 1 estimates, the first
/// being r0. Throws std::invalid_argument if zhat and imu lengths differ.
std::vector<RotationMatrix> run_attitude(std::span<const ImuSample> imu, std::span<const MagSample> mag,
                                         std::span<const Vec3> zhat, const RotationMatrix& r0,
                                         const AttitudeConfig& cfg, double T);

}  // namespace baroatt

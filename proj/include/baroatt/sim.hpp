#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "baroatt/geom3.hpp"

namespace baroatt {

inline constexpr double kGravity = 9.81;

struct AltitudeState {
  double h = 0.0;     // m, along e3
  double hdot = 0.0;  // m/s
};

// Closed-form reference trajectory used in the simulation study.
Vec3 truth_omega(double t);
AltitudeState truth_altitude(double t);
/// Inertial acceleration dv/dt of the reference trajectory.
Vec3 truth_inertial_accel(double t);
/// Body-frame specific acceleration R^T (a_I(t) - g e3).
Vec3 truth_body_accel(double t, const RotationMatrix& r);

/// Kinematic scenario: body angular rate and the inertial motion along e3.
/// Horizontal position is never integrated; only h enters the output map.
class Scenario {
 public:
  virtual ~Scenario() = default;
  virtual Vec3 omega(double t) const = 0;
  /// Inertial acceleration dv/dt. Its e3 component must equal d2h/dt2.
  virtual Vec3 inertial_accel(double t) const = 0;
  virtual AltitudeState altitude(double t) const = 0;
};

class ReferenceScenario final : public Scenario {
 public:
  Vec3 omega(double t) const override { return truth_omega(t); }
  Vec3 inertial_accel(double t) const override { return truth_inertial_accel(t); }
  AltitudeState altitude(double t) const override { return truth_altitude(t); }
};

/// Zero specific acceleration (a == 0): the vehicle falls freely while rotating
/// with the reference angular rate. Used as the no-excitation control case.
class FreeFallScenario final : public Scenario {
 public:
  FreeFallScenario(double h0 = 0.0, double hdot0 = 0.0) : h0_(h0), hdot0_(hdot0) {}
  Vec3 omega(double t) const override { return truth_omega(t); }
  Vec3 inertial_accel(double) const override { return Vec3(0.0, 0.0, kGravity); }
  AltitudeState altitude(double t) const override {
    return {h0_ + hdot0_ * t + 0.5 * kGravity * t * t, hdot0_ + kGravity * t};
  }

 private:
  double h0_;
  double hdot0_;
};

struct TruthSample {
  double t = 0.0;
  RotationMatrix r;
  double h = 0.0;
  double hdot = 0.0;
  Vec3 omega = Vec3::Zero();       // body frame, rad/s
  Vec3 a = Vec3::Zero();           // body-frame specific acceleration, m/s^2
  Vec3 a_inertial = Vec3::Zero();  // dv/dt, m/s^2

  Vec3 tilt() const { return r.matrix().row(2).transpose(); }  // R^T e3
};

/// Sampled ground truth on a uniform grid, plus evaluation between grid points
/// using the same midpoint exponential step as the integrator.
class TruthTrajectory {
 public:
  TruthTrajectory(std::shared_ptr<const Scenario> scenario, double dt,
                  std::vector<TruthSample> samples);

  const std::vector<TruthSample>& samples() const { return samples_; }
  const Scenario& scenario() const { return *scenario_; }
  double dt() const { return dt_; }
  double duration() const { return samples_.back().t; }

  /// Truth at an arbitrary time in [0, duration]; exact copy at grid points.
  TruthSample at(double t) const;

 private:
  std::shared_ptr<const Scenario> scenario_;
  double dt_;
  std::vector<TruthSample> samples_;
};

/// Integrates dR/dt = R omega^x with R(t+dt) = R(t) exp(dt * omega(t + dt/2)).
/// Reorthonormalizes every `reorth_every` steps (0 disables).
TruthTrajectory integrate_truth(std::shared_ptr<const Scenario> scenario, double duration, double dt,
                                const RotationMatrix& r0 = RotationMatrix::identity(),
                                int reorth_every = 1000);

struct NoiseConfig {
  double std_accel = 0.05;  // m/s^2
  double std_gyro = 0.05;   // rad/s
  double std_mag = 0.02;    // unitless, per axis before renormalization
  double var_baro = 1e-6;   // m^2 (standard deviation 0.001 m)
  double rate_imu = 200.0;  // Hz
  double rate_baro = 5.0;   // Hz
  double rate_mag = 200.0;  // Hz
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on negative stds, non-positive rates or
  /// rate_mag > rate_imu.
  void validate() const;
  NoiseConfig noise_free() const;
};

struct ImuSample {
  double t = 0.0;
  Vec3 a = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

struct BaroSample {
  double t = 0.0;
  double y_b = 0.0;
};

struct MagSample {
  double t = 0.0;
  Vec3 m_b = Vec3::UnitX();
};

struct SensorStreams {
  std::vector<ImuSample> imu;
  std::vector<BaroSample> baro;
  std::vector<MagSample> mag;
  NoiseConfig noise;
};

/// Deterministic in noise.seed. Each stream draws from its own generator so
/// changing one rate does not reshuffle another stream's noise.
SensorStreams synthesize_measurements(const TruthTrajectory& truth, const NoiseConfig& noise,
                                      const Vec3& m_inertial);

}  // namespace baroatt

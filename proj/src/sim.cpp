#include "baroatt/sim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace baroatt {

namespace {

const double kSqrt3 = std::sqrt(3.0);

TruthSample make_sample(const Scenario& scenario, double t, const RotationMatrix& r) {
  TruthSample s;
  s.t = t;
  s.r = r;
  const AltitudeState alt = scenario.altitude(t);
  s.h = alt.h;
  s.hdot = alt.hdot;
  s.omega = scenario.omega(t);
  s.a_inertial = scenario.inertial_accel(t);
  s.a = r.matrix().transpose() * (s.a_inertial - kGravity * Vec3::UnitZ());
  return s;
}

// Number of whole periods of `rate` that fit in `duration`, tolerant to
// floating-point representation of the product.
long whole_periods(double duration, double rate) {
  return static_cast<long>(std::floor(duration * rate + 1e-9));
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

class GaussianSource {
 public:
  GaussianSource(std::uint64_t seed, std::uint32_t stream) : engine_(stream_engine(seed, stream)) {}

  double draw(double stddev) {
    if (stddev == 0.0) return 0.0;
    return stddev * unit_(engine_);
  }

  Vec3 draw3(double stddev) {
    const double x = draw(stddev);
    const double y = draw(stddev);
    const double z = draw(stddev);
    return Vec3(x, y, z);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> unit_{0.0, 1.0};
};

}  // namespace

Vec3 truth_omega(double t) {
  using std::numbers::pi;
  return Vec3(0.4 * std::sin(0.5 * t), 0.5 * std::sin(0.3 * t + pi / 4), 0.3 * std::sin(0.7 * t + pi / 3));
}

AltitudeState truth_altitude(double t) {
  return {-5.0 * kSqrt3 * std::sin(2.0 * t) / 4.0, -5.0 * kSqrt3 * std::cos(2.0 * t) / 2.0};
}

Vec3 truth_inertial_accel(double t) {
  return Vec3(-std::cos(t), -std::sin(2.0 * t), 5.0 * kSqrt3 * std::sin(2.0 * t));
}

Vec3 truth_body_accel(double t, const RotationMatrix& r) {
  return r.matrix().transpose() * (truth_inertial_accel(t) - kGravity * Vec3::UnitZ());
}

TruthTrajectory::TruthTrajectory(std::shared_ptr<const Scenario> scenario, double dt,
                                 std::vector<TruthSample> samples)
    : scenario_(std::move(scenario)), dt_(dt), samples_(std::move(samples)) {
  if (!scenario_ || samples_.empty() || !(dt_ > 0.0)) {
    throw std::invalid_argument("TruthTrajectory: empty trajectory");
  }
}

TruthSample TruthTrajectory::at(double t) const {
  if (t < -1e-9 || t > duration() + 1e-9) {
    throw std::out_of_range("TruthTrajectory::at: time outside trajectory");
  }
  const double pos = t / dt_;
  auto k = static_cast<std::size_t>(std::llround(pos));
  if (std::abs(pos - static_cast<double>(k)) < 1e-7 && k < samples_.size()) return samples_[k];
  k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= samples_.size()) k = samples_.size() - 1;
  const double tau = t - samples_[k].t;
  const RotationMatrix r = samples_[k].r * exp_so3(tau * scenario_->omega(samples_[k].t + 0.5 * tau));
  return make_sample(*scenario_, t, r);
}

TruthTrajectory integrate_truth(std::shared_ptr<const Scenario> scenario, double duration, double dt,
                                const RotationMatrix& r0, int reorth_every) {
  if (!(dt > 0.0) || duration < dt) {
    throw std::invalid_argument("integrate_truth: need dt > 0 and duration >= dt");
  }
  const long steps = std::lround(duration / dt);
  std::vector<TruthSample> samples;
  samples.reserve(static_cast<std::size_t>(steps) + 1);
  RotationMatrix r = r0;
  samples.push_back(make_sample(*scenario, 0.0, r));
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    r = r * exp_so3(dt * scenario->omega(t + 0.5 * dt));
    if (reorth_every > 0 && (k + 1) % reorth_every == 0) r = reorthonormalize(r.matrix());
    samples.push_back(make_sample(*scenario, static_cast<double>(k + 1) * dt, r));
  }
  return TruthTrajectory(std::move(scenario), dt, std::move(samples));
}

void NoiseConfig::validate() const {
  if (std_accel < 0.0 || std_gyro < 0.0 || std_mag < 0.0 || var_baro < 0.0) {
    throw std::invalid_argument("NoiseConfig: noise levels must be non-negative");
  }
  if (!(rate_imu > 0.0) || !(rate_baro > 0.0) || !(rate_mag > 0.0)) {
    throw std::invalid_argument("NoiseConfig: sample rates must be positive");
  }
  if (rate_mag > rate_imu) {
    throw std::invalid_argument("NoiseConfig: magnetometer rate exceeds IMU rate");
  }
}

NoiseConfig NoiseConfig::noise_free() const {
  NoiseConfig n = *this;
  n.std_accel = n.std_gyro = n.std_mag = n.var_baro = 0.0;
  return n;
}

SensorStreams synthesize_measurements(const TruthTrajectory& truth, const NoiseConfig& noise,
                                      const Vec3& m_inertial) {
  noise.validate();
  if (m_inertial.norm() == 0.0) {
    throw std::invalid_argument("synthesize_measurements: inertial field vector is zero");
  }
  const double imu_period = 1.0 / noise.rate_imu;
  const double stride = imu_period / truth.dt();
  if (stride < 1.0 - 1e-9 || std::abs(stride - std::round(stride)) > 1e-6) {
    throw std::invalid_argument("synthesize_measurements: truth grid must be an integer refinement of the IMU grid");
  }

  SensorStreams out;
  out.noise = noise;
  const double duration = truth.duration();

  GaussianSource imu_noise(noise.seed, 1);
  const long n_imu = whole_periods(duration, noise.rate_imu);
  out.imu.reserve(static_cast<std::size_t>(n_imu) + 1);
  for (long k = 0; k <= n_imu; ++k) {
    const TruthSample s = truth.at(static_cast<double>(k) * imu_period);
    ImuSample m;
    m.t = s.t;
    m.a = s.a + imu_noise.draw3(noise.std_accel);
    m.omega = s.omega + imu_noise.draw3(noise.std_gyro);
    out.imu.push_back(m);
  }

  GaussianSource baro_noise(noise.seed, 2);
  const double baro_std = std::sqrt(noise.var_baro);
  const long n_baro = whole_periods(duration, noise.rate_baro);
  out.baro.reserve(static_cast<std::size_t>(n_baro));
  for (long j = 1; j <= n_baro; ++j) {
    const double t = static_cast<double>(j) / noise.rate_baro;
    out.baro.push_back({t, truth.scenario().altitude(t).h + baro_noise.draw(baro_std)});
  }

  GaussianSource mag_noise(noise.seed, 3);
  const long n_mag = whole_periods(duration, noise.rate_mag);
  out.mag.reserve(static_cast<std::size_t>(n_mag) + 1);
  for (long j = 0; j <= n_mag; ++j) {
    const double t = static_cast<double>(j) / noise.rate_mag;
    const TruthSample s = truth.at(t);
    const Vec3 m = s.r.matrix().transpose() * m_inertial + mag_noise.draw3(noise.std_mag);
    out.mag.push_back({t, m.normalized()});
  }
  return out;
}

}  // namespace baroatt

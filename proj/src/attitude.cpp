#include "baroatt/attitude.hpp"

#include <cmath>
#include <stdexcept>

namespace baroatt {

void AttitudeConfig::validate() const {
  if (!(k_z > 0.0)) throw std::invalid_argument("AttitudeConfig: k_z must be positive");
  if (!(k_m >= 0.0)) throw std::invalid_argument("AttitudeConfig: k_m must be non-negative");
  if (std::abs(m_inertial.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("AttitudeConfig: inertial field must be a unit vector");
  }
  if (proj_reg(Vec3::UnitZ(), m_inertial).norm() < 1e-6) {
    throw std::invalid_argument("AttitudeConfig: inertial field parallel to e3");
  }
  if (reorth_every < 0) throw std::invalid_argument("AttitudeConfig: reorth_every must be >= 0");
}

Vec3 correction(const RotationMatrix& rhat, const Vec3& zhat, const std::optional<Vec3>& m_b,
                const AttitudeConfig& cfg) {
  const Vec3 e3 = Vec3::UnitZ();
  Vec3 sigma = cfg.k_z * e3.cross(rhat * zhat);
  if (m_b && cfg.k_m != 0.0) {
    const Vec3 m_i_bar = proj_reg(e3, cfg.m_inertial);
    const Vec3 m_b_bar = proj_reg(zhat, *m_b);
    sigma += cfg.k_m * m_i_bar.cross(rhat * m_b_bar);
  }
  return sigma;
}

RotationMatrix step(const RotationMatrix& rhat, const Vec3& omega, const Vec3& zhat,
                    const std::optional<Vec3>& m_b, const AttitudeConfig& cfg, double T) {
  const Vec3 sigma = correction(rhat, zhat, m_b, cfg);
  return rhat * exp_so3(T * (omega - rhat.matrix().transpose() * sigma));
}

AttitudeObserver::AttitudeObserver(const AttitudeConfig& cfg, const RotationMatrix& r0, double T)
    : cfg_(cfg), rhat_(r0), T_(T) {
  cfg_.validate();
  if (!(T > 0.0)) throw std::invalid_argument("AttitudeObserver: T must be positive");
}

void AttitudeObserver::step(const Vec3& omega, const Vec3& zhat, const std::optional<Vec3>& m_b) {
  rhat_ = baroatt::step(rhat_, omega, zhat, m_b, cfg_, T_);
  ++steps_;
  if (cfg_.reorth_every > 0 && steps_ % cfg_.reorth_every == 0) rhat_ = reorthonormalize(rhat_.matrix());
}

std::vector<RotationMatrix> run_attitude(std::span<const ImuSample> imu, std::span<const MagSample> mag,
                                         std::span<const Vec3> zhat, const RotationMatrix& r0,
                                         const AttitudeConfig& cfg, double T) {
  if (imu.size() != zhat.size()) {
    throw std::invalid_argument("run_attitude: tilt stream length does not match IMU stream");
  }
  AttitudeObserver obs(cfg, r0, T);
  std::vector<RotationMatrix> out;
  out.reserve(imu.size() + 1);
  out.push_back(r0);
  std::size_t next_mag = 0;
  for (std::size_t k = 0; k < imu.size(); ++k) {
    while (next_mag < mag.size() && mag[next_mag].t < imu[k].t - 0.5 * T) ++next_mag;
    std::optional<Vec3> m_b;
    if (next_mag < mag.size() && std::abs(mag[next_mag].t - imu[k].t) <= 0.5 * T) {
      m_b = mag[next_mag].m_b;
      ++next_mag;
    }
    obs.step(imu[k].omega, zhat[k], m_b);
    out.push_back(obs.estimate());
  }
  return out;
}

}  // namespace baroatt

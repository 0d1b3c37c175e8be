#include "baroatt/riccati.hpp"

#include <cmath>
#include <stdexcept>

namespace baroatt {

namespace {

bool is_spd(const Matrix5& m) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) return false;
  return Eigen::LLT<Matrix5>(m).info() == Eigen::Success;
}

Matrix5 symmetrized(const Matrix5& p) { return 0.5 * (p + p.transpose()); }

}  // namespace

void RiccatiConfig::validate() const {
  if (!is_spd(Q)) throw std::invalid_argument("RiccatiConfig: Q must be symmetric positive definite");
  if (!is_spd(P0)) throw std::invalid_argument("RiccatiConfig: P0 must be symmetric positive definite");
  if (!(M > 0.0)) throw std::invalid_argument("RiccatiConfig: M must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("RiccatiConfig: T must be positive");
}

OutputRow output_matrix() {
  OutputRow c = OutputRow::Zero();
  c(0) = 1.0;
  return c;
}

Vector5 input_matrix() {
  Vector5 b = Vector5::Zero();
  b(1) = 1.0;
  return b;
}

Matrix5 build_A(const Vec3& a, const Vec3& omega) {
  Matrix5 m = Matrix5::Zero();
  m(0, 1) = 1.0;
  m.block<1, 3>(1, 2) = a.transpose();
  m.block<3, 3>(2, 2) = -skew(omega);
  return m;
}

RotationMatrix phi22(const Vec3& omega, double T) {
  const double rate = omega.norm();
  const double angle = rate * T;
  const Mat3 w = skew(omega);
  double s;  // sin(angle) / rate
  double c;  // (1 - cos(angle)) / rate^2
  if (angle < 1e-7) {
    const double a2 = angle * angle;
    s = T * (1.0 - a2 / 6.0);
    c = T * T * (0.5 - a2 / 24.0);
  } else {
    s = std::sin(angle) / rate;
    c = (1.0 - std::cos(angle)) / (rate * rate);
  }
  return RotationMatrix::unchecked(Mat3::Identity() - s * w + c * w * w);
}

Matrix5 discrete_A(const Vec3& a, const Vec3& omega, double T) {
  Matrix5 ad = Matrix5::Zero();
  ad(0, 0) = 1.0;
  ad(0, 1) = T;
  ad(1, 1) = 1.0;
  ad.block<1, 3>(0, 2) = 0.5 * T * T * a.transpose();
  ad.block<1, 3>(1, 2) = T * a.transpose();
  ad.block<3, 3>(2, 2) = phi22(omega, T).matrix();
  return ad;
}

Vector5 discrete_B(double T) {
  Vector5 b = Vector5::Zero();
  b(0) = 0.5 * T * T;
  b(1) = T;
  return b;
}

Estimate predict(const State5& x, const Covariance5& p, const Vec3& a, const Vec3& omega,
                 const RiccatiConfig& cfg) {
  const Matrix5 ad = discrete_A(a, omega, cfg.T);
  Estimate out;
  out.x = State5(ad * x.vector() + discrete_B(cfg.T) * cfg.gravity);
  out.P = ad * p * ad.transpose() + cfg.Q * cfg.T;
  return out;
}

Estimate correct(const State5& x_minus, const Covariance5& p_minus, double y_b, const RiccatiConfig& cfg) {
  if (!(cfg.M > 0.0)) throw std::invalid_argument("correct: barometer variance must be positive");
  const OutputRow c = output_matrix();
  const double innovation_var = (c * p_minus * c.transpose())(0, 0) + cfg.M;
  const Vector5 k = p_minus * c.transpose() / innovation_var;
  const double innovation = y_b - (c * x_minus.vector())(0, 0);

  Estimate out;
  out.x = State5(x_minus.vector() + k * innovation);
  const Matrix5 i_kc = Matrix5::Identity() - k * c;
  if (cfg.joseph_form) {
    out.P = i_kc * p_minus * i_kc.transpose() + cfg.M * k * k.transpose();
  } else {
    out.P = i_kc * p_minus;
  }
  out.P = symmetrized(out.P);
  return out;
}

Matrix5 cre_rhs(const Covariance5& p, const Matrix5& a, const RiccatiConfig& cfg) {
  const OutputRow c = output_matrix();
  return a * p + p * a.transpose() - p * c.transpose() * c * p / cfg.M + cfg.Q;
}

RiccatiObserver::RiccatiObserver(const RiccatiConfig& cfg, const State5& x0, const Covariance5& p0, double t0)
    : cfg_(cfg), est_{x0, p0}, t_(t0) {
  cfg_.validate();
  if (!is_spd(p0)) throw std::invalid_argument("RiccatiObserver: initial covariance must be SPD");
}

void RiccatiObserver::step(const ImuSample& imu, const std::optional<BaroSample>& baro) {
  if (last_imu_t_ && !(imu.t > *last_imu_t_)) {
    throw std::invalid_argument("RiccatiObserver::step: IMU timestamp regression");
  }
  const double horizon = imu.t + cfg_.T;
  if (baro && std::abs(baro->t - horizon) > 0.5 * cfg_.T) {
    throw std::invalid_argument("RiccatiObserver::step: barometer sample not aligned with this IMU step");
  }
  est_ = predict(est_.x, est_.P, imu.a, imu.omega, cfg_);
  ++predictions_;
  if (baro) {
    est_ = correct(est_.x, est_.P, baro->y_b, cfg_);
    ++corrections_;
  }
  est_.P = symmetrized(est_.P);
  last_imu_t_ = imu.t;
  t_ = horizon;
}

Estimate integrate_continuous_observer(const ContinuousSignals& signals, const Estimate& initial,
                                       const RiccatiConfig& cfg, double t0, double t1, double dt) {
  if (!(dt > 0.0) || t1 < t0) throw std::invalid_argument("integrate_continuous_observer: bad time span");
  const OutputRow c = output_matrix();
  const Vector5 b = input_matrix();

  struct Deriv {
    Vector5 dx;
    Matrix5 dp;
  };
  auto rhs = [&](double t, const Vector5& x, const Matrix5& p) {
    const Matrix5 a = build_A(signals.a(t), signals.omega(t));
    const Vector5 k = p * c.transpose() / cfg.M;
    const double innovation = signals.y(t) - (c * x)(0, 0);
    return Deriv{a * x + b * cfg.gravity + k * innovation, cre_rhs(p, a, cfg)};
  };

  Vector5 x = initial.x.vector();
  Matrix5 p = initial.P;
  const long steps = std::lround((t1 - t0) / dt);
  if (steps == 0) return initial;
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (long i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    const Deriv k1 = rhs(t, x, p);
    const Deriv k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1.dx, p + 0.5 * h * k1.dp);
    const Deriv k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2.dx, p + 0.5 * h * k2.dp);
    const Deriv k4 = rhs(t + h, x + h * k3.dx, p + h * k3.dp);
    x += h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    p += h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    p = symmetrized(p);
  }
  return {State5(x), p};
}

}  // namespace baroatt

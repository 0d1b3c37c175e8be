#pragma once

#include <functional>
#include <optional>

#include "baroatt/geom3.hpp"
#include "baroatt/sim.hpp"

namespace baroatt {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;
using Covariance5 = Matrix5;
using OutputRow = Eigen::Matrix<double, 1, 5>;

/// Riccati observer state [h, hdot, z]. The tilt part is not constrained to
/// the unit sphere.
class State5 {
 public:
  State5() : x_(Vector5::Zero()) {}
  explicit State5(const Vector5& x) : x_(x) {}
  State5(double h, double hdot, const Vec3& z) {
    x_ << h, hdot, z;
  }

  double h() const { return x_(0); }
  double hdot() const { return x_(1); }
  Vec3 z() const { return x_.tail<3>(); }
  const Vector5& vector() const { return x_; }

 private:
  Vector5 x_;
};

struct RiccatiConfig {
  Matrix5 Q = 10.0 * Matrix5::Identity();
  double M = 1e-6;  // barometer noise variance, m^2
  Covariance5 P0 = Vector5(64.0, 64.0, 0.25, 0.25, 0.25).asDiagonal();
  double T = 0.005;  // IMU period, s
  double gravity = kGravity;
  bool joseph_form = false;

  /// Throws std::invalid_argument unless Q and P0 are symmetric positive
  /// definite, M > 0 and T > 0.
  void validate() const;
};

struct Estimate {
  State5 x;
  Covariance5 P;
};

OutputRow output_matrix();
Vector5 input_matrix();

/// Continuous-time state matrix for the (h, hdot, z) model.
Matrix5 build_A(const Vec3& a, const Vec3& omega);

/// Exact transition of dphi/dt = -omega^x phi over T for constant omega.
RotationMatrix phi22(const Vec3& omega, double T);

/// First-order discrete state matrix with the exact tilt block.
Matrix5 discrete_A(const Vec3& a, const Vec3& omega, double T);
Vector5 discrete_B(double T);

/// x- = Ad x + Bd g, P- = Ad P Ad^T + Q T.
Estimate predict(const State5& x, const Covariance5& p, const Vec3& a, const Vec3& omega,
                 const RiccatiConfig& cfg);

/// Barometer update, followed by symmetrization of P. Throws
/// std::invalid_argument if cfg.M <= 0.
Estimate correct(const State5& x_minus, const Covariance5& p_minus, double y_b, const RiccatiConfig& cfg);

/// A P + P A^T - P C^T M^-1 C P + Q.
Matrix5 cre_rhs(const Covariance5& p, const Matrix5& a, const RiccatiConfig& cfg);

/// Discrete correction-prediction observer driven at the IMU rate.
class RiccatiObserver {
 public:
  RiccatiObserver(const RiccatiConfig& cfg, const State5& x0, const Covariance5& p0, double t0 = 0.0);
  RiccatiObserver(const RiccatiConfig& cfg, const State5& x0, double t0 = 0.0)
      : RiccatiObserver(cfg, x0, cfg.P0, t0) {}

  /// Predicts over [imu.t, imu.t + T] and, if a barometer sample is given,
  /// corrects at imu.t + T. The barometer time must lie within T/2 of the
  /// prediction horizon. Throws std::invalid_argument on timestamp regression
  /// or misaligned barometer samples.
  void step(const ImuSample& imu, const std::optional<BaroSample>& baro = std::nullopt);

  const State5& state() const { return est_.x; }
  const Covariance5& covariance() const { return est_.P; }
  double time() const { return t_; }
  long predictions() const { return predictions_; }
  long corrections() const { return corrections_; }

 private:
  RiccatiConfig cfg_;
  Estimate est_;
  double t_;
  std::optional<double> last_imu_t_;
  long predictions_ = 0;
  long corrections_ = 0;
};

/// Signals for the continuous-time observer: IMU inputs and barometer output
/// as functions of time.
struct ContinuousSignals {
  std::function<Vec3(double)> a;
  std::function<Vec3(double)> omega;
  std::function<double(double)> y;
};

/// Integrates the continuous observer dx/dt = A x + B g + K (y - C x) jointly
/// with the CRE by classical RK4 with step dt from t0 to t1.
Estimate integrate_continuous_observer(const ContinuousSignals& signals, const Estimate& initial,
                                       const RiccatiConfig& cfg, double t0, double t1, double dt);

}  // namespace baroatt

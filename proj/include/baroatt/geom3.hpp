#pragma once

#include <Eigen/Dense>

namespace baroatt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Element of SO(3). Construction from a raw matrix is validated against the
/// orthogonality and determinant tolerances; products are not re-validated,
/// so long chains should be passed through reorthonormalize().
class RotationMatrix {
 public:
  static constexpr double kTolerance = 1e-9;

  RotationMatrix() : m_(Mat3::Identity()) {}

  /// Throws std::invalid_argument if ||M^T M - I|| > tol or |det M - 1| > tol.
  explicit RotationMatrix(const Mat3& m, double tol = kTolerance);

  static RotationMatrix identity() { return RotationMatrix(); }

  /// Wraps a matrix that is known to be a rotation (exp map output, products
  /// of rotations). No validation.
  static RotationMatrix unchecked(const Mat3& m) {
    RotationMatrix r;
    r.m_ = m;
    return r;
  }

  const Mat3& matrix() const { return m_; }
  RotationMatrix transpose() const { return unchecked(m_.transpose()); }

  /// Frobenius norm of R^T R - I.
  double orthogonality_error() const;

  RotationMatrix operator*(const RotationMatrix& rhs) const { return unchecked(m_ * rhs.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  Mat3 m_;
};

/// Antisymmetric matrix with skew(u) * v == u.cross(v).
Mat3 skew(const Vec3& u);

/// Inverse of skew(). Throws std::invalid_argument if S is not antisymmetric
/// within tol (max-abs of S + S^T).
Vec3 vex(const Mat3& s, double tol = 1e-9);

/// Rodrigues closed form, exp(skew(theta)).
RotationMatrix exp_so3(const Vec3& theta);

/// |u|^2 v - u (u^T v). Vanishes smoothly as u -> 0.
Vec3 proj_reg(const Vec3& u, const Vec3& v);

/// trace(I - R Rhat^T), in [0, 4].
double attitude_error(const RotationMatrix& r, const RotationMatrix& rhat);

struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  // Set when |pitch| is within the lock margin of pi/2. Roll is then forced to
  // zero and the whole heading is reported as yaw.
  bool gimbal_lock = false;
};

/// Intrinsic Z-Y-X: R = Rz(yaw) Ry(pitch) Rx(roll).
EulerAngles euler_zyx(const RotationMatrix& r, double lock_margin = 1e-6);
RotationMatrix rotation_from_euler_zyx(double roll, double pitch, double yaw);

/// Nearest rotation in the Frobenius sense (orthogonal Procrustes via SVD).
/// Throws std::domain_error if the input has det <= 0.
RotationMatrix reorthonormalize(const Mat3& m);

}  // namespace baroatt

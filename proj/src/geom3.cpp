#include "baroatt/geom3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace baroatt {

namespace {
// Below this angle sin(x)/x and (1-cos x)/x^2 use their Taylor expansions.
constexpr double kSmallAngle = 1e-7;
}  // namespace

RotationMatrix::RotationMatrix(const Mat3& m, double tol) : m_(m) {
  if (!m.allFinite()) throw std::invalid_argument("RotationMatrix: non-finite entries");
  if (orthogonality_error() > tol) {
    throw std::invalid_argument("RotationMatrix: matrix is not orthogonal");
  }
  if (std::abs(m.determinant() - 1.0) > tol) {
    throw std::invalid_argument("RotationMatrix: determinant is not +1");
  }
}

double RotationMatrix::orthogonality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Mat3 skew(const Vec3& u) {
  Mat3 s;
  // clang-format off
  s <<  0.0,  -u.z(),  u.y(),
        u.z(),  0.0,  -u.x(),
       -u.y(),  u.x(),  0.0;
  // clang-format on
  return s;
}

Vec3 vex(const Mat3& s, double tol) {
  if ((s + s.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("vex: matrix is not antisymmetric");
  }
  return Vec3(0.5 * (s(2, 1) - s(1, 2)), 0.5 * (s(0, 2) - s(2, 0)), 0.5 * (s(1, 0) - s(0, 1)));
}

RotationMatrix exp_so3(const Vec3& theta) {
  const double angle = theta.norm();
  const Mat3 k = skew(theta);
  double a;  // sin(angle) / angle
  double b;  // (1 - cos(angle)) / angle^2
  if (angle < kSmallAngle) {
    const double a2 = angle * angle;
    a = 1.0 - a2 / 6.0;
    b = 0.5 - a2 / 24.0;
  } else {
    a = std::sin(angle) / angle;
    b = (1.0 - std::cos(angle)) / (angle * angle);
  }
  return RotationMatrix::unchecked(Mat3::Identity() + a * k + b * k * k);
}

Vec3 proj_reg(const Vec3& u, const Vec3& v) { return u.squaredNorm() * v - u * u.dot(v); }

double attitude_error(const RotationMatrix& r, const RotationMatrix& rhat) {
  return (Mat3::Identity() - r.matrix() * rhat.matrix().transpose()).trace();
}

EulerAngles euler_zyx(const RotationMatrix& r, double lock_margin) {
  const Mat3& m = r.matrix();
  EulerAngles e;
  e.pitch = std::asin(std::clamp(-m(2, 0), -1.0, 1.0));
  if (std::numbers::pi / 2 - std::abs(e.pitch) <= lock_margin) {
    e.gimbal_lock = true;
    e.roll = 0.0;
    e.yaw = std::atan2(-m(0, 1), m(1, 1));
    return e;
  }
  e.roll = std::atan2(m(2, 1), m(2, 2));
  e.yaw = std::atan2(m(1, 0), m(0, 0));
  return e;
}

RotationMatrix rotation_from_euler_zyx(double roll, double pitch, double yaw) {
  const Mat3 rz = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  const Mat3 ry = Eigen::AngleAxisd(pitch, Vec3::UnitY()).toRotationMatrix();
  const Mat3 rx = Eigen::AngleAxisd(roll, Vec3::UnitX()).toRotationMatrix();
  return RotationMatrix::unchecked(rz * ry * rx);
}

RotationMatrix reorthonormalize(const Mat3& m) {
  if (!m.allFinite() || m.determinant() <= 0.0) {
    throw std::domain_error("reorthonormalize: input has non-positive determinant");
  }
  const Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() <= 0.0) {
    throw std::domain_error("reorthonormalize: projection is a reflection");
  }
  return RotationMatrix::unchecked(r);
}

}  // namespace baroatt

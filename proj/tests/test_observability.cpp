#include <cmath>
#include <memory>
#include <numbers>

#include <gtest/gtest.h>

#include "baroatt/observability.hpp"

using namespace baroatt;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SignalSampler constant(const Vec3& a, const Vec3& w) {
  return [a, w](double) { return SignalSample{a, w, RotationMatrix()}; };
}

SignalSampler inertial(std::function<Vec3(double)> a_i) {
  return [a_i](double t) { return SignalSample{a_i(t), Vec3::Zero(), RotationMatrix()}; };
}

double min_eig3(const Mat3& m) {
  return Eigen::SelfAdjointEigenSolver<Mat3>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

// Closed-form mean of (R a)(R a)^T over a full period for the reference
// trajectory: R a = [-cos t, -sin 2t, 5 sqrt3 sin 2t - g].
Mat3 reference_excitation() {
  const double c = 5.0 * std::sqrt(3.0);
  Mat3 m = Mat3::Zero();
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(1, 2) = m(2, 1) = -0.5 * c;
  m(2, 2) = 0.5 * c * c + kGravity * kGravity;
  return m;
}

}  // namespace

TEST(TransitionMatrix, IdentityAtZeroSpanAndRejectsBadInput) {
  const SignalSampler s = constant(Vec3(1, 2, 3), Vec3(0.1, 0.2, 0.3));
  EXPECT_EQ(transition_matrix(1.0, 1.0, s), Matrix5::Identity());
  EXPECT_THROW(transition_matrix(1.0, 0.5, s), std::invalid_argument);
  EXPECT_THROW(transition_matrix(0.0, 1.0, s, 0.0), std::invalid_argument);
}

TEST(TransitionMatrix, ConstantRateTiltBlock) {
  const Vec3 w(0.4, -0.3, 0.8);
  const Matrix5 phi = transition_matrix(0.0, 2.0, constant(Vec3::Zero(), w));
  EXPECT_LT((phi.block<3, 3>(2, 2) - exp_so3(-2.0 * w).matrix()).norm(), 1e-12);
  EXPECT_NEAR(phi(0, 1), 2.0, 1e-12);
}

TEST(TransitionMatrix, SemigroupOnReferenceTrajectory) {
  const TruthTrajectory truth = integrate_truth(std::make_shared<ReferenceScenario>(), 6.0, 1e-3);
  const SignalSampler s = sampler_from_truth(truth);
  const Matrix5 p20 = transition_matrix(0.5, 5.0, s);
  const Matrix5 p21 = transition_matrix(2.3, 5.0, s);
  const Matrix5 p10 = transition_matrix(0.5, 2.3, s);
  EXPECT_LT((p20 - p21 * p10).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Gramian, SymmetricPsdAndMonotone) {
  const TruthTrajectory truth = integrate_truth(std::make_shared<ReferenceScenario>(), 12.0, 1e-3);
  const SignalSampler s = sampler_from_truth(truth);
  double previous = 0.0;
  for (double delta : {1.0, 2.0, 4.0, kTwoPi}) {
    const GramianReport r = gramian({1.0, delta, s});
    EXPECT_EQ(r.W, r.W.transpose());
    EXPECT_GE(r.min_eig, -1e-12);
    EXPECT_GE(delta * r.min_eig, previous - 1e-10);
    previous = delta * r.min_eig;
  }
}

TEST(Gramian, PositionVelocityBlockMatchesClosedForm) {
  const double d = 3.0;
  const GramianReport r = gramian({0.0, d, constant(Vec3::Zero(), Vec3(0.3, 0.1, 0.2))});
  // C Phi(s) = [1, s, ...]; mean over [0, d].
  Eigen::Matrix2d expected;
  expected << 1.0, d / 2.0, d / 2.0, d * d / 3.0;
  const Eigen::Matrix2d block = r.W.topLeftCorner<2, 2>();
  EXPECT_LT((block - expected).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(expected).eigenvalues()(0), 0.0);
}

TEST(Gramian, NoExcitationLeavesTiltUnobservable) {
  const GramianReport r = gramian({0.0, kTwoPi, constant(Vec3::Zero(), Vec3(0.4, 0.5, 0.3))});
  EXPECT_LT(std::abs(r.min_eig), 1e-8);
  EXPECT_FALSE(r.uniformly_observable_on_window);
  EXPECT_LT(r.W.bottomRightCorner(3, 3).norm(), 1e-14);
}

TEST(Gramian, ReferenceTrajectoryIsObservable) {
  const TruthTrajectory truth = integrate_truth(std::make_shared<ReferenceScenario>(), kTwoPi + 0.01, 1e-3);
  const GramianReport r = gramian({0.0, kTwoPi, sampler_from_truth(truth)});
  EXPECT_GT(r.min_eig, 1e-3);
  EXPECT_TRUE(r.uniformly_observable_on_window);
  // Regression baseline.
  EXPECT_NEAR(r.min_eig, 0.0081064, 1e-6);
}

TEST(Gramian, RejectsBadWindow) {
  EXPECT_THROW(gramian({0.0, 0.0, constant(Vec3::Zero(), Vec3::Zero())}), std::invalid_argument);
  EXPECT_THROW(gramian({0.0, 1.0, nullptr}), std::invalid_argument);
}

TEST(PeMetric, DegenerateExcitation) {
  EXPECT_LT(pe_metric({0.0, kTwoPi, inertial([](double) { return Vec3(1.0, -2.0, 0.5); })}), 1e-12);
  EXPECT_LT(pe_metric({0.0, kTwoPi, inertial([](double t) { return Vec3(std::cos(t), std::sin(t), 0.0); })}), 1e-12);
  EXPECT_EQ(pe_metric({0.0, kTwoPi, constant(Vec3::Zero(), Vec3(1, 0, 0))}), 0.0);
}

TEST(PeMetric, HarmonicExcitation) {
  const double v = pe_metric({0.0, kTwoPi, inertial([](double t) {
                                return Vec3(std::cos(t), std::sin(t), std::sin(2 * t));
                              })});
  EXPECT_NEAR(v, 0.5, 1e-9);
}

TEST(PeMetric, ReferenceTrajectoryMatchesClosedForm) {
  const TruthTrajectory truth = integrate_truth(std::make_shared<ReferenceScenario>(), kTwoPi + 0.01, 1e-3);
  const double v = pe_metric({0.0, kTwoPi, sampler_from_truth(truth)});
  EXPECT_NEAR(v, min_eig3(reference_excitation()), 1e-9);
  EXPECT_GT(v, 0.3);
}

TEST(GramianSweep, WindowCountAndSpacing) {
  const auto reports = gramian_sweep(constant(Vec3(0, 0, -9.81), Vec3(0.5, 0, 0)), 0.0, 10.0, 2.0, 1.5);
  ASSERT_EQ(reports.size(), 6u);
  EXPECT_DOUBLE_EQ(reports[5].t0, 7.5);
  EXPECT_THROW(gramian_sweep(constant(Vec3::Zero(), Vec3::Zero()), 0.0, 1.0, 0.5, 0.0), std::invalid_argument);
}

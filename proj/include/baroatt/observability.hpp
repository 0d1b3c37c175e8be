#pragma once

#include <functional>
#include <vector>

#include "baroatt/geom3.hpp"
#include "baroatt/riccati.hpp"
#include "baroatt/sim.hpp"

namespace baroatt {

struct SignalSample {
  Vec3 a = Vec3::Zero();      // body-frame specific acceleration
  Vec3 omega = Vec3::Zero();  // body angular rate
  RotationMatrix r;           // attitude, used to form R a in the inertial frame
};

using SignalSampler = std::function<SignalSample(double)>;

struct SignalWindow {
  double t0 = 0.0;
  double delta = 1.0;
  SignalSampler sampler;
};

struct GramianReport {
  double t0 = 0.0;
  double delta = 0.0;
  Matrix5 W = Matrix5::Zero();
  double min_eig = 0.0;
  double mu_threshold = 1e-6;
  bool uniformly_observable_on_window = false;
  int intervals = 0;  // Simpson intervals actually used
};

struct QuadratureOptions {
  int min_intervals = 64;
  int max_intervals = 1 << 14;
  // Interval doubling stops once the minimum eigenvalue moves by less than this.
  double tolerance = 1e-8;
  // Upper bound on the RK4 step used to propagate the transition matrix.
  double max_step = 1e-3;
};

/// Phi(t1, t0) for dPhi/dt = A(t) Phi, Phi(t0, t0) = I, by RK4.
Matrix5 transition_matrix(double t0, double t1, const SignalSampler& sampler, double max_step = 1e-3);

/// W = (1/delta) int Phi^T C^T C Phi ds over the window, composite Simpson.
GramianReport gramian(const SignalWindow& window, double mu = 1e-6, const QuadratureOptions& opts = {});

/// Smallest eigenvalue of (1/delta) int (R a)(R a)^T ds over the window.
double pe_metric(const SignalWindow& window, const QuadratureOptions& opts = {});

/// Sampler evaluating a sampled truth trajectory at arbitrary times.
SignalSampler sampler_from_truth(const TruthTrajectory& truth);

/// Gramian reports for windows [t, t + delta] with t = t_begin, t_begin +
/// stride, ... while t + delta <= t_end.
std::vector<GramianReport> gramian_sweep(const SignalSampler& sampler, double t_begin, double t_end,
                                         double delta, double stride, double mu = 1e-6,
                                         const QuadratureOptions& opts = {});

}  // namespace baroatt

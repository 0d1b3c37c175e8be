#include "baroatt/observability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace baroatt {

namespace {

Matrix5 state_matrix_at(const SignalSampler& sampler, double t) {
  const SignalSample s = sampler(t);
  return build_A(s.a, s.omega);
}

// One RK4 step of dPhi/dt = A(t) Phi.
Matrix5 rk4_step(const SignalSampler& sampler, double t, double h, const Matrix5& phi) {
  const Matrix5 a0 = state_matrix_at(sampler, t);
  const Matrix5 am = state_matrix_at(sampler, t + 0.5 * h);
  const Matrix5 a1 = state_matrix_at(sampler, t + h);
  const Matrix5 k1 = a0 * phi;
  const Matrix5 k2 = am * (phi + 0.5 * h * k1);
  const Matrix5 k3 = am * (phi + 0.5 * h * k2);
  const Matrix5 k4 = a1 * (phi + h * k3);
  return phi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix5 propagate(const SignalSampler& sampler, double t0, double t1, const Matrix5& phi0, double max_step) {
  if (t1 == t0) return phi0;
  const auto n = static_cast<long>(std::ceil((t1 - t0) / max_step - 1e-12));
  const double h = (t1 - t0) / static_cast<double>(n);
  Matrix5 phi = phi0;
  for (long i = 0; i < n; ++i) phi = rk4_step(sampler, t0 + static_cast<double>(i) * h, h, phi);
  return phi;
}

double simpson_weight(int i, int n) {
  if (i == 0 || i == n) return 1.0;
  return (i % 2 == 1) ? 4.0 : 2.0;
}

Matrix5 gramian_simpson(const SignalWindow& w, int n, double max_step) {
  const double h = w.delta / n;
  const OutputRow c = output_matrix();
  Matrix5 phi = Matrix5::Identity();
  Matrix5 acc = Matrix5::Zero();
  for (int i = 0; i <= n; ++i) {
    const double s = w.t0 + i * h;
    if (i > 0) phi = propagate(w.sampler, s - h, s, phi, max_step);
    const OutputRow row = c * phi;
    acc += simpson_weight(i, n) * row.transpose() * row;
  }
  return acc * (h / 3.0) / w.delta;
}

Mat3 excitation_simpson(const SignalWindow& w, int n) {
  const double h = w.delta / n;
  Mat3 acc = Mat3::Zero();
  for (int i = 0; i <= n; ++i) {
    const SignalSample s = w.sampler(w.t0 + i * h);
    const Vec3 a_i = s.r * s.a;
    acc += simpson_weight(i, n) * a_i * a_i.transpose();
  }
  return acc * (h / 3.0) / w.delta;
}

template <typename M>
double min_eigenvalue(const M& m) {
  return Eigen::SelfAdjointEigenSolver<M>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

void check_window(const SignalWindow& w) {
  if (!(w.delta > 0.0)) throw std::invalid_argument("SignalWindow: delta must be positive");
  if (!w.sampler) throw std::invalid_argument("SignalWindow: missing sampler");
}

// Doubles the Simpson interval count until the smallest eigenvalue settles.
template <typename Quadrature>
auto refine(Quadrature&& quad, const QuadratureOptions& opts, int& used) {
  int n = std::max(2, opts.min_intervals + (opts.min_intervals % 2));
  auto m = quad(n);
  double eig = min_eigenvalue(m);
  while (2 * n <= opts.max_intervals) {
    auto finer = quad(2 * n);
    const double finer_eig = min_eigenvalue(finer);
    n *= 2;
    const bool settled = std::abs(finer_eig - eig) < opts.tolerance;
    m = finer;
    eig = finer_eig;
    if (settled) break;
  }
  used = n;
  return m;
}

}  // namespace

Matrix5 transition_matrix(double t0, double t1, const SignalSampler& sampler, double max_step) {
  if (t1 < t0) throw std::invalid_argument("transition_matrix: t1 < t0");
  if (!(max_step > 0.0)) throw std::invalid_argument("transition_matrix: max_step must be positive");
  return propagate(sampler, t0, t1, Matrix5::Identity(), max_step);
}

GramianReport gramian(const SignalWindow& window, double mu, const QuadratureOptions& opts) {
  check_window(window);
  GramianReport report;
  report.t0 = window.t0;
  report.delta = window.delta;
  report.mu_threshold = mu;
  const Matrix5 w = refine([&](int n) { return gramian_simpson(window, n, opts.max_step); }, opts, report.intervals);
  report.W = 0.5 * (w + w.transpose());
  report.min_eig = min_eigenvalue(report.W);
  report.uniformly_observable_on_window = report.min_eig >= mu;
  return report;
}

double pe_metric(const SignalWindow& window, const QuadratureOptions& opts) {
  check_window(window);
  int used = 0;
  const Mat3 m = refine([&](int n) { return excitation_simpson(window, n); }, opts, used);
  return std::max(0.0, min_eigenvalue(Mat3(0.5 * (m + m.transpose()))));
}

SignalSampler sampler_from_truth(const TruthTrajectory& truth) {
  return [&truth](double t) {
    const TruthSample s = truth.at(t);
    return SignalSample{s.a, s.omega, s.r};
  };
}

std::vector<GramianReport> gramian_sweep(const SignalSampler& sampler, double t_begin, double t_end,
                                         double delta, double stride, double mu, const QuadratureOptions& opts) {
  if (!(stride > 0.0)) throw std::invalid_argument("gramian_sweep: stride must be positive");
  std::vector<GramianReport> out;
  for (long i = 0;; ++i) {
    const double t = t_begin + static_cast<double>(i) * stride;
    if (t + delta > t_end + 1e-9) break;
    out.push_back(gramian(SignalWindow{t, delta, sampler}, mu, opts));
  }
  return out;
}

}  // namespace baroatt

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "baroatt/attitude.hpp"
#include "baroatt/geom3.hpp"
#include "baroatt/harness.hpp"
#include "baroatt/observability.hpp"
#include "baroatt/riccati.hpp"
#include "baroatt/sim.hpp"

using namespace baroatt;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
      detail += " [x]";
      pass = false;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const CampaignResult& reference_campaign(double* wall = nullptr) {
  static double elapsed = 0.0;
  static const CampaignResult result = [] {
    const auto start = std::chrono::steady_clock::now();
    CampaignResult r = run_campaign(reference_config());
    elapsed = seconds_since(start);
    return r;
  }();
  if (wall) *wall = elapsed;
  return result;
}

Vector5 true_state(const TruthSample& s) {
  Vector5 x;
  x << s.h, s.hdot, s.tilt();
  return x;
}

// Noise-free discrete Riccati observer on a truth trajectory; returns the
// error norm at every IMU tick.
std::vector<double> riccati_error_history(const TruthTrajectory& truth, const Vector5& x0, const RiccatiConfig& cfg,
                                          int baro_every) {
  RiccatiObserver obs(cfg, State5(x0));
  std::vector<double> err;
  const auto n = static_cast<long>(std::lround(truth.duration() / cfg.T));
  for (long k = 0; k <= n; ++k) {
    const TruthSample s = truth.at(k * cfg.T);
    err.push_back((obs.state().vector() - true_state(s)).norm());
    if (k == n) break;
    std::optional<BaroSample> baro;
    if ((k + 1) % baro_every == 0) {
      const double tb = (k + 1) * cfg.T;
      baro = BaroSample{tb, truth.scenario().altitude(tb).h};
    }
    obs.step({s.t, s.a, s.omega}, baro);
  }
  return err;
}

Outcome criterion1() {
  Outcome o;
  double wall = 0.0;
  const CampaignResult& c = reference_campaign(&wall);
  const CampaignSummary& s = c.summary;
  const std::size_t k30 = s.tick_at(30.0);
  o.check(s.tilt_q50[k30] < 0.05, "median tilt_err(30)=%.4g", s.tilt_q50[k30]);
  o.check(s.att_q50[k30] < 0.05, "median att_err(30)=%.4g", s.att_q50[k30]);
  int below = 0;
  for (const RunResult& r : c.runs) below += r.ticks[k30].att_err < 0.5 ? 1 : 0;
  const double frac = static_cast<double>(below) / static_cast<double>(c.runs.size());
  o.check(frac >= 0.98, "att_err(30)<0.5 in %.0f%% of %zu runs", 100.0 * frac, c.runs.size());
  const std::size_t k2 = s.tick_at(2.0), k10 = s.tick_at(10.0), k20 = s.tick_at(20.0);
  o.check(s.tilt_q50[k2] > s.tilt_q50[k10] && s.tilt_q50[k10] > s.tilt_q50[k20],
          "tilt medians 2/10/20 s=%.3g/%.3g/%.3g", s.tilt_q50[k2], s.tilt_q50[k10], s.tilt_q50[k20]);
  o.check(s.att_q50[k2] > s.att_q50[k10] && s.att_q50[k10] > s.att_q50[k20], "att medians 2/10/20 s=%.3g/%.3g/%.3g",
          s.att_q50[k2], s.att_q50[k10], s.att_q50[k20]);
  o.check(wall < 60.0, "wall %.2f s", wall);
  return o;
}

Outcome criterion2() {
  Outcome o;
  RiccatiConfig cfg = reference_config().riccati;
  cfg.T = 0.005;
  const TruthTrajectory truth = integrate_truth(std::make_shared<ReferenceScenario>(), 20.0, 1e-3);
  std::mt19937_64 rng(314159);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.5, 10.0);
  double worst_slope = -1e300, worst_r2 = 1.0;
  for (int trial = 0; trial < 10; ++trial) {
    Vector5 dir;
    for (int i = 0; i < 5; ++i) dir(i) = n(rng);
    const Vector5 x0 = true_state(truth.samples().front()) + radius(rng) * dir.normalized();
    const std::vector<double> err = riccati_error_history(truth, x0, cfg, 40);
    // Least squares fit of log error against time on [2, 20] s.
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0, cnt = 0;
    for (std::size_t k = 0; k < err.size(); ++k) {
      const double t = k * cfg.T;
      if (t < 2.0 - 1e-9) continue;
      const double y = std::log(err[k]);
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
      syy += y * y;
      cnt += 1;
    }
    const double cov = sty - st * sy / cnt;
    const double vt = stt - st * st / cnt;
    const double vy = syy - sy * sy / cnt;
    const double slope = cov / vt;
    const double r2 = cov * cov / (vt * vy);
    worst_slope = std::max(worst_slope, slope);
    worst_r2 = std::min(worst_r2, r2);
  }
  o.check(worst_slope < 0.0, "max slope %.4g 1/s", worst_slope);
  o.check(worst_r2 > 0.9, "min R^2 %.4f over 10 initial errors", worst_r2);
  return o;
}

Mat3 phi22_fine(const Vec3& w, double T) {
  const Mat3 a = -skew(w);
  const double h = T / 100.0;
  Mat3 phi = Mat3::Identity();
  for (int i = 0; i < 100; ++i) {
    const Mat3 k1 = a * phi;
    const Mat3 k2 = a * (phi + 0.5 * h * k1);
    const Mat3 k3 = a * (phi + 0.5 * h * k2);
    const Mat3 k4 = a * (phi + h * k3);
    phi += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return phi;
}

Outcome criterion3() {
  Outcome o;
  const double duration = 5.0;
  const TruthTrajectory truth = integrate_truth(std::make_shared<ReferenceScenario>(), duration, 1e-4);
  const Vector5 offset = (Vector5() << 3.0, -2.0, 0.3, -0.2, 0.1).finished();
  const Vector5 x0 = true_state(truth.samples().front()) + offset;

  RiccatiConfig cont = reference_config().riccati;
  cont.M = 1e-3;  // continuous-time output noise intensity
  ContinuousSignals sig{[&](double t) { return truth.at(t).a; }, [&](double t) { return truth.at(t).omega; },
                        [&](double t) { return truth.scenario().altitude(t).h; }};
  const Estimate ref = integrate_continuous_observer(sig, {State5(x0), cont.P0}, cont, 0.0, duration, 1e-5);

  std::vector<double> errors;
  for (double T : {0.005, 0.001, 0.0002}) {
    RiccatiConfig d = cont;
    d.T = T;
    d.M = cont.M / T;
    RiccatiObserver obs(d, State5(x0));
    const auto n = static_cast<long>(std::lround(duration / T));
    for (long k = 0; k < n; ++k) {
      const TruthSample s = truth.at(k * T);
      const double tb = (k + 1) * T;
      obs.step({s.t, s.a, s.omega}, BaroSample{tb, truth.scenario().altitude(tb).h});
    }
    errors.push_back((obs.state().vector() - ref.x.vector()).norm());
  }
  o.check(errors[0] > errors[1] && errors[1] > errors[2], "terminal |xd-xc| = %.3g, %.3g, %.3g", errors[0],
          errors[1], errors[2]);
  const double p1 = std::log(errors[0] / errors[1]) / std::log(5.0);
  const double p2 = std::log(errors[1] / errors[2]) / std::log(5.0);
  o.check(p1 > 0.7 && p1 < 1.5 && p2 > 0.7 && p2 < 1.5, "observed order %.2f, %.2f", p1, p2);

  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 w(u(rng), u(rng), u(rng));
    worst = std::max(worst, (phi22(w, 0.005).matrix() - phi22_fine(w, 0.005)).norm());
  }
  o.check(worst < 1e-10, "max |phi22 - RK4(100)| = %.2g", worst);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const TruthTrajectory truth = integrate_truth(std::make_shared<ReferenceScenario>(), kTwoPi + 0.01, 1e-3);
  const SignalWindow window{0.0, kTwoPi, sampler_from_truth(truth)};
  const double pe = pe_metric(window);
  o.check(std::abs(pe - 0.5) < 1e-6, "pe_metric=%.10f (target 0.5)", pe);
  const GramianReport g = gramian(window);
  o.check(g.min_eig > 0.0, "gramian min_eig=%.6g", g.min_eig);

  const TruthTrajectory still = integrate_truth(std::make_shared<FreeFallScenario>(), kTwoPi + 0.01, 1e-3);
  const SignalWindow zero{0.0, kTwoPi, sampler_from_truth(still)};
  const double pe0 = pe_metric(zero);
  const GramianReport g0 = gramian(zero);
  o.check(pe0 < 1e-8 && std::abs(g0.min_eig) < 1e-8, "a=0: pe=%.2g min_eig=%.2g", pe0, g0.min_eig);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const CampaignResult& c = reference_campaign();
  double min_eig = 1e300, asym = 0.0, orth = 0.0;
  for (const RunResult& r : c.runs) {
    min_eig = std::min(min_eig, r.min_p_eig);
    asym = std::max(asym, r.max_p_asymmetry);
    orth = std::max(orth, r.max_rhat_orth_err);
  }
  o.check(min_eig > 0.0 && asym == 0.0, "P: min eig %.3g, max |P-P^T| %.1g", min_eig, asym);
  o.check(orth < 1e-9, "max |Rhat^T Rhat - I| %.2g", orth);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const AttitudeConfig cfg = reference_config().attitude;
  double sigma = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const RotationMatrix r = exp_so3(Vec3(u(rng), u(rng), u(rng)));
    const Mat3 rt = r.matrix().transpose();
    sigma = std::max(sigma, correction(r, rt * Vec3::UnitZ(), Vec3(rt * cfg.m_inertial), cfg).norm());
  }
  o.check(sigma < 1e-12, "max |sigma_R| at equilibrium %.2g", sigma);

  const Mat3 flip = Vec3(1, -1, -1).asDiagonal();
  const double e = attitude_error(RotationMatrix(), RotationMatrix(flip));
  o.check(e == 4.0, "attitude_error(I, diag(1,-1,-1))=%.17g", e);

  const Vec3 v(0.3, -1.2, 2.0);
  bool regular = proj_reg(Vec3::Zero(), v) == Vec3::Zero();
  for (double eps : {1e-3, 1e-6, 1e-9}) regular = regular && proj_reg(eps * Vec3(0.6, 0.0, 0.8), v).norm() <= eps * eps * v.norm();
  o.check(regular, "%s", "proj_reg(0, v)=0 and O(|u|^2) near 0");
  return o;
}

Outcome criterion6() {
  Outcome o;
  // No excitation: tilt error is never corrected.
  {
    RiccatiConfig cfg = reference_config().riccati;
    cfg.T = 0.005;
    const TruthTrajectory truth = integrate_truth(std::make_shared<FreeFallScenario>(2.0, -1.0), 30.0, 1e-3);
    Vector5 x0 = true_state(truth.samples().front());
    x0.tail<3>() += Vec3(0.4, -0.3, 0.2);
    RiccatiObserver obs(cfg, State5(x0));
    const auto n = static_cast<long>(std::lround(30.0 / cfg.T));
    for (long k = 0; k < n; ++k) {
      const TruthSample s = truth.at(k * cfg.T);
      std::optional<BaroSample> baro;
      if ((k + 1) % 40 == 0) baro = BaroSample{(k + 1) * cfg.T, truth.scenario().altitude((k + 1) * cfg.T).h};
      obs.step({s.t, s.a, s.omega}, baro);
    }
    const double zt = (obs.state().z() - truth.samples().back().tilt()).norm();
    o.check(zt > 0.1, "a=0: final |z err|=%.4g", zt);
  }
  // Unstable set: start at a rotation by pi about e1, noiseless inputs and tilt.
  {
    const double T = 0.005;
    const AttitudeConfig cfg = reference_config().attitude;
    const TruthTrajectory truth = integrate_truth(std::make_shared<ReferenceScenario>(), 5.0, 1e-3);
    const Mat3 flip = Vec3(1, -1, -1).asDiagonal();
    AttitudeObserver obs(cfg, RotationMatrix(flip) * truth.samples().front().r, T);
    double held = -1.0;
    const auto n = static_cast<long>(std::lround(truth.duration() / T));
    for (long k = 0; k <= n; ++k) {
      const TruthSample s = truth.at(k * T);
      if (attitude_error(s.r, obs.estimate()) <= 3.5) {
        held = s.t;
        break;
      }
      obs.step(s.omega, s.tilt(), Vec3(s.r.matrix().transpose() * cfg.m_inertial));
    }
    if (held < 0.0) held = truth.duration();
    o.check(held >= 1.0, "unstable set held att_err>3.5 for %.3f s (k_z=%g)", held, cfg.k_z);
    // Linearized escape rate is k_z; a perturbation at machine epsilon reaches
    // O(1) after about ln(1/eps)/k_z seconds.
    const double bound = -std::log(std::numeric_limits<double>::epsilon()) / cfg.k_z;
    o.check(true, "escape-time bound from rounding alone %.2f s", bound);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "Run a single criterion (1-6)")->check(CLI::Range(1, 6));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3,
                                                      criterion4, criterion5, criterion6};
  bool all = true;
  for (int i = 1; i <= 6; ++i) {
    if (only != 0 && only != i) continue;
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = criteria[i - 1]();
    std::printf("criterion %d: %s  (%.1f s)  %s\n", i, o.pass ? "PASS" : "FAIL", seconds_since(start),
                o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}

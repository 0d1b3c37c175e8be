#include "baroatt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "baroatt/csv.hpp"

namespace baroatt {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream id for initial-condition sampling; sensor streams use 1..3.
constexpr std::uint32_t kInitStream = 4;

std::mt19937_64 init_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), kInitStream};
  return std::mt19937_64(seq);
}

double clock_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

void CampaignConfig::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(truth_dt > 0.0) || truth_dt > imu_period()) {
    throw std::invalid_argument("truth_dt must be positive and no larger than the IMU period");
  }
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  noise.validate();
  RiccatiConfig r = riccati;
  r.T = imu_period();
  r.validate();
  attitude.validate();
  if ((init.sigma_x.array() < 0.0).any() || init.attitude_std_deg < 0.0) {
    throw std::invalid_argument("init: standard deviations must be non-negative");
  }
  if (!(convergence_threshold > 0.0)) throw std::invalid_argument("convergence_threshold must be positive");
}

CampaignConfig reference_config() { return CampaignConfig{}; }

InitialEstimate sample_initial_conditions(std::mt19937_64& rng, const InitSampling& init, const Covariance5& p0) {
  std::normal_distribution<double> unit(0.0, 1.0);
  auto gauss = [&](double stddev) { return stddev == 0.0 ? 0.0 : stddev * unit(rng); };

  const Vec3 mean = init.mean_euler_deg * kDegToRad;
  const RotationMatrix r_mean = rotation_from_euler_zyx(mean.x(), mean.y(), mean.z());
  const double att_std = init.attitude_std_deg * kDegToRad;
  const double t0 = gauss(att_std);
  const double t1 = gauss(att_std);
  const double t2 = gauss(att_std);
  const RotationMatrix r0 = r_mean * exp_so3(Vec3(t0, t1, t2));

  Vector5 x;
  x << init.mean_h, init.mean_hdot, r0.matrix().transpose() * Vec3::UnitZ();
  for (int i = 0; i < 5; ++i) x(i) += gauss(init.sigma_x(i));
  return {State5(x), r0, p0};
}

std::uint64_t derive_run_seed(std::uint64_t master, std::size_t index) {
  return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(index)));
}

bool RunResult::all_finite() const {
  for (const TickRecord& r : ticks) {
    const bool ok = std::isfinite(r.h_hat) && std::isfinite(r.hdot_hat) && r.zhat.allFinite() &&
                    std::isfinite(r.euler_hat.roll) && std::isfinite(r.euler_hat.pitch) &&
                    std::isfinite(r.euler_hat.yaw) && std::isfinite(r.tilt_err) && std::isfinite(r.att_err);
    if (!ok) return false;
  }
  return true;
}

TruthTrajectory make_truth(const CampaignConfig& cfg) {
  return integrate_truth(std::make_shared<ReferenceScenario>(), cfg.duration, cfg.truth_dt);
}

RunResult run_single(const CampaignConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return run_single(cfg, make_truth(cfg), seed, 0);
}

RunResult run_single(const CampaignConfig& cfg, const TruthTrajectory& truth, std::uint64_t seed,
                     std::size_t index) {
  const double start = clock_seconds();
  cfg.validate();
  const double T = cfg.imu_period();
  RiccatiConfig rcfg = cfg.riccati;
  rcfg.T = T;

  NoiseConfig noise = cfg.noise;
  noise.seed = seed;
  const SensorStreams streams = synthesize_measurements(truth, noise, cfg.attitude.m_inertial);

  InitialEstimate init;
  if (cfg.init.mode == InitMode::kTruth) {
    const TruthSample& s0 = truth.samples().front();
    init = {State5(s0.h, s0.hdot, s0.tilt()), s0.r, rcfg.P0};
  } else {
    std::mt19937_64 rng = init_engine(seed);
    init = sample_initial_conditions(rng, cfg.init, rcfg.P0);
  }

  RiccatiObserver riccati(rcfg, init.x0, init.p0, streams.imu.front().t);
  AttitudeObserver attitude(cfg.attitude, init.r0, T);

  RunResult out;
  out.index = index;
  out.seed = seed;
  out.ticks.reserve(streams.imu.size());
  out.min_p_eig = std::numeric_limits<double>::infinity();

  std::size_t next_baro = 0;
  std::size_t next_mag = 0;
  for (std::size_t k = 0; k < streams.imu.size(); ++k) {
    const ImuSample& imu = streams.imu[k];
    const TruthSample s = truth.at(imu.t);
    const State5& x = riccati.state();
    const RotationMatrix& rhat = attitude.estimate();

    TickRecord rec;
    rec.t = imu.t;
    rec.h = s.h;
    rec.hdot = s.hdot;
    rec.h_hat = x.h();
    rec.hdot_hat = x.hdot();
    rec.z = s.tilt();
    rec.zhat = x.z();
    rec.euler = euler_zyx(s.r);
    rec.euler_hat = euler_zyx(rhat);
    rec.tilt_err = (rec.zhat - rec.z).norm();
    rec.att_err = attitude_error(s.r, rhat);
    out.ticks.push_back(rec);
    out.max_rhat_orth_err = std::max(out.max_rhat_orth_err, rhat.orthogonality_error());

    if (k + 1 == streams.imu.size()) break;

    // Tilt estimate valid at imu.t, paired with Rhat_k and m_B,k below.
    const Vec3 zhat_k = x.z();

    const double horizon = imu.t + T;
    while (next_baro < streams.baro.size() && streams.baro[next_baro].t < horizon - 0.5 * T) ++next_baro;
    std::optional<BaroSample> baro;
    if (next_baro < streams.baro.size() && std::abs(streams.baro[next_baro].t - horizon) <= 0.5 * T) {
      baro = streams.baro[next_baro++];
    }
    riccati.step(imu, baro);

    const Covariance5& p = riccati.covariance();
    out.max_p_asymmetry = std::max(out.max_p_asymmetry, (p - p.transpose()).cwiseAbs().maxCoeff());
    const double eig = Eigen::SelfAdjointEigenSolver<Matrix5>(p, Eigen::EigenvaluesOnly).eigenvalues()(0);
    out.min_p_eig = std::min(out.min_p_eig, eig);

    while (next_mag < streams.mag.size() && streams.mag[next_mag].t < imu.t - 0.5 * T) ++next_mag;
    std::optional<Vec3> m_b;
    if (next_mag < streams.mag.size() && std::abs(streams.mag[next_mag].t - imu.t) <= 0.5 * T) {
      m_b = streams.mag[next_mag++].m_b;
    }
    attitude.step(imu.omega, zhat_k, m_b);
  }
  out.corrections = riccati.corrections();
  out.wall_seconds = clock_seconds() - start;
  return out;
}

double quantile(std::vector<double>& values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double CampaignSummary::fraction_converged() const {
  if (converged.empty()) return 0.0;
  return static_cast<double>(std::count(converged.begin(), converged.end(), true)) /
         static_cast<double>(converged.size());
}

std::size_t CampaignSummary::tick_at(double time) const {
  if (t.empty()) throw std::out_of_range("CampaignSummary::tick_at: empty summary");
  const auto it = std::lower_bound(t.begin(), t.end(), time);
  if (it == t.end()) return t.size() - 1;
  const auto idx = static_cast<std::size_t>(it - t.begin());
  if (idx > 0 && std::abs(t[idx - 1] - time) < std::abs(t[idx] - time)) return idx - 1;
  return idx;
}

CampaignSummary summarize(const std::vector<RunResult>& runs, double convergence_threshold) {
  CampaignSummary s;
  if (runs.empty()) return s;
  const std::size_t n = runs.front().ticks.size();
  for (const RunResult& r : runs) {
    if (r.ticks.size() != n) throw std::invalid_argument("summarize: runs have different lengths");
  }
  s.t.reserve(n);
  std::vector<double> tilt(runs.size());
  std::vector<double> att(runs.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      tilt[i] = runs[i].ticks[k].tilt_err;
      att[i] = runs[i].ticks[k].att_err;
    }
    s.t.push_back(runs.front().ticks[k].t);
    s.tilt_q05.push_back(quantile(tilt, 0.05));
    s.tilt_q50.push_back(quantile(tilt, 0.50));
    s.tilt_q95.push_back(quantile(tilt, 0.95));
    s.att_q05.push_back(quantile(att, 0.05));
    s.att_q50.push_back(quantile(att, 0.50));
    s.att_q95.push_back(quantile(att, 0.95));
  }
  double total = 0.0;
  for (const RunResult& r : runs) {
    s.converged.push_back(r.ticks.back().att_err < convergence_threshold);
    total += r.wall_seconds;
    s.max_run_seconds = std::max(s.max_run_seconds, r.wall_seconds);
  }
  s.mean_run_seconds = total / static_cast<double>(runs.size());
  return s;
}

CampaignResult run_campaign(const CampaignConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  const double start = clock_seconds();
  const TruthTrajectory truth = make_truth(cfg);
  const auto n = static_cast<std::size_t>(cfg.n_runs);

  CampaignResult result;
  result.runs.resize(n);
  unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = next++; i < n; i = next++) {
        result.runs[i] = run_single(cfg, truth, derive_run_seed(cfg.seed, i), i);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  result.summary = summarize(result.runs, cfg.convergence_threshold);
  result.summary.wall_seconds = clock_seconds() - start;

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    for (const RunResult& r : result.runs) write_run_csv(*out_dir / run_csv_name(r.index), r);
    write_summary_csv(*out_dir / "summary.csv", result.summary);
  }
  return result;
}

}  // namespace baroatt

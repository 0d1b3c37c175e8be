#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "baroatt/attitude.hpp"
#include "baroatt/geom3.hpp"
#include "baroatt/riccati.hpp"
#include "baroatt/sim.hpp"

namespace baroatt {

enum class InitMode {
  kSampled,  // Gaussian draw around the configured means
  kTruth,    // estimates start at the true state
};

struct InitSampling {
  InitMode mode = InitMode::kSampled;
  double mean_h = 5.0;
  double mean_hdot = 5.0;
  Vector5 sigma_x = (Vector5() << 8.0, 8.0, 0.5, 0.5, 0.5).finished();
  Vec3 mean_euler_deg = Vec3(60.0, -30.0, 45.0);  // roll, pitch, yaw
  double attitude_std_deg = 104.0;                 // per axis of the rotation vector
};

struct CampaignConfig {
  double duration = 30.0;
  double truth_dt = 1e-3;
  NoiseConfig noise;
  RiccatiConfig riccati;  // riccati.T is overwritten by 1 / noise.rate_imu
  AttitudeConfig attitude{.k_z = 80.0, .k_m = 25.0, .m_inertial = Vec3(1.0, 0.0, 1.0).normalized(),
                          .reorth_every = 1000};
  InitSampling init;
  int n_runs = 50;
  std::uint64_t seed = 2025;
  unsigned threads = 0;  // 0: hardware concurrency
  // A run counts as converged when its final attitude error is below this.
  double convergence_threshold = 0.5;

  double imu_period() const { return 1.0 / noise.rate_imu; }
  /// Throws std::invalid_argument describing the first invalid field.
  void validate() const;
};

/// Configuration of the published simulation study.
CampaignConfig reference_config();

struct InitialEstimate {
  State5 x0;
  RotationMatrix r0;
  Covariance5 p0;
};

/// Draws Rhat(0) = R_mean exp(theta), theta ~ N(0, std^2 I3), then
/// xhat(0) ~ N([mean_h, mean_hdot, Rhat(0)^T e3], diag(sigma_x^2)).
/// P0 is taken from `p0` unchanged.
InitialEstimate sample_initial_conditions(std::mt19937_64& rng, const InitSampling& init, const Covariance5& p0);

/// Index-based per-run seed; the first n seeds do not depend on n_runs.
std::uint64_t derive_run_seed(std::uint64_t master, std::size_t index);

/// One row per IMU tick.
struct TickRecord {
  double t = 0.0;
  double h = 0.0, hdot = 0.0, h_hat = 0.0, hdot_hat = 0.0;
  Vec3 z = Vec3::Zero();
  Vec3 zhat = Vec3::Zero();
  EulerAngles euler;
  EulerAngles euler_hat;
  double tilt_err = 0.0;  // |zhat - z|
  double att_err = 0.0;   // trace(I - R Rhat^T)
};

struct RunResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<TickRecord> ticks;
  // Invariant monitors over every observer step.
  double min_p_eig = 0.0;
  double max_p_asymmetry = 0.0;
  double max_rhat_orth_err = 0.0;
  long corrections = 0;
  double wall_seconds = 0.0;

  bool all_finite() const;
};

/// Ground truth of the configured scenario.
TruthTrajectory make_truth(const CampaignConfig& cfg);

/// Simulates sensors and runs the cascade (Riccati tilt/altitude observer
/// feeding the SO(3) observer) for one seed. Pure function of its arguments.
RunResult run_single(const CampaignConfig& cfg, const TruthTrajectory& truth, std::uint64_t seed,
                     std::size_t index = 0);
RunResult run_single(const CampaignConfig& cfg, std::uint64_t seed);

struct CampaignSummary {
  std::vector<double> t;
  std::vector<double> tilt_q05, tilt_q50, tilt_q95;
  std::vector<double> att_q05, att_q50, att_q95;
  std::vector<bool> converged;  // per run
  double wall_seconds = 0.0;
  double mean_run_seconds = 0.0;
  double max_run_seconds = 0.0;

  double fraction_converged() const;
  /// Index of the tick closest to time t.
  std::size_t tick_at(double t) const;
};

struct CampaignResult {
  CampaignSummary summary;
  std::vector<RunResult> runs;  // ordered by run index
};

/// Linear-interpolation quantile (Hyndman-Fan type 7). `values` is reordered.
double quantile(std::vector<double>& values, double p);

CampaignSummary summarize(const std::vector<RunResult>& runs, double convergence_threshold);

/// Runs cfg.n_runs seeded runs, possibly concurrently. When out_dir is set,
/// writes run_XXX.csv for every run and summary.csv there.
CampaignResult run_campaign(const CampaignConfig& cfg,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt);

}  // namespace baroatt

#include "baroatt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <yaml-cpp/yaml.h>

namespace baroatt {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw std::runtime_error("config key '" + key + "': " + what);
}

void reject_unknown(const YAML::Node& node, const std::string& section, const std::set<std::string>& known) {
  if (!node.IsMap()) fail(section, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.contains(key)) fail(section.empty() ? key : section + "." + key, "unknown key");
  }
}

template <typename T>
void read(const YAML::Node& node, const std::string& key, const std::string& path, T& out) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    fail(path, e.what());
  }
}

std::vector<double> read_list(const YAML::Node& node, const std::string& key, const std::string& path,
                              std::size_t size) {
  std::vector<double> v;
  read(node, key, path, v);
  if (v.size() != size) fail(path, "expected a list of " + std::to_string(size) + " numbers");
  return v;
}

std::string list(std::initializer_list<double> values) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  bool first = true;
  for (double v : values) {
    if (!first) os << ", ";
    os << v;
    first = false;
  }
  os << ']';
  return os.str();
}

}  // namespace

CampaignConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw std::runtime_error(std::string("config is not valid YAML: ") + e.what());
  }
  CampaignConfig cfg = reference_config();
  if (root.IsNull()) return cfg;
  reject_unknown(root, "",
                 {"duration", "truth_dt", "n_runs", "seed", "threads", "convergence_threshold", "noise", "riccati",
                  "attitude", "init"});
  read(root, "duration", "duration", cfg.duration);
  read(root, "truth_dt", "truth_dt", cfg.truth_dt);
  read(root, "n_runs", "n_runs", cfg.n_runs);
  read(root, "seed", "seed", cfg.seed);
  read(root, "threads", "threads", cfg.threads);
  read(root, "convergence_threshold", "convergence_threshold", cfg.convergence_threshold);

  if (const YAML::Node n = root["noise"]) {
    reject_unknown(n, "noise",
                   {"std_accel", "std_gyro", "std_mag", "var_baro", "std_baro", "rate_imu", "rate_baro", "rate_mag"});
    if (n["var_baro"] && n["std_baro"]) fail("noise.std_baro", "give either var_baro or std_baro, not both");
    read(n, "std_accel", "noise.std_accel", cfg.noise.std_accel);
    read(n, "std_gyro", "noise.std_gyro", cfg.noise.std_gyro);
    read(n, "std_mag", "noise.std_mag", cfg.noise.std_mag);
    read(n, "var_baro", "noise.var_baro", cfg.noise.var_baro);
    if (n["std_baro"]) {
      double s = 0.0;
      read(n, "std_baro", "noise.std_baro", s);
      cfg.noise.var_baro = s * s;
    }
    read(n, "rate_imu", "noise.rate_imu", cfg.noise.rate_imu);
    read(n, "rate_baro", "noise.rate_baro", cfg.noise.rate_baro);
    read(n, "rate_mag", "noise.rate_mag", cfg.noise.rate_mag);
  }

  if (const YAML::Node r = root["riccati"]) {
    reject_unknown(r, "riccati", {"q_diag", "M", "p0_diag", "joseph_form"});
    if (r["q_diag"]) {
      const auto q = read_list(r, "q_diag", "riccati.q_diag", 5);
      cfg.riccati.Q = Vector5(q.data()).asDiagonal();
    }
    if (r["p0_diag"]) {
      const auto p = read_list(r, "p0_diag", "riccati.p0_diag", 5);
      cfg.riccati.P0 = Vector5(p.data()).asDiagonal();
    }
    read(r, "M", "riccati.M", cfg.riccati.M);
    read(r, "joseph_form", "riccati.joseph_form", cfg.riccati.joseph_form);
  }

  if (const YAML::Node a = root["attitude"]) {
    reject_unknown(a, "attitude", {"k_z", "k_m", "m_inertial", "reorth_every"});
    read(a, "k_z", "attitude.k_z", cfg.attitude.k_z);
    read(a, "k_m", "attitude.k_m", cfg.attitude.k_m);
    read(a, "reorth_every", "attitude.reorth_every", cfg.attitude.reorth_every);
    if (a["m_inertial"]) {
      const auto m = read_list(a, "m_inertial", "attitude.m_inertial", 3);
      Vec3 v(m[0], m[1], m[2]);
      if (v.norm() == 0.0) fail("attitude.m_inertial", "must be non-zero");
      if (std::abs(v.norm() - 1.0) > 1e-12) v.normalize();
      cfg.attitude.m_inertial = v;
    }
  }

  if (const YAML::Node i = root["init"]) {
    reject_unknown(i, "init", {"mode", "mean_h", "mean_hdot", "sigma_x", "mean_euler_deg", "attitude_std_deg"});
    if (i["mode"]) {
      std::string mode;
      read(i, "mode", "init.mode", mode);
      if (mode == "sampled") {
        cfg.init.mode = InitMode::kSampled;
      } else if (mode == "truth") {
        cfg.init.mode = InitMode::kTruth;
      } else {
        fail("init.mode", "expected 'sampled' or 'truth'");
      }
    }
    read(i, "mean_h", "init.mean_h", cfg.init.mean_h);
    read(i, "mean_hdot", "init.mean_hdot", cfg.init.mean_hdot);
    read(i, "attitude_std_deg", "init.attitude_std_deg", cfg.init.attitude_std_deg);
    if (i["sigma_x"]) {
      const auto s = read_list(i, "sigma_x", "init.sigma_x", 5);
      cfg.init.sigma_x = Vector5(s.data());
    }
    if (i["mean_euler_deg"]) {
      const auto e = read_list(i, "mean_euler_deg", "init.mean_euler_deg", 3);
      cfg.init.mean_euler_deg = Vec3(e[0], e[1], e[2]);
    }
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const CampaignConfig& cfg) {
  const Vector5 q = cfg.riccati.Q.diagonal();
  const Vector5 p0 = cfg.riccati.P0.diagonal();
  const Vector5& sx = cfg.init.sigma_x;
  const Vec3& m = cfg.attitude.m_inertial;
  const Vec3& e = cfg.init.mean_euler_deg;
  std::ostringstream os;
  os.precision(17);
  os << "duration: " << cfg.duration << '\n'
     << "truth_dt: " << cfg.truth_dt << '\n'
     << "n_runs: " << cfg.n_runs << '\n'
     << "seed: " << cfg.seed << '\n'
     << "threads: " << cfg.threads << '\n'
     << "convergence_threshold: " << cfg.convergence_threshold << '\n'
     << "noise:\n"
     << "  std_accel: " << cfg.noise.std_accel << '\n'
     << "  std_gyro: " << cfg.noise.std_gyro << '\n'
     << "  std_mag: " << cfg.noise.std_mag << '\n'
     << "  var_baro: " << cfg.noise.var_baro << '\n'
     << "  rate_imu: " << cfg.noise.rate_imu << '\n'
     << "  rate_baro: " << cfg.noise.rate_baro << '\n'
     << "  rate_mag: " << cfg.noise.rate_mag << '\n'
     << "riccati:\n"
     << "  q_diag: " << list({q(0), q(1), q(2), q(3), q(4)}) << '\n'
     << "  M: " << cfg.riccati.M << '\n'
     << "  p0_diag: " << list({p0(0), p0(1), p0(2), p0(3), p0(4)}) << '\n'
     << "  joseph_form: " << (cfg.riccati.joseph_form ? "true" : "false") << '\n'
     << "attitude:\n"
     << "  k_z: " << cfg.attitude.k_z << '\n'
     << "  k_m: " << cfg.attitude.k_m << '\n'
     << "  m_inertial: " << list({m.x(), m.y(), m.z()}) << '\n'
     << "  reorth_every: " << cfg.attitude.reorth_every << '\n'
     << "init:\n"
     << "  mode: " << (cfg.init.mode == InitMode::kTruth ? "truth" : "sampled") << '\n'
     << "  mean_h: " << cfg.init.mean_h << '\n'
     << "  mean_hdot: " << cfg.init.mean_hdot << '\n'
     << "  sigma_x: " << list({sx(0), sx(1), sx(2), sx(3), sx(4)}) << '\n'
     << "  mean_euler_deg: " << list({e.x(), e.y(), e.z()}) << '\n'
     << "  attitude_std_deg: " << cfg.init.attitude_std_deg << '\n';
  return os.str();
}

}  // namespace baroatt

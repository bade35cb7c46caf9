// Scenario configuration: a sectioned key-value text format chosen for
// diffability and exact round-tripping (floats are emitted with 17
// significant digits).  parse_scenario and emit_scenario are inverse up to
// canonical formatting; emit(parse(emit(x))) == emit(x).
#pragma once

#include "attobs/observers.hpp"
#include "attobs/sim.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace attobs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One observer entry in a scenario.  type selects the law: "obs1",
/// "obs2", or "baseline" (Observer 1 with the integral term disabled).
struct ObserverSpecCfg {
  std::string name = "obs1";
  std::string type = "obs1";
  Observer1Gains g1;
  Observer2Gains g2;
  Mat3 qc_hat0 = Mat3::Identity();  // initial estimate of the constant rotation
};

struct RunConfig {
  double dt = 1e-3;
  double horizon = 60.0;
  std::uint64_t seed = 1;
  std::string output = "trace.csv";
  long output_every = 10;
};

struct ScenarioConfig {
  Mat3 r0 = Mat3::Identity();
  OmegaSignal omega = OmegaSignal::constant(Vec3::Zero());
  std::vector<ReferenceSignal> g_signals;
  std::vector<ReferenceSignal> b_signals;
  SensorConfig sensors;
  std::vector<ObserverSpecCfg> observers;
  RunConfig run;
};

namespace detail {

struct RawSection {
  std::string name;   // e.g. "truth" or "observer obs1"
  std::vector<std::pair<std::string, std::string>> entries;
  std::map<std::string, int> lines;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<RawSection> tokenize_config(const std::string& text) {
  std::vector<RawSection> sections;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      }
      sections.push_back({trim(line.substr(1, line.size() - 2)), {}, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    if (sections.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": entry outside any section");
    }
    const std::string key = trim(line.substr(0, eq));
    sections.back().entries.emplace_back(key, trim(line.substr(eq + 1)));
    sections.back().lines[key] = lineno;
  }
  return sections;
}

inline double parse_num(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty()) {
    throw ConfigError(where + ": cannot parse number '" + tok + "'");
  }
  return v;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

inline std::vector<double> parse_nums(const std::string& s,
                                      const std::string& where) {
  std::vector<double> out;
  for (const auto& t : split_ws(s)) out.push_back(parse_num(t, where));
  return out;
}

inline bool parse_bool(const std::string& s, const std::string& where) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(where + ": expected true/false, got '" + s + "'");
}

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline OmegaSignal parse_omega(const std::string& val,
                               const std::string& where) {
  auto toks = split_ws(val);
  if (toks.empty()) throw ConfigError(where + ": empty omega descriptor");
  const std::string kind = toks[0];
  std::vector<double> nums;
  for (size_t i = 1; i < toks.size(); ++i) {
    nums.push_back(parse_num(toks[i], where));
  }
  auto knots = [&](const char* what) {
    if (nums.empty() || nums.size() % 4 != 0) {
      throw ConfigError(where + ": " + what +
                        " needs groups of 4 numbers (t x y z)");
    }
    std::vector<double> ts;
    std::vector<Vec3> vs;
    for (size_t i = 0; i < nums.size(); i += 4) {
      ts.push_back(nums[i]);
      vs.emplace_back(nums[i + 1], nums[i + 2], nums[i + 3]);
    }
    return std::make_pair(ts, vs);
  };
  try {
    if (kind == "constant") {
      if (nums.size() != 3) throw ConfigError(where + ": constant needs 3 numbers");
      return OmegaSignal::constant(Vec3(nums[0], nums[1], nums[2]));
    }
    if (kind == "piecewise") {
      auto [ts, vs] = knots("piecewise");
      return OmegaSignal::piecewise(ts, vs);
    }
    if (kind == "tabulated") {
      auto [ts, vs] = knots("tabulated");
      return OmegaSignal::tabulated(ts, vs);
    }
    if (kind == "sinusoid") {
      if (nums.size() != 8) {
        throw ConfigError(where + ": sinusoid needs 8 numbers "
                          "(offset xyz, amplitude xyz, freq_hz, phase)");
      }
      return OmegaSignal::sinusoid(Vec3(nums[0], nums[1], nums[2]),
                                   Vec3(nums[3], nums[4], nums[5]), nums[6],
                                   nums[7]);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown omega kind '" + kind + "'");
}

inline ReferenceSignal parse_reference(const std::string& val,
                                       const std::string& where) {
  auto toks = split_ws(val);
  if (toks.empty()) throw ConfigError(where + ": empty reference descriptor");
  const std::string kind = toks[0];
  std::vector<double> nums;
  for (size_t i = 1; i < toks.size(); ++i) {
    nums.push_back(parse_num(toks[i], where));
  }
  try {
    if (kind == "constant") {
      if (nums.size() != 3) throw ConfigError(where + ": constant needs 3 numbers");
      return ReferenceSignal::constant(Vec3(nums[0], nums[1], nums[2]));
    }
    if (kind == "piecewise") {
      if (nums.empty() || nums.size() % 4 != 0) {
        throw ConfigError(where + ": piecewise needs groups of 4 numbers");
      }
      std::vector<double> ts;
      std::vector<Vec3> vs;
      for (size_t i = 0; i < nums.size(); i += 4) {
        ts.push_back(nums[i]);
        vs.emplace_back(nums[i + 1], nums[i + 2], nums[i + 3]);
      }
      return ReferenceSignal::piecewise(ts, vs);
    }
    if (kind == "rotating") {
      if (nums.size() != 7) {
        throw ConfigError(where + ": rotating needs 7 numbers "
                          "(axis xyz, rate_hz, g0 xyz)");
      }
      return ReferenceSignal::rotating(Vec3(nums[0], nums[1], nums[2]),
                                       nums[3],
                                       Vec3(nums[4], nums[5], nums[6]));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown reference kind '" + kind + "'");
}

inline std::string emit_omega(const OmegaSignal& s) {
  std::string out;
  switch (s.kind) {
    case OmegaSignal::Kind::kConstant:
      out = "constant";
      for (int i = 0; i < 3; ++i) out += " " + fmt_num(s.values[0](i));
      return out;
    case OmegaSignal::Kind::kPiecewise:
    case OmegaSignal::Kind::kTabulated:
      out = s.kind == OmegaSignal::Kind::kPiecewise ? "piecewise" : "tabulated";
      for (size_t k = 0; k < s.times.size(); ++k) {
        out += " " + fmt_num(s.times[k]);
        for (int i = 0; i < 3; ++i) out += " " + fmt_num(s.values[k](i));
      }
      return out;
    case OmegaSignal::Kind::kSinusoid:
      out = "sinusoid";
      for (int i = 0; i < 3; ++i) out += " " + fmt_num(s.offset(i));
      for (int i = 0; i < 3; ++i) out += " " + fmt_num(s.amplitude(i));
      out += " " + fmt_num(s.freq_hz) + " " + fmt_num(s.phase);
      return out;
  }
  throw std::logic_error("unreachable omega kind");
}

inline std::string emit_reference(const ReferenceSignal& s) {
  std::string out;
  switch (s.kind) {
    case ReferenceSignal::Kind::kConstant:
      out = "constant";
      for (int i = 0; i < 3; ++i) out += " " + fmt_num(s.values[0](i));
      return out;
    case ReferenceSignal::Kind::kPiecewise:
      out = "piecewise";
      for (size_t k = 0; k < s.times.size(); ++k) {
        out += " " + fmt_num(s.times[k]);
        for (int i = 0; i < 3; ++i) out += " " + fmt_num(s.values[k](i));
      }
      return out;
    case ReferenceSignal::Kind::kRotating:
      out = "rotating";
      for (int i = 0; i < 3; ++i) out += " " + fmt_num(s.axis(i));
      out += " " + fmt_num(s.rate_hz);
      for (int i = 0; i < 3; ++i) out += " " + fmt_num(s.g0(i));
      return out;
  }
  throw std::logic_error("unreachable reference kind");
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const std::string& text) {
  using namespace detail;
  ScenarioConfig cfg;
  bool saw_r0 = false;
  for (const RawSection& sec : tokenize_config(text)) {
    auto where = [&](const std::string& key) {
      return "[" + sec.name + "] " + key;
    };
    if (sec.name == "truth") {
      for (const auto& [key, val] : sec.entries) {
        if (key == "r0") {
          auto toks = split_ws(val);
          if (!toks.empty() && toks[0] == "euler_deg") {
            if (toks.size() != 4) {
              throw ConfigError(where(key) + ": euler_deg needs 3 angles");
            }
            const double d2r = kPi / 180.0;
            cfg.r0 = rotation_from_euler(parse_num(toks[1], where(key)) * d2r,
                                         parse_num(toks[2], where(key)) * d2r,
                                         parse_num(toks[3], where(key)) * d2r)
                         .matrix();
          } else if (!toks.empty() && toks[0] == "matrix") {
            if (toks.size() != 10) {
              throw ConfigError(where(key) + ": matrix needs 9 entries");
            }
            Mat3 m;
            for (int i = 0; i < 9; ++i) {
              m(i / 3, i % 3) = parse_num(toks[1 + i], where(key));
            }
            try {
              cfg.r0 = Rotation(m).matrix();
            } catch (const std::invalid_argument& e) {
              throw ConfigError(where(key) + ": " + e.what());
            }
          } else {
            throw ConfigError(where(key) + ": expected euler_deg or matrix");
          }
          saw_r0 = true;
        } else if (key == "omega") {
          cfg.omega = parse_omega(val, where(key));
        } else {
          throw ConfigError(where(key) + ": unknown key");
        }
      }
    } else if (sec.name == "references") {
      for (const auto& [key, val] : sec.entries) {
        if (!key.empty() && key[0] == 'g') {
          cfg.g_signals.push_back(parse_reference(val, where(key)));
        } else if (!key.empty() && key[0] == 'b') {
          cfg.b_signals.push_back(parse_reference(val, where(key)));
        } else {
          throw ConfigError(where(key) + ": reference keys must start with g or b");
        }
      }
    } else if (sec.name == "sensors") {
      for (const auto& [key, val] : sec.entries) {
        auto& sn = cfg.sensors;
        auto num = [&] { return parse_num(val, where(key)); };
        if (key == "vector_noise_std") sn.vector_noise_std = num();
        else if (key == "gyro_noise_std") sn.gyro_noise_std = num();
        else if (key == "accel_noise_std") sn.accel_noise_std = num();
        else if (key == "gps_vel_noise_std") sn.gps_vel_noise_std = num();
        else if (key == "delay_tau") sn.delay_tau = num();
        else if (key == "sample_period_vector") sn.sample_period_vector = num();
        else if (key == "sample_period_gyro") sn.sample_period_gyro = num();
        else if (key == "seed") sn.seed = static_cast<std::uint64_t>(num());
        else if (key == "accel_bias") {
          const auto nums = parse_nums(val, where(key));
          if (nums.size() != 3) {
            throw ConfigError(where(key) + ": accel_bias needs 3 numbers");
          }
          sn.accel_bias = Vec3(nums[0], nums[1], nums[2]);
        } else {
          throw ConfigError(where(key) + ": unknown key");
        }
      }
      for (const char* req : {"vector_noise_std", "gyro_noise_std"}) {
        (void)req;  // all sensor keys are optional with zero defaults
      }
      if (cfg.sensors.vector_noise_std < 0.0 || cfg.sensors.gyro_noise_std < 0.0) {
        throw ConfigError("[sensors]: noise levels must be >= 0");
      }
      if (cfg.sensors.delay_tau < 0.0) {
        throw ConfigError("[sensors] delay_tau: must be >= 0");
      }
    } else if (sec.name.rfind("observer", 0) == 0) {
      ObserverSpecCfg ob;
      const auto sp = sec.name.find(' ');
      ob.name = sp == std::string::npos ? "obs" : detail::trim(sec.name.substr(sp));
      if (ob.name.empty()) throw ConfigError("observer section needs a name");
      for (const auto& [key, val] : sec.entries) {
        if (key == "type") ob.type = val;
        else if (key == "qc_hat0") {
          const auto nums = parse_nums(val, where(key));
          if (nums.size() != 9) {
            throw ConfigError(where(key) + ": needs 9 matrix entries");
          }
          Mat3 m;
          for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = nums[static_cast<size_t>(i)];
          try {
            ob.qc_hat0 = Rotation(m).matrix();
          } catch (const std::invalid_argument& e) {
            throw ConfigError(where(key) + ": " + e.what());
          }
        }
        else if (key == "gamma_p") ob.g1.gamma_p = parse_num(val, where(key));
        else if (key == "gamma_i") ob.g1.gamma_i = parse_num(val, where(key));
        else if (key == "T") ob.g1.T = parse_num(val, where(key));
        else if (key == "adaptive_T") ob.g1.adaptive_T = parse_bool(val, where(key));
        else if (key == "adaptive_delta") ob.g1.adaptive_delta = parse_num(val, where(key));
        else if (key == "window_T") ob.g1.window_T = parse_num(val, where(key));
        else if (key == "gamma_z") ob.g2.gamma_z = parse_num(val, where(key));
        else if (key == "gamma") ob.g2.gamma = parse_num(val, where(key));
        else if (key == "gamma_c") ob.g2.gamma_c = parse_num(val, where(key));
        else if (key == "gamma_v") ob.g2.gamma_v = parse_num(val, where(key));
        else throw ConfigError(where(key) + ": unknown key");
      }
      if (ob.type != "obs1" && ob.type != "obs2" && ob.type != "baseline") {
        throw ConfigError("[" + sec.name + "] type: must be obs1, obs2 or baseline");
      }
      if (ob.type == "baseline") ob.g1.gamma_i = 0.0;
      if (ob.type == "obs1" &&
          (ob.g1.gamma_p <= 0.0 || ob.g1.gamma_i <= 0.0 || ob.g1.T <= 0.0)) {
        throw ConfigError("[" + sec.name + "]: obs1 gains and T must be positive");
      }
      if (ob.type == "obs2" &&
          (ob.g2.gamma_z <= 0.0 || ob.g2.gamma <= 0.0 || ob.g2.gamma_c <= 0.0 ||
           ob.g2.gamma_v <= 0.0)) {
        throw ConfigError("[" + sec.name + "]: obs2 gains must be positive");
      }
      cfg.observers.push_back(ob);
    } else if (sec.name == "run") {
      for (const auto& [key, val] : sec.entries) {
        if (key == "dt") cfg.run.dt = parse_num(val, where(key));
        else if (key == "horizon") cfg.run.horizon = parse_num(val, where(key));
        else if (key == "seed") cfg.run.seed = static_cast<std::uint64_t>(parse_num(val, where(key)));
        else if (key == "output") cfg.run.output = val;
        else if (key == "output_every") cfg.run.output_every = std::lround(parse_num(val, where(key)));
        else throw ConfigError(where(key) + ": unknown key");
      }
      if (!(cfg.run.dt > 0.0)) throw ConfigError("[run] dt: must be positive");
      if (cfg.run.horizon < 0.0) throw ConfigError("[run] horizon: must be >= 0");
      if (cfg.run.output_every < 1) throw ConfigError("[run] output_every: must be >= 1");
    } else {
      throw ConfigError("unknown section [" + sec.name + "]");
    }
  }
  (void)saw_r0;
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

inline std::string emit_scenario(const ScenarioConfig& cfg) {
  using namespace detail;
  std::ostringstream out;
  out << "# attitude estimation scenario\n";
  out << "[truth]\n";
  out << "r0 = matrix";
  for (int i = 0; i < 9; ++i) out << " " << fmt_num(cfg.r0(i / 3, i % 3));
  out << "\n";
  out << "omega = " << emit_omega(cfg.omega) << "\n\n";

  out << "[references]\n";
  for (size_t i = 0; i < cfg.g_signals.size(); ++i) {
    out << "g" << (i == 0 ? "" : std::to_string(i + 1)) << " = "
        << emit_reference(cfg.g_signals[i]) << "\n";
  }
  for (size_t i = 0; i < cfg.b_signals.size(); ++i) {
    out << "b" << (i == 0 ? "" : std::to_string(i + 1)) << " = "
        << emit_reference(cfg.b_signals[i]) << "\n";
  }
  out << "\n[sensors]\n";
  const auto& sn = cfg.sensors;
  out << "vector_noise_std = " << fmt_num(sn.vector_noise_std) << "\n";
  out << "gyro_noise_std = " << fmt_num(sn.gyro_noise_std) << "\n";
  out << "accel_bias = " << fmt_num(sn.accel_bias.x()) << " "
      << fmt_num(sn.accel_bias.y()) << " " << fmt_num(sn.accel_bias.z()) << "\n";
  out << "accel_noise_std = " << fmt_num(sn.accel_noise_std) << "\n";
  out << "gps_vel_noise_std = " << fmt_num(sn.gps_vel_noise_std) << "\n";
  out << "delay_tau = " << fmt_num(sn.delay_tau) << "\n";
  out << "sample_period_vector = " << fmt_num(sn.sample_period_vector) << "\n";
  out << "sample_period_gyro = " << fmt_num(sn.sample_period_gyro) << "\n";
  out << "seed = " << sn.seed << "\n";

  for (const auto& ob : cfg.observers) {
    out << "\n[observer " << ob.name << "]\n";
    out << "type = " << ob.type << "\n";
    if ((ob.qc_hat0 - Mat3::Identity()).norm() > 0.0) {
      out << "qc_hat0 =";
      for (int i = 0; i < 9; ++i) out << " " << fmt_num(ob.qc_hat0(i / 3, i % 3));
      out << "\n";
    }
    if (ob.type == "obs2") {
      out << "gamma_z = " << fmt_num(ob.g2.gamma_z) << "\n";
      out << "gamma = " << fmt_num(ob.g2.gamma) << "\n";
      out << "gamma_c = " << fmt_num(ob.g2.gamma_c) << "\n";
      out << "gamma_v = " << fmt_num(ob.g2.gamma_v) << "\n";
    } else {
      out << "gamma_p = " << fmt_num(ob.g1.gamma_p) << "\n";
      if (ob.type == "obs1") {
        out << "gamma_i = " << fmt_num(ob.g1.gamma_i) << "\n";
        out << "T = " << fmt_num(ob.g1.T) << "\n";
        out << "adaptive_T = " << (ob.g1.adaptive_T ? "true" : "false") << "\n";
        out << "adaptive_delta = " << fmt_num(ob.g1.adaptive_delta) << "\n";
        out << "window_T = " << fmt_num(ob.g1.window_T) << "\n";
      }
    }
  }

  out << "\n[run]\n";
  out << "dt = " << fmt_num(cfg.run.dt) << "\n";
  out << "horizon = " << fmt_num(cfg.run.horizon) << "\n";
  out << "seed = " << cfg.run.seed << "\n";
  out << "output = " << cfg.run.output << "\n";
  out << "output_every = " << cfg.run.output_every << "\n";
  return out.str();
}

/// Canonical single-vector benchmark scenario: piecewise reference
/// switching e1 -> e3 at 5 s, constant rates, R0 a half-turn about z.
inline ScenarioConfig example1_config(bool noise = false,
                                      std::uint64_t seed = 1) {
  ScenarioConfig cfg;
  Mat3 r0;
  r0 << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  cfg.r0 = r0;
  cfg.omega = OmegaSignal::constant(Vec3(0.23, -0.5, 0.15));
  cfg.g_signals.push_back(ReferenceSignal::piecewise(
      {0.0, 5.0}, {Vec3::UnitX(), Vec3::UnitZ()}));
  if (noise) {
    cfg.sensors.vector_noise_std = 0.01;
    cfg.sensors.gyro_noise_std = 0.005;
  }
  cfg.sensors.seed = seed;

  ObserverSpecCfg o1;
  o1.name = "obs1";
  o1.type = "obs1";
  o1.g1 = Observer1Gains{3.0, 1.0, 10.0, false, 0.1, 0.0};
  cfg.observers.push_back(o1);

  ObserverSpecCfg o2;
  o2.name = "obs2";
  o2.type = "obs2";
  o2.g2 = Observer2Gains{1.0, 1.0, 3.0, 1.0};
  cfg.observers.push_back(o2);

  ObserverSpecCfg ob;
  ob.name = "baseline";
  ob.type = "baseline";
  ob.g1 = Observer1Gains{3.0, 0.0, 10.0, false, 0.1, 0.0};
  cfg.observers.push_back(ob);

  cfg.run.dt = 1e-3;
  cfg.run.horizon = 60.0;
  cfg.run.seed = seed;
  cfg.run.output = "example1_trace.csv";
  cfg.run.output_every = 10;
  return cfg;
}

/// Default sensor degradation for the vehicle scenario.
inline SensorConfig example2_sensors(std::uint64_t seed = 1) {
  SensorConfig s;
  s.gyro_noise_std = 0.005;
  s.accel_bias = Vec3(0.05, -0.03, 0.02);
  s.accel_noise_std = 0.1;
  s.gps_vel_noise_std = 0.05;
  s.seed = seed;
  return s;
}

}  // namespace attobs

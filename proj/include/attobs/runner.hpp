// Scenario execution: multi-rate closed-loop simulation of the truth
// attitude, sensor models, and any number of configured observers sharing
// one dynamic extension.  Also bundles the observability check battery and
// the two canonical demonstration scenarios.
#pragma once

#include "attobs/config.hpp"
#include "attobs/helicopter.hpp"
#include "attobs/observability.hpp"
#include "attobs/observers.hpp"
#include "attobs/sim.hpp"
#include "attobs/trace.hpp"

#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

namespace attobs {

struct ObserverRunStats {
  std::string name;
  std::string type;
  double terminal_dist = 0.0;
  double v_end = 0.0;
  double v_max = 0.0;
  double max_ortho_defect = 0.0;       // over Q, Qc_hat, R_hat at output steps
  double min_virtual_margin = std::numeric_limits<double>::infinity();
  Rotation Qc_hat_final;
  std::vector<double> p_err;           // obs2: ||P - Qc^T||_F at output steps
};

struct SimulationResult {
  SimulationTrace trace;
  std::vector<ObserverRunStats> stats;
  Rotation Qc_true0;           // Q(0) R(0)^T = R0^T
  double pebo_invariant_max = 0.0;  // max_t ||Q R^T - Qc_true0||_F, output steps
  RegressorBatch batch;        // held pairs decimated to 0.1 s
  double dt = 0.0;
  double horizon = 0.0;
};

namespace detail {

inline long rate_multiple(double period, double dt, const char* what) {
  if (period <= 0.0) return 1;
  const long m = std::lround(period / dt);
  if (m < 1 || std::abs(static_cast<double>(m) * dt - period) > 1e-9) {
    throw ConfigError(std::string(what) +
                      ": must be a positive integer multiple of dt");
  }
  return m;
}

inline const ObserverRunStats& find_stats(const SimulationResult& res,
                                          const std::string& name) {
  for (const auto& st : res.stats) {
    if (st.name == name) return st;
  }
  throw std::invalid_argument("no observer named " + name + " in result");
}

inline const ObserverTrace& find_trace(const SimulationTrace& tr,
                                       const std::string& name) {
  for (const auto& ob : tr.observers) {
    if (ob.name == name) return ob;
  }
  throw std::invalid_argument("no observer named " + name + " in trace");
}

inline double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a < -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace detail

/// Runs the configured scenario.  All observers consume the same gyro
/// stream through one shared dynamic extension and the same vector
/// measurement feed (the first g reference; additional references take part
/// in the observability checks only).  Delay and subsampling are handled by
/// the input adapters: during the initial [0, tau) warm-up corrections are
/// skipped, and between vector samples the last generalized pair is held.
inline SimulationResult simulate_scenario(const ScenarioConfig& cfg) {
  const double dt = cfg.run.dt;
  Rotation r0;
  try {
    r0 = Rotation(cfg.r0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[truth] r0: ") + e.what());
  }
  if (!cfg.observers.empty() && cfg.g_signals.empty()) {
    throw ConfigError("[references]: observer feeds need a g signal");
  }
  const long n = cfg.run.horizon == 0.0 ? 0 : steps_for(cfg.run.horizon, dt);
  const long m_v =
      detail::rate_multiple(cfg.sensors.sample_period_vector, dt,
                            "[sensors] sample_period_vector");
  const long m_g = detail::rate_multiple(cfg.sensors.sample_period_gyro, dt,
                                         "[sensors] sample_period_gyro");
  long m_tau = 0;
  if (cfg.sensors.delay_tau > 0.0) {
    m_tau = std::lround(cfg.sensors.delay_tau / dt);
    if (m_tau < 0 ||
        std::abs(static_cast<double>(m_tau) * dt - cfg.sensors.delay_tau) > 1e-9) {
      throw ConfigError("[sensors] delay_tau: must be a multiple of dt");
    }
  }
  const long batch_every = std::max<long>(1, std::lround(0.1 / dt));

  // Truth attitude on the integrator grid.
  Trajectory truth;
  if (n > 0) {
    truth = integrate_attitude(r0, cfg.omega, dt, cfg.run.horizon);
  } else {
    truth.dt = dt;
    truth.t = {0.0};
    truth.R = {r0};
  }

  std::mt19937_64 rng(cfg.sensors.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  struct Inst {
    ObserverSpecCfg spec;
    bool is2 = false;
    Observer1State s1;
    Observer2State s2;
    ObserverRunStats st;
  };
  std::vector<Inst> obs;
  for (const auto& spec : cfg.observers) {
    Inst in;
    in.spec = spec;
    in.is2 = spec.type == "obs2";
    Rotation qc0;
    try {
      qc0 = Rotation(spec.qc_hat0);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("[observer " + spec.name + "] qc_hat0: " + e.what());
    }
    in.s1.Qc_hat = qc0;
    in.s2.Qc_hat = qc0;
    in.st.name = spec.name;
    in.st.type = spec.type;
    obs.push_back(std::move(in));
  }

  PeboState pebo;  // shared extension, Q(0) = I
  DelayedFeed dfeed(static_cast<double>(m_tau) * dt, dt);
  const ReferenceSignal* gsig =
      cfg.g_signals.empty() ? nullptr : &cfg.g_signals.front();

  SimulationResult res;
  res.dt = dt;
  res.horizon = cfg.run.horizon;
  res.Qc_true0 = Rotation::unchecked(pebo.Q.matrix() * r0.matrix().transpose());
  res.trace.observers.resize(obs.size());
  for (size_t i = 0; i < obs.size(); ++i) {
    res.trace.observers[i].name = obs[i].spec.name;
  }

  Vec3 omega_held = Vec3::Zero();
  Vec3 yc_held = Vec3::Zero();
  Vec3 bc_held = Vec3::Zero();
  bool have_pair = false;

  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Rotation& r_true = truth.R[static_cast<size_t>(k)];

    if (k % cfg.run.output_every == 0 || k == n) {
      res.trace.t.push_back(t);
      const EulerZyx e_true = euler_zyx(r_true);
      res.trace.yaw_true.push_back(e_true.yaw);
      res.trace.pitch_true.push_back(e_true.pitch);
      res.trace.roll_true.push_back(e_true.roll);
      const Rotation qc_now = Rotation::unchecked(
          pebo.Q.matrix() * r_true.matrix().transpose());
      res.pebo_invariant_max =
          std::max(res.pebo_invariant_max,
                   (qc_now.matrix() - res.Qc_true0.matrix()).norm());
      for (size_t i = 0; i < obs.size(); ++i) {
        Inst& in = obs[i];
        const Rotation& qc_hat = in.is2 ? in.s2.Qc_hat : in.s1.Qc_hat;
        const Rotation r_hat = attitude_estimate(qc_hat, pebo.Q);
        ObserverTrace& tr = res.trace.observers[i];
        const EulerZyx e = euler_zyx(r_hat);
        tr.yaw.push_back(e.yaw);
        tr.pitch.push_back(e.pitch);
        tr.roll.push_back(e.roll);
        tr.dist.push_back(dist_to_identity(Rotation::unchecked(
            r_hat.matrix().transpose() * r_true.matrix())));
        const double v = lyapunov_v(qc_hat, qc_now);
        tr.V.push_back(v);
        in.st.v_max = std::max(in.st.v_max, v);
        in.st.max_ortho_defect = std::max(
            {in.st.max_ortho_defect, orthonormality_defect(pebo.Q.matrix()),
             orthonormality_defect(qc_hat.matrix()),
             orthonormality_defect(r_hat.matrix())});
        if (in.is2) {
          in.st.p_err.push_back(
              (in.s2.P - qc_now.matrix().transpose()).norm());
        }
      }
    }
    if (k == n) break;

    if (m_tau > 0) dfeed.record(pebo.Q);

    if (k % m_g == 0) {
      omega_held = cfg.omega.at(t + 0.5 * dt);
      if (cfg.sensors.gyro_noise_std > 0.0) {
        omega_held += cfg.sensors.gyro_noise_std *
                      Vec3(gauss(rng), gauss(rng), gauss(rng));
      }
    }

    if (gsig != nullptr && k % m_v == 0) {
      const long datum_k = k - m_tau;
      if (datum_k >= 0) {
        const double t_d = static_cast<double>(datum_k) * dt;
        const UnitVec3 y_B =
            measure_complementary(truth.R[static_cast<size_t>(datum_k)],
                                  gsig->unit_at(t_d),
                                  cfg.sensors.vector_noise_std, rng);
        if (m_tau > 0) {
          std::tie(yc_held, bc_held) = dfeed.pair_for(y_B, gsig->at(t_d));
        } else {
          yc_held = pebo.Q * y_B.vec();
          bc_held = gsig->at(t_d);
        }
        have_pair = true;
      }
    }

    if (have_pair && k % batch_every == 0) {
      res.batch.t.push_back(t);
      res.batch.Y.push_back(yc_held);
      res.batch.phi.push_back(bc_held);
    }

    if (have_pair) {
      for (Inst& in : obs) {
        if (in.is2) {
          observer2_step_pair(in.s2, in.spec.g2, yc_held, bc_held, dt);
        } else {
          observer1_step_pair(in.s1, in.spec.g1, yc_held, bc_held, dt);
        }
      }
    }

    pebo_step(pebo, omega_held, dt);
    for (Inst& in : obs) {
      in.s1.pebo = pebo;
      in.s2.pebo = pebo;
    }
  }

  for (size_t i = 0; i < obs.size(); ++i) {
    Inst& in = obs[i];
    in.st.terminal_dist = res.trace.observers[i].dist.back();
    in.st.v_end = res.trace.observers[i].V.back();
    in.st.Qc_hat_final = in.is2 ? in.s2.Qc_hat : in.s1.Qc_hat;
    if (in.is2) in.st.min_virtual_margin = in.s2.min_virtual_margin;
    res.stats.push_back(std::move(in.st));
  }
  return res;
}

/// Output location: ATTOBS_OUTPUT_DIR overrides the directory while keeping
/// the configured file name.
inline std::string resolve_output_path(const std::string& name) {
  const char* dir = std::getenv("ATTOBS_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return name;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / std::filesystem::path(name).filename())
      .string();
}

inline std::string format_run_summary(const ScenarioConfig& cfg,
                                      const SimulationResult& res) {
  std::ostringstream out;
  out << "run: horizon=" << cfg.run.horizon << " s, dt=" << cfg.run.dt
      << " s, seed=" << cfg.sensors.seed << "\n";
  out << "pebo invariant max |Q R^T - Qc|: " << res.pebo_invariant_max << "\n";
  for (const auto& st : res.stats) {
    out << "observer " << st.name << " (" << st.type << ")"
        << ": terminal_dist=" << st.terminal_dist << " V_end=" << st.v_end
        << " V_max=" << st.v_max << " max_ortho_defect=" << st.max_ortho_defect;
    if (st.type == "obs2") {
      out << " min_virtual_margin=" << st.min_virtual_margin;
      if (!st.p_err.empty()) out << " p_err_end=" << st.p_err.back();
    }
    out << "\n";
  }
  return out.str();
}

struct RunOutput {
  std::string csv_path;
  std::string summary;
  SimulationResult result;
};

/// Simulates and writes the CSV trace (path from cfg.run.output, directory
/// overridable via ATTOBS_OUTPUT_DIR).
inline RunOutput run_scenario(const ScenarioConfig& cfg) {
  RunOutput out;
  out.result = simulate_scenario(cfg);
  out.csv_path = resolve_output_path(cfg.run.output);
  write_trace_csv(out.result.trace, out.csv_path);
  out.summary = format_run_summary(cfg, out.result);
  return out;
}

struct CheckReport {
  std::vector<ConditionReport> conditions;
  std::vector<ExcitationReport> excitations;
};

/// Full observability battery for a scenario: the necessary-and-sufficient
/// pairwise check (with and without the true R0), the integral sufficient
/// condition, the single-vector and three-moment specializations of the
/// first g reference, and interval / persistent excitation of its Gramian.
inline CheckReport check_scenario(const ScenarioConfig& cfg) {
  const double horizon = cfg.run.horizon > 0.0 ? cfg.run.horizon : 60.0;
  const auto grid = make_check_grid(horizon, cfg.run.dt);
  Rotation r0;
  try {
    r0 = Rotation(cfg.r0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[truth] r0: ") + e.what());
  }
  if (cfg.g_signals.empty() && cfg.b_signals.empty()) {
    throw ConfigError("[references]: checks need at least one signal");
  }

  CheckReport rep;
  rep.conditions.push_back(check_distinguishability(
      cfg.g_signals, cfg.b_signals, cfg.omega, r0, grid));
  rep.conditions.push_back(check_distinguishability_modified(
      cfg.g_signals, cfg.b_signals, cfg.omega, grid));
  rep.conditions.push_back(check_trumpf(cfg.g_signals, cfg.b_signals,
                                        cfg.omega, horizon, grid, 1e-3));
  if (!cfg.g_signals.empty()) {
    const auto& g = cfg.g_signals.front();
    rep.conditions.push_back(check_single_vector(g, grid));
    rep.conditions.push_back(check_three_moment(g, grid));
    std::vector<Vec3> samples;
    samples.reserve(grid.size());
    for (double t : grid) samples.push_back(g.at(t));
    rep.excitations.push_back(check_excitation(grid, samples,
                                               ExcitationKind::kIE, horizon));
    rep.excitations.push_back(check_excitation(
        grid, samples, ExcitationKind::kPE, std::min(10.0, horizon)));
  }
  return rep;
}

inline std::string format_check_report(const CheckReport& rep) {
  std::ostringstream out;
  for (const auto& c : rep.conditions) {
    out << c.condition_id << ": " << (c.satisfied ? "satisfied" : "violated")
        << " margin=" << c.margin << " threshold=" << c.threshold;
    if (c.witness_count > 0) {
      out << " witness=(";
      for (int i = 0; i < c.witness_count; ++i) {
        out << (i > 0 ? ", " : "") << c.witness[static_cast<size_t>(i)];
      }
      out << ")";
    }
    out << "\n";
  }
  for (const auto& e : rep.excitations) {
    out << (e.kind == ExcitationKind::kIE ? "interval excitation"
                                          : "persistent excitation")
        << ": " << (e.satisfied ? "satisfied" : "violated")
        << " delta=" << e.delta << " threshold=" << e.threshold
        << " window=" << e.window_T << "\n";
  }
  return out.str();
}

struct Example2Result {
  SimulationTrace trace;  // observers: "obs1" (proposed feed), "baseline"
  std::array<std::pair<double, double>, 2> windows{};  // turn plateaus, s
  double mean_err_proposed = 0.0;  // mean |Euler error| on the windows, rad
  double mean_err_baseline = 0.0;
  double max_ortho_defect = 0.0;
};

/// Vehicle scenario: attitude from a rate gyro, an accelerometer, and GPS
/// velocity.  The proposed feed pairs the low-passed extension-resolved
/// specific force with a dirty-derivative acceleration estimate built from
/// the same filter (alpha), so both sides carry the same lag; the baseline
/// pairs the raw specific force with a faster dirty derivative
/// (alpha_baseline), whose residual lag shows up as a steady-state Euler
/// offset during turns.  Both feeds are normalized before the update and a
/// correction is skipped entirely if either side loses most of its length.
inline Example2Result run_example2(double alpha = 1.0,
                                   double alpha_baseline = 8.0,
                                   const SensorConfig& sensors = example2_sensors(),
                                   double horizon = 60.0, double dt = 1e-3) {
  const double sensor_dt = 0.01;
  const double gps_dt = 0.1;
  HelicopterData data = helicopter_scenario(sensors, alpha, horizon,
                                            sensor_dt, gps_dt);

  // Baseline dirty derivative of the same noisy GPS stream.
  std::vector<Vec3> h1_base(data.gps_vel.v.size());
  {
    FirstOrderLag h2b{alpha_baseline};
    for (size_t k = 0; k < data.gps_vel.v.size(); ++k) {
      const Vec3& v = data.gps_vel.v[k];
      if (k == 0) h2b.h = v;
      const Vec3 h2v = k == 0 ? h2b.h : h2b.step(v, gps_dt);
      h1_base[k] = alpha_baseline * (v - h2v);
    }
  }

  const long n = steps_for(horizon, dt);
  const long m_s = std::lround(sensor_dt / dt);
  const long m_gps = std::lround(gps_dt / dt);
  const long out_every = m_s;  // record at the sensor rate

  Observer1Gains gains{5.0, 1.0, 30.0, false, 0.1, 0.0};
  Observer1State prop, base;
  PeboState pebo;
  FirstOrderLag h2y{alpha};  // H2 of the extension-resolved specific force

  Vec3 omega_held = Vec3::Zero();
  Vec3 y_prop = Vec3::Zero(), y_base = Vec3::Zero();
  Vec3 b_prop = Vec3::Zero(), b_base = Vec3::Zero();

  Example2Result res;
  res.trace.observers.resize(2);
  res.trace.observers[0].name = "obs1";
  res.trace.observers[1].name = "baseline";
  const double plateau_pad = 1.0;
  res.windows = {
      std::make_pair(data.path.turn1.t_on + data.path.turn1.ramp + plateau_pad,
                     data.path.turn1.t_off - data.path.turn1.ramp - plateau_pad),
      std::make_pair(data.path.turn2.t_on + data.path.turn2.ramp + plateau_pad,
                     data.path.turn2.t_off - data.path.turn2.ramp - plateau_pad)};

  double sum_prop = 0.0, sum_base = 0.0;
  long n_window = 0;

  auto record = [&](long k) {
    const double t = static_cast<double>(k) * dt;
    const Rotation r_true = data.path.attitude(t);
    res.trace.t.push_back(t);
    const EulerZyx e_true = euler_zyx(r_true);
    res.trace.yaw_true.push_back(e_true.yaw);
    res.trace.pitch_true.push_back(e_true.pitch);
    res.trace.roll_true.push_back(e_true.roll);
    const Rotation qc_now =
        Rotation::unchecked(pebo.Q.matrix() * r_true.matrix().transpose());
    const Observer1State* st[2] = {&prop, &base};
    bool in_window = false;
    for (const auto& w : res.windows) {
      in_window = in_window || (t >= w.first && t <= w.second);
    }
    for (int i = 0; i < 2; ++i) {
      const Rotation r_hat = attitude_estimate(st[i]->Qc_hat, pebo.Q);
      ObserverTrace& tr = res.trace.observers[static_cast<size_t>(i)];
      const EulerZyx e = euler_zyx(r_hat);
      tr.yaw.push_back(e.yaw);
      tr.pitch.push_back(e.pitch);
      tr.roll.push_back(e.roll);
      tr.dist.push_back(dist_to_identity(Rotation::unchecked(
          r_hat.matrix().transpose() * r_true.matrix())));
      tr.V.push_back(lyapunov_v(st[i]->Qc_hat, qc_now));
      res.max_ortho_defect = std::max(
          {res.max_ortho_defect, orthonormality_defect(pebo.Q.matrix()),
           orthonormality_defect(st[i]->Qc_hat.matrix()),
           orthonormality_defect(r_hat.matrix())});
      if (in_window) {
        const double err =
            (std::abs(detail::wrap_angle(e.yaw - e_true.yaw)) +
             std::abs(detail::wrap_angle(e.pitch - e_true.pitch)) +
             std::abs(detail::wrap_angle(e.roll - e_true.roll))) /
            3.0;
        (i == 0 ? sum_prop : sum_base) += err;
        if (i == 0) ++n_window;
      }
    }
  };

  bool have_pair = false;
  for (long k = 0; k <= n; ++k) {
    if (k % out_every == 0 || k == n) record(k);
    if (k == n) break;

    if (k % m_s == 0) {
      const size_t i_s = static_cast<size_t>(k / m_s);
      omega_held = data.gyro.v[i_s];
      const Vec3 qa = pebo.Q * data.accel.v[i_s];
      if (i_s == 0) h2y.h = qa;
      y_prop = i_s == 0 ? qa : h2y.step(qa, sensor_dt);
      y_base = qa;
    }
    if (k % m_gps == 0) {
      const size_t i_g = static_cast<size_t>(k / m_gps);
      b_prop = data.h1_v.v[i_g] - kGravityVec;
      b_base = h1_base[i_g] - kGravityVec;
      have_pair = true;
    }

    if (have_pair) {
      // Normalized feeds; a pair is dropped if either side collapses.
      if (y_prop.norm() > 0.5 && b_prop.norm() > 0.5) {
        observer1_step_pair(prop, gains, y_prop.normalized(),
                            b_prop.normalized(), dt);
      }
      if (y_base.norm() > 0.5 && b_base.norm() > 0.5) {
        observer1_step_pair(base, gains, y_base.normalized(),
                            b_base.normalized(), dt);
      }
    }
    pebo_step(pebo, omega_held, dt);
    prop.pebo = pebo;
    base.pebo = pebo;
  }

  if (n_window > 0) {
    res.mean_err_proposed = sum_prop / static_cast<double>(n_window);
    res.mean_err_baseline = sum_base / static_cast<double>(n_window);
  }
  return res;
}

}  // namespace attobs

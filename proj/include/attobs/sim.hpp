// Ground-truth simulation: geometric attitude integration, transition
// matrices of the dynamic extension, measurement models, and stream
// degradation (delay / intermittent sampling).
#pragma once

#include "attobs/signals.hpp"
#include "attobs/so3.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace attobs {

/// Raised when a simulation produces non-finite values.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sensor degradation settings shared by all scenarios.  The accel/GPS
/// fields only apply to the vehicle scenario, whose vector measurements
/// carry physical units.
struct SensorConfig {
  double vector_noise_std = 0.0;      // additive, before re-normalization
  double gyro_noise_std = 0.0;        // rad/s
  Vec3 accel_bias = Vec3::Zero();     // m/s^2, body frame, uncompensated
  double accel_noise_std = 0.0;       // m/s^2
  double gps_vel_noise_std = 0.0;     // m/s
  double delay_tau = 0.0;             // s
  double sample_period_vector = 0.0;  // 0 = every integrator step
  double sample_period_gyro = 0.0;    // 0 = every integrator step
  std::uint64_t seed = 1;
};

/// Attitude samples R(k dt) on a uniform grid.
struct Trajectory {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<Rotation> R;
};

/// Timestamped 3-vector samples.  datum_t records when each sample was
/// physically taken (differs from t under delay).
struct MeasurementStream {
  std::string kind;
  std::vector<double> t;
  std::vector<double> datum_t;
  std::vector<Vec3> v;
};

inline long steps_for(double horizon, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (horizon < dt) throw std::invalid_argument("horizon must be >= dt");
  const long n = std::lround(horizon / dt);
  if (std::abs(static_cast<double>(n) * dt - horizon) > 1e-6) {
    throw std::invalid_argument("horizon must be an integer multiple of dt");
  }
  return n;
}

/// Integrates dR/dt = R * skew(omega) with the midpoint-sampled geometric
/// rule R_{k+1} = R_k * exp(dt * omega(t_k + dt/2)) (globally second
/// order), re-projecting onto SO(3) every reproject_every steps.
inline Trajectory integrate_attitude(const Rotation& r0,
                                     const OmegaSignal& omega, double dt,
                                     double horizon,
                                     long reproject_every = 1000) {
  const long n = steps_for(horizon, dt);
  Trajectory traj;
  traj.dt = dt;
  traj.t.reserve(static_cast<size_t>(n) + 1);
  traj.R.reserve(static_cast<size_t>(n) + 1);
  Rotation r = r0;
  traj.t.push_back(0.0);
  traj.R.push_back(r);
  for (long k = 0; k < n; ++k) {
    const double tk = static_cast<double>(k) * dt;
    const Vec3 w = omega.at(tk + 0.5 * dt);
    if (!w.allFinite()) {
      throw NumericError("non-finite omega sample at t=" + std::to_string(tk));
    }
    r = r * exp_so3(dt * w);
    if (reproject_every > 0 && (k + 1) % reproject_every == 0) {
      r = project_so3(r.matrix());
    }
    traj.t.push_back(static_cast<double>(k + 1) * dt);
    traj.R.push_back(r);
  }
  return traj;
}

/// Transition matrix Phi(s, t) = Q(s)^T Q(t) of dx/dt = omega x x, where
/// dQ/dt = Q * skew(omega), Q(0) = I.  s and t snap to the integration
/// grid of step dt.
inline Rotation transition_matrix(const OmegaSignal& omega, double s, double t,
                                  double dt = 1e-3) {
  if (s < 0.0 || t < 0.0) {
    throw std::invalid_argument("transition_matrix: times must be >= 0");
  }
  const double horizon = std::max(s, t);
  if (horizon < 0.5 * dt) return Rotation::identity();
  const long n = std::lround(horizon / dt);
  Rotation q = Rotation::identity();
  Rotation qs = Rotation::identity();
  Rotation qt = Rotation::identity();
  const long is = std::lround(s / dt);
  const long it = std::lround(t / dt);
  for (long k = 0; k < n; ++k) {
    if (k == is) qs = q;
    if (k == it) qt = q;
    q = q * exp_so3(dt * omega.at((static_cast<double>(k) + 0.5) * dt));
  }
  if (is >= n) qs = q;
  if (it >= n) qt = q;
  return Rotation::unchecked(qs.matrix().transpose() * qt.matrix());
}

/// Complementary measurement y_B = R^T g of an inertial direction, with
/// additive Gaussian noise followed by re-normalization.
inline UnitVec3 measure_complementary(const Rotation& r, const UnitVec3& g,
                                      double noise_std, std::mt19937_64& rng) {
  Vec3 y = r.matrix().transpose() * g.vec();
  if (noise_std > 0.0) {
    std::normal_distribution<double> n(0.0, noise_std);
    y += Vec3(n(rng), n(rng), n(rng));
  }
  return UnitVec3::normalized(y);
}

/// Compatible measurement y_I = R b of a body-fixed direction.
inline UnitVec3 measure_compatible(const Rotation& r, const UnitVec3& b,
                                   double noise_std, std::mt19937_64& rng) {
  Vec3 y = r.matrix() * b.vec();
  if (noise_std > 0.0) {
    std::normal_distribution<double> n(0.0, noise_std);
    y += Vec3(n(rng), n(rng), n(rng));
  }
  return UnitVec3::normalized(y);
}

/// Applies transport delay and zero-order-hold subsampling to a stream on a
/// uniform grid: the output at time t_k holds the newest sample taken at or
/// before t_k - tau on the sample_period grid.  Output rows before the first
/// available datum are dropped.
inline MeasurementStream degrade_stream(const MeasurementStream& in,
                                        double delay_tau,
                                        double sample_period) {
  if (in.t.size() < 2) {
    throw std::invalid_argument("degrade_stream: need at least two samples");
  }
  const double t0 = in.t.front();
  const double dt = in.t[1] - in.t[0];
  const double horizon = in.t.back() - t0;
  if (delay_tau < 0.0 || sample_period < 0.0) {
    throw std::invalid_argument("degrade_stream: tau and period must be >= 0");
  }
  if (delay_tau > horizon) {
    throw std::invalid_argument("degrade_stream: delay exceeds stream horizon");
  }
  const double period = sample_period > 0.0 ? sample_period : dt;
  MeasurementStream out;
  out.kind = in.kind;
  for (size_t k = 0; k < in.t.size(); ++k) {
    const double datum = in.t[k] - t0 - delay_tau;
    if (datum < -1e-12) continue;
    // Newest sample instant on the period grid at or before the datum time.
    const double snapped =
        std::floor((datum + 1e-12) / period) * period;
    const long idx = std::lround(snapped / dt);
    const auto i = static_cast<size_t>(std::clamp<long>(
        idx, 0, static_cast<long>(in.t.size()) - 1));
    out.t.push_back(in.t[k]);
    out.datum_t.push_back(in.t[i]);
    out.v.push_back(in.v[i]);
  }
  if (out.t.empty()) {
    throw std::invalid_argument("degrade_stream: no samples survive the delay");
  }
  return out;
}

/// Writes rows "t,<kind>,v1,v2,v3" with 17-significant-digit floats.
inline void export_stream_csv(const MeasurementStream& s,
                              const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[256];
  for (size_t k = 0; k < s.t.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%.17g,%.17g\n", s.t[k],
                  s.kind.c_str(), s.v[k].x(), s.v[k].y(), s.v[k].z());
    f << buf;
  }
}

}  // namespace attobs

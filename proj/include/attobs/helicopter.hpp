// Vehicle scenario with a highly time-varying vector measurement: a
// helicopter flies a documented closed-form path (initial climb plus two
// coordinated turns), its accelerometer senses body-frame specific force
// B_a = R^T (dv/dt - g_I), and GPS provides velocity at a lower rate.  The
// inertial counterpart of the accelerometer vector is recovered without
// explicit differentiation through the first-order filters
//   H1(p) = alpha p / (alpha + p)   (dirty derivative, applied to v)
//   H2(p) = alpha / (alpha + p)     (low-pass, applied to Q * B_a)
// which satisfy H2[Q B_a] = Q_c (H1[v] - H2[g_I]) up to an exponentially
// vanishing initial-condition term.
#pragma once

#include "attobs/sim.hpp"

#include <random>

namespace attobs {

inline constexpr double kGravity = 9.80665;  // m/s^2
inline const Vec3 kGravityVec(0.0, 0.0, -kGravity);  // ENU, z up

/// C1 window: cosine ramp from 0 to 1 over [t_on, t_on + ramp], plateau at
/// 1, cosine ramp back to 0 over [t_off - ramp, t_off].  Closed-form value,
/// derivative and running integral.
struct SmoothBump {
  double t_on = 0.0;
  double t_off = 0.0;
  double ramp = 1.0;

  double value(double t) const {
    if (t <= t_on || t >= t_off) return 0.0;
    if (t < t_on + ramp) {
      return 0.5 * (1.0 - std::cos(kPi * (t - t_on) / ramp));
    }
    if (t > t_off - ramp) {
      return 0.5 * (1.0 - std::cos(kPi * (t_off - t) / ramp));
    }
    return 1.0;
  }

  double deriv(double t) const {
    if (t <= t_on || t >= t_off) return 0.0;
    if (t < t_on + ramp) {
      return 0.5 * kPi / ramp * std::sin(kPi * (t - t_on) / ramp);
    }
    if (t > t_off - ramp) {
      return -0.5 * kPi / ramp * std::sin(kPi * (t_off - t) / ramp);
    }
    return 0.0;
  }

  /// int_0^t value(s) ds.
  double integral(double t) const {
    auto ramp_area = [this](double u) {  // int_0^u of the rising ramp
      return 0.5 * (u - ramp / kPi * std::sin(kPi * u / ramp));
    };
    if (t <= t_on) return 0.0;
    double acc = 0.0;
    const double u1 = std::min(t - t_on, ramp);
    acc += ramp_area(u1);
    if (t > t_on + ramp) acc += std::min(t, t_off - ramp) - (t_on + ramp);
    if (t > t_off - ramp) {
      const double w = std::min(t - (t_off - ramp), ramp);
      acc += 0.5 * ramp - ramp_area(ramp - w);
    }
    return acc;
  }
};

/// Closed-form flight path: constant horizontal speed, an early climb and
/// two opposite coordinated turns with smooth on/off ramps.  Attitude is
/// yaw = heading, roll = coordinated bank atan(V psi_dot / g0), pitch from
/// the climb rate; body rates follow from the exact Euler-rate kinematics.
struct HelicopterPath {
  double speed = 15.0;     // m/s horizontal
  double climb_rate = 3.0; // m/s peak
  SmoothBump climb{2.0, 12.0, 2.0};
  double turn1_rate = 0.30;   // rad/s peak heading rate
  SmoothBump turn1{14.0, 28.0, 2.0};
  double turn2_rate = -0.35;
  SmoothBump turn2{34.0, 48.0, 2.0};

  double heading(double t) const {
    return turn1_rate * turn1.integral(t) + turn2_rate * turn2.integral(t);
  }
  double heading_rate(double t) const {
    return turn1_rate * turn1.value(t) + turn2_rate * turn2.value(t);
  }
  double heading_accel(double t) const {
    return turn1_rate * turn1.deriv(t) + turn2_rate * turn2.deriv(t);
  }
  double vertical_rate(double t) const { return climb_rate * climb.value(t); }
  double vertical_accel(double t) const { return climb_rate * climb.deriv(t); }

  Vec3 velocity(double t) const {
    const double psi = heading(t);
    return Vec3(speed * std::cos(psi), speed * std::sin(psi),
                vertical_rate(t));
  }

  Vec3 acceleration(double t) const {
    const double psi = heading(t);
    const double w = heading_rate(t);
    return Vec3(-speed * w * std::sin(psi), speed * w * std::cos(psi),
                vertical_accel(t));
  }

  double roll(double t) const {
    return std::atan2(speed * heading_rate(t), kGravity);
  }
  double pitch(double t) const {
    return std::atan2(vertical_rate(t), speed);
  }

  Rotation attitude(double t) const {
    return rotation_from_euler(heading(t), pitch(t), roll(t));
  }

  /// Exact body rates from the Z-Y-X Euler-rate map.
  Vec3 body_rates(double t) const {
    const double phi = roll(t), theta = pitch(t);
    const double vw = speed * heading_rate(t);
    const double roll_rate =
        speed * heading_accel(t) * kGravity / (kGravity * kGravity + vw * vw);
    const double vz = vertical_rate(t);
    const double pitch_rate =
        vertical_accel(t) * speed / (speed * speed + vz * vz);
    const double yaw_rate = heading_rate(t);
    return Vec3(roll_rate - yaw_rate * std::sin(theta),
                pitch_rate * std::cos(phi) +
                    yaw_rate * std::cos(theta) * std::sin(phi),
                -pitch_rate * std::sin(phi) +
                    yaw_rate * std::cos(theta) * std::cos(phi));
  }

  /// Body-frame specific force sensed by an ideal accelerometer.
  Vec3 body_accel(double t) const {
    return attitude(t).matrix().transpose() * (acceleration(t) - kGravityVec);
  }
};

/// Exact zero-order-hold realization of the low-pass H2 = alpha/(alpha+p):
/// h <- e^{-alpha dt} h + (1 - e^{-alpha dt}) u with u held over the step.
/// The dirty derivative follows as H1[u] = alpha (u - H2[u]).
struct FirstOrderLag {
  double alpha = 1.0;
  Vec3 h = Vec3::Zero();

  Vec3 step(const Vec3& u, double dt) {
    const double decay = std::exp(-alpha * dt);
    h = decay * h + (1.0 - decay) * u;
    return h;
  }
};

/// Sampled scenario data.  Truth streams are noise-free; the measurement
/// streams carry the configured bias and noise.
struct HelicopterData {
  HelicopterPath path;
  double horizon = 60.0;
  Trajectory truth;           // attitude at the accel/gyro rate
  MeasurementStream gyro;     // body rates + noise, accel/gyro rate
  MeasurementStream accel;    // specific force + bias + noise
  MeasurementStream gps_vel;  // velocity + noise, GPS rate
  MeasurementStream h1_v;     // H1[v] from the noisy GPS stream (GPS rate)
  MeasurementStream h2_qa;    // H2[Q B_a] with the truth extension (accel rate)
};

/// Generates the multi-rate sensor streams.  sensor_dt is the accel/gyro
/// period (100 Hz default), gps_dt the GPS period (10 Hz default).
inline HelicopterData helicopter_scenario(const SensorConfig& cfg,
                                          double alpha, double horizon = 60.0,
                                          double sensor_dt = 0.01,
                                          double gps_dt = 0.1) {
  HelicopterData d;
  d.horizon = horizon;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto noise3 = [&](double std_dev) {
    return std_dev > 0.0
               ? Vec3(std_dev * gauss(rng), std_dev * gauss(rng),
                      std_dev * gauss(rng))
               : Vec3::Zero();
  };

  const long n = steps_for(horizon, sensor_dt);
  d.truth.dt = sensor_dt;
  d.gyro.kind = "gyro";
  d.accel.kind = "accel";
  d.h2_qa.kind = "h2_qa";
  Rotation q = Rotation::identity();  // truth-side extension, Q(0) = I
  FirstOrderLag h2_body{alpha};
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * sensor_dt;
    const Rotation r = d.path.attitude(t);
    d.truth.t.push_back(t);
    d.truth.R.push_back(r);

    d.gyro.t.push_back(t);
    d.gyro.datum_t.push_back(t);
    d.gyro.v.push_back(d.path.body_rates(t) + noise3(cfg.gyro_noise_std));

    const Vec3 f = d.path.body_accel(t) + cfg.accel_bias +
                   noise3(cfg.accel_noise_std);
    d.accel.t.push_back(t);
    d.accel.datum_t.push_back(t);
    d.accel.v.push_back(f);

    const Vec3 qa = q.matrix() * f;
    if (k == 0) h2_body.h = qa;  // start on the signal: a(0) = 0 by design
    d.h2_qa.t.push_back(t);
    d.h2_qa.datum_t.push_back(t);
    d.h2_qa.v.push_back(k == 0 ? qa : h2_body.step(qa, sensor_dt));

    if (k < n) {
      q = q * exp_so3(sensor_dt *
                      d.path.body_rates(t + 0.5 * sensor_dt));
      if ((k + 1) % 1000 == 0) q = project_so3(q.matrix());
    }
  }

  const long ng = steps_for(horizon, gps_dt);
  d.gps_vel.kind = "gps_vel";
  d.h1_v.kind = "h1_v";
  FirstOrderLag h2_gps{alpha};
  for (long k = 0; k <= ng; ++k) {
    const double t = static_cast<double>(k) * gps_dt;
    const Vec3 v = d.path.velocity(t) + noise3(cfg.gps_vel_noise_std);
    d.gps_vel.t.push_back(t);
    d.gps_vel.datum_t.push_back(t);
    d.gps_vel.v.push_back(v);

    if (k == 0) h2_gps.h = v;  // H1 starts at zero output
    const Vec3 h2v = k == 0 ? h2_gps.h : h2_gps.step(v, gps_dt);
    d.h1_v.t.push_back(t);
    d.h1_v.datum_t.push_back(t);
    d.h1_v.v.push_back(alpha * (v - h2v));
  }
  return d;
}

}  // namespace attobs

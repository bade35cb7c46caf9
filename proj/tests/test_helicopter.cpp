#include "attobs/helicopter.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace attobs;

namespace {

// Probe times spread over climb, turns, plateaus and level segments.
const double kProbes[] = {0.5,  1.0,  3.0,  7.0,  11.0, 13.0, 15.0, 20.0,
                          26.5, 30.0, 36.0, 41.0, 47.5, 50.0, 55.0, 59.0};

}  // namespace

TEST_CASE("the smooth bump is consistent with its derivative and integral") {
  const SmoothBump bump{2.0, 12.0, 2.0};
  const double h = 1e-5;
  for (const double t : kProbes) {
    const double dv = (bump.value(t + h) - bump.value(t - h)) / (2.0 * h);
    REQUIRE(dv == Catch::Approx(bump.deriv(t)).margin(1e-6));
    const double di = (bump.integral(t + h) - bump.integral(t - h)) / (2.0 * h);
    REQUIRE(di == Catch::Approx(bump.value(t)).margin(1e-6));
  }
  REQUIRE(bump.value(1.0) == 0.0);
  REQUIRE(bump.value(7.0) == 1.0);
  REQUIRE(bump.value(13.0) == 0.0);
  REQUIRE(bump.integral(1.0) == 0.0);
  // Full area: the 6 s plateau plus two half-area ramps of 2 s each.
  REQUIRE(bump.integral(60.0) == Catch::Approx(8.0).margin(1e-12));
}

TEST_CASE("the heading is the running integral of the heading rate") {
  const HelicopterPath path;
  const double h = 1e-5;
  for (const double t : kProbes) {
    const double dpsi = (path.heading(t + h) - path.heading(t - h)) / (2.0 * h);
    REQUIRE(dpsi == Catch::Approx(path.heading_rate(t)).margin(1e-6));
    const double dw =
        (path.heading_rate(t + h) - path.heading_rate(t - h)) / (2.0 * h);
    REQUIRE(dw == Catch::Approx(path.heading_accel(t)).margin(1e-4));
  }
}

TEST_CASE("the path acceleration is the derivative of the velocity") {
  const HelicopterPath path;
  const double h = 1e-5;
  for (const double t : kProbes) {
    const Vec3 fd =
        (path.velocity(t + h) - path.velocity(t - h)) / (2.0 * h);
    REQUIRE((fd - path.acceleration(t)).norm() < 1e-5);
  }
}

TEST_CASE("the body rates generate the attitude derivative") {
  const HelicopterPath path;
  const double h = 1e-5;
  for (const double t : kProbes) {
    const Mat3 fd = (path.attitude(t + h).matrix() -
                     path.attitude(t - h).matrix()) /
                    (2.0 * h);
    const Mat3 analytic = path.attitude(t).matrix() * skew(path.body_rates(t));
    REQUIRE((fd - analytic).norm() < 1e-4);
  }
}

TEST_CASE("the specific force maps back to the inertial acceleration") {
  const HelicopterPath path;
  for (const double t : kProbes) {
    const Vec3 back =
        path.attitude(t).matrix() * path.body_accel(t) + kGravityVec;
    REQUIRE((back - path.acceleration(t)).norm() < 1e-12);
  }
  // Level unaccelerated flight senses gravity only, along body z.
  REQUIRE((path.body_accel(0.0) - Vec3(0.0, 0.0, kGravity)).norm() < 1e-12);
}

TEST_CASE("the dirty derivative has the expected sinusoidal gain") {
  const double alpha = 1.0, omega = 1.0, amp = 3.0, dt = 0.01;
  FirstOrderLag h2{alpha};
  double peak = 0.0;
  for (long k = 0; k * dt <= 20.0 + 2.0 * kPi; ++k) {
    const double t = k * dt;
    const Vec3 u(amp * std::sin(omega * t), 0.0, 0.0);
    const Vec3 h1 = alpha * (u - h2.step(u, dt));
    if (t >= 20.0) peak = std::max(peak, std::abs(h1.x()));
  }
  const double expected = amp * alpha * omega / std::hypot(alpha, omega);
  REQUIRE(peak / expected > 0.97);
  REQUIRE(peak / expected < 1.02);
}

TEST_CASE("the dirty derivative of a constant settles to zero") {
  const Vec3 v(15.0, -4.0, 2.0);
  FirstOrderLag h2{8.0, v};
  for (int k = 0; k < 100; ++k) {
    const Vec3 h1 = 8.0 * (v - h2.step(v, 0.1));
    REQUIRE(h1.norm() < 1e-12);
  }
}

TEST_CASE("the generated streams have the documented shape and determinism") {
  SensorConfig cfg;
  cfg.seed = 5;
  cfg.gyro_noise_std = 0.005;
  cfg.accel_noise_std = 0.1;
  cfg.gps_vel_noise_std = 0.05;
  const HelicopterData a = helicopter_scenario(cfg, 1.0);
  const HelicopterData b = helicopter_scenario(cfg, 1.0);
  REQUIRE(a.truth.t.size() == 6001);
  REQUIRE(a.gyro.v.size() == 6001);
  REQUIRE(a.accel.v.size() == 6001);
  REQUIRE(a.h2_qa.v.size() == 6001);
  REQUIRE(a.gps_vel.v.size() == 601);
  REQUIRE(a.h1_v.v.size() == 601);
  for (size_t k = 0; k < a.gyro.v.size(); k += 97) {
    REQUIRE(a.gyro.v[k] == b.gyro.v[k]);
    REQUIRE(a.accel.v[k] == b.accel.v[k]);
  }
  for (size_t k = 0; k < a.gps_vel.v.size(); k += 7) {
    REQUIRE(a.gps_vel.v[k] == b.gps_vel.v[k]);
  }
}

TEST_CASE("noise-free streams reproduce the closed-form path exactly") {
  const HelicopterData d = helicopter_scenario(SensorConfig{}, 1.0, 20.0);
  for (size_t k = 0; k < d.gyro.v.size(); k += 31) {
    const double t = d.gyro.t[k];
    REQUIRE((d.gyro.v[k] - d.path.body_rates(t)).norm() == 0.0);
    REQUIRE((d.accel.v[k] - d.path.body_accel(t)).norm() == 0.0);
  }
  for (size_t k = 0; k < d.gps_vel.v.size(); k += 5) {
    REQUIRE((d.gps_vel.v[k] - d.path.velocity(d.gps_vel.t[k])).norm() == 0.0);
  }
}

TEST_CASE("the two filters agree up to the vanishing initial-condition term") {
  // With Q(0) = I and R(0) = I the constant rotation linking the filtered
  // streams is the identity, so at the slow-rate instants
  //   h2_qa ~ h1_v - g_I
  // once the low-pass transient of the gravity component has settled.
  const HelicopterData d = helicopter_scenario(SensorConfig{}, 1.0);
  REQUIRE((d.path.attitude(0.0).matrix() - Mat3::Identity()).norm() < 1e-15);
  double worst = 0.0;
  for (size_t k = 0; k < d.h1_v.t.size(); ++k) {
    const double t = d.h1_v.t[k];
    if (t < 5.0) continue;
    const size_t kf = static_cast<size_t>(std::lround(t / 0.01));
    const Vec3 lhs = d.h2_qa.v[kf];
    const Vec3 rhs = d.h1_v.v[k] - kGravityVec;
    worst = std::max(worst, (lhs - rhs).norm());
  }
  REQUIRE(worst < 0.5);
  REQUIRE(worst > 0.0);  // the two sides are genuinely different streams
}

#include "attobs/sim.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

using namespace attobs;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("steps_for validates the grid") {
  REQUIRE(steps_for(60.0, 1e-3) == 60000);
  REQUIRE(steps_for(0.01, 0.01) == 1);
  REQUIRE_THROWS_WITH(steps_for(1.0, 0.0), ContainsSubstring("positive"));
  REQUIRE_THROWS_WITH(steps_for(1.0, -0.1), ContainsSubstring("positive"));
  REQUIRE_THROWS_WITH(steps_for(0.0105, 0.01), ContainsSubstring("multiple"));
  REQUIRE_THROWS_WITH(steps_for(0.005, 0.01), ContainsSubstring(">="));
}

TEST_CASE("constant-rate integration matches the closed form") {
  const Vec3 w(0.3, -0.7, 0.5);
  const Rotation r0 = exp_so3(Vec3(0.1, 0.2, -0.4));
  const Trajectory traj =
      integrate_attitude(r0, OmegaSignal::constant(w), 1e-3, 2.0);
  REQUIRE(traj.R.size() == 2001);
  for (size_t k = 0; k < traj.R.size(); k += 200) {
    const Mat3 expect = r0.matrix() * exp_so3(traj.t[k] * w).matrix();
    REQUIRE((traj.R[k].matrix() - expect).norm() < 1e-12);
  }
}

TEST_CASE("integration converges at second order") {
  const OmegaSignal w = OmegaSignal::sinusoid(
      Vec3(0.2, -0.1, 0.3), Vec3(1.0, 0.7, -0.5), 0.4);
  const Rotation r0;
  auto terminal = [&](double dt) {
    return integrate_attitude(r0, w, dt, 2.0, 0).R.back().matrix();
  };
  const Mat3 ref = terminal(1.25e-4);
  const double e1 = (terminal(4e-3) - ref).norm();
  const double e2 = (terminal(2e-3) - ref).norm();
  REQUIRE(e1 / e2 > 3.3);
  REQUIRE(e1 / e2 < 4.7);
}

TEST_CASE("integration stays on the rotation group") {
  const OmegaSignal w = OmegaSignal::sinusoid(
      Vec3(0.2, -0.1, 0.3), Vec3(2.0, 1.7, -1.5), 1.3);
  const Trajectory traj = integrate_attitude(Rotation(), w, 1e-3, 30.0);
  double worst = 0.0;
  for (const Rotation& r : traj.R) {
    worst = std::max(worst, orthonormality_defect(r.matrix()));
  }
  REQUIRE(worst < 1e-9);
}

TEST_CASE("integration rejects a non-finite rate sample") {
  const OmegaSignal w = OmegaSignal::tabulated(
      {0.0, 1.0}, {Vec3::UnitX(), Vec3(std::nan(""), 0.0, 0.0)});
  REQUIRE_THROWS_AS(integrate_attitude(Rotation(), w, 1e-2, 2.0), NumericError);
}

TEST_CASE("transition matrix satisfies the flow composition rule") {
  const OmegaSignal w = OmegaSignal::sinusoid(
      Vec3(0.1, 0.4, -0.2), Vec3(0.5, -0.3, 0.8), 0.7);
  const Rotation p01 = transition_matrix(w, 0.5, 1.5);
  const Rotation p12 = transition_matrix(w, 1.5, 2.5);
  const Rotation p02 = transition_matrix(w, 0.5, 2.5);
  REQUIRE((p01.matrix() * p12.matrix() - p02.matrix()).norm() < 1e-9);
  REQUIRE((transition_matrix(w, 1.0, 1.0).matrix() - Mat3::Identity()).norm() <
          1e-12);
}

TEST_CASE("transition matrix from zero matches the rate extension") {
  const Vec3 wv(0.3, -0.2, 0.6);
  const OmegaSignal w = OmegaSignal::constant(wv);
  const Rotation phi = transition_matrix(w, 0.0, 2.0);
  REQUIRE((phi.matrix() - exp_so3(2.0 * wv).matrix()).norm() < 1e-10);
  // Reversed arguments give the transpose.
  const Rotation rev = transition_matrix(w, 2.0, 0.0);
  REQUIRE((rev.matrix() - phi.matrix().transpose()).norm() < 1e-10);
}

TEST_CASE("noise-free measurements are exact and unit length") {
  std::mt19937_64 rng(1);
  const Rotation r = exp_so3(Vec3(0.4, -1.1, 0.3));
  const UnitVec3 g = UnitVec3::normalized(Vec3(0.2, -0.5, 0.8));
  const UnitVec3 y = measure_complementary(r, g, 0.0, rng);
  REQUIRE((y.vec() - r.matrix().transpose() * g.vec()).norm() < 1e-15);
  const UnitVec3 b = UnitVec3::normalized(Vec3(1.0, 1.0, -1.0));
  const UnitVec3 yi = measure_compatible(r, b, 0.0, rng);
  REQUIRE((yi.vec() - r.matrix() * b.vec()).norm() < 1e-15);
  REQUIRE(std::abs(y.vec().norm() - 1.0) < 1e-15);
}

TEST_CASE("noisy measurements have the predicted mean angular deviation") {
  // Additive isotropic noise of std sigma followed by re-normalization makes
  // the angular deviation Rayleigh(sigma) to first order, with mean
  // sigma sqrt(pi/2).
  std::mt19937_64 rng(2);
  const double sigma = 0.02;
  const Rotation r = exp_so3(Vec3(0.2, 0.1, -0.7));
  const UnitVec3 g = UnitVec3::normalized(Vec3(0.3, 0.9, -0.1));
  const Vec3 clean = r.matrix().transpose() * g.vec();
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const UnitVec3 y = measure_complementary(r, g, sigma, rng);
    sum += std::asin(std::min(1.0, clean.cross(y.vec()).norm()));
  }
  const double mean = sum / n;
  const double expect = sigma * std::sqrt(kPi / 2.0);
  REQUIRE(mean > 0.9 * expect);
  REQUIRE(mean < 1.1 * expect);
}

TEST_CASE("measurement noise draws are deterministic per seed") {
  const Rotation r = exp_so3(Vec3(0.4, -1.1, 0.3));
  const UnitVec3 g = UnitVec3::normalized(Vec3(0.2, -0.5, 0.8));
  std::mt19937_64 a(7), b(7), c(8);
  const Vec3 ya = measure_complementary(r, g, 0.01, a).vec();
  const Vec3 yb = measure_complementary(r, g, 0.01, b).vec();
  const Vec3 yc = measure_complementary(r, g, 0.01, c).vec();
  REQUIRE((ya - yb).norm() == 0.0);
  REQUIRE((ya - yc).norm() > 0.0);
}

namespace {

MeasurementStream uniform_stream(double dt, long n) {
  MeasurementStream s;
  s.kind = "test";
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    s.t.push_back(t);
    s.datum_t.push_back(t);
    s.v.push_back(Vec3(t, 2.0 * t, -t));
  }
  return s;
}

}  // namespace

TEST_CASE("degrading with zero delay and native period is the identity") {
  const MeasurementStream in = uniform_stream(0.01, 100);
  const MeasurementStream out = degrade_stream(in, 0.0, 0.01);
  REQUIRE(out.t == in.t);
  REQUIRE(out.v.size() == in.v.size());
  for (size_t k = 0; k < in.v.size(); ++k) {
    REQUIRE((out.v[k] - in.v[k]).norm() == 0.0);
    REQUIRE(out.datum_t[k] == in.datum_t[k]);
  }
}

TEST_CASE("degrading applies delay and zero-order hold") {
  const MeasurementStream in = uniform_stream(0.01, 100);
  const MeasurementStream out = degrade_stream(in, 0.05, 0.1);
  for (size_t k = 0; k < out.t.size(); ++k) {
    // Datum = newest sample on the 0.1 s grid at or before t - 0.05.
    const double expect_datum =
        std::floor((out.t[k] - 0.05 + 1e-12) / 0.1) * 0.1;
    REQUIRE(std::abs(out.datum_t[k] - expect_datum) < 1e-9);
    const Vec3 expect_v(expect_datum, 2.0 * expect_datum, -expect_datum);
    REQUIRE((out.v[k] - expect_v).norm() < 1e-9);
    REQUIRE(out.t[k] - out.datum_t[k] >= 0.05 - 1e-9);
  }
}

TEST_CASE("degrading rejects a delay longer than the stream") {
  const MeasurementStream in = uniform_stream(0.01, 10);
  REQUIRE_THROWS_WITH(degrade_stream(in, 1.0, 0.01),
                      ContainsSubstring("delay"));
}

TEST_CASE("stream export is stable and carries the stream kind") {
  const MeasurementStream in = uniform_stream(0.1, 3);
  const std::string pa = "export_a.csv", pb = "export_b.csv";
  export_stream_csv(in, pa);
  export_stream_csv(in, pb);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(pa);
  REQUIRE(a == slurp(pb));
  REQUIRE_THAT(a, ContainsSubstring("test"));
  std::remove(pa.c_str());
  std::remove(pb.c_str());
}

// Attitude observers built on the constant-rotation parameterization: a
// dynamic extension Q integrating the measured rates turns attitude
// estimation into identification of the constant Q_c = Q(t) R(t)^T, so the
// estimate is R_hat = Qc_hat^T Q.  Two correction laws are provided:
//   Observer 1 - geodesic correction plus a finite-window integral term;
//   Observer 2 - LTV filter reconstructing Q_c^T, plus a virtual
//                measurement pair that restores full-attitude information
//                from a single reference direction.
// Both consume generalized pairs (y_c, b_c) with y_c = Q_c b_c in the
// noise-free case, which is also what the delayed / intermittent input
// adapters produce.
#pragma once

#include "attobs/signals.hpp"
#include "attobs/so3.hpp"

#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace attobs {

/// Dynamic extension dQ/dt = Q * skew(omega_measured), Q(0) in SO(3).
struct PeboState {
  Rotation Q = Rotation::identity();
  long steps = 0;
};

/// One geometric step of the dynamic extension (right-multiplied exponential,
/// matching the truth integrator so Q R^T stays constant under noise-free
/// feeds), with periodic re-projection.
inline void pebo_step(PeboState& s, const Vec3& omega_measured, double dt) {
  s.Q = s.Q * exp_so3(dt * omega_measured);
  if (++s.steps % 1000 == 0) s.Q = project_so3(s.Q.matrix());
}

/// Lyapunov function V = 3 - tr(Qc_hat Qc^T) in [0, 4]; 0 iff the estimate
/// matches, 4 at the antipodal set.
inline double lyapunov_v(const Rotation& qc_hat, const Rotation& qc_true) {
  const double v = 3.0 - (qc_hat.matrix() * qc_true.matrix().transpose()).trace();
  return std::clamp(v, 0.0, 4.0);
}

struct Observer1Gains {
  double gamma_p = 3.0;  // geodesic correction gain
  double gamma_i = 1.0;  // integral correction gain
  double T = 10.0;       // integral accumulation window [0, T)
  bool adaptive_T = false;   // freeze on measured excitation instead of at T
  double adaptive_delta = 0.1;  // |g(t1) x g(t2)| margin that triggers freeze
  double window_T = 0.0;  // > 0: sliding integral window instead of [0, T)
};

struct Observer1State {
  PeboState pebo;
  Rotation Qc_hat = Rotation::identity();
  Mat3 A = Mat3::Zero();
  double t = 0.0;
  long steps = 0;
  bool frozen = false;
  double last_eta_norm = 0.0;
  // Adaptive-freeze bookkeeping: decimated history of reference directions.
  std::vector<Vec3> anchors;
  double next_anchor_t = 0.0;
  double anchor_margin = 0.0;
  // Sliding-window increments when gains.window_T > 0.
  std::deque<Mat3> window;
};

/// Core correction update from a generalized pair.  Does not advance the
/// dynamic extension; use observer1_step for the full measurement-level
/// update.  eta = gamma_p (Qc_hat b_c) x y_c + gamma_i vex(A Qc_hat^T -
/// Qc_hat A^T), dA/dt = y_c b_c^T while accumulating.
inline void observer1_step_pair(Observer1State& s, const Observer1Gains& g,
                                const Vec3& y_c, const Vec3& b_c, double dt) {
  const Mat3& qc = s.Qc_hat.matrix();
  const Vec3 xi = vex2(s.A * qc.transpose());
  const Vec3 eta = g.gamma_p * (qc * b_c).cross(y_c) + g.gamma_i * xi;
  s.last_eta_norm = eta.norm();
  s.Qc_hat = exp_so3(dt * eta) * s.Qc_hat;

  if (g.window_T > 0.0) {
    const auto cap = static_cast<size_t>(std::lround(g.window_T / dt));
    const Mat3 inc = dt * y_c * b_c.transpose();
    s.A += inc;
    s.window.push_back(inc);
    if (s.window.size() > cap) {
      s.A -= s.window.front();
      s.window.pop_front();
    }
  } else if (!s.frozen) {
    if (g.adaptive_T) {
      if (s.t >= s.next_anchor_t) {
        for (const Vec3& a : s.anchors) {
          s.anchor_margin = std::max(s.anchor_margin, a.cross(b_c).norm());
        }
        s.anchors.push_back(b_c);
        s.next_anchor_t = s.t + 0.05;
      }
      if (s.anchor_margin > g.adaptive_delta) s.frozen = true;
    } else if (s.t >= g.T) {
      s.frozen = true;
    }
    if (!s.frozen) s.A += dt * y_c * b_c.transpose();
  }

  s.t += dt;
  if (++s.steps % 1000 == 0) s.Qc_hat = project_so3(s.Qc_hat.matrix());
}

/// Measurement-level update: builds y_c = Q y_B from the extension, applies
/// the correction, then advances Q with the measured rate.
inline void observer1_step(Observer1State& s, const Observer1Gains& g,
                           const UnitVec3& y_B, const UnitVec3& g_ref,
                           const Vec3& omega_measured, double dt) {
  observer1_step_pair(s, g, s.pebo.Q * y_B.vec(), g_ref.vec(), dt);
  pebo_step(s.pebo, omega_measured, dt);
}

inline Rotation attitude_estimate(const Rotation& qc_hat, const Rotation& q) {
  return Rotation::unchecked(qc_hat.matrix().transpose() * q.matrix());
}

inline Rotation attitude_estimate(const Observer1State& s) {
  return attitude_estimate(s.Qc_hat, s.pebo.Q);
}

/// Fixed virtual rotation used by Observer 2: the cyclic permutation
/// e1 -> e2 -> e3 -> e1 (rotation by 2 pi / 3 about (1,1,1)/sqrt(3)), so
/// U g is never parallel to g except on that axis.
inline const Mat3& virtual_rotation_u() {
  static const Mat3 u = [] {
    Mat3 m;
    m << 0, 0, 1,
         1, 0, 0,
         0, 1, 0;
    return m;
  }();
  return u;
}

struct Observer2Gains {
  double gamma_z = 1.0;  // LTV filter gain
  double gamma = 1.0;    // Q_c^T reconstruction gain
  double gamma_c = 3.0;  // correction gain, measured pair
  double gamma_v = 1.0;  // correction gain, virtual pair
};

struct Observer2State {
  PeboState pebo;
  Rotation Qc_hat = Rotation::identity();
  Mat3 Z = Mat3::Zero();
  Mat3 Z0 = Mat3::Zero();     // captured at the first step
  Mat3 Omega = Mat3::Identity();
  Mat3 P = Mat3::Zero();      // converges to Q_c^T
  double t = 0.0;
  long steps = 0;
  bool z0_captured = false;
  double last_eta_norm = 0.0;
  double min_virtual_margin = std::numeric_limits<double>::infinity();
};

/// Core update of the LTV filter and correction law from a generalized
/// pair.  Z and Omega use the exact zero-order-hold solution of their
/// linear dynamics over the step (the rank-one generator g g^T has a
/// closed-form exponential), which preserves the defining identity
/// Z - Omega Z0 = (I - Omega) Q_c^T exactly in discrete time; P uses an
/// explicit Euler step of dP/dt = gamma (I-Omega)^T (Z - Omega Z0 -
/// (I-Omega) P).  The virtual pair is b_v = U b_c, y_v = P^T U b_c.
inline void observer2_step_pair(Observer2State& s, const Observer2Gains& g,
                                const Vec3& y_c, const Vec3& b_c, double dt) {
  if (!s.z0_captured) {
    s.Z0 = s.Z;
    s.z0_captured = true;
  }
  const Mat3 eye = Mat3::Identity();

  // Correction from states at the step start.
  const Mat3& qc = s.Qc_hat.matrix();
  const Vec3 b_v = virtual_rotation_u() * b_c;
  const Vec3 y_v = s.P.transpose() * b_v;
  const double b2 = b_c.squaredNorm();
  if (b2 > 1e-12) {
    s.min_virtual_margin =
        std::min(s.min_virtual_margin, b_c.cross(b_v).norm() / b2);
  }
  const Vec3 eta = g.gamma_c * (qc * b_c).cross(y_c) +
                   g.gamma_v * (qc * b_v).cross(y_v);
  s.last_eta_norm = eta.norm();

  // Euler step of the P dynamics before Omega/Z advance.
  const Mat3 residual = s.Z - s.Omega * s.Z0 - (eye - s.Omega) * s.P;
  const Mat3 p_next = s.P + dt * g.gamma * (eye - s.Omega).transpose() * residual;

  // Exact hold discretization: E = exp(-gamma_z dt b b^T) = I - beta b b^T.
  Mat3 e = eye;
  if (b2 > 0.0) {
    const double beta = (1.0 - std::exp(-g.gamma_z * b2 * dt)) / b2;
    e -= beta * b_c * b_c.transpose();
    s.Z = e * s.Z + beta * b_c * y_c.transpose();
  }
  s.Omega = e * s.Omega;
  s.P = p_next;
  s.Qc_hat = exp_so3(dt * eta) * s.Qc_hat;

  s.t += dt;
  if (++s.steps % 1000 == 0) s.Qc_hat = project_so3(s.Qc_hat.matrix());
}

inline void observer2_step(Observer2State& s, const Observer2Gains& g,
                           const UnitVec3& y_B, const UnitVec3& g_ref,
                           const Vec3& omega_measured, double dt) {
  observer2_step_pair(s, g, s.pebo.Q * y_B.vec(), g_ref.vec(), dt);
  pebo_step(s.pebo, omega_measured, dt);
}

inline Rotation attitude_estimate(const Observer2State& s) {
  return attitude_estimate(s.Qc_hat, s.pebo.Q);
}

/// Replays the extension history to pair a delayed measurement with the
/// extension state at its datum time: y_c(t) = Q(t - tau) y(t) and
/// b_c(t) = g(t - tau), where y(t) is the delayed measurement arriving at
/// t.  Not ready during the initial [0, tau) warm-up, during which
/// observers should hold (skip the correction, keep integrating Q).
class DelayedFeed {
 public:
  DelayedFeed(double tau, double dt) : dt_(dt) {
    if (tau < 0.0) throw std::invalid_argument("delay must be >= 0");
    depth_ = std::lround(tau / dt);
    if (std::abs(static_cast<double>(depth_) * dt - tau) > 1e-9) {
      throw std::invalid_argument("delay must be an integer multiple of dt");
    }
  }

  /// Record the extension state at the current step (call once per step,
  /// before stepping Q).
  void record(const Rotation& q) {
    hist_.push_back(q.matrix());
    if (hist_.size() > static_cast<size_t>(depth_) + 1) hist_.pop_front();
  }

  bool ready() const { return hist_.size() == static_cast<size_t>(depth_) + 1; }

  /// Generalized pair for a measurement taken tau seconds ago.
  std::pair<Vec3, Vec3> pair_for(const UnitVec3& y_delayed,
                                 const Vec3& g_at_datum) const {
    if (!ready()) throw std::logic_error("delayed feed still warming up");
    return {hist_.front() * y_delayed.vec(), g_at_datum};
  }

  double tau() const { return static_cast<double>(depth_) * dt_; }

 private:
  double dt_;
  long depth_ = 0;
  std::deque<Mat3> hist_;
};

/// Zero-order-holds intermittent measurements: at each sample instant the
/// pair (Q(t_i) y(t_i), g(t_i)) is captured and held until the next sample.
class IntermittentFeed {
 public:
  explicit IntermittentFeed(double period) : period_(period) {
    if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  }

  /// Capture a fresh sample at time t_i.
  void capture(const Rotation& q_at_sample, const UnitVec3& y_at_sample,
               const Vec3& g_at_sample) {
    held_ = {q_at_sample * y_at_sample.vec(), g_at_sample};
  }

  bool ready() const { return held_.has_value(); }

  const std::pair<Vec3, Vec3>& held() const {
    if (!held_) throw std::logic_error("no intermittent sample captured yet");
    return *held_;
  }

  double period() const { return period_; }

 private:
  double period_;
  std::optional<std::pair<Vec3, Vec3>> held_;
};

/// Functional forms of the adapters (single-shot; the classes above keep
/// the state across a run).
inline std::pair<Vec3, Vec3> adapt_delayed(const Rotation& q_at_datum,
                                           const UnitVec3& y_delayed,
                                           const ReferenceSignal& g, double tau,
                                           double t) {
  if (t < tau) throw std::logic_error("delayed feed still warming up");
  return {q_at_datum * y_delayed.vec(), g.at(t - tau)};
}

inline std::pair<Vec3, Vec3> adapt_intermittent(const Rotation& q_at_sample,
                                                const UnitVec3& y_at_sample,
                                                const ReferenceSignal& g,
                                                double t_sample) {
  return {q_at_sample * y_at_sample.vec(), g.at(t_sample)};
}

}  // namespace attobs

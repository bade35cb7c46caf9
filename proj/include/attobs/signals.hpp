// Angular-velocity and reference-direction signals.  Signals are plain
// descriptor structs (kind + numeric payload) rather than closures so that
// scenario configs can serialize and round-trip them exactly.
#pragma once

#include "attobs/so3.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace attobs {

/// Body angular velocity omega(t) in rad/s.
struct OmegaSignal {
  enum class Kind { kConstant, kPiecewise, kSinusoid, kTabulated };

  Kind kind = Kind::kConstant;
  std::vector<double> times;   // piecewise hold-from / tabulated knots
  std::vector<Vec3> values;    // values at knots
  Vec3 offset = Vec3::Zero();  // sinusoid: offset + amp .* sin(2 pi f t + ph)
  Vec3 amplitude = Vec3::Zero();
  double freq_hz = 0.0;
  double phase = 0.0;

  static OmegaSignal constant(const Vec3& w) {
    OmegaSignal s;
    s.kind = Kind::kConstant;
    s.values = {w};
    return s;
  }

  /// Piecewise constant: holds values[i] on [times[i], times[i+1]).
  static OmegaSignal piecewise(std::vector<double> ts, std::vector<Vec3> vs) {
    if (ts.empty() || ts.size() != vs.size()) {
      throw std::invalid_argument("piecewise omega: need matching non-empty knots");
    }
    if (!std::is_sorted(ts.begin(), ts.end())) {
      throw std::invalid_argument("piecewise omega: knot times must be sorted");
    }
    OmegaSignal s;
    s.kind = Kind::kPiecewise;
    s.times = std::move(ts);
    s.values = std::move(vs);
    return s;
  }

  static OmegaSignal sinusoid(const Vec3& offset, const Vec3& amplitude,
                              double freq_hz, double phase = 0.0) {
    OmegaSignal s;
    s.kind = Kind::kSinusoid;
    s.offset = offset;
    s.amplitude = amplitude;
    s.freq_hz = freq_hz;
    s.phase = phase;
    return s;
  }

  /// Linear interpolation between tabulated samples, clamped at the ends.
  static OmegaSignal tabulated(std::vector<double> ts, std::vector<Vec3> vs) {
    OmegaSignal s = piecewise(std::move(ts), std::move(vs));
    s.kind = Kind::kTabulated;
    return s;
  }

  Vec3 at(double t) const {
    switch (kind) {
      case Kind::kConstant:
        return values[0];
      case Kind::kPiecewise: {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto i = it == times.begin() ? 0 : (it - times.begin() - 1);
        return values[static_cast<size_t>(i)];
      }
      case Kind::kSinusoid:
        return offset +
               amplitude * std::sin(2.0 * kPi * freq_hz * t + phase);
      case Kind::kTabulated: {
        if (t <= times.front()) return values.front();
        if (t >= times.back()) return values.back();
        auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto i = static_cast<size_t>(it - times.begin());
        const double a = (t - times[i - 1]) / (times[i] - times[i - 1]);
        return (1.0 - a) * values[i - 1] + a * values[i];
      }
    }
    throw std::logic_error("unreachable omega kind");
  }
};

/// Known reference direction (unit norm for all t).  Piecewise and constant
/// kinds have zero derivative between switch instants; the rotating kind
/// carries its exact derivative.
struct ReferenceSignal {
  enum class Kind { kConstant, kPiecewise, kRotating };

  Kind kind = Kind::kConstant;
  std::vector<double> times;
  std::vector<Vec3> values;   // unit vectors
  Vec3 axis = Vec3::UnitZ();  // rotating: g(t) = exp(2 pi rate t axis) g0
  double rate_hz = 0.0;
  Vec3 g0 = Vec3::UnitX();

  static ReferenceSignal constant(const Vec3& g) {
    ReferenceSignal s;
    s.kind = Kind::kConstant;
    s.values = {UnitVec3::normalized(g).vec()};
    return s;
  }

  static ReferenceSignal piecewise(std::vector<double> ts,
                                   std::vector<Vec3> vs) {
    if (ts.empty() || ts.size() != vs.size()) {
      throw std::invalid_argument("piecewise reference: need matching non-empty knots");
    }
    if (!std::is_sorted(ts.begin(), ts.end())) {
      throw std::invalid_argument("piecewise reference: knot times must be sorted");
    }
    ReferenceSignal s;
    s.kind = Kind::kPiecewise;
    s.times = std::move(ts);
    for (const Vec3& v : vs) s.values.push_back(UnitVec3::normalized(v).vec());
    return s;
  }

  static ReferenceSignal rotating(const Vec3& axis, double rate_hz,
                                  const Vec3& g0) {
    ReferenceSignal s;
    s.kind = Kind::kRotating;
    s.axis = UnitVec3::normalized(axis).vec();
    s.rate_hz = rate_hz;
    s.g0 = UnitVec3::normalized(g0).vec();
    return s;
  }

  Vec3 at(double t) const {
    switch (kind) {
      case Kind::kConstant:
        return values[0];
      case Kind::kPiecewise: {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto i = it == times.begin() ? 0 : (it - times.begin() - 1);
        return values[static_cast<size_t>(i)];
      }
      case Kind::kRotating:
        return exp_so3(2.0 * kPi * rate_hz * t * axis) * g0;
    }
    throw std::logic_error("unreachable reference kind");
  }

  UnitVec3 unit_at(double t) const { return UnitVec3::normalized(at(t)); }

  /// Time derivative; exact for all built-in kinds (zero a.e. for the
  /// piecewise kinds, whose jumps carry no quadrature weight).
  Vec3 deriv(double t) const {
    if (kind == Kind::kRotating) {
      return (2.0 * kPi * rate_hz * axis).cross(at(t));
    }
    return Vec3::Zero();
  }
};

}  // namespace attobs

// Observability diagnostics: attitude distinguishability conditions for
// mixed complementary/compatible vector sets, the integral (Gramian-style)
// sufficient condition, excitation classification, and the batch
// least-squares attitude fit used as an independent oracle.
#pragma once

#include "attobs/sim.hpp"

#include <array>
#include <string>
#include <vector>

namespace attobs {

/// Outcome of a condition check.  `margin` is the tested positive quantity,
/// satisfied <=> margin > threshold; witness holds the grid times attaining
/// the margin (2 or 3 of them, per condition).
struct ConditionReport {
  std::string condition_id;
  bool satisfied = false;
  double margin = 0.0;
  double threshold = 0.0;
  std::array<double, 3> witness{0.0, 0.0, 0.0};
  int witness_count = 0;
};

enum class ExcitationKind { kIE, kPE };

/// delta is the smallest eigenvalue of the (windowed) Gramian of the tested
/// signal; satisfied <=> delta > threshold.
struct ExcitationReport {
  ExcitationKind kind = ExcitationKind::kIE;
  double window_T = 0.0;
  double delta = 0.0;
  double threshold = 0.0;
  bool satisfied = false;
};

/// Uniform evaluation grid over [0, horizon], decimated to at most
/// max_points samples.
inline std::vector<double> make_check_grid(double horizon, double dt,
                                           size_t max_points = 2000) {
  const long n = steps_for(horizon, dt);
  const long stride = std::max<long>(1, (n + static_cast<long>(max_points) - 1) /
                                            static_cast<long>(max_points));
  std::vector<double> grid;
  for (long k = 0; k <= n; k += stride) {
    grid.push_back(static_cast<double>(k) * dt);
  }
  const double end = static_cast<double>(n) * dt;
  if (grid.back() < end) grid.push_back(end);
  return grid;
}

namespace detail {

/// Q(t) on the grid for the extension dQ/dt = Q skew(omega), Q(0) = I.
inline std::vector<Mat3> extension_on_grid(const OmegaSignal& omega,
                                           const std::vector<double>& grid,
                                           double dt) {
  std::vector<Mat3> out;
  out.reserve(grid.size());
  if (grid.empty()) return out;
  Rotation q = Rotation::identity();
  long k = 0;
  for (double tg : grid) {
    const long target = std::lround(tg / dt);
    for (; k < target; ++k) {
      q = q * exp_so3(dt * omega.at((static_cast<double>(k) + 0.5) * dt));
      if ((k + 1) % 1000 == 0) q = project_so3(q.matrix());
    }
    out.push_back(q.matrix());
  }
  return out;
}

struct PairScan {
  double margin = 0.0;
  size_t i = 0, j = 0;
};

}  // namespace detail

/// Necessary-and-sufficient distinguishability margin over a time grid:
/// max over ordered pairs (t1, t2) of
///   sum_{i,l} |g_i(t1) x g_l(t2)|
/// + sum_{i,j} |g_i(t1) x R0 Phi(0,t2) b_j(t2)|
/// + sum_{j,k} |b_j(t1) x Phi(t1,t2) b_k(t2)|
/// with Phi the transition matrix of the angular-velocity flow.  Requires
/// the true initial attitude R0 (diagnostic use); see the _modified variant
/// for the R0-free check.
inline ConditionReport check_distinguishability(
    const std::vector<ReferenceSignal>& g_signals,
    const std::vector<ReferenceSignal>& b_signals, const OmegaSignal& omega,
    const Rotation& r0, const std::vector<double>& grid,
    double threshold = 1e-6, double integration_dt = 1e-3,
    bool use_r0 = true) {
  if (grid.size() < 2) {
    throw std::invalid_argument("check grid needs at least two points");
  }
  const size_t n = grid.size();
  const size_t ng = g_signals.size();
  const size_t nb = b_signals.size();
  if (ng + nb == 0) {
    throw std::invalid_argument("no reference signals supplied");
  }
  std::vector<Mat3> Q;
  if (nb > 0) Q = detail::extension_on_grid(omega, grid, integration_dt);

  // Per-grid-point samples, and Phi/R0 products hoisted out of the pair scan.
  std::vector<Vec3> g(n * std::max<size_t>(ng, 1));
  std::vector<Vec3> b(n * std::max<size_t>(nb, 1));
  std::vector<Vec3> qb(n * std::max<size_t>(nb, 1));  // Q(t) b_j(t)
  std::vector<Vec3> mb(n * std::max<size_t>(nb, 1));  // [R0] Phi(0,t) b_j(t)
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < ng; ++i) g[k * ng + i] = g_signals[i].at(grid[k]);
    for (size_t j = 0; j < nb; ++j) {
      const Vec3 bj = b_signals[j].at(grid[k]);
      b[k * nb + j] = bj;
      qb[k * nb + j] = Q[k] * bj;
      mb[k * nb + j] =
          use_r0 ? Vec3(r0.matrix() * (Q[k] * bj)) : Vec3(Q[k] * bj);
    }
  }

  detail::PairScan best;
  for (size_t k1 = 0; k1 < n; ++k1) {
    const Mat3 q1t = nb > 0 ? Mat3(Q[k1].transpose()) : Mat3::Identity();
    for (size_t k2 = 0; k2 < n; ++k2) {
      double m = 0.0;
      for (size_t i = 0; i < ng; ++i) {
        for (size_t l = 0; l < ng; ++l) {
          m += g[k1 * ng + i].cross(g[k2 * ng + l]).norm();
        }
        for (size_t j = 0; j < nb; ++j) {
          m += g[k1 * ng + i].cross(mb[k2 * nb + j]).norm();
        }
      }
      for (size_t j = 0; j < nb; ++j) {
        for (size_t kk = 0; kk < nb; ++kk) {
          // b_j(t1) x Phi(t1,t2) b_k(t2), Phi(t1,t2) = Q(t1)^T Q(t2).
          m += b[k1 * nb + j].cross(q1t * qb[k2 * nb + kk]).norm();
        }
      }
      if (m > best.margin) best = {m, k1, k2};
    }
  }

  ConditionReport rep;
  rep.condition_id = use_r0 ? "nec-suff" : "modified";
  rep.margin = best.margin;
  rep.threshold = threshold;
  rep.satisfied = best.margin > threshold;
  rep.witness = {grid[best.i], grid[best.j], 0.0};
  rep.witness_count = 2;
  return rep;
}

/// R0-free variant (drops the unknown initial attitude from the mixed
/// term); sufficient for distinguishability for all R0 outside a
/// measure-zero set.
inline ConditionReport check_distinguishability_modified(
    const std::vector<ReferenceSignal>& g_signals,
    const std::vector<ReferenceSignal>& b_signals, const OmegaSignal& omega,
    const std::vector<double>& grid, double threshold = 1e-6,
    double integration_dt = 1e-3) {
  return check_distinguishability(g_signals, b_signals, omega,
                                  Rotation::identity(), grid, threshold,
                                  integration_dt, false);
}

/// Integral sufficient condition over [0, T]:
///   lambda_2(sum_i int g_i g_i^T) + | int sum_j (omega x b_j + db_j/dt) |
/// evaluated with left-rectangle quadrature on the supplied grid.
inline ConditionReport check_trumpf(
    const std::vector<ReferenceSignal>& g_signals,
    const std::vector<ReferenceSignal>& b_signals, const OmegaSignal& omega,
    double window_T, const std::vector<double>& grid,
    double threshold = 1e-6) {
  if (grid.size() < 3) {
    throw std::invalid_argument("cannot differentiate b signal: grid too small");
  }
  Mat3 gram = Mat3::Zero();
  Vec3 bsum = Vec3::Zero();
  for (size_t k = 0; k + 1 < grid.size() && grid[k] < window_T - 1e-12; ++k) {
    const double w = std::min(grid[k + 1], window_T) - grid[k];
    for (const auto& gs : g_signals) {
      const Vec3 gv = gs.at(grid[k]);
      gram += w * gv * gv.transpose();
    }
    for (const auto& bs : b_signals) {
      bsum += w * (omega.at(grid[k]).cross(bs.at(grid[k])) + bs.deriv(grid[k]));
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(gram);
  const double lambda2 = es.eigenvalues()(1);  // second largest of three

  ConditionReport rep;
  rep.condition_id = "trumpf";
  rep.margin = lambda2 + bsum.norm();
  rep.threshold = threshold;
  rep.satisfied = rep.margin > threshold;
  rep.witness = {0.0, window_T, 0.0};
  rep.witness_count = 2;
  return rep;
}

/// Single-vector condition: max |g(t1) x g(t2)| over grid pairs.
inline ConditionReport check_single_vector(const ReferenceSignal& g,
                                           const std::vector<double>& grid,
                                           double threshold = 1e-6) {
  detail::PairScan best;
  std::vector<Vec3> gv(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) gv[k] = g.at(grid[k]);
  for (size_t i = 0; i < grid.size(); ++i) {
    for (size_t j = i + 1; j < grid.size(); ++j) {
      const double m = gv[i].cross(gv[j]).norm();
      if (m > best.margin) best = {m, i, j};
    }
  }
  ConditionReport rep;
  rep.condition_id = "single-vector";
  rep.margin = best.margin;
  rep.threshold = threshold;
  rep.satisfied = best.margin > threshold;
  rep.witness = {grid[best.i], grid[best.j], 0.0};
  rep.witness_count = 2;
  return rep;
}

/// Three-moment condition: max |det [g(t1) g(t2) g(t3)]| over grid triples
/// (grid decimated to at most max_points to keep the cubic scan tractable).
inline ConditionReport check_three_moment(const ReferenceSignal& g,
                                          const std::vector<double>& grid,
                                          double threshold = 1e-6,
                                          size_t max_points = 200) {
  std::vector<double> ts;
  const size_t stride = std::max<size_t>(1, grid.size() / max_points);
  for (size_t k = 0; k < grid.size(); k += stride) ts.push_back(grid[k]);
  std::vector<Vec3> gv(ts.size());
  for (size_t k = 0; k < ts.size(); ++k) gv[k] = g.at(ts[k]);

  double margin = 0.0;
  std::array<size_t, 3> w{0, 0, 0};
  for (size_t i = 0; i < ts.size(); ++i) {
    for (size_t j = i + 1; j < ts.size(); ++j) {
      const Vec3 cij = gv[i].cross(gv[j]);
      if (cij.norm() * 2.0 < margin) continue;  // |det| <= |gi x gj|
      for (size_t k = j + 1; k < ts.size(); ++k) {
        const double d = std::abs(cij.dot(gv[k]));
        if (d > margin) {
          margin = d;
          w = {i, j, k};
        }
      }
    }
  }
  ConditionReport rep;
  rep.condition_id = "three-moment";
  rep.margin = margin;
  rep.threshold = threshold;
  rep.satisfied = margin > threshold;
  rep.witness = {ts[w[0]], ts[w[1]], ts[w[2]]};
  rep.witness_count = 3;
  return rep;
}

/// Excitation of a matrix-valued signal phi(t) (3 x m samples): smallest
/// eigenvalue of int phi phi^T over [0, end] (IE) or the worst sliding
/// window of length window_T (PE), by left-rectangle quadrature.
inline ExcitationReport check_excitation(
    const std::vector<double>& times,
    const std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>>& phi,
    ExcitationKind kind, double window_T, double threshold = 1e-6) {
  if (times.size() != phi.size() || times.size() < 2) {
    throw std::invalid_argument("check_excitation: need matching sample arrays");
  }
  const size_t n = times.size();
  std::vector<Mat3> prefix(n);  // prefix[k] = int_0^{t_k} phi phi^T
  Mat3 acc = Mat3::Zero();
  prefix[0] = acc;
  for (size_t k = 0; k + 1 < n; ++k) {
    acc += (times[k + 1] - times[k]) * phi[k] * phi[k].transpose();
    prefix[k + 1] = acc;
  }
  auto lambda_min = [](const Mat3& m) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(m);
    return es.eigenvalues()(0);
  };

  ExcitationReport rep;
  rep.kind = kind;
  rep.window_T = window_T;
  rep.threshold = threshold;
  if (kind == ExcitationKind::kIE) {
    rep.delta = lambda_min(prefix.back());
  } else {
    double worst = std::numeric_limits<double>::infinity();
    size_t j = 0;
    for (size_t i = 0; i < n; ++i) {
      const double tend = times[i] + window_T;
      if (tend > times.back() + 1e-12) break;
      while (j + 1 < n && times[j] < tend - 1e-12) ++j;
      worst = std::min(worst, lambda_min(Mat3(prefix[j] - prefix[i])));
    }
    rep.delta = std::isfinite(worst) ? worst : 0.0;
  }
  rep.satisfied = rep.delta > threshold;
  return rep;
}

/// Vector-signal convenience overload.
inline ExcitationReport check_excitation(const std::vector<double>& times,
                                         const std::vector<Vec3>& phi,
                                         ExcitationKind kind, double window_T,
                                         double threshold = 1e-6) {
  std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> m(phi.size());
  for (size_t k = 0; k < phi.size(); ++k) m[k] = phi[k];
  return check_excitation(times, m, kind, window_T, threshold);
}

/// Batch linear regression data: columns satisfy Y_k ~ X^T phi_k for the
/// constant rotation X being estimated.
struct RegressorBatch {
  std::vector<double> t;
  std::vector<Vec3> Y;
  std::vector<Vec3> phi;
};

struct WahbaResult {
  Rotation R;        // argmin_R sum |Y_k - R^T phi_k|^2
  double residual;   // attained cost
};

/// Orthogonal-Procrustes solution of the batch fit with determinant
/// correction.  Throws "attitude not determined" when the data span fewer
/// than two independent directions.
inline WahbaResult wahba_solve(const RegressorBatch& batch) {
  if (batch.Y.size() != batch.phi.size() || batch.Y.size() < 2) {
    throw std::invalid_argument("wahba_solve: need >= 2 paired columns");
  }
  Mat3 m = Mat3::Zero();
  for (size_t k = 0; k < batch.Y.size(); ++k) {
    m += batch.phi[k] * batch.Y[k].transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) < 1e-9 * std::max(1.0, svd.singularValues()(0))) {
    throw std::runtime_error("attitude not determined");
  }
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0
                ? -1.0
                : 1.0;
  // argmax_R tr(R^T M) is the SO(3) projection of M.
  const Mat3 r = svd.matrixU() * d * svd.matrixV().transpose();
  WahbaResult res{Rotation::unchecked(r), 0.0};
  for (size_t k = 0; k < batch.Y.size(); ++k) {
    res.residual += (batch.Y[k] - r.transpose() * batch.phi[k]).squaredNorm();
  }
  return res;
}

}  // namespace attobs

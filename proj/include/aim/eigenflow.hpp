#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "aim/linalg.hpp"
#include "aim/triple.hpp"
#include "aim/types.hpp"

namespace aim {

/// Rank-one factors of the defect: v w^T = X Z - Y X, with ||w|| = 1 and the
/// first significant entry of w rotated real positive.  Requires kappa = 1.
inline std::pair<CVector, CVector> rank_one_factors(const Triple& m) {
  if (m.kappa != 1) throw Error("rank_one_factors: kappa(M) must be 1");
  const CMatrix defect = m.defect();
  Eigen::JacobiSVD<CMatrix> svd(defect, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma = svd.singularValues()(0);
  CVector v = svd.matrixU().col(0) * sigma;
  CVector w = svd.matrixV().col(0).conjugate();  // so that v w^T = sigma u1 v1^H
  const double wmax = w.cwiseAbs().maxCoeff();
  for (int i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > 1e-12 * wmax) {
      const Complex phase = std::conj(w(i)) / std::abs(w(i));
      w *= phase;
      v /= phase;
      break;
    }
  }
  return {v, w};
}

// Snapshot of the diagonalizing frame of X_t under the t1 flow.
//
// Conventions: Q = U X_t U^{-1}, hatted = U (.) U^{-1}, vhat = U v, what = w U^{-1},
// giving Q_i Zhat_ij - Q_j Yhat_ij = vhat_i what_j entrywise.
struct FlowState {
  double t = 0.0;
  CVector Q;       // eigenvalues of X_t, sorted by (re, im)
  CVector q;       // principal-branch logs of Q
  CMatrix U;       // Q = U X_t U^{-1}
  CMatrix Uinv;
  CMatrix Yhat, Zhat;
  CVector vhat, what;

  int n() const { return static_cast<int>(Q.size()); }
};

/// Largest entrywise violation of Q_i Zhat_ij - Q_j Yhat_ij = vhat_i what_j,
/// relative to the defect scale.
inline double linear_identity_residual(const FlowState& s) {
  const int n = s.n();
  double worst = 0.0;
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex lhs = s.Q(i) * s.Zhat(i, j) - s.Q(j) * s.Yhat(i, j);
      const Complex rhs = s.vhat(i) * s.what(j);
      worst = std::max(worst, std::abs(lhs - rhs));
      scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
    }
  return worst / std::max(scale, 1e-300);
}

/// Diagonalize X_t and conjugate every actor into the eigenbasis.
/// Throws DegenerateSpectrum when eigenvalues collide (relative separation
/// below kCollisionTol) and InvariantViolation if the frame is inconsistent.
inline FlowState flow_state(const Triple& m0, double t) {
  if (m0.kappa != 1) throw Error("flow_state: kappa(M0) must be 1");
  const Triple mt = flow_t1(m0, t);
  const Eig ed = eig(mt.X);
  const int n = m0.n();
  double qmax = 0.0;
  for (int i = 0; i < n; ++i) qmax = std::max(qmax, std::abs(ed.values(i)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(ed.values(i) - ed.values(j)) < kCollisionTol * qmax)
        throw DegenerateSpectrum("flow_state: eigenvalue collision");

  FlowState s;
  s.t = t;
  s.Q = ed.values;
  s.q.resize(n);
  for (int i = 0; i < n; ++i) s.q(i) = std::log(ed.values(i));
  s.Uinv = ed.vectors;  // columns are eigenvectors of X_t
  s.U = inverse(s.Uinv);
  s.Yhat = s.U * m0.Y * s.Uinv;
  s.Zhat = s.U * m0.Z * s.Uinv;
  const auto [v, w] = rank_one_factors(mt);
  s.vhat = s.U * v;
  s.what = (w.transpose() * s.Uinv).transpose();
  if (linear_identity_residual(s) > 1e-8)
    throw InvariantViolation("flow_state: conjugated rank-one identity violated");
  return s;
}

/// dq_i/dt = (Zhat - Yhat)_ii.
inline CVector qdot(const FlowState& s) {
  CVector out(s.n());
  for (int i = 0; i < s.n(); ++i) out(i) = s.Zhat(i, i) - s.Yhat(i, i);
  return out;
}

/// dQ_i/dt = vhat_i what_i.
inline CVector Qdot(const FlowState& s) {
  CVector out(s.n());
  for (int i = 0; i < s.n(); ++i) out(i) = s.vhat(i) * s.what(i);
  return out;
}

/// M_ij = vhat_i what_j / (Q_i - Q_j) off the diagonal; diagonal gauge-fixed to 0.
inline CMatrix m_offdiag(const FlowState& s) {
  const int n = s.n();
  double qmax = 0.0;
  for (int i = 0; i < n; ++i) qmax = std::max(qmax, std::abs(s.Q(i)));
  CMatrix m = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Complex dq = s.Q(i) - s.Q(j);
      if (std::abs(dq) < kCollisionTol * qmax) throw CollisionError("m_offdiag: Q_i too close");
      m(i, j) = s.vhat(i) * s.what(j) / dq;
    }
  return m;
}

/// ddot q_i, computed both as ([M, Zhat - Yhat])_ii and through the explicit
/// quotient sum; the two must agree to 1e-8 relative.  Returns the explicit form.
inline CVector general_acceleration(const FlowState& s) {
  const int n = s.n();
  const CMatrix m = m_offdiag(s);
  const CMatrix diff = s.Zhat - s.Yhat;
  const CMatrix comm = m * diff - diff * m;
  const CVector qd = Qdot(s);

  CVector explicit_form(n);
  double scale = 1e-300;
  for (int i = 0; i < n; ++i) {
    Complex acc(0, 0);
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      const Complex num =
          qd(i) * qd(k) * (s.Q(i) + s.Q(k)) -
          (s.Q(i) - s.Q(k)) * (s.Q(i) * s.vhat(k) * s.what(i) * s.Zhat(i, k) -
                               s.Q(k) * s.vhat(i) * s.what(k) * s.Zhat(k, i));
      acc += num / (s.Q(i) * s.Q(k) * (s.Q(i) - s.Q(k)));
    }
    explicit_form(i) = acc;
    scale = std::max({scale, std::abs(acc), std::abs(comm(i, i))});
  }
  for (int i = 0; i < n; ++i)
    if (std::abs(explicit_form(i) - comm(i, i)) > 1e-8 * scale)
      throw InvariantViolation("general_acceleration: commutator and explicit forms disagree");
  return explicit_form;
}

/// Intrinsic equations for Z = lambda Y + gamma I (gamma drops out):
/// ddot q_i = (lambda-1)^2 Qdot_i sum_{k != i} Qdot_k (Q_i + Q_k)
///            / ((Q_i - Q_k)(lambda Q_i - Q_k)(lambda Q_k - Q_i)).
inline CVector rs_rhs(const CVector& Q, const CVector& Qd, Complex lambda) {
  const int n = static_cast<int>(Q.size());
  if (Qd.size() != n) throw DimensionMismatch("rs_rhs: size mismatch");
  double qmax = 0.0;
  for (int i = 0; i < n; ++i) qmax = std::max(qmax, std::abs(Q(i)));
  CVector out(n);
  const Complex pre = (lambda - 1.0) * (lambda - 1.0);
  for (int i = 0; i < n; ++i) {
    Complex acc(0, 0);
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      const Complex d1 = Q(i) - Q(k);
      const Complex d2 = lambda * Q(i) - Q(k);
      const Complex d3 = lambda * Q(k) - Q(i);
      if (std::abs(d1) < kCollisionTol * qmax || std::abs(d2) < kCollisionTol * qmax ||
          std::abs(d3) < kCollisionTol * qmax)
        throw CollisionError("rs_rhs: denominator underflow");
      acc += Qd(k) * (Q(i) + Q(k)) / (d1 * d2 * d3);
    }
    out(i) = pre * Qd(i) * acc;
  }
  return out;
}

// Eigenvalue trajectories, either tracked from direct diagonalization or
// integrated from the intrinsic equations.
struct Trajectory {
  std::vector<double> times;
  std::vector<CVector> Q;  // eigenvalues per time, label-continued
  enum class Source { direct, ode } source = Source::direct;
  bool truncated = false;   // stopped early at a collision
  double collision_time = 0.0;
};

/// Minimal-total-displacement assignment of `next` onto `prev`
/// (exhaustive for n <= 8, greedy beyond).
inline std::vector<int> match_assignment(const CVector& prev, const CVector& next) {
  const int n = static_cast<int>(prev.size());
  std::vector<int> best(n);
  std::iota(best.begin(), best.end(), 0);
  if (n <= 8) {
    std::vector<int> perm = best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::sort(perm.begin(), perm.end());
    do {
      double cost = 0.0;
      for (int i = 0; i < n; ++i) cost += std::abs(next(perm[i]) - prev(i));
      if (cost < best_cost) {
        best_cost = cost;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    int pick = -1;
    double pick_cost = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double cost = std::abs(next(j) - prev(i));
      if (cost < pick_cost) {
        pick_cost = cost;
        pick = j;
      }
    }
    used[pick] = true;
    best[i] = pick;
  }
  return best;
}

/// Eigenvalues of X_t on a time grid, labels continued by minimal displacement.
/// A collision (relative separation below kCollisionTol) truncates the
/// trajectory and sets the flag rather than producing garbage labels.
inline Trajectory track_eigenvalues(const Triple& m0, const std::vector<double>& times) {
  if (m0.kappa != 1) throw Error("track_eigenvalues: kappa(M0) must be 1");
  Trajectory traj;
  traj.source = Trajectory::Source::direct;
  CVector prev;
  for (const double t : times) {
    const CVector vals = spectrum(flow_t1(m0, t).X);
    double vmax = 0.0;
    for (int i = 0; i < vals.size(); ++i) vmax = std::max(vmax, std::abs(vals(i)));
    bool collided = false;
    for (int i = 0; i < vals.size() && !collided; ++i)
      for (int j = i + 1; j < vals.size(); ++j)
        if (std::abs(vals(i) - vals(j)) < kCollisionTol * vmax) {
          collided = true;
          break;
        }
    if (collided) {
      traj.truncated = true;
      traj.collision_time = t;
      break;
    }
    CVector ordered = vals;
    if (prev.size() > 0) {
      const std::vector<int> perm = match_assignment(prev, vals);
      for (int i = 0; i < vals.size(); ++i) ordered(i) = vals(perm[i]);
    }
    traj.times.push_back(t);
    traj.Q.push_back(ordered);
    prev = ordered;
  }
  return traj;
}

/// Classical RK4 on (q, qdot) with Q = e^q rebuilt each stage.  A collision
/// truncates the trajectory with the flag set.
inline Trajectory integrate_rs(const CVector& q0, const CVector& qdot0, Complex lambda,
                               double t_end, double step) {
  if (step <= 0) throw Error("integrate_rs: step must be positive");
  if (q0.size() != qdot0.size()) throw DimensionMismatch("integrate_rs: size mismatch");
  const int n = static_cast<int>(q0.size());
  const auto accel = [&](const CVector& q, const CVector& qd) {
    CVector big_q(n), big_qd(n);
    for (int i = 0; i < n; ++i) {
      big_q(i) = std::exp(q(i));
      big_qd(i) = qd(i) * big_q(i);
    }
    return rs_rhs(big_q, big_qd, lambda);
  };
  Trajectory traj;
  traj.source = Trajectory::Source::ode;
  CVector q = q0, qd = qdot0;
  const int steps = static_cast<int>(std::llround(t_end / step));
  const auto record = [&](double t) {
    CVector big_q(n);
    for (int i = 0; i < n; ++i) big_q(i) = std::exp(q(i));
    traj.times.push_back(t);
    traj.Q.push_back(big_q);
  };
  record(0.0);
  for (int k = 0; k < steps; ++k) {
    try {
      const CVector a1 = accel(q, qd);
      const CVector q2 = q + 0.5 * step * qd, v2 = qd + 0.5 * step * a1;
      const CVector a2 = accel(q2, v2);
      const CVector q3 = q + 0.5 * step * v2, v3 = qd + 0.5 * step * a2;
      const CVector a3 = accel(q3, v3);
      const CVector q4 = q + step * v3, v4 = qd + step * a3;
      const CVector a4 = accel(q4, v4);
      q = q + (step / 6.0) * (qd + 2.0 * v2 + 2.0 * v3 + v4);
      qd = qd + (step / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    } catch (const CollisionError&) {
      traj.truncated = true;
      traj.collision_time = (k + 1) * step;
      return traj;
    }
    record((k + 1) * step);
  }
  return traj;
}

}  // namespace aim

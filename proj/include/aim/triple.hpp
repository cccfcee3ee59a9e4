#pragma once

#include <cmath>
#include <utility>

#include "aim/linalg.hpp"
#include "aim/time_vector.hpp"
#include "aim/types.hpp"

namespace aim {

inline CMatrix intertwining_defect(const CMatrix& x, const CMatrix& y, const CMatrix& z) {
  require_square(x, "intertwining_defect");
  require_same_dim(x, y, "intertwining_defect");
  require_same_dim(x, z, "intertwining_defect");
  return x * z - y * x;
}

/// kappa(X, Y, Z) = rank(XZ - YX): the rank to which X fails to intertwine Y
/// and Z.  Singular values are compared against tol times the larger of the
/// defect's own sigma_max and the product scale of the inputs, so a defect
/// that is pure rounding noise counts as rank 0.
inline int kappa_of(const CMatrix& x, const CMatrix& y, const CMatrix& z,
                    double tol = kDefaultRankTol) {
  if (tol <= 0) throw Error("kappa_of: tol must be positive");
  const RVector sv = singular_values(intertwining_defect(x, y, z));
  const double scale = std::max(sv(0), x.norm() * z.norm() + y.norm() * x.norm());
  const double cut = tol * scale;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

// A matrix triple with its intertwining rank cached at construction.
// Triples are immutable values; every transformation returns a new one.
struct Triple {
  CMatrix X, Y, Z;
  int kappa = -1;

  int n() const { return static_cast<int>(X.rows()); }
  CMatrix defect() const { return intertwining_defect(X, Y, Z); }
  int recompute_kappa(double tol) const { return kappa_of(X, Y, Z, tol); }
};

inline Triple make_triple(CMatrix x, CMatrix y, CMatrix z, double tol = kDefaultRankTol) {
  if (!all_finite(x) || !all_finite(y) || !all_finite(z))
    throw Error("make_triple: non-finite entries");
  const int k = kappa_of(x, y, z, tol);
  return Triple{std::move(x), std::move(y), std::move(z), k};
}

/// (X, Y, Z) -> (G X H^{-1}, G Y G^{-1}, H Z H^{-1}).  Preserves kappa.
inline Triple gl_action(const Triple& m, const CMatrix& g, const CMatrix& h) {
  require_same_dim(m.X, g, "gl_action");
  require_same_dim(m.X, h, "gl_action");
  if (cond_estimate(g) > kConditionLimit || cond_estimate(h) > kConditionLimit)
    throw ConditioningError("gl_action: G or H too ill-conditioned");
  const CMatrix hinv = inverse(h);
  const CMatrix ginv = inverse(g);
  return make_triple(g * m.X * hinv, g * m.Y * ginv, h * m.Z * hinv);
}

/// (X, Y, Z) -> (L X O, Y, Z) for [L, Y] = 0 = [O, Z].  Preserves kappa.
inline Triple lambda_omega_action(const Triple& m, const CMatrix& lam, const CMatrix& omega) {
  require_same_dim(m.X, lam, "lambda_omega_action");
  require_same_dim(m.X, omega, "lambda_omega_action");
  const double cy = (lam * m.Y - m.Y * lam).norm();
  const double cz = (omega * m.Z - m.Z * omega).norm();
  const double sy = lam.norm() * m.Y.norm() + 1.0;
  const double sz = omega.norm() * m.Z.norm() + 1.0;
  if (cy > 1e-9 * sy || cz > 1e-9 * sz)
    throw Error("lambda_omega_action: commutation precondition violated");
  return make_triple(lam * m.X * omega, m.Y, m.Z);
}

// Spectral data (alpha_i, beta_i, lambda_i, mu_i) for an n-soliton.
struct SpectralSolitonData {
  CVector alpha, beta, lambda, mu;

  int n() const { return static_cast<int>(alpha.size()); }

  void validate() const {
    const int m = n();
    if (beta.size() != m || lambda.size() != m || mu.size() != m)
      throw DimensionMismatch("SpectralSolitonData: arrays must have equal length");
    if (m < 1) throw Error("SpectralSolitonData: empty data");
    double scale = 1.0;
    for (int i = 0; i < m; ++i)
      scale = std::max({scale, std::abs(lambda(i)), std::abs(mu(i))});
    const double sep = 1e-10 * scale;
    for (int i = 0; i < m; ++i) {
      if (std::abs(beta(i)) <= sep) throw Error("SpectralSolitonData: beta_i must be nonzero");
      for (int j = 0; j < m; ++j) {
        if (std::abs(lambda(j) - mu(i)) <= sep)
          throw Error("SpectralSolitonData: lambda_j coincides with mu_i");
        if (i < j && std::abs(lambda(i) - lambda(j)) <= sep)
          throw Error("SpectralSolitonData: lambda_i must be pairwise distinct");
        if (i < j && std::abs(mu(i) - mu(j)) <= sep)
          throw Error("SpectralSolitonData: mu_i must be pairwise distinct");
      }
    }
    if (!all_finite(alpha) || !all_finite(beta) || !all_finite(lambda) || !all_finite(mu))
      throw Error("SpectralSolitonData: non-finite entries");
  }
};

/// X_ij = alpha_i / (beta_j (lambda_j - mu_i)), Y = diag(mu), Z = diag(lambda).
/// The defect XZ - YX equals alpha (1/beta)^T, so kappa <= 1 by construction.
inline Triple soliton_triple(const SpectralSolitonData& data) {
  data.validate();
  const int n = data.n();
  CMatrix x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      x(i, j) = data.alpha(i) / (data.beta(j) * (data.lambda(j) - data.mu(i)));
  CMatrix y = CMatrix::Zero(n, n);
  CMatrix z = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    y(i, i) = data.mu(i);
    z(i, i) = data.lambda(i);
  }
  return make_triple(std::move(x), std::move(y), std::move(z));
}

/// Y^N == Z^N test, relative to the norms of both powers.
inline bool is_nkdv(const Triple& m, int order, double tol = 1e-9) {
  if (order < 1) throw Error("is_nkdv: N must be >= 1");
  CMatrix yp = identity(m.n());
  CMatrix zp = identity(m.n());
  for (int i = 0; i < order; ++i) {
    yp = yp * m.Y;
    zp = zp * m.Z;
  }
  return (yp - zp).norm() <= tol * (yp.norm() + zp.norm() + 1.0);
}

/// The 3x3 polynomial/rational fixture: X fixed, Y and Z opposite Jordan blocks at lambda.
inline Triple rational_example(Complex lambda) {
  CMatrix x(3, 3), y(3, 3), z(3, 3);
  x << 1, 1, 0, 1, 0, 0, 1, 0, 0;
  y << lambda, 1, 0, 0, lambda, 1, 0, 0, lambda;
  z << lambda, 0, 0, 1, lambda, 0, 0, 1, lambda;
  return make_triple(std::move(x), std::move(y), std::move(z));
}

/// Time flow of X: (e^{-g(Y)} X0 e^{g(Z)}, Y, Z).  Leaves kappa unchanged.
inline Triple flow(const Triple& m, const TimeVector& t) {
  const CMatrix eg_ym = expm(-g_eval(m.Y, t));
  const CMatrix eg_z = expm(g_eval(m.Z, t));
  return make_triple(eg_ym * m.X * eg_z, m.Y, m.Z);
}

/// t_1-only flow, the case whose eigenvalue dynamics get simulated.
inline Triple flow_t1(const Triple& m, double t) { return flow(m, TimeVector::single(1, t)); }

/// (X, Y, Z) -> (X^{-1}, Z, Y); an involution preserving kappa = 1.
inline Triple inverse_symmetry(const Triple& m) {
  if (cond_estimate(m.X) > kConditionLimit)
    throw ConditioningError("inverse_symmetry: X numerically singular");
  return make_triple(inverse(m.X), m.Z, m.Y);
}

}  // namespace aim

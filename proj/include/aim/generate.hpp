#pragma once

#include <vector>

#include "aim/linalg.hpp"
#include "aim/rng.hpp"
#include "aim/triple.hpp"

namespace aim {

/// Spectral data with all separations enforced by redraw.
inline SpectralSolitonData random_soliton_data(Rng& rng, int n, double radius = 1.0,
                                               double min_sep = 0.15) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    SpectralSolitonData d;
    d.alpha.resize(n);
    d.beta.resize(n);
    d.lambda.resize(n);
    d.mu.resize(n);
    for (int i = 0; i < n; ++i) {
      d.alpha(i) = rng.annulus(0.5, 1.5);
      d.beta(i) = rng.annulus(0.5, 1.5);
      d.lambda(i) = rng.disk(radius);
      d.mu(i) = rng.disk(radius);
    }
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j) {
        if (std::abs(d.lambda(j) - d.mu(i)) < min_sep) ok = false;
        if (i < j && std::abs(d.lambda(i) - d.lambda(j)) < min_sep) ok = false;
        if (i < j && std::abs(d.mu(i) - d.mu(j)) < min_sep) ok = false;
      }
    if (ok) return d;
  }
  throw Error("random_soliton_data: could not satisfy separation constraints");
}

/// KdV-flavored data: mu = -lambda, so Y = -Z and rank(XZ + ZX) = 1.
inline SpectralSolitonData random_kdv_data(Rng& rng, int n, double radius = 1.0) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    SpectralSolitonData d = random_soliton_data(rng, n, radius);
    d.mu = -d.lambda;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j)
        if (std::abs(d.lambda(j) - d.mu(i)) < 0.15) ok = false;
    if (!ok) continue;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j)
        if (std::abs(d.mu(i) - d.mu(j)) < 0.15) ok = false;
    if (ok) return d;
  }
  throw Error("random_kdv_data: could not satisfy separation constraints");
}

inline Triple random_soliton_kappa1(Rng& rng, int n, double radius = 1.0) {
  return soliton_triple(random_soliton_data(rng, n, radius));
}

/// Solve X Z - Y X = v w^T for X by the Kronecker system
/// (Z^T (x) I - I (x) Y) vec(X) = vec(v w^T).  Needs disjoint spectra.
inline CMatrix sylvester_rank_one_x(const CMatrix& y, const CMatrix& z, const CVector& v,
                                    const CVector& w) {
  require_square(y, "sylvester_rank_one_x");
  require_same_dim(y, z, "sylvester_rank_one_x");
  const int n = static_cast<int>(y.rows());
  CMatrix big = CMatrix::Zero(n * n, n * n);
  // column-major vec: vec(AXB) = (B^T (x) A) vec(X)
  for (int bi = 0; bi < n; ++bi)
    for (int bj = 0; bj < n; ++bj) {
      const Complex zt = z(bj, bi);  // (Z^T)(bi, bj)
      for (int k = 0; k < n; ++k) big(bi * n + k, bj * n + k) += zt;
    }
  for (int b = 0; b < n; ++b) big.block(b * n, b * n, n, n) -= y;
  if (cond_estimate(big) > kConditionLimit)
    throw ConditioningError("sylvester_rank_one_x: spectra of Y and Z too close");
  CVector rhs(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) rhs(j * n + i) = v(i) * w(j);
  const CVector sol = Eigen::PartialPivLU<CMatrix>(big).solve(rhs);
  CMatrix x(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = sol(j * n + i);
  return x;
}

/// kappa = 1 triple with full (non-diagonal) Y, Z.
inline Triple random_sylvester_kappa1(Rng& rng, int n, double scale = 0.6) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const CMatrix y = rng.matrix(n, scale);
    const CMatrix z = rng.matrix(n, scale);
    const CVector sy = spectrum(y);
    const CVector sz = spectrum(z);
    double sep = 1e9;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sep = std::min(sep, std::abs(sy(i) - sz(j)));
    if (sep < 0.1) continue;
    const CVector v = rng.vector(n);
    const CVector w = rng.vector(n);
    if (v.norm() < 0.3 || w.norm() < 0.3) continue;
    const CMatrix x = sylvester_rank_one_x(y, z, v, w);
    Triple m = make_triple(x, y, z);
    if (m.kappa == 1) return m;
  }
  throw Error("random_sylvester_kappa1: generation failed");
}

/// Independent random X, Y, Z; kappa = n with overwhelming probability.
inline Triple random_full_rank(Rng& rng, int n, double scale = 0.8) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    Triple m = make_triple(rng.matrix(n, scale), rng.matrix(n, scale), rng.matrix(n, scale));
    if (m.kappa == n) return m;
  }
  throw Error("random_full_rank: generation failed");
}

/// Exactly intertwining triple: Y = Z = A and X a polynomial in A, so the
/// defect X A - A X vanishes identically.
inline Triple random_kappa0(Rng& rng, int n, double scale = 0.8) {
  const CMatrix a = rng.matrix(n, scale);
  const CMatrix x = rng.annulus(0.5, 1.5) * identity(n) + rng.disk(1.0) * a + rng.disk(0.5) * a * a;
  return make_triple(x, a, a);
}

/// Z = lambda_c * Y + gamma * I with Y = diag(mu) and X a rank-one Cauchy-type
/// solve; the family whose eigenvalue dynamics close into intrinsic equations.
/// mu is drawn real positive and spread out so trajectories stay collision-free.
inline Triple random_rs_triple(Rng& rng, int n, Complex lambda_c, Complex gamma) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    CVector mu(n), v(n), w(n);
    for (int i = 0; i < n; ++i) {
      mu(i) = Complex(0.4 + 1.6 * (i + rng.uniform()) / n, 0.0);
      v(i) = Complex(rng.uniform(0.6, 1.4), 0.0);
      w(i) = Complex(rng.uniform(0.6, 1.4), 0.0);
    }
    CVector zdiag = lambda_c * mu + gamma * CVector::Ones(n);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j)
        if (std::abs(zdiag(j) - mu(i)) < 0.1) ok = false;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j) {
        if (std::abs(mu(i) - mu(j)) < 0.1) ok = false;
        if (std::abs(zdiag(i) - zdiag(j)) < 0.1) ok = false;
      }
    if (!ok) continue;
    CMatrix x(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x(i, j) = v(i) * w(j) / (zdiag(j) - mu(i));
    CMatrix y = CMatrix::Zero(n, n);
    CMatrix z = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      y(i, i) = mu(i);
      z(i, i) = zdiag(i);
    }
    Triple m = make_triple(std::move(x), std::move(y), std::move(z));
    if (m.kappa == 1) return m;
  }
  throw Error("random_rs_triple: generation failed");
}

/// Well-conditioned invertible matrix (identity plus a mild perturbation).
inline CMatrix random_well_conditioned(Rng& rng, int n, double perturbation = 0.3) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    const CMatrix g = identity(n) + rng.matrix(n, perturbation);
    if (cond_estimate(g) < 1e4) return g;
  }
  throw Error("random_well_conditioned: generation failed");
}

}  // namespace aim

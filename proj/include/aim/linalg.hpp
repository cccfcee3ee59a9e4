#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "aim/types.hpp"

namespace aim {

inline CMatrix identity(int n) { return CMatrix::Identity(n, n); }

/// Determinant through LU with partial pivoting.  Singular input gives 0.
inline Complex det(const CMatrix& a) {
  require_square(a, "det");
  if (a.rows() == 1) return a(0, 0);
  return Eigen::PartialPivLU<CMatrix>(a).determinant();
}

inline RVector singular_values(const CMatrix& a) {
  return Eigen::JacobiSVD<CMatrix>(a).singularValues();
}

/// Count of singular values above tol * sigma_max.  Zero matrix has rank 0.
inline int numerical_rank(const CMatrix& a, double tol = kDefaultRankTol) {
  if (tol <= 0) throw Error("numerical_rank: tol must be positive");
  const RVector sv = singular_values(a);
  if (sv.size() == 0) return 0;
  const double cut = tol * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut && sv(i) > 0.0) ++r;
  return r;
}

/// sigma_max / sigma_min; infinity when numerically singular.
inline double cond_estimate(const CMatrix& a) {
  const RVector sv = singular_values(a);
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

inline CMatrix inverse(const CMatrix& a) {
  require_square(a, "inverse");
  if (cond_estimate(a) > kConditionLimit)
    throw ConditioningError("inverse: condition estimate above limit");
  return Eigen::PartialPivLU<CMatrix>(a).inverse();
}

/// Matrix exponential, scaling-and-squaring with the [13/13] Pade approximant.
/// Throws ExpmOverflow instead of returning non-finite entries.
inline CMatrix expm(const CMatrix& a) {
  require_square(a, "expm");
  if (!all_finite(a)) throw Error("expm: non-finite input");
  const int n = static_cast<int>(a.rows());
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const double theta13 = 5.371920351148152;
  const double nrm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int s = 0;
  if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
  if (s > 1024) throw ExpmOverflow("expm: norm too large");
  const CMatrix as = a / std::pow(2.0, s);
  const CMatrix a2 = as * as;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix i = identity(n);
  const CMatrix u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * i);
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * i;
  CMatrix f = Eigen::PartialPivLU<CMatrix>(v - u).solve(v + u);
  for (int k = 0; k < s; ++k) {
    f = f * f;
    if (!all_finite(f)) throw ExpmOverflow("expm: overflow while squaring");
  }
  if (!all_finite(f)) throw ExpmOverflow("expm: non-finite result");
  return f;
}

struct Eig {
  CVector values;   // sorted by (real, imag)
  CMatrix vectors;  // columns; a * vectors.col(k) = values(k) * vectors.col(k)
};

/// Eigenvalues only (Schur), sorted by (real, imag).  Works for defective input.
inline CVector spectrum(const CMatrix& a) {
  require_square(a, "spectrum");
  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw DegenerateSpectrum("spectrum: solver failed");
  CVector vals = solver.eigenvalues();
  std::vector<int> idx(vals.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    if (vals(i).real() != vals(j).real()) return vals(i).real() < vals(j).real();
    if (vals(i).imag() != vals(j).imag()) return vals(i).imag() < vals(j).imag();
    return i < j;
  });
  CVector out(vals.size());
  for (int k = 0; k < vals.size(); ++k) out(k) = vals(idx[k]);
  return out;
}

inline double spectral_radius(const CMatrix& a) {
  const CVector vals = spectrum(a);
  double r = 0.0;
  for (int i = 0; i < vals.size(); ++i) r = std::max(r, std::abs(vals(i)));
  return r;
}

/// Full eigendecomposition with a deterministic ordering and phase convention.
/// Rejects near-defective input (eigenvector condition above kConditionLimit).
inline Eig eig(const CMatrix& a) {
  require_square(a, "eig");
  const int n = static_cast<int>(a.rows());
  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) throw DegenerateSpectrum("eig: solver failed");
  CVector vals = solver.eigenvalues();
  CMatrix vecs = solver.eigenvectors();

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    if (vals(i).real() != vals(j).real()) return vals(i).real() < vals(j).real();
    if (vals(i).imag() != vals(j).imag()) return vals(i).imag() < vals(j).imag();
    return i < j;
  });
  Eig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.values(k) = vals(idx[k]);
    CVector col = vecs.col(idx[k]);
    col /= col.norm();
    // rotate so the largest entry is real positive (stable tie-break: lowest index)
    int big = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(col(i)) > std::abs(col(big)) * (1.0 + 1e-12)) big = i;
    const double mag = std::abs(col(big));
    if (mag > 0) col *= std::conj(col(big)) / mag;
    out.vectors.col(k) = col;
  }
  if (cond_estimate(out.vectors) > kConditionLimit)
    throw DegenerateSpectrum("eig: eigenvector matrix ill-conditioned (near-defective input)");
  const double residual = (a * out.vectors - out.vectors * out.values.asDiagonal().toDenseMatrix()).norm();
  if (residual > 1e-9 * std::max(1.0, a.norm()))
    throw DegenerateSpectrum("eig: reconstruction residual too large");
  return out;
}

namespace detail {
inline Complex minor_det(const CMatrix& a, int drop_row, int drop_col) {
  const int n = static_cast<int>(a.rows());
  CMatrix m(n - 1, n - 1);
  for (int i = 0, mi = 0; i < n; ++i) {
    if (i == drop_row) continue;
    for (int j = 0, mj = 0; j < n; ++j) {
      if (j == drop_col) continue;
      m(mi, mj) = a(i, j);
      ++mj;
    }
    ++mi;
  }
  return det(m);
}
}  // namespace detail

/// Classical adjoint: a * adjugate(a) = det(a) * I, valid also for singular a.
inline CMatrix adjugate(const CMatrix& a) {
  require_square(a, "adjugate");
  const int n = static_cast<int>(a.rows());
  if (n == 1) return CMatrix::Ones(1, 1);
  CMatrix adj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(i, j) = sign * detail::minor_det(a, j, i);
    }
  return adj;
}

/// Roots of c0 + c1 z + ... + cn z^n via the companion matrix.
inline CVector poly_roots(const CVector& coeffs) {
  int deg = static_cast<int>(coeffs.size()) - 1;
  while (deg > 0 && std::abs(coeffs(deg)) == 0.0) --deg;
  if (deg < 1) throw Error("poly_roots: degree < 1");
  CMatrix comp = CMatrix::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coeffs(i) / coeffs(deg);
  return spectrum(comp);
}

}  // namespace aim

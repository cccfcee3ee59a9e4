#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "aim/linalg.hpp"
#include "aim/time_vector.hpp"
#include "aim/triple.hpp"
#include "aim/types.hpp"

namespace aim {

/// tau_M(t) = det(X e^{g(Z)} + e^{g(Y)}).
inline Complex tau(const Triple& m, const TimeVector& t) {
  return det(m.X * expm(g_eval(m.Z, t)) + expm(g_eval(m.Y, t)));
}

/// Gauge-normalized variant: det(X e^{g(Z)} e^{-g(Y)} + I).
/// Satisfies tau_hat * det(e^{g(Y)}) = tau.
inline Complex tau_hat(const Triple& m, const TimeVector& t) {
  return det(m.X * expm(g_eval(m.Z, t)) * expm(-g_eval(m.Y, t)) + identity(m.n()));
}

namespace detail {

// Shared factors for repeated Miwa-shifted evaluations at one (M, t).
struct TauFrame {
  CMatrix xez;  // X e^{g(Z)}
  CMatrix ey;   // e^{g(Y)}
  const CMatrix* y;
  const CMatrix* z;
  int n;

  TauFrame(const Triple& m, const TimeVector& t)
      : xez(m.X * expm(g_eval(m.Z, t))),
        ey(expm(g_eval(m.Y, t))),
        y(&m.Y),
        z(&m.Z),
        n(m.n()) {}

  Complex shifted(Complex a) const {
    if (a == Complex(0, 0)) throw Error("miwa shift: a must be nonzero");
    const CMatrix i = identity(n);
    return det(xez * (i - *z / a) + ey * (i - *y / a));
  }

  // (a, b) are ordered canonically so the value is bitwise symmetric in a <-> b.
  Complex double_shifted(Complex a, Complex b) const {
    if (a == Complex(0, 0) || b == Complex(0, 0))
      throw Error("miwa shift: a, b must be nonzero");
    if (b.real() < a.real() || (b.real() == a.real() && b.imag() < a.imag())) std::swap(a, b);
    const CMatrix i = identity(n);
    return det(xez * ((i - *z / a) * (i - *z / b)) + ey * ((i - *y / a) * (i - *y / b)));
  }
};

}  // namespace detail

/// tau(t - [1/a]), evaluated through the exact factorization
/// e^{ln(I - W/a)} = I - W/a (no series truncation anywhere).
inline Complex miwa_shift_tau(const Triple& m, const TimeVector& t, Complex a) {
  return detail::TauFrame(m, t).shifted(a);
}

/// tau(t - [1/a] - [1/b]); symmetric in a <-> b by construction.
inline Complex double_miwa_shift_tau(const Triple& m, const TimeVector& t, Complex a, Complex b) {
  return detail::TauFrame(m, t).double_shifted(a, b);
}

// One evaluation of the three-term Hirota sum at (a, b, c) and times t.
struct HirotaSample {
  Complex a, b, c;
  TimeVector t;
  Complex residual;
  double scale;  // max magnitude of the three products

  double relative() const { return scale > 0 ? std::abs(residual) / scale : std::abs(residual); }
};

/// (b-c) tau(t-[1/a]) tau(t-[1/b]-[1/c]) - (a-c) tau(t-[1/b]) tau(t-[1/a]-[1/c])
///   + (a-b) tau(t-[1/c]) tau(t-[1/a]-[1/b]);  zero exactly when tau solves KP.
inline HirotaSample hirota_residual(const Triple& m, const TimeVector& t, Complex a, Complex b,
                                    Complex c) {
  const detail::TauFrame frame(m, t);
  const Complex term1 = (b - c) * frame.shifted(a) * frame.double_shifted(b, c);
  const Complex term2 = (a - c) * frame.shifted(b) * frame.double_shifted(a, c);
  const Complex term3 = (a - b) * frame.shifted(c) * frame.double_shifted(a, b);
  HirotaSample s;
  s.a = a;
  s.b = b;
  s.c = c;
  s.t = t;
  s.residual = term1 - term2 + term3;
  s.scale = std::max({std::abs(term1), std::abs(term2), std::abs(term3)});
  return s;
}

/// H1(a) = det(Xh (aI - Z) + (aI - Y)).
inline Complex h1(const CMatrix& xh, const CMatrix& y, const CMatrix& z, Complex a) {
  require_same_dim(xh, y, "h1");
  require_same_dim(xh, z, "h1");
  const CMatrix i = identity(static_cast<int>(xh.rows()));
  return det(xh * (a * i - z) + (a * i - y));
}

/// H2(a,b) = (a-b) det(Xh (aI-Z)(bI-Z) + (aI-Y)(bI-Y)); antisymmetric in a <-> b.
inline Complex h2(const CMatrix& xh, const CMatrix& y, const CMatrix& z, Complex a, Complex b) {
  require_same_dim(xh, y, "h2");
  require_same_dim(xh, z, "h2");
  const Complex pre = a - b;
  if (b.real() < a.real() || (b.real() == a.real() && b.imag() < a.imag())) std::swap(a, b);
  const CMatrix i = identity(static_cast<int>(xh.rows()));
  return pre * det(xh * ((a * i - z) * (b * i - z)) + (a * i - y) * (b * i - y));
}

/// H(a,b,c) = H1(a)H2(b,c) - H1(b)H2(a,c) + H1(c)H2(a,b).
/// The zero polynomial whenever kappa(Xh, Y, Z) <= 1.
inline Complex h_poly(const CMatrix& xh, const CMatrix& y, const CMatrix& z, Complex a, Complex b,
                      Complex c) {
  return h1(xh, y, z, a) * h2(xh, y, z, b, c) - h1(xh, y, z, b) * h2(xh, y, z, a, c) +
         h1(xh, y, z, c) * h2(xh, y, z, a, b);
}

/// Scale of the three products in H, for relative assessment.
inline double h_poly_scale(const CMatrix& xh, const CMatrix& y, const CMatrix& z, Complex a,
                           Complex b, Complex c) {
  return std::max({std::abs(h1(xh, y, z, a) * h2(xh, y, z, b, c)),
                   std::abs(h1(xh, y, z, b) * h2(xh, y, z, a, c)),
                   std::abs(h1(xh, y, z, c) * h2(xh, y, z, a, b))});
}

/// Relative deviation |tau(t) - tau(t with t_j = 0) det(e^{t_j Z^j})| / |tau(t)|
/// for an N-KdV triple and j a multiple of N.  Zero means the t_j dependence
/// factors out entirely.
inline double kdv_factorization_check(const Triple& m, int order, const TimeVector& t) {
  if (!is_nkdv(m, order)) throw Error("kdv_factorization_check: Y^N != Z^N");
  int j = 0;
  for (const auto& [idx, val] : t.support()) {
    if (idx == 1) continue;
    if (j != 0) throw Error("kdv_factorization_check: support must be within {1, j}");
    j = idx;
  }
  if (j != 0 && j % order != 0)
    throw Error("kdv_factorization_check: j must be a multiple of N");
  const Complex full = tau(m, t);
  if (std::abs(full) == 0.0) throw SingularTau("kdv_factorization_check: tau vanishes");
  TimeVector t1(t.max_index());
  t1.set(1, t.get(1));
  Complex factor(1.0, 0.0);
  if (j != 0) {
    CMatrix zj = identity(m.n());
    for (int p = 0; p < j; ++p) zj = zj * m.Z;
    factor = det(expm(t.get(j) * zj));
  }
  return std::abs(full - tau(m, t1) * factor) / std::abs(full);
}

/// Independent oracle for tau_hat of a soliton triple: the subset sum
///   sum_J prod_{i in J} c_i e^{g(lambda_i) - g(mu_i)} prod_{i<i' in J} A_{ii'}
/// with Cauchy interaction coefficients A and c_i = alpha_i/(beta_i(lambda_i - mu_i)).
inline Complex soliton_sum_tau(const SpectralSolitonData& data, const TimeVector& t) {
  data.validate();
  const int n = data.n();
  if (n > 20) throw Error("soliton_sum_tau: n > 20 not supported (2^n subsets)");
  const auto g_scalar = [&](Complex w) {
    Complex acc(0, 0);
    Complex p(1, 0);
    const int top = t.max_support();
    for (int i = 1; i <= top; ++i) {
      p *= w;
      acc += t.get(i) * p;
    }
    return acc;
  };
  std::vector<Complex> weight(n);
  for (int i = 0; i < n; ++i) {
    const Complex ci = data.alpha(i) / (data.beta(i) * (data.lambda(i) - data.mu(i)));
    weight[i] = ci * std::exp(g_scalar(data.lambda(i)) - g_scalar(data.mu(i)));
  }
  std::vector<std::vector<Complex>> pair(n, std::vector<Complex>(n, Complex(1, 0)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      pair[i][j] = (data.lambda(i) - data.lambda(j)) * (data.mu(i) - data.mu(j)) /
                   ((data.lambda(i) - data.mu(j)) * (data.mu(i) - data.lambda(j)));
  Complex total(0, 0);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Complex term(1, 0);
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      term *= weight[i];
      for (int j = i + 1; j < n; ++j)
        if (mask >> j & 1u) term *= pair[i][j];
    }
    total += term;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Derivatives of tau in the first flow variable.
//
// Rows of X Z^m e^{g(Z)} + Y^m e^{g(Y)} are the m-th t1-derivatives of the rows
// of the tau matrix, so d^k tau/dt1^k expands over row-derivative assignments:
//   tau^(k) = sum_{k1+...+kn=k} k!/(k1!...kn!) det(row_j taken from R_{k_j}).
// Exact up to rounding; no finite differences involved.
// ---------------------------------------------------------------------------
inline std::vector<Complex> tau_x_derivatives(const Triple& m, const TimeVector& t, int order) {
  if (order < 0) throw Error("tau_x_derivatives: order must be >= 0");
  const int n = m.n();
  const CMatrix ez = expm(g_eval(m.Z, t));
  const CMatrix ey = expm(g_eval(m.Y, t));
  std::vector<CMatrix> rows;  // rows[m] = X Z^m e^{g(Z)} + Y^m e^{g(Y)}
  rows.reserve(order + 1);
  CMatrix zp = identity(n);
  CMatrix yp = identity(n);
  for (int k = 0; k <= order; ++k) {
    rows.push_back(m.X * zp * ez + yp * ey);
    zp = zp * m.Z;
    yp = yp * m.Y;
  }
  std::vector<double> fact(order + 1, 1.0);
  for (int k = 1; k <= order; ++k) fact[k] = fact[k - 1] * k;

  std::vector<Complex> out(order + 1, Complex(0, 0));
  std::vector<int> parts(n, 0);
  CMatrix work(n, n);
  const auto emit = [&](int k) {
    double mult = fact[k];
    for (int j = 0; j < n; ++j) mult /= fact[parts[j]];
    for (int j = 0; j < n; ++j) work.row(j) = rows[parts[j]].row(j);
    out[k] += mult * det(work);
  };
  // compositions of each k <= order into n ordered parts
  for (int k = 0; k <= order; ++k) {
    std::fill(parts.begin(), parts.end(), 0);
    const auto walk = [&](auto&& self, int row, int remaining) -> void {
      if (row == n - 1) {
        parts[row] = remaining;
        emit(k);
        return;
      }
      for (int take = 0; take <= remaining; ++take) {
        parts[row] = take;
        self(self, row + 1, remaining - take);
      }
    };
    walk(walk, 0, k);
  }
  return out;
}

/// Derivatives of log tau in t1 from the tau derivatives (cumulants from
/// moments): L_m = T_m - sum_{j<m} C(m-1, j-1) L_j T_{m-j}, T_m = tau^(m)/tau.
inline std::vector<Complex> log_tau_x_derivatives(const Triple& m, const TimeVector& t,
                                                  int order) {
  const std::vector<Complex> taus = tau_x_derivatives(m, t, order);
  if (std::abs(taus[0]) < kSingularTauTol)
    throw SingularTau("log_tau_x_derivatives: tau too close to zero");
  std::vector<Complex> big_t(order + 1), log_d(order + 1, Complex(0, 0));
  for (int k = 0; k <= order; ++k) big_t[k] = taus[k] / taus[0];
  std::vector<std::vector<double>> choose(order + 1, std::vector<double>(order + 1, 0.0));
  for (int i = 0; i <= order; ++i) {
    choose[i][0] = 1.0;
    for (int j = 1; j <= i; ++j)
      choose[i][j] = choose[i - 1][j - 1] + (j <= i - 1 ? choose[i - 1][j] : 0.0);
  }
  for (int k = 1; k <= order; ++k) {
    Complex acc = big_t[k];
    for (int j = 1; j < k; ++j) acc -= choose[k - 1][j - 1] * log_d[j] * big_t[k - j];
    log_d[k] = acc;
  }
  return log_d;
}

// ---------------------------------------------------------------------------
// u(x, y, s) = factor * d^2/dx^2 log tau(x, y, s, 0, ...) and the KP residual.
// ---------------------------------------------------------------------------

/// u at one point by the finite-difference recipe: 4th-order central stencil,
/// step 1e-3 * max(1, |x|), one Richardson level.  Throws SingularTau when tau
/// gets within 1e-8 (relative to the stencil maximum) of zero.
inline Complex u_at_fd(const Triple& m, double x, double y, double s, double factor = 2.0) {
  const double h = 1e-3 * std::max(1.0, std::abs(x));
  const std::array<double, 7> offsets = {0.0, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0};
  std::array<Complex, 7> taus;
  double max_abs = 0.0, min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    taus[i] = tau(m, TimeVector::xyt(x + offsets[i] * h, y, s));
    max_abs = std::max(max_abs, std::abs(taus[i]));
    min_abs = std::min(min_abs, std::abs(taus[i]));
  }
  if (min_abs <= kSingularTauTol * std::max(1.0, max_abs))
    throw SingularTau("u_at_fd: tau vanishes on the stencil");
  std::array<Complex, 7> logs;
  const Complex center = std::log(taus[0]);
  logs[0] = center;
  for (std::size_t i = 1; i < taus.size(); ++i) {
    const Complex l = std::log(taus[i]);
    // keep the branch continuous with the stencil center
    const double twopi = 2.0 * std::numbers::pi;
    const double k = std::round((center.imag() - l.imag()) / twopi);
    logs[i] = Complex(l.real(), l.imag() + twopi * k);
  }
  const auto at = [&](double off) -> Complex {
    for (std::size_t i = 0; i < offsets.size(); ++i)
      if (offsets[i] == off) return logs[i];
    throw Error("u_at_fd: internal stencil lookup");
  };
  // 4th-order second derivative at step h*shape, Richardson over h and 2h
  const auto second = [&](double shape) {
    const double hh = h * shape;
    return (-at(-2 * shape) + 16.0 * at(-shape) - 30.0 * at(0.0) + 16.0 * at(shape) -
            at(2 * shape)) /
           (12.0 * hh * hh);
  };
  return factor * (16.0 * second(1.0) - second(2.0)) / 15.0;
}

/// u at one point from the exact t1-derivatives of tau (no x differencing).
inline Complex u_at(const Triple& m, double x, double y, double s, double factor = 2.0) {
  const std::vector<Complex> logd = log_tau_x_derivatives(m, TimeVector::xyt(x, y, s), 2);
  return factor * logd[2];
}

struct GridValue {
  double x, y, s;
  Complex u;
};

/// u on the Cartesian product of the coordinate lists (finite-difference path).
inline std::vector<GridValue> u_field(const Triple& m, const std::vector<double>& xs,
                                      const std::vector<double>& ys, const std::vector<double>& ss,
                                      double factor = 2.0) {
  std::vector<GridValue> out;
  out.reserve(xs.size() * ys.size() * ss.size());
  for (const double x : xs)
    for (const double y : ys)
      for (const double s : ss) out.push_back({x, y, s, u_at_fd(m, x, y, s, factor)});
  return out;
}

struct KpSample {
  Complex residual;
  double scale;  // max magnitude among the PDE terms

  double relative() const { return scale > 0 ? std::abs(residual) / scale : std::abs(residual); }
};

/// Residual of (3/4) u_yy = (u_t - (1/4)(6 u u_x + u_xxx))_x at one point.
///
/// Pure-x derivatives come from the exact tau derivative expansion; the y and
/// t derivatives use 4th-order central differences on top of those.  (A fully
/// nested finite-difference evaluation bottoms out near 1e-3 relative error,
/// which would drown the identity being tested.)
inline KpSample kp_residual(const Triple& m, double x, double y, double s, double factor = 2.0) {
  const auto u_and_derivs = [&](double yy, double ss) {
    const std::vector<Complex> logd = log_tau_x_derivatives(m, TimeVector::xyt(x, yy, ss), 6);
    return std::array<Complex, 5>{factor * logd[2], factor * logd[3], factor * logd[4],
                                  factor * logd[5], factor * logd[6]};
  };
  const auto center = u_and_derivs(y, s);
  const Complex u = center[0], ux = center[1], uxx = center[2], uxxxx = center[4];

  const double hy = 0.02 * std::max(1.0, std::abs(y));
  const double hs = 0.02 * std::max(1.0, std::abs(s));
  const std::array<double, 5> c2 = {-1.0, 16.0, -30.0, 16.0, -1.0};
  const std::array<double, 5> c1 = {1.0, -8.0, 0.0, 8.0, -1.0};
  Complex uyy(0, 0), utx(0, 0);
  for (int i = -2; i <= 2; ++i) {
    if (c2[i + 2] != 0.0) uyy += c2[i + 2] * u_and_derivs(y + i * hy, s)[0];
    if (c1[i + 2] != 0.0) utx += c1[i + 2] * u_and_derivs(y, s + i * hs)[1];
  }
  uyy /= 12.0 * hy * hy;
  utx /= 12.0 * hs;

  const Complex lhs = 0.75 * uyy;
  const Complex nonlinear = 1.5 * ux * ux + 1.5 * u * uxx;
  const Complex rhs = utx - nonlinear - 0.25 * uxxxx;
  KpSample sample;
  sample.residual = lhs - rhs;
  sample.scale = std::max({std::abs(lhs), std::abs(utx), std::abs(1.5 * ux * ux),
                           std::abs(1.5 * u * uxx), std::abs(0.25 * uxxxx)});
  return sample;
}

}  // namespace aim

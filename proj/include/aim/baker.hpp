#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "aim/linalg.hpp"
#include "aim/tau.hpp"
#include "aim/triple.hpp"
#include "aim/types.hpp"

namespace aim {

// One evaluation of the stationary Baker-Akhiezer function.
// psi_bar is the polynomial part: psi_bar = z^n e^{-xz} psi, monic of degree n.
struct BAEvaluation {
  double x;
  Complex z;
  Complex psi;
  Complex psi_bar;
};

/// Polynomial part of psi: det(X (zI-Z) e^{xZ} + (zI-Y) e^{xY}) / det(X e^{xZ} + e^{xY}).
/// Defined for every z, including z = 0 (the z^n cancellation is algebraic).
inline Complex psi_bar_at(const Triple& m, double x, Complex z) {
  const int n = m.n();
  const CMatrix i = identity(n);
  const CMatrix exz = expm(x * m.Z);
  const CMatrix exy = expm(x * m.Y);
  const Complex den = det(m.X * exz + exy);
  const Complex num = det(m.X * ((z * i - m.Z) * exz) + (z * i - m.Y) * exy);
  if (std::abs(den) <= kSingularTauTol * std::max(1.0, std::abs(num)))
    throw SingularTau("psi_bar_at: tau(x, 0, ...) vanishes");
  return num / den;
}

/// psi_M(x, z) = psi_bar(x, z) e^{xz} / z^n; needs z != 0.
inline BAEvaluation psi(const Triple& m, double x, Complex z) {
  if (z == Complex(0, 0)) throw Error("psi: z must be nonzero");
  BAEvaluation e;
  e.x = x;
  e.z = z;
  e.psi_bar = psi_bar_at(m, x, z);
  e.psi = e.psi_bar * std::exp(x * z) / std::pow(z, m.n());
  return e;
}

/// Interpolation nodes on a circle outside both spectra.
inline std::vector<Complex> default_z_nodes(const Triple& m, int count, double angle_offset = 0.3) {
  const double radius = 1.0 + std::max(spectral_radius(m.Y), spectral_radius(m.Z));
  std::vector<Complex> nodes;
  nodes.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double ang = angle_offset + 2.0 * std::numbers::pi * k / count;
    nodes.push_back(radius * Complex(std::cos(ang), std::sin(ang)));
  }
  return nodes;
}

/// Coefficients (ascending) of the degree-`degree` polynomial through the
/// samples at the given nodes.
inline CVector interpolate_poly(const std::vector<Complex>& nodes,
                                const std::vector<Complex>& values, int degree) {
  const int k = degree + 1;
  if (static_cast<int>(nodes.size()) < k || static_cast<int>(values.size()) < k)
    throw Error("interpolate_poly: not enough nodes");
  CMatrix vand(k, k);
  CVector rhs(k);
  for (int r = 0; r < k; ++r) {
    Complex p(1, 0);
    for (int c = 0; c < k; ++c) {
      vand(r, c) = p;
      p *= nodes[r];
    }
    rhs(r) = values[r];
  }
  return Eigen::PartialPivLU<CMatrix>(vand).solve(rhs);
}

inline Complex eval_poly(const CVector& coeffs, Complex z) {
  Complex acc(0, 0);
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) acc = acc * z + coeffs(i);
  return acc;
}

/// Fit a degree-n polynomial through psi_bar at the first n+1 nodes and report
/// the worst deviation at the remaining (holdout) nodes, relative to the
/// largest sampled magnitude.
inline double check_polynomiality(const Triple& m, double x, const std::vector<Complex>& nodes) {
  const int n = m.n();
  if (static_cast<int>(nodes.size()) < n + 4)
    throw Error("check_polynomiality: need at least n+1 fit nodes plus 3 holdouts");
  std::vector<Complex> values(nodes.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    values[i] = psi_bar_at(m, x, nodes[i]);
    scale = std::max(scale, std::abs(values[i]));
  }
  if (scale == 0.0) throw Error("check_polynomiality: psi_bar identically zero on nodes");
  const CVector coeffs = interpolate_poly(nodes, values, n);
  double worst = 0.0;
  for (std::size_t i = n + 1; i < nodes.size(); ++i)
    worst = std::max(worst, std::abs(eval_poly(coeffs, nodes[i]) - values[i]) / scale);
  return worst;
}

/// Weights (A_i, B_i) of the point evaluations annihilating psi_bar e^{xz}:
///   A_i f(lambda_i) + B_i f(mu_i) = 0  for f(z) = psi_bar(x, z) e^{xz}, all x.
/// A_i is alpha_i; B_i is beta_i rescaled by the Cauchy-structure factor
/// prod_j (lambda_i - mu_j) / prod_{j != i} (mu_i - mu_j).  (The bare
/// (alpha_i, beta_i) pair does not annihilate the constructed triple's wave
/// function; the rescaling restores the stated n linear conditions.)
inline std::pair<CVector, CVector> soliton_condition_weights(const SpectralSolitonData& data) {
  data.validate();
  const int n = data.n();
  CVector a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a(i) = data.alpha(i);
    Complex factor(1, 0);
    for (int j = 0; j < n; ++j) {
      factor *= data.lambda(i) - data.mu(j);
      if (j != i) factor /= data.mu(i) - data.mu(j);
    }
    b(i) = data.beta(i) * factor;
  }
  return {a, b};
}

/// The n linear condition residuals for the triple built from `data`,
/// normalized per condition by the magnitudes of its two terms.
inline CVector soliton_conditions_residual(const SpectralSolitonData& data, double x) {
  const Triple m = soliton_triple(data);
  const auto [wa, wb] = soliton_condition_weights(data);
  const int n = data.n();
  CVector out(n);
  for (int i = 0; i < n; ++i) {
    const Complex at_lambda =
        wa(i) * psi_bar_at(m, x, data.lambda(i)) * std::exp(x * data.lambda(i));
    const Complex at_mu = wb(i) * psi_bar_at(m, x, data.mu(i)) * std::exp(x * data.mu(i));
    const double scale = std::abs(at_lambda) + std::abs(at_mu);
    out(i) = (at_lambda + at_mu) / (scale > 0 ? scale : 1.0);
  }
  return out;
}

/// Coefficients (ascending, length n+1) of the wave polynomial
///   K(t, z) = det(X (zI-Z) e^{g(Z)} + (zI-Y) e^{g(Y)}) / det(X e^{g(Z)} + e^{g(Y)}),
/// recovered by interpolation at n+1 circle nodes.  Monic: coefficient of z^n is 1.
inline CVector k_poly_coeffs(const Triple& m, const TimeVector& t) {
  const int n = m.n();
  const CMatrix i = identity(n);
  const CMatrix ez = expm(g_eval(m.Z, t));
  const CMatrix ey = expm(g_eval(m.Y, t));
  const Complex den = det(m.X * ez + ey);
  if (std::abs(den) <= kSingularTauTol) throw SingularTau("k_poly_coeffs: tau(t) vanishes");
  const auto value = [&](Complex z) {
    return det(m.X * ((z * i - m.Z) * ez) + (z * i - m.Y) * ey) / den;
  };
  for (int attempt = 0; attempt < 8; ++attempt) {
    const std::vector<Complex> nodes = default_z_nodes(m, n + 1, 0.3 + 0.17 * attempt);
    std::vector<Complex> values(nodes.size());
    bool ok = true;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      values[k] = value(nodes[k]);
      if (!std::isfinite(values[k].real()) || !std::isfinite(values[k].imag())) ok = false;
    }
    if (!ok) continue;
    return interpolate_poly(nodes, values, n);
  }
  throw Error("k_poly_coeffs: interpolation failed");
}

}  // namespace aim

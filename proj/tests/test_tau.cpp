#include <catch2/catch_amalgamated.hpp>

#include "aim/generate.hpp"
#include "aim/tau.hpp"
#include "oracles.hpp"

using namespace aim;

namespace {

double rel(Complex got, Complex want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

TimeVector sample_times(Rng& rng) {
  // protocol: support {1, 2, 3, 5}, entries in the unit disk
  TimeVector t;
  t.set(1, rng.disk(1.0)).set(2, rng.disk(1.0)).set(3, rng.disk(1.0)).set(5, rng.disk(1.0));
  return t;
}

Complex sample_point(Rng& rng) { return rng.annulus(0.5, 4.0); }

// a, b, c with pairwise separation >= 0.1
std::array<Complex, 3> sample_abc(Rng& rng) {
  while (true) {
    const Complex a = sample_point(rng), b = sample_point(rng), c = sample_point(rng);
    if (std::abs(a - b) >= 0.1 && std::abs(a - c) >= 0.1 && std::abs(b - c) >= 0.1)
      return {a, b, c};
  }
}

}  // namespace

TEST_CASE("g_eval: zero, linear, scalar arithmetic", "[tau]") {
  Rng rng(20);
  const CMatrix w = rng.matrix(3);
  CHECK(g_eval(w, TimeVector::zero()).norm() == 0.0);

  const Complex x(0.7, -0.4);
  CHECK((g_eval(w, TimeVector::single(1, x)) - x * w).norm() < 1e-15);

  CMatrix two(1, 1);
  two << 2.0;
  TimeVector t;
  t.set(1, Complex(1, 0)).set(2, Complex(1, 0));
  CHECK(std::abs(g_eval(two, t)(0, 0) - Complex(6, 0)) < 1e-15);
}

TEST_CASE("tau at t=0 is det(X + I)", "[tau]") {
  Rng rng(21);
  const Triple m = random_soliton_kappa1(rng, 3);
  CHECK(rel(tau(m, TimeVector::zero()), det(m.X + identity(3))) < 1e-13);
}

TEST_CASE("tau scalar closed form: the 1-soliton", "[tau]") {
  SpectralSolitonData d;
  d.alpha = CVector::Constant(1, Complex(1, 0));
  d.beta = CVector::Constant(1, Complex(1, 0));
  d.lambda = CVector::Constant(1, Complex(0.9, 0.0));
  d.mu = CVector::Constant(1, Complex(-0.7, 0.0));
  Triple m = soliton_triple(d);
  m.X(0, 0) = 1.0;  // normalize to X = 1 for the textbook form
  m = make_triple(m.X, m.Y, m.Z);
  const double x = 1.3;
  const Complex want = std::exp(x * d.lambda(0)) + std::exp(x * d.mu(0));
  CHECK(rel(tau(m, TimeVector::single(1, x)), want) < 1e-13);
}

TEST_CASE("tau of an exactly intertwining triple is a gauge of the trivial one", "[tau]") {
  Rng rng(22);
  const CMatrix a = rng.matrix(3, 0.8);
  const Triple m = make_triple(identity(3), a, a);
  TimeVector t = sample_times(rng);
  // det(2 e^{g(A)}) = 2^n exp(sum_i t_i tr(A^i))
  Complex exponent(0, 0);
  CMatrix p = identity(3);
  for (int i = 1; i <= t.max_support(); ++i) {
    p = p * a;
    exponent += t.get(i) * p.trace();
  }
  const Complex want = std::pow(Complex(2, 0), 3) * std::exp(exponent);
  CHECK(rel(tau(m, t), want) < 1e-11);
}

TEST_CASE("tau_hat: t=0, gauge relation, flow form", "[tau]") {
  Rng rng(23);
  const Triple m = random_soliton_kappa1(rng, 3);
  CHECK(rel(tau_hat(m, TimeVector::zero()), det(m.X + identity(3))) < 1e-13);

  const TimeVector t = sample_times(rng);
  const Complex gauge = std::exp(g_eval(m.Y, t).trace());
  CHECK(rel(tau_hat(m, t) * gauge, tau(m, t)) < 1e-9);

  const Triple moved = flow(m, t);
  CHECK(rel(tau_hat(m, t), det(moved.X + identity(3))) < 1e-10);
}

TEST_CASE("miwa_shift_tau: large |a| limit and scalar form", "[tau]") {
  Rng rng(24);
  const Triple m = random_soliton_kappa1(rng, 2);
  const TimeVector t = sample_times(rng);
  const Complex far(1e8, 3e7);
  CHECK(rel(miwa_shift_tau(m, t, far), tau(m, t)) < 1e-6);

  SpectralSolitonData d;
  d.alpha = CVector::Constant(1, Complex(0.8, 0.1));
  d.beta = CVector::Constant(1, Complex(1.1, 0));
  d.lambda = CVector::Constant(1, Complex(0.6, 0.3));
  d.mu = CVector::Constant(1, Complex(-0.5, 0.2));
  const Triple scalar = soliton_triple(d);
  const Complex a(1.7, -0.9);
  const TimeVector ts = TimeVector::single(1, Complex(0.4, 0.1));
  const Complex gl = ts.get(1) * d.lambda(0);
  const Complex gm = ts.get(1) * d.mu(0);
  const Complex want = std::exp(gl) * scalar.X(0, 0) * (1.0 - d.lambda(0) / a) +
                       std::exp(gm) * (1.0 - d.mu(0) / a);
  CHECK(rel(miwa_shift_tau(scalar, ts, a), want) < 1e-13);
}

TEST_CASE("miwa shift equals a^{-n} det(e^{g(Y)}) H1(a)", "[tau]") {
  Rng rng(25);
  const Triple m = random_sylvester_kappa1(rng, 3);
  const TimeVector t = sample_times(rng);
  const Complex a(1.9, 0.8);
  const CMatrix egy = expm(g_eval(m.Y, t));
  const CMatrix xhat = expm(-g_eval(m.Y, t)) * m.X * expm(g_eval(m.Z, t));
  const Complex want = std::pow(a, -3) * det(egy) * h1(xhat, m.Y, m.Z, a);
  CHECK(rel(miwa_shift_tau(m, t, a), want) < 1e-10);
}

TEST_CASE("miwa shift agrees with truncated Miwa vector subtraction", "[tau]") {
  Rng rng(26);
  const Triple m = random_soliton_kappa1(rng, 3);
  TimeVector t;
  t.set(1, Complex(0.3, 0.1)).set(2, Complex(-0.15, 0.05));
  const double radius = std::max(spectral_radius(m.Y), spectral_radius(m.Z));
  const Complex a = 2.5 * std::max(radius, 0.5) * Complex(std::cos(0.4), std::sin(0.4));
  const Complex exact = miwa_shift_tau(m, t, a);
  const Complex truncated = tau(m, t.minus_miwa(a, 40));
  CHECK(rel(truncated, exact) < 1e-8);
}

TEST_CASE("double miwa shift: b to infinity, symmetry, H2 relation", "[tau]") {
  Rng rng(27);
  const Triple m = random_soliton_kappa1(rng, 2);
  const TimeVector t = sample_times(rng);
  const Complex a(1.2, -0.6);
  CHECK(rel(double_miwa_shift_tau(m, t, a, Complex(1e8, 0)), miwa_shift_tau(m, t, a)) < 1e-6);

  const Complex b(-0.8, 1.4);
  const Complex ab = double_miwa_shift_tau(m, t, a, b);
  const Complex ba = double_miwa_shift_tau(m, t, b, a);
  CHECK(ab == ba);  // canonicalized evaluation order makes this bitwise

  // (a-b) tau(t-[1/a]-[1/b]) = (ab)^{-n} det(e^{g(Y)}) H2(a, b)
  const CMatrix xhat = expm(-g_eval(m.Y, t)) * m.X * expm(g_eval(m.Z, t));
  const Complex want = std::pow(a * b, -2) * std::exp(g_eval(m.Y, t).trace()) *
                       h2(xhat, m.Y, m.Z, a, b);
  CHECK(rel((a - b) * ab, want) < 1e-10);
}

TEST_CASE("hirota residual vanishes at a = b", "[tau]") {
  Rng rng(28);
  const Triple m = random_full_rank(rng, 3);  // any triple
  const TimeVector t = sample_times(rng);
  const Complex a(1.5, 0.2), c(-1.1, 0.7);
  const HirotaSample s = hirota_residual(m, t, a, a, c);
  CHECK(std::abs(s.residual) == 0.0);  // exact pairwise cancellation
}

TEST_CASE("hirota residual is tiny for kappa <= 1 triples", "[tau][hirota]") {
  Rng rng(29);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 4;
    const Triple m = (trial % 2 == 0) ? random_soliton_kappa1(rng, n)
                                      : random_sylvester_kappa1(rng, n);
    const TimeVector t = sample_times(rng);
    const auto [a, b, c] = sample_abc(rng);
    const HirotaSample s = hirota_residual(m, t, a, b, c);
    if (s.scale < 1e-12) continue;  // redraw-worthy sample; skip
    CHECK(s.relative() < 1e-9);
  }
  const Triple kdv = soliton_triple(random_kdv_data(rng, 2));
  const Triple rat = rational_example(Complex(2, 0));
  for (const Triple& m : {kdv, rat}) {
    const TimeVector t = sample_times(rng);
    const auto [a, b, c] = sample_abc(rng);
    CHECK(hirota_residual(m, t, a, b, c).relative() < 1e-9);
  }
}

TEST_CASE("hirota residual is antisymmetric in its arguments", "[tau][hirota]") {
  Rng rng(30);
  const Triple m = random_soliton_kappa1(rng, 3);
  const TimeVector t = sample_times(rng);
  const auto [a, b, c] = sample_abc(rng);
  const HirotaSample rab = hirota_residual(m, t, a, b, c);
  const HirotaSample rba = hirota_residual(m, t, b, a, c);
  CHECK(std::abs(rab.residual + rba.residual) < 1e-12 * std::max(rab.scale, 1.0));
}

TEST_CASE("hirota negative control: full-rank 3x3 residual is order one", "[tau][hirota]") {
  Rng rng(31);
  const Triple m = random_full_rank(rng, 3);
  REQUIRE(m.kappa == 3);
  TimeVector t;
  t.set(1, Complex(0.3, 0.1)).set(2, Complex(-0.2, 0.0)).set(3, Complex(0.15, 0.0))
      .set(5, Complex(0.1, -0.05));
  const HirotaSample s =
      hirota_residual(m, t, Complex(1.3, 0.4), Complex(-0.9, 1.1), Complex(2.2, -0.5));
  CHECK(s.relative() > 1e-3);
  // pinned regression value (first evaluation of this fixed sample)
  CHECK_THAT(s.relative(), Catch::Matchers::WithinRel(0.14450312534374998, 0.5));
}

TEST_CASE("h1: Xh = 0 gives the characteristic polynomial of Y", "[tau]") {
  Rng rng(32);
  const CMatrix y = rng.matrix(3);
  const CMatrix z = rng.matrix(3);
  const Complex a(1.4, -0.2);
  CHECK(rel(h1(CMatrix::Zero(3, 3), y, z, a), det(a * identity(3) - y)) < 1e-13);

  // scalar form
  CMatrix xs(1, 1), ys(1, 1), zs(1, 1);
  xs << Complex(0.5, 0.5);
  ys << Complex(-0.3, 0.0);
  zs << Complex(0.8, 0.0);
  const Complex want = xs(0, 0) * (a - zs(0, 0)) + (a - ys(0, 0));
  CHECK(rel(h1(xs, ys, zs, a), want) < 1e-15);
}

TEST_CASE("h1 has degree n with leading coefficient det(Xh + I)", "[tau]") {
  Rng rng(33);
  const int n = 3;
  const CMatrix xh = rng.matrix(n);
  const CMatrix y = rng.matrix(n);
  const CMatrix z = rng.matrix(n);
  // interpolate through n+1 nodes and look at the top coefficient
  std::vector<Complex> nodes, values;
  for (int k = 0; k <= n; ++k) {
    const Complex node = 2.3 * std::exp(Complex(0, 0.5 + 2.0 * std::numbers::pi * k / (n + 1)));
    nodes.push_back(node);
    values.push_back(h1(xh, y, z, node));
  }
  CMatrix vand(n + 1, n + 1);
  CVector rhs(n + 1);
  for (int r = 0; r <= n; ++r) {
    Complex p(1, 0);
    for (int c = 0; c <= n; ++c) {
      vand(r, c) = p;
      p *= nodes[r];
    }
    rhs(r) = values[r];
  }
  const CVector coeffs = Eigen::PartialPivLU<CMatrix>(vand).solve(rhs);
  CHECK(rel(coeffs(n), det(xh + identity(n))) < 1e-10);
}

TEST_CASE("h2: prefactor zero, antisymmetry, scalar form", "[tau]") {
  Rng rng(34);
  const CMatrix xh = rng.matrix(2);
  const CMatrix y = rng.matrix(2);
  const CMatrix z = rng.matrix(2);
  const Complex a(1.1, 0.3), b(-0.7, 0.9);
  CHECK(std::abs(h2(xh, y, z, a, a)) == 0.0);
  CHECK(h2(xh, y, z, a, b) == -h2(xh, y, z, b, a));  // bitwise by canonicalization

  CMatrix xs(1, 1), ys(1, 1), zs(1, 1);
  xs << Complex(0.4, -0.2);
  ys << Complex(0.6, 0.1);
  zs << Complex(-0.9, 0.0);
  const Complex want =
      (a - b) * (xs(0, 0) * (a - zs(0, 0)) * (b - zs(0, 0)) + (a - ys(0, 0)) * (b - ys(0, 0)));
  CHECK(rel(h2(xs, ys, zs, a, b), want) < 1e-14);
}

TEST_CASE("h_poly vanishes identically at a = b for any matrices", "[tau]") {
  Rng rng(35);
  const CMatrix xh = rng.matrix(3);
  const CMatrix y = rng.matrix(3);
  const CMatrix z = rng.matrix(3);
  const Complex a(0.9, 0.5), c(-1.3, 0.2);
  CHECK(std::abs(h_poly(xh, y, z, a, a, c)) == 0.0);
}

TEST_CASE("h_poly is numerically zero on kappa <= 1 triples", "[tau]") {
  Rng rng(36);
  for (int trial = 0; trial < 4; ++trial) {
    const Triple m =
        (trial % 2 == 0) ? random_soliton_kappa1(rng, 3) : random_sylvester_kappa1(rng, 2);
    const auto [a, b, c] = sample_abc(rng);
    const double scale = h_poly_scale(m.X, m.Y, m.Z, a, b, c);
    if (scale < 1e-12) continue;
    CHECK(std::abs(h_poly(m.X, m.Y, m.Z, a, b, c)) / scale < 1e-9);
  }
}

TEST_CASE("h_poly 2x2 closed form for arbitrary matrices", "[tau]") {
  Rng rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix xh = rng.matrix(2);
    const CMatrix y = rng.matrix(2);
    const CMatrix z = rng.matrix(2);
    const auto [a, b, c] = sample_abc(rng);
    const Complex got = h_poly(xh, y, z, a, b, c);
    // (a-b)(b-c)(a-c): the (c-a) orientation flips the sign of the identity
    const Complex want =
        (a - b) * (b - c) * (a - c) * det((xh * z - y * xh) * (y - z));
    const double scale =
        std::max({std::abs(got), std::abs(want), h_poly_scale(xh, y, z, a, b, c) * 1e-6});
    CHECK(std::abs(got - want) / std::max(scale, 1e-300) < 1e-10);
  }
}

TEST_CASE("kdv factorization: t_j absent gives deviation 0", "[tau][kdv]") {
  Rng rng(38);
  const Triple m = soliton_triple(random_kdv_data(rng, 2));
  REQUIRE(is_nkdv(m, 2));
  const TimeVector t = TimeVector::single(1, Complex(0.4, 0.0));
  CHECK(kdv_factorization_check(m, 2, t) == 0.0);
}

TEST_CASE("kdv factorization holds for the Y = -Z family", "[tau][kdv]") {
  Rng rng(39);
  for (int trial = 0; trial < 3; ++trial) {
    const Triple m = soliton_triple(random_kdv_data(rng, 2));
    REQUIRE(m.kappa == 1);
    TimeVector t;
    t.set(1, Complex(0.35, 0.1)).set(2, rng.disk(0.5));
    CHECK(kdv_factorization_check(m, 2, t) < 1e-9);
  }
}

TEST_CASE("kdv factorization negative control: generic triple deviates", "[tau][kdv]") {
  Rng rng(40);
  const Triple m = random_soliton_kappa1(rng, 2);  // generic lambda != -mu
  REQUIRE_FALSE(is_nkdv(m, 2));
  // force the check through by building the factorized comparison directly
  TimeVector t;
  t.set(1, Complex(0.3, 0.0)).set(2, Complex(0.4, 0.0));
  TimeVector t1 = TimeVector::single(1, t.get(1));
  const Complex full = tau(m, t);
  const Complex factored = tau(m, t1) * det(expm(t.get(2) * m.Z * m.Z));
  const double deviation = std::abs(full - factored) / std::abs(full);
  CHECK(deviation > 0.05);  // order-one failure, pinned loosely
}

TEST_CASE("soliton subset sum: small cases", "[tau][soliton]") {
  SpectralSolitonData d;
  d.alpha = CVector::Constant(1, Complex(0.9, 0.2));
  d.beta = CVector::Constant(1, Complex(1.2, -0.1));
  d.lambda = CVector::Constant(1, Complex(0.8, 0.1));
  d.mu = CVector::Constant(1, Complex(-0.6, 0.4));
  TimeVector t;
  t.set(1, Complex(0.5, 0.1));
  const Complex c1 = d.alpha(0) / (d.beta(0) * (d.lambda(0) - d.mu(0)));
  const Complex want =
      1.0 + c1 * std::exp(t.get(1) * d.lambda(0) - t.get(1) * d.mu(0));
  CHECK(rel(soliton_sum_tau(d, t), want) < 1e-14);

  // with all interactions switched off by tiny times, tau_hat ~ 1
  TimeVector tiny;
  tiny.set(1, Complex(1e-12, 0));
  Rng rng(41);
  const SpectralSolitonData d3 = random_soliton_data(rng, 3);
  const Complex base = soliton_sum_tau(d3, TimeVector::zero());
  CHECK(rel(soliton_sum_tau(d3, tiny), base) < 1e-9);
}

TEST_CASE("soliton subset sum matches tau_hat for n = 1..8", "[tau][soliton]") {
  Rng rng(42);
  for (int n = 1; n <= 8; ++n) {
    const SpectralSolitonData d = random_soliton_data(rng, n);
    const Triple m = soliton_triple(d);
    for (int rep = 0; rep < 2; ++rep) {
      TimeVector t;
      t.set(1, rng.disk(0.6)).set(2, rng.disk(0.6)).set(3, rng.disk(0.6));
      const Complex via_det = tau_hat(m, t);
      const Complex via_sum = soliton_sum_tau(d, t);
      CHECK(rel(via_sum, via_det) < 1e-9);
    }
  }
}

TEST_CASE("tau_x_derivatives match finite differences", "[tau][derivs]") {
  Rng rng(43);
  const Triple m = random_soliton_kappa1(rng, 2);
  TimeVector t;
  t.set(1, Complex(0.3, 0)).set(2, Complex(-0.2, 0)).set(3, Complex(0.15, 0));
  const auto taus = tau_x_derivatives(m, t, 3);
  CHECK(rel(taus[0], tau(m, t)) < 1e-13);
  const auto tau_at = [&](double x) {
    TimeVector tt = t;
    tt.set(1, t.get(1) + x);
    return tau(m, tt);
  };
  const Complex d1 = oracle::fd1(tau_at, 0.0, 1e-2);
  const Complex d2 = oracle::fd2(tau_at, 0.0, 1e-2);
  CHECK(rel(taus[1], d1) < 1e-7);
  CHECK(rel(taus[2], d2) < 1e-6);
}

TEST_CASE("u_field: kappa = 0 gives the trivial solution", "[tau][kp]") {
  Rng rng(44);
  const Triple m = random_kappa0(rng, 3);
  for (const double x : {-0.7, 0.2, 1.1}) {
    CHECK(std::abs(u_at_fd(m, x, 0.3, -0.2)) < 1e-8);
    CHECK(std::abs(u_at(m, x, 0.3, -0.2)) < 1e-10);
  }
}

TEST_CASE("u_field: 1-soliton sech^2 closed form", "[tau][kp]") {
  // X = 1, Z = 1, Y = -1: tau(x) = e^x + e^{-x}, u = 2 sech^2(x) at factor 2
  CMatrix one(1, 1), minus(1, 1);
  one << 1.0;
  minus << -1.0;
  const Triple m = make_triple(one, minus, one);
  for (const double x : {0.0, 0.4, -1.2}) {
    const double sech = 1.0 / std::cosh(x);
    const double want = 2.0 * sech * sech;
    CHECK(std::abs(u_at_fd(m, x, 0.0, 0.0, 2.0) - want) < 5e-9);
    CHECK(std::abs(u_at(m, x, 0.0, 0.0, 2.0) - want) < 1e-12);
  }
  CHECK(std::abs(u_at(m, 0.0, 0.0, 0.0, 2.0) - 2.0) < 1e-12);  // peak value
}

TEST_CASE("u_field translation covariance under the t1 flow", "[tau][kp]") {
  Rng rng(45);
  const SpectralSolitonData d = random_soliton_data(rng, 2, 0.8);
  const Triple m = soliton_triple(d);
  const double shift = 0.6;
  const Triple shifted = flow_t1(m, shift);
  for (const double x : {-0.3, 0.5}) {
    const Complex a = u_at(shifted, x, 0.1, 0.2);
    const Complex b = u_at(m, x + shift, 0.1, 0.2);
    CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("u_field FD path agrees with the exact-derivative path", "[tau][kp]") {
  Rng rng(46);
  const SpectralSolitonData d = random_soliton_data(rng, 2, 0.8);
  const Triple m = soliton_triple(d);
  for (int trial = 0; trial < 5; ++trial) {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = rng.uniform(-0.8, 0.8);
    const double s = rng.uniform(-0.8, 0.8);
    const Complex fd = u_at_fd(m, x, y, s);
    const Complex exact = u_at(m, x, y, s);
    CHECK(std::abs(fd - exact) < 1e-7 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("u_field raises SingularTau near a tau zero", "[tau][kp]") {
  // tau = e^x - e^{-x} vanishes at x = 0 (X = -1 instead of 1)
  CMatrix mone(1, 1), one(1, 1), minus(1, 1);
  mone << -1.0;
  one << 1.0;
  minus << -1.0;
  const Triple m = make_triple(mone, minus, one);
  CHECK_THROWS_AS(u_at_fd(m, 0.0, 0.0, 0.0), SingularTau);
}

TEST_CASE("kp_residual: 2-soliton satisfies the KP equation at factor 2", "[tau][kp]") {
  Rng rng(47);
  const SpectralSolitonData d = random_soliton_data(rng, 2, 0.8);
  const Triple m = soliton_triple(d);
  double worst2 = 0.0, worst1 = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = rng.uniform(-0.6, 0.6);
    const double s = rng.uniform(-0.6, 0.6);
    const KpSample s2 = kp_residual(m, x, y, s, 2.0);
    const KpSample s1 = kp_residual(m, x, y, s, 1.0);
    if (s2.scale < 1e-12) continue;
    worst2 = std::max(worst2, s2.relative());
    worst1 = std::max(worst1, s1.relative());
  }
  CHECK(worst2 < 1e-4);
  CHECK(worst2 < 1e-5);   // the exact-x path does far better than the gate
  CHECK(worst1 > 1e-2);   // factor-1 normalization fails: pins the convention
}

TEST_CASE("tau is invariant under simultaneous conjugation", "[tau]") {
  Rng rng(49);
  const Triple m = random_soliton_kappa1(rng, 3);
  const TimeVector t = sample_times(rng);
  for (int trial = 0; trial < 3; ++trial) {
    const CMatrix g = random_well_conditioned(rng, 3);
    const Triple conj = gl_action(m, g, g);
    CHECK(rel(tau(conj, t), tau(m, t)) < 1e-9);
  }
}

TEST_CASE("kappa = 0 triple has zero kp residual", "[tau][kp]") {
  Rng rng(48);
  const Triple m = random_kappa0(rng, 3);
  const KpSample s = kp_residual(m, 0.4, -0.2, 0.3, 2.0);
  CHECK(std::abs(s.residual) < 1e-10);
}

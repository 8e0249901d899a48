#include "swlab/harmonic.hpp"
#include "swlab/lambda.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace swlab;

namespace {

MetricField kaehler_product(const GridSpec& g, double amp) {
  return build_metric(generate(g, [&](const Vec4& x) -> Mat4 {
    const double e2u = std::exp(2.0 * amp * std::cos(x(2)));
    return Vec4(1.0, 1.0, e2u, e2u).asDiagonal();
  }));
}

MetricField generic_metric(const GridSpec& g) {
  return build_metric(generate(g, [&](const Vec4& x) -> Mat4 {
    Mat4 h = Mat4::Identity();
    h(0, 1) = h(1, 0) = 0.1 * std::sin(x(2) + x(3));
    h(2, 2) += 0.2 * std::cos(x(0));
    h(1, 3) = h(3, 1) = 0.05 * std::cos(x(1));
    return h;
  }));
}

SelfDualField random_field(const GridSpec& g, unsigned seed) {
  auto gen = oracle::rng(seed);
  std::normal_distribution<double> n;
  std::vector<Vec3> v(g.node_count());
  for (auto& x : v) x = Vec3(n(gen), n(gen), n(gen));
  return SelfDualField(g, std::move(v));
}

ThetaField winding_theta(const MetricField& m) {
  return theta_from_angle(generate(m.grid(), [](const Vec4& x) { return x(0) + 0.4 * std::sin(x(1)); }), m);
}

template <class T>
double dot(const Field<T>& a, const Field<T>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i].array() * b[i].array()).sum();
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// beta, theta and K

TEST(Beta, PiecewiseDefinition) {
  EXPECT_EQ(beta(0.5), 1.0);
  EXPECT_EQ(beta(2.0), 0.5);
  EXPECT_EQ(beta(1.0), 1.0);
  EXPECT_THROW(beta(-1e-3), InvalidArgument);
  for (double t = 0.0; t <= 1e6; t = t * 1.7 + 0.01) EXPECT_LE(beta(t) * t, 1.0 + 1e-15);
}

TEST(Theta, ConstantHasZeroDifferential) {
  const auto th = constant_theta(1.3, flat_metric(GridSpec::cube(4)));
  for (std::size_t i = 0; i < th.s.size(); ++i) {
    EXPECT_EQ(th.dtheta_norm2[i], 0.0);
    EXPECT_NEAR(th.s[i] * th.s[i] + th.c[i] * th.c[i], 1.0, 1e-15);
  }
}

TEST(Theta, WindingAngleHasUnitDifferentialAcrossTheBranchCut) {
  const GridSpec g({24, 4, 4, 4});
  const MetricField m = flat_metric(g);
  // Samples wrapped into (-pi, pi]: the raw angle jumps, the pair does not.
  const auto th = theta_from_angle(generate(g, [](const Vec4& x) { return std::remainder(x(0), 2 * kPi); }), m);
  const auto ds = partial_derivative(th.s, 0), dc = partial_derivative(th.c, 0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    EXPECT_NEAR(th.dtheta_norm2[i], 1.0, 1e-5);
    EXPECT_NEAR(ds[i], th.c[i] * th.dtheta[i](0), 1e-5);
    EXPECT_NEAR(dc[i], -th.s[i] * th.dtheta[i](0), 1e-5);
  }
}

TEST(Theta, RejectsOffCirclePair) {
  const MetricField m = flat_metric(GridSpec::cube(4));
  EXPECT_THROW(theta_from_pair(ScalarField(m.grid(), 0.5), ScalarField(m.grid(), 0.5), m), InvalidArgument);
}

TEST(AssembleK, FlatConstantThetaIsZero) {
  const MetricField m = flat_metric(GridSpec::cube(6));
  const auto k = assemble_K(constant_theta(0.7, m), curvature_stack(m), 0.0);
  for (std::size_t i = 0; i < k.K.size(); ++i) {
    EXPECT_LE(std::abs(k.K[i]), 1e-10);
    EXPECT_LE(k.Kplus[i] + k.Kminus[i], 1e-10);
  }
  EXPECT_THROW(assemble_K(constant_theta(0.7, m), curvature_stack(m), -1.0), InvalidArgument);
}

TEST(AssembleK, HalfPiAndSplitIdentities) {
  const MetricField m = generic_metric(GridSpec::cube(8));
  const auto cb = curvature_stack(m);
  const auto k = assemble_K(constant_theta(kPi / 2, m), cb, 0.25);
  for (std::size_t i = 0; i < k.K.size(); ++i) {
    EXPECT_NEAR(k.K[i], 2.0 / 3.0 * cb.R[i] + 2.0 * cb.w[i] + 0.25, 1e-12);
    EXPECT_EQ(k.K[i], k.Kplus[i] - k.Kminus[i]);
    EXPECT_EQ(std::abs(k.K[i]), k.Kplus[i] + k.Kminus[i]);
    EXPECT_GE(k.Kplus[i], 0.0);
    EXPECT_GE(k.Kminus[i], 0.0);
  }
}

TEST(AssembleK, KaehlerProductClosedForm) {
  const GridSpec g = GridSpec::cube(16);
  const double amp = 0.1, lambda = 0.05;
  const MetricField m = kaehler_product(g, amp);
  const auto th = theta_from_angle(generate(g, [](const Vec4& x) { return 0.5 + 0.3 * std::cos(x(3)); }), m);
  const auto k = assemble_K(th, curvature_stack(m), lambda);
  double err = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Vec4 x = g.position(i);
    const double u = amp * std::cos(x(2));
    const double r = 2.0 * oracle::surface_gauss_curvature(u, -amp * std::cos(x(2)));
    const double s = std::sin(0.5 + 0.3 * std::cos(x(3)));
    const double dth = -0.3 * std::sin(x(3));
    const double expect = (1 - s * s / 3) * r + 2 * s * s * std::min(r / 6, -r / 12) -
                          std::exp(-2 * u) * dth * dth + lambda;
    err = std::max(err, std::abs(k.K[i] - expect));
  }
  EXPECT_LE(err, 1e-4);
}

// ---------------------------------------------------------------------------
// Operator route: adjoints and gradients

TEST(Operators, ForwardAndAdjointArePairedExactly) {
  const GridSpec g = GridSpec::cube(6);
  const MetricField m = generic_metric(g);
  const SelfDualOperators ops(m);
  const auto u = random_field(g, 1);
  const auto f = generate(g, [](const Vec4& x) { return std::sin(x(0) + x(3)); });
  auto gen = oracle::rng(2);
  std::normal_distribution<double> n;
  std::vector<Vec4> r3(g.node_count());
  for (auto& x : r3) x = Vec4(n(gen), n(gen), n(gen), n(gen));
  const ThreeFormField r(g, r3);
  const double a = dot(ops.dd_forward(u, &f), r), b = dot(u, ops.dd_adjoint(r, &f));
  EXPECT_NEAR(a, b, 1e-11 * std::abs(a));
  std::vector<NablaSelfDual> rn(g.node_count());
  for (auto& x : rn)
    for (int j = 0; j < 12; ++j) x.data()[j] = n(gen);
  const NablaSelfDualField rr(g, rn);
  const double c = dot(ops.nabla_forward(u, &f), rr), d = dot(u, ops.nabla_adjoint(rr, &f));
  EXPECT_NEAR(c, d, 1e-11 * std::abs(c));
}

TEST(Operators, ConnectionTransposeIsExact) {
  auto gen = oracle::rng(3);
  std::normal_distribution<double> n;
  ChristoffelSymbols gam;
  for (auto& m : gam)
    for (int j = 0; j < 16; ++j) m.data()[j] = n(gen);
  for (int mu = 0; mu < 4; ++mu) {
    Vec6 f, r;
    for (int j = 0; j < 6; ++j) {
      f(j) = n(gen);
      r(j) = n(gen);
    }
    EXPECT_NEAR(r.dot(sd_detail::gamma_action(gam, mu, f)), f.dot(sd_detail::gamma_action_transpose(gam, mu, r)),
                1e-12);
  }
}

TEST(Operators, EnergiesMatchStraightLineRoutines) {
  // (2 + sin x0) eta_1 on a flat chart with constant theta, then a generic case.
  const GridSpec g = GridSpec::cube(8);
  {
    const MetricField m = flat_metric(g);
    const auto th = constant_theta(0.9, m);
    const auto s = generate(g, [](const Vec4& x) { return Vec3(2.0 + std::sin(x(0)), 0, 0); });
    const double a = rayleigh_quotient(s, th, m, 0.0), b = LambdaFunctional(th, m).value(s, 0.0);
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(a, b, 1e-12 * a);
  }
  const MetricField m = generic_metric(g);
  const auto th = winding_theta(m);
  const auto s = random_field(g, 4);
  for (double eps : {0.0, 1e-2}) {
    const auto a = quotient_terms(s, th, m, eps);
    const auto b = LambdaFunctional(th, m).terms(s, eps);
    EXPECT_NEAR(a.dd, b.dd, 1e-11 * a.dd);
    EXPECT_NEAR(a.nabla, b.nabla, 1e-11 * a.nabla);
    EXPECT_NEAR(a.kato, b.kato, 1e-11 * a.kato);
    EXPECT_NEAR(a.norm2, b.norm2, 1e-12 * a.norm2);
  }
}

TEST(Operators, QuotientGradientMatchesFiniteDifferences) {
  const GridSpec g = GridSpec::cube(6);
  const MetricField m = generic_metric(g);
  const LambdaFunctional f(winding_theta(m), m);
  const auto u = generate(g, [](const Vec4& x) { return Vec3(1 + 0.3 * std::sin(x(1)), 0.5 * std::cos(x(0)), 0.2); });
  const auto dir = random_field(g, 5);
  const double eps = 0.05;
  const double analytic = f.ops().inner(f.gradient(u, eps), dir);
  const double h = 1e-5;
  const double fd = (f.value(u + h * dir, eps) - f.value(u + (-h) * dir, eps)) / (2 * h);
  EXPECT_NEAR(analytic, fd, 1e-6 * std::abs(fd) + 1e-10);
}

TEST(Operators, HarmonicEnergyGradientMatchesFiniteDifferences) {
  const GridSpec g = GridSpec::cube(6);
  const SelfDualOperators ops(generic_metric(g));
  const auto u = random_field(g, 6), dir = random_field(g, 7);
  const double analytic = dot(ops.dd_energy_gradient(u, nullptr) + ops.filter_energy_gradient(u), dir);
  const double h = 1e-5;
  const double fd = (harmonic_energy(ops, u + h * dir) - harmonic_energy(ops, u + (-h) * dir)) / (2 * h);
  EXPECT_NEAR(analytic, fd, 1e-7 * std::abs(fd));
}

// ---------------------------------------------------------------------------
// Rayleigh quotient

TEST(RayleighQuotient, ParallelFormIsZero) {
  const MetricField m = flat_metric(GridSpec::cube(6));
  EXPECT_LE(rayleigh_quotient(SelfDualField(m.grid(), Vec3(1, 0, 0)), constant_theta(0.4, m), m, 0.0), 1e-10);
  EXPECT_THROW(rayleigh_quotient(SelfDualField(m.grid(), Vec3::Zero()), constant_theta(0.4, m), m, 0.0),
               InvalidArgument);
  EXPECT_THROW(rayleigh_quotient(SelfDualField(m.grid(), Vec3(1, 0, 0)), constant_theta(0.4, m), m, -1.0),
               InvalidArgument);
}

TEST(RayleighQuotient, ScaleInvariance) {
  const GridSpec g = GridSpec::cube(6);
  const MetricField m = generic_metric(g);
  const auto th = winding_theta(m);
  const auto s = generate(g, [](const Vec4& x) {
    return Vec3(1.5 + std::sin(x(2)), 0.5 * std::cos(x(0) - x(1)), 0.3 * std::sin(x(3)));
  });
  const double eps = 1e-6;
  const double q = rayleigh_quotient(s, th, m, eps);
  for (double t : {0.5, 3.0, 40.0}) {
    EXPECT_NEAR(rayleigh_quotient(t * s, th, m, t * eps), q, 1e-13 * q);
    EXPECT_NEAR(rayleigh_quotient(t * s, th, m, eps), q, 1e-9 * q);
  }
}

TEST(RayleighQuotient, WindingConstantFormAnalytic) {
  // theta = x0, sigma = eta_1: the dd and nabla energies sum to Vol exactly in the continuum.
  const GridSpec g({24, 4, 4, 4});
  const MetricField m = flat_metric(g);
  const auto th = theta_from_angle(generate(g, [](const Vec4& x) { return x(0); }), m);
  EXPECT_NEAR(rayleigh_quotient(SelfDualField(g, Vec3(0, 0, 1)), th, m, 0.0), 1.0, 1e-5);
}

// ---------------------------------------------------------------------------
// lambda minimization

TEST(MinimizeLambda, FlatConstantThetaIsZero) {
  const MetricField m = flat_metric(GridSpec::cube(6));
  LambdaOptions o;
  o.random_starts = 2;
  const auto r = minimize_lambda(constant_theta(0.3, m), m, o);
  EXPECT_LE(r.lambda, 1e-6);
  EXPECT_GE(r.lambda, 0.0);
  EXPECT_EQ(r.start_values.size(), 5u);
}

TEST(MinimizeLambda, KaehlerProductConstantThetaFindsParallelForm) {
  const MetricField m = kaehler_product(GridSpec::cube(8), 0.1);
  LambdaOptions o;
  o.random_starts = 1;
  const auto th = constant_theta(0.5, m);
  const auto r = minimize_lambda(th, m, o);
  EXPECT_LE(r.lambda, 1e-5);
  const double nab = integrate(pointwise_norm2(covariant_derivative(r.minimizer, m)), m.vol());
  const double n2 = integrate(pointwise_norm2(r.minimizer), m.vol());
  EXPECT_LE(std::sqrt(nab / n2), 1e-3);
  EXPECT_NEAR(rayleigh_quotient(r.minimizer, th, m, 0.0), r.lambda, 1e-9 * std::max(r.lambda, 1e-12) + 1e-15);
}

TEST(MinimizeLambda, WindingThetaIsPositiveAndStable) {
  const MetricField m = flat_metric(GridSpec::cube(6));
  const auto th = theta_from_angle(generate(m.grid(), [](const Vec4& x) { return x(0); }), m);
  LambdaOptions o;
  o.random_starts = 3;
  o.constant_starts = false;
  const auto r = minimize_lambda(th, m, o);
  EXPECT_GE(r.lambda, 0.05);
  EXPECT_LE(r.lambda, 1.0);
  const auto [lo, hi] = std::minmax_element(r.start_values.begin(), r.start_values.end());
  EXPECT_LE((*hi - *lo) / *lo, 0.1);
  EXPECT_NEAR(rayleigh_quotient(r.minimizer, th, m, 0.0), r.lambda, 1e-9 * r.lambda);
  for (std::size_t i = 1; i < r.quotient_history.size(); ++i)
    EXPECT_LE(r.quotient_history[i], r.quotient_history[i - 1]);
}

TEST(MinimizeLambda, RejectsEmptyStartSet) {
  const MetricField m = flat_metric(GridSpec::cube(4));
  LambdaOptions o;
  o.random_starts = 0;
  o.constant_starts = false;
  EXPECT_THROW(minimize_lambda(constant_theta(0.0, m), m, o), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Harmonic basis

TEST(HarmonicBasis, FlatTorusHasThreeConstantForms) {
  const MetricField m = flat_metric(GridSpec::cube(8));
  const auto hb = harmonic_selfdual_basis(m);
  ASSERT_EQ(hb.forms.size(), 3u);
  for (double q : hb.quotients) EXPECT_LE(q, 1e-8);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b)
      EXPECT_NEAR(inner_product(hb.forms[a], hb.forms[b], m.vol()), a == b ? 1.0 : 0.0, 1e-10);
    const auto dd = d_plus_dstar(hb.forms[a], m);
    EXPECT_LE(integrate(dd.norm2, m.vol()), 1e-8);
  }
  for (int c = 0; c < 3; ++c) {
    const SelfDualField e(m.grid(), Vec3::Unit(c));
    const auto diff = project_onto(hb.forms, e, m) - e;
    EXPECT_LE(lp_norm(diff, Norm::L2, m.vol()), 1e-6 * lp_norm(e, Norm::L2, m.vol()));
  }
}

TEST(HarmonicBasis, KaehlerFormLiesInTheSpan) {
  const MetricField m = kaehler_product(GridSpec::cube(8), 0.1);
  const auto hb = harmonic_selfdual_basis(m);
  ASSERT_EQ(hb.forms.size(), 3u);
  const SelfDualField omega(m.grid(), Vec3(1, 0, 0));
  const auto diff = project_onto(hb.forms, omega, m) - omega;
  EXPECT_LE(lp_norm(diff, Norm::L2, m.vol()), 1e-6 * lp_norm(omega, Norm::L2, m.vol()));
  EXPECT_GT(hb.ritz_values[3], 100 * hb.count_tol);
}

TEST(HarmonicBasis, RejectsBadBlock) {
  const MetricField m = flat_metric(GridSpec::cube(4));
  HarmonicOptions o;
  o.block = 3;
  o.guard = 3;
  EXPECT_THROW(harmonic_selfdual_basis(m, 0.0, o), InvalidArgument);
}

TEST(HarmonicBasis, ReportsNonConvergence) {
  const MetricField m = flat_metric(GridSpec::cube(6));
  HarmonicOptions o;
  o.max_iterations = 2;
  EXPECT_THROW(harmonic_selfdual_basis(m, 0.0, o), NumericalError);
}

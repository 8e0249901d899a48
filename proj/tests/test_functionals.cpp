#include "swlab/functionals.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace swlab;

namespace {

const Complex kI(0.0, 1.0);

CurvatureBundle flat_bundle(const GridSpec& g) {
  return {ScalarField(g, 0.0), Field<Mat3>(g, Mat3::Zero()), ScalarField(g, 0.0)};
}

KField constant_k(const GridSpec& g, double k) {
  return {ScalarField(g, k), ScalarField(g, positive_part(k)), ScalarField(g, negative_part(k))};
}

OneFormField smooth_potential(const GridSpec& g, double amp = 1.0) {
  return generate(g, [amp](const Vec4& x) -> Vec4 {
    return amp * Vec4(0.3 * std::sin(x(1)), 0.2 * std::cos(x(0)), 0.1 * std::sin(x(3)), 0.4 * std::cos(x(2)));
  });
}

/// Random trigonometric spinor with modulus bounded below by about 0.5.
SpinorField random_spinor_field(const GridSpec& g, unsigned seed) {
  auto gen = oracle::rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 12> c{};
  for (auto& x : c) x = u(gen);
  return generate(g, [&](const Vec4& x) -> Spinor {
    const Complex z0(1.0 + 0.3 * c[0] * std::sin(x(0) + c[1]) + 0.2 * c[2] * std::cos(x(1)),
                     0.3 * c[3] * std::cos(x(2) - x(3)));
    const Complex z1(0.4 * c[4] * std::sin(x(3) + c[5]) + 0.2 * c[6],
                     0.3 * c[7] * std::cos(x(0) + x(1)) + 0.2 * c[8] * std::sin(x(2)));
    return (1.0 + 0.2 * c[9]) * Spinor(z0, z1);
  });
}

OneFormField random_potential(const GridSpec& g, unsigned seed) {
  auto gen = oracle::rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::array<double, 8> c{};
  for (auto& x : c) x = u(gen);
  return generate(g, [&](const Vec4& x) -> Vec4 {
    return Vec4(c[0] * std::sin(x(1) + c[4]), c[1] * std::cos(x(2) - x(0)), c[2] * std::sin(x(3)) + c[5],
                c[3] * std::cos(x(0) + c[6]));
  });
}

MetricField kaehler(const GridSpec& g, double amp) {
  return kaehler_product_metric(generate(g, [amp](const Vec4& x) { return amp * std::cos(x(2)); }));
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(SmoothCutoff, BoundsAndPlateau) {
  for (double t = 0.0; t <= 1.0; t += 0.125) EXPECT_EQ(smooth_cutoff(t), 1.0);
  for (double t = 1.0; t < 1e6; t *= 1.1) {
    const double c = smooth_cutoff(t);
    EXPECT_GE(c, 1.0 / (2.0 * t));
    EXPECT_LE(c, 2.0 / t);
    EXPECT_LE(c, 1.0);
  }
  EXPECT_NEAR(smooth_cutoff(1.0 + 1e-3), 1.0, 1e-12);
  EXPECT_THROW(smooth_cutoff(-1.0), InvalidArgument);
}

TEST(PswResidual, ReducibleSolutionOnFlatTorus) {
  const auto g = GridSpec::cube(6);
  const auto m = flat_metric(g);
  const auto K = assemble_K(constant_theta(0.3, m), flat_bundle(g), 0.0);
  const MonopoleConfig cfg{trivial_connection(m), SpinorField(g, Spinor::Zero())};
  for (double eps : {1e-3, 0.5, 2.0}) {
    const auto r = psw_residual(cfg, m, PerturbationSpec::full(eps), K);
    EXPECT_LE(r.r1_linf, 1e-10);
    EXPECT_LE(r.r2_linf, 1e-10);
  }
}

TEST(PswResidual, ConstantSpinorLeavesEpsilonTerm) {
  const auto g = GridSpec::cube(6);
  const auto m = flat_metric(g);
  const auto K = constant_k(g, 0.0);
  const MonopoleConfig cfg{trivial_connection(m), SpinorField(g, Spinor(1.0, 0.0))};
  const double eps = 0.25;
  const auto r = psw_residual(cfg, m, PerturbationSpec::full(eps), K);
  EXPECT_EQ(r.r1_linf, 0.0);
  EXPECT_NEAR(r.r2_linf, eps / (2.0 * std::sqrt(2.0)), 1e-15);
}

TEST(PswResidual, SimpleVariantUsesTheThetaHalfPiCurvature) {
  const auto g = GridSpec::cube(4);
  const auto m = flat_metric(g);
  // R = -3, w = 0.25 gives 2R/3 + 2w = -1.5.
  const CurvatureBundle cb{ScalarField(g, -3.0), Field<Mat3>(g, Mat3::Zero()), ScalarField(g, 0.25)};
  const auto K = simple_K(cb);
  EXPECT_DOUBLE_EQ(K.Kminus[0], 1.5);
  const MonopoleConfig cfg{trivial_connection(m), SpinorField(g, Spinor(1.0, 0.0))};
  const auto r = psw_residual(cfg, m, PerturbationSpec::simple(0.5), K);
  EXPECT_NEAR(r.r2_linf, 2.0 / (2.0 * std::sqrt(2.0)), 1e-15);
  auto bad = PerturbationSpec::simple(0.5);
  bad.omega_hat = SelfDualField(g, Vec3::Zero());
  EXPECT_THROW(psw_residual(cfg, m, bad, K), InvalidArgument);
}

TEST(PswResidual, RejectsBadParameters) {
  const auto g = GridSpec::cube(4);
  const auto m = flat_metric(g);
  const auto K = constant_k(g, 1.0);
  const MonopoleConfig cfg{trivial_connection(m), SpinorField(g, Spinor(1.0, 0.0))};
  EXPECT_THROW(psw_residual(cfg, m, PerturbationSpec::full(0.0), K), InvalidArgument);
  EXPECT_THROW(psw_residual(cfg, m, PerturbationSpec::full(0.1, SelfDualField(g, Vec3(1.1, 0, 0))), K),
               InvalidArgument);
  EXPECT_THROW(psw_residual(cfg, m, PerturbationSpec::general([](std::size_t, double) { return 0.0; }, 1, 1, 1), K),
               InvalidArgument);
}

TEST(Reduction, FullEqualsGeneralBitForBit) {
  const auto g = GridSpec::cube(6);
  const auto m = flat_metric(g);
  const auto Kf = generate(g, [](const Vec4& x) { return 0.5 * std::sin(x(0)) - 0.2 + 0.1 * std::cos(x(2)); });
  const KField K{Kf, map(Kf, positive_part), map(Kf, negative_part)};
  const auto omega_hat = generate(g, [](const Vec4& x) {
    return Vec3(0.6 * std::cos(x(1)), 0.3, 0.2 * std::sin(x(3)));
  });
  const MonopoleConfig cfg{make_connection(smooth_potential(g), m), random_spinor_field(g, 5)};
  const auto full = PerturbationSpec::full(0.05, omega_hat);
  const auto a = psw_residual(cfg, m, full, K);
  const auto b = general_psw_residual(cfg, m, general_from_full(full, K), K);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    ASSERT_EQ(a.r2[i], b.r2[i]) << i;
    ASSERT_EQ(a.r1[i], b.r1[i]) << i;
  }
  EXPECT_GT(a.r2_linf, 0.0);
}

TEST(Admissibility, RescaledCutoffPasses) {
  const auto g = GridSpec::cube(4);
  const auto K = constant_k(g, 0.0);
  const double C = 3.0;
  const auto p = PerturbationSpec::general([C](std::size_t, double t) { return C * smooth_cutoff(t); }, 2.0 * C, 1.0,
                                           C / 2.0);
  const auto r = check_admissibility(p, K);
  EXPECT_TRUE(r.admissible);
  EXPECT_EQ(r.violation_count, 0u);
}

TEST(Admissibility, ZeroFunctionFailsWhereKMinusIsPositive) {
  const auto g = GridSpec::cube(4);
  const auto m = flat_metric(g);
  const auto Kf = generate(g, [](const Vec4& x) { return std::sin(x(0)); });
  const KField K{Kf, map(Kf, positive_part), map(Kf, negative_part)};
  const auto p = PerturbationSpec::general([](std::size_t, double) { return 0.0; }, 1.0, 1.0, 0.1);
  const auto r = check_admissibility(p, K);
  EXPECT_FALSE(r.admissible);
  EXPECT_FALSE(r.violations.empty());
  const MonopoleConfig cfg{trivial_connection(m), SpinorField(g, Spinor::Zero())};
  try {
    general_psw_residual(cfg, m, p, K);
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(Admissibility, EtaAboveKPlusIsAViolation) {
  const auto g = GridSpec::cube(4);
  const auto K = constant_k(g, 0.5);
  const auto p = PerturbationSpec::general([](std::size_t, double t) { return smooth_cutoff(t); }, 2.0, 1.0, 0.5,
                                           SelfDualField(g, Vec3(0.6, 0, 0)));
  const auto r = check_admissibility(p, K);
  EXPECT_FALSE(r.admissible);
  EXPECT_EQ(r.violation_count, g.node_count());
}

TEST(Admissibility, FullReductionIsAdmissible) {
  const auto g = GridSpec::cube(4);
  const auto Kf = generate(g, [](const Vec4& x) { return std::sin(x(0)) + 0.3; });
  const KField K{Kf, map(Kf, positive_part), map(Kf, negative_part)};
  const auto p = general_from_full(PerturbationSpec::full(0.1, SelfDualField(g, Vec3(0, 1, 0))), K);
  EXPECT_TRUE(check_admissibility(p, K).admissible);
}

// ---------------------------------------------------------------------------

TEST(InverseSigma, RoundTrip) {
  auto gen = oracle::rng(3);
  std::normal_distribution<double> n;
  for (int t = 0; t < 2000; ++t) {
    const Vec3 s(n(gen), n(gen), t % 7 == 0 ? -std::abs(n(gen)) * 10 : n(gen));
    EXPECT_LE((sigma_of(spinor_with_sigma(s)) - s).norm(), 1e-13 * (1.0 + s.norm()));
  }
  EXPECT_EQ(spinor_with_sigma(Vec3::Zero()).norm(), 0.0);
}

TEST(Manufactured, FromConnectionSolvesTheCurvatureEquation) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  const auto s = manufacture_from_connection(m, smooth_potential(g), 0.1);
  const auto r = psw_residual(s.cfg, m, s.pert, s.K);
  EXPECT_LE(r.r2_linf, 1e-14 * r.r2_scale + 1e-15);
  EXPECT_LE(relative_curvature_residual(r), 1e-13);
  EXPECT_GT(lp_norm(s.cfg.A.curv_plus, Norm::Linf, m.vol()), 0.1);
}

TEST(Manufactured, GaugeTrivialIsANearSolution) {
  auto rel = [](int n) {
    const auto g = GridSpec::cube(n);
    const auto m = flat_metric(g);
    const auto chi = generate(g, [](const Vec4& x) { return 0.01 * std::sin(x(0)) + 0.005 * std::cos(x(2) + x(3)); });
    const auto s = manufacture_gauge_trivial(m, chi, Spinor(1.0, Complex(0.0, 0.5)), 0.1, 0.5);
    const auto r = psw_residual(s.cfg, m, s.pert, s.K);
    EXPECT_LE(r.r2_linf, 1e-15);
    return relative_dirac_residual(r);
  };
  // The defect is quadratic in chi: the linear part cancels because a is the discrete gradient.
  const double r8 = rel(8), r16 = rel(16);
  EXPECT_LE(r16, 1e-5);
  EXPECT_GE(r8 / r16, 32.0);
}

// ---------------------------------------------------------------------------

TEST(CurvatureBound, ReducibleSolutionMargin) {
  const auto g = GridSpec::cube(4);
  const auto m = flat_metric(g);
  const MonopoleConfig cfg{trivial_connection(m), SpinorField(g, Spinor::Zero())};
  const double eps = 0.3;
  const auto b = check_curvature_bound(cfg, m, PerturbationSpec::full(eps), constant_k(g, 0.0));
  EXPECT_TRUE(b.applicable);
  EXPECT_NEAR(b.margin, eps / std::sqrt(8.0), 1e-15);
}

TEST(CurvatureBound, ManufacturedSolutionSaturatesUpToEpsilon) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  const double eps = 0.1;
  const auto s = manufacture_from_connection(m, smooth_potential(g), eps);
  const auto b = check_curvature_bound(s.cfg, m, s.pert, s.K);
  EXPECT_TRUE(b.applicable);
  EXPECT_GE(b.margin, -1e-6);
  EXPECT_NEAR(b.margin, eps / std::sqrt(8.0), 1e-12);
}

TEST(CurvatureBound, ViolationIsReportedWhenTheGateIsDisabled) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  auto s = manufacture_from_connection(m, smooth_potential(g), 0.1);
  s.cfg.A.curv_plus = 10.0 * s.cfg.A.curv_plus;
  const auto gated = check_curvature_bound(s.cfg, m, s.pert, s.K);
  EXPECT_FALSE(gated.applicable);
  const auto b = check_curvature_bound(s.cfg, m, s.pert, s.K, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(b.applicable);
  EXPECT_LT(b.margin, 0.0);
}

TEST(PhiL4Bound, ReducibleSolution) {
  const auto g = GridSpec::cube(4);
  const auto m = flat_metric(g);
  const MonopoleConfig cfg{trivial_connection(m), SpinorField(g, Spinor::Zero())};
  const double eps = 0.2;
  const auto K = constant_k(g, -0.4);
  const auto b = check_phi_l4_bound(cfg, m, PerturbationSpec::full(eps), K);
  EXPECT_TRUE(b.applicable);
  EXPECT_DOUBLE_EQ(b.rhs, 8.0 * (1.0 + 0.4 / eps) * volume(m.vol()));
  EXPECT_DOUBLE_EQ(b.margin, b.rhs);
}

TEST(PhiL4Bound, GaugeTrivialNearSolution) {
  const auto g = GridSpec::cube(16);
  const auto m = flat_metric(g);
  const auto chi = generate(g, [](const Vec4& x) { return 0.01 * std::sin(x(0)) + 0.005 * std::cos(x(2) + x(3)); });
  const auto s = manufacture_gauge_trivial(m, chi, Spinor(1.2, Complex(0.0, 0.5)), 0.1, 0.5);
  const auto b = check_phi_l4_bound(s.cfg, m, s.pert, s.K, 1e-5);
  EXPECT_TRUE(b.applicable);
  EXPECT_GE(b.margin, -1e-6 * volume(m.vol()));
}

TEST(PhiL4Bound, SaturatedAtUnitSigma) {
  const auto g = GridSpec::cube(6);
  const auto m = flat_metric(g);
  const double eps = 0.1;
  // |Phi|^4 = 8 makes |sigma| = 1; K = eps is the smallest admissible constant.
  const Spinor phi0(std::pow(8.0, 0.25), 0.0);
  const auto s = manufacture_gauge_trivial(m, ScalarField(g, 0.0), phi0, eps, eps);
  const auto b = check_phi_l4_bound(s.cfg, m, s.pert, s.K);
  EXPECT_TRUE(b.applicable);
  EXPECT_NEAR(b.margin, 0.0, 1e-12 * b.rhs);
}

TEST(CurvatureEnergyChain, HoldsOnManufacturedSolutions) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  for (double headroom : {1.0, 1.5, 4.0}) {
    const auto s = manufacture_from_connection(m, smooth_potential(g), 0.05, headroom);
    const auto c = curvature_energy_chain(s.cfg, m, s.pert, s.K);
    EXPECT_GE(c.margin, 0.0) << headroom;
    EXPECT_GT(c.lhs, 0.0);
  }
}

// ---------------------------------------------------------------------------

TEST(KeyInequality, RandomConfigurationsOnFlatCharts) {
  const auto g = GridSpec::cube(12);
  const auto m = flat_metric(g);
  const auto cb = flat_bundle(g);
  for (unsigned k = 0; k < 4; ++k) {
    const MonopoleConfig cfg{make_connection(random_potential(g, 100 + k), m), random_spinor_field(g, 200 + k)};
    for (int mode = 0; mode < 2; ++mode) {
      const auto th = mode == 0 ? constant_theta(0.7 * k, m)
                                : theta_from_angle(generate(g, [k](const Vec4& x) { return x(k % 4); }), m);
      const auto r = key_inequality(cfg, th, m, cb);
      EXPECT_LE(r.lhs, r.rhs + 1e-3 * r.scale) << k << "," << mode;
      EXPECT_GT(r.scale, 0.0);
    }
  }
}

TEST(KeyInequality, NearlySharpForRealMultiplesAtConstantCosineOne) {
  auto rel_gap = [](int n) {
    const auto g = GridSpec::cube(n);
    const auto m = flat_metric(g);
    const Spinor v(Complex(0.6, 0.0), Complex(0.0, 0.8));
    const auto phi = generate(g, [&](const Vec4& x) -> Spinor { return (2.0 + std::sin(x(0) + x(1))) * v; });
    const auto r = key_inequality({trivial_connection(m), phi}, constant_theta(0.0, m), m, flat_bundle(g));
    return std::abs(r.margin) / r.scale;
  };
  const double g8 = rel_gap(8), g16 = rel_gap(16);
  EXPECT_LE(g16, 1e-3);
  EXPECT_GE(g8 / g16, 16.0);
}

TEST(KeyInequality, CouplingCancelsAgainstTheDiracCurvatureTerm) {
  // With the iF+ = -2 (da)+ convention the two F+ contributions cancel, so the margin does not
  // depend on the field strength at constant theta.
  const auto g = GridSpec::cube(12);
  const auto m = flat_metric(g);
  const auto phi = random_spinor_field(g, 9);
  const auto th = constant_theta(0.0, m);
  const auto r0 = key_inequality({trivial_connection(m), phi}, th, m, flat_bundle(g));
  const auto a = 1e-3 * random_potential(g, 10);
  const auto r1 = key_inequality({make_connection(a, m), phi}, th, m, flat_bundle(g));
  EXPECT_GT(std::abs(r1.coupling), 1e-6);
  EXPECT_LE(std::abs(r1.margin - r0.margin), 1e-3 * std::abs(r1.coupling) + 1e-6 * r0.scale);
}

TEST(KeyInequality, ReformulatedWithComputedLambda) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  const auto th = theta_from_angle(generate(g, [](const Vec4& x) { return x(0); }), m);
  LambdaOptions o;
  o.random_starts = 2;
  const auto lam = minimize_lambda(th, m, o);
  const auto K = assemble_K(th, flat_bundle(g), lam.lambda);
  for (unsigned k = 0; k < 3; ++k) {
    const MonopoleConfig cfg{make_connection(random_potential(g, 300 + k), m), random_spinor_field(g, 400 + k)};
    const auto r = key_inequality_reformulated(cfg, K, m);
    EXPECT_LE(r.lhs, r.rhs + 1e-3 * r.scale) << k;
  }
}

// ---------------------------------------------------------------------------

TEST(ChernPairing, ZeroRepresentative) {
  const auto m = flat_metric(GridSpec::cube(4));
  EXPECT_EQ(chern_pairing(TwoFormField(m.grid(), Vec6::Zero()), SelfDualField(m.grid(), Vec3(1, 0, 0)), m), 0.0);
}

TEST(ChernPairing, IntegerFluxThroughACoordinateTorus) {
  const GridSpec g({6, 6, 6, 6}, {2 * kPi, 3.0, 4.0, 5.0});
  const auto m = flat_metric(g);
  const SelfDualField eta1(g, Vec3(1, 0, 0));
  for (int n = 1; n <= 3; ++n) {
    Vec6 f = Vec6::Zero();
    f(0) = 2 * kPi * n / (g.period(0) * g.period(1));
    const double p = chern_pairing(TwoFormField(g, f), eta1, m);
    EXPECT_NEAR(p, n * g.period(2) * g.period(3) / std::sqrt(2.0), 1e-12 * n * 20);
  }
}

TEST(ChernPairing, ExactShiftDoesNotChangeThePairing) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  Vec6 f0 = Vec6::Zero();
  f0(5) = 2 * kPi / (g.period(2) * g.period(3));
  const TwoFormField f(g, f0);
  const auto alpha = generate(g, [](const Vec4& x) {
    return Vec4(std::sin(x(1) + x(2)), 0.5 * std::cos(x(3)), std::sin(x(0)) * std::cos(x(1)), 0.2 * std::sin(x(2)));
  });
  const SelfDualField omega(g, Vec3(0.3, -1.0, 0.5));
  const double p0 = chern_pairing(f, omega, m);
  const double p1 = chern_pairing(f + exterior_derivative<1>(alpha), omega, m);
  EXPECT_NEAR(p0, p1, 1e-10);
}

TEST(ChernPairing, RejectsNonClosedRepresentative) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  const auto f = generate(g, [](const Vec4& x) -> Vec6 {
    Vec6 v = Vec6::Zero();
    v(0) = std::sin(x(2));
    return v;
  });
  EXPECT_THROW(chern_pairing(f, SelfDualField(g, Vec3(1, 0, 0)), m), InvalidArgument);
}

TEST(C1PlusSquared, FluxProjectedOnTheHarmonicBasis) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  const auto hb = harmonic_selfdual_basis(m);
  ASSERT_EQ(hb.forms.size(), 3u);
  Vec6 f = Vec6::Zero();
  f(0) = 2 * kPi * 2 / (g.period(0) * g.period(1));
  // Self-dual part of c dx01 is (c/sqrt2) eta_1, so (c1+)^2 = (c/2pi)^2 Vol / 2.
  const double c = f(0) / (2 * kPi);
  const double expected = c * c * volume(m.vol()) / 2.0;
  EXPECT_NEAR(c1plus_squared(TwoFormField(g, f), hb.forms, m), expected, 1e-8 * expected);
}

// ---------------------------------------------------------------------------

TEST(LebrunLinear, FlatTorusEqualityCase) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  const SelfDualField omega(g, Vec3(1, 0, 0));
  for (double delta : {0.0, 0.5, 1.0}) {
    const auto r = lebrun_linear(omega, m, lebrun_delta_K(flat_bundle(g), delta), 0.0);
    EXPECT_LE(std::abs(r.lhs), 1e-8);
    EXPECT_LE(std::abs(r.rhs), 1e-8);
  }
}

TEST(LebrunLinear, RejectsNonHarmonicForm) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  const auto omega = generate(g, [](const Vec4& x) { return Vec3(std::sin(x(0)), 0, 1); });
  EXPECT_THROW(lebrun_linear(omega, m, ScalarField(g, 0.0), 0.0), InvalidArgument);
  LebrunOptions o;
  o.allow_non_harmonic = true;
  EXPECT_NO_THROW(lebrun_linear(omega, m, ScalarField(g, 0.0), 0.0, o));
}

TEST(LebrunLinear, ConformalKaehlerProductMeanCurvatureVanishes) {
  const auto g = GridSpec::cube(16);
  const auto m = kaehler(g, 0.1);
  const auto cb = curvature_stack(m);
  // The Kaehler form dx01 + e^{2u} dx23 is sqrt2 eta_1 in the orthonormal frame.
  const SelfDualField omega(g, Vec3(std::sqrt(2.0), 0, 0));
  const auto r = lebrun_linear(omega, m, lebrun_delta_K(cb, 0.0), 0.0);
  const double scale = integrate(map(cb.R, [](double x) { return std::abs(x); }), m.vol());
  EXPECT_GT(scale, 1.0);
  EXPECT_LE(std::abs(r.lhs), 1e-4 * scale);
  EXPECT_TRUE(r.mixed_sign);
}

TEST(LebrunLinear, MarginScalesWithOmega) {
  const GridSpec g = GridSpec::cube(6);
  const auto m = flat_metric(g);
  const SelfDualField omega(g, Vec3(0.2, 1.0, -0.4));
  const auto K = generate(g, [](const Vec4& x) { return std::sin(x(0)) - 0.3; });
  Vec6 f = Vec6::Zero();
  f(1) = 2 * kPi / (g.period(0) * g.period(2));
  const TwoFormField rep(g, f);
  const auto r1 = lebrun_linear(omega, m, K, chern_pairing(rep, omega, m));
  for (double t : {0.5, 3.0}) {
    const auto w = t * omega;
    const auto rt = lebrun_linear(w, m, K, chern_pairing(rep, w, m));
    EXPECT_NEAR(rt.margin, t * r1.margin, 1e-12 * std::abs(t * r1.margin) + 1e-12);
    EXPECT_EQ(rt.margin > 0, r1.margin > 0);
  }
}

TEST(LebrunQuadratic, FlatEqualityAndPositiveMarginWithoutFlux) {
  const auto g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  const auto flat = lebrun_quadratic(assemble_K(constant_theta(0.0, m), flat_bundle(g), 0.0), m, 0.0);
  EXPECT_EQ(flat.lhs, 0.0);
  EXPECT_EQ(flat.rhs, 0.0);
  const auto mc = conformal_metric(generate(g, [](const Vec4& x) { return 0.1 * std::cos(x(1)); }));
  const auto cb = curvature_stack(mc);
  const auto r = lebrun_quadratic(assemble_K(constant_theta(0.0, mc), cb, 0.0), mc, 0.0);
  EXPECT_GT(r.margin, 0.0);
  EXPECT_DOUBLE_EQ(r.margin, r.rhs);
}

// ---------------------------------------------------------------------------

TEST(Catalog, TorusTimesGenusTwoClosedForm) {
  const auto e = catalog_torus_times_surface(2, 4 * kPi * kPi);
  const double vol = 4 * kPi * kPi * 4 * kPi;
  EXPECT_NEAR(e.volume(), vol, 1e-12 * vol);
  EXPECT_DOUBLE_EQ(e.R(), -2.0);
  EXPECT_DOUBLE_EQ(e.w(), -1.0 / 3.0);
  for (double delta : {0.0, 0.3, 1.0}) {
    const auto r = catalog_linear(e, delta);
    EXPECT_NEAR(r.lhs, -2.0 * vol, 1e-8 * vol);
    EXPECT_NEAR(r.rhs, -2.0 * vol, 1e-8 * vol);
    EXPECT_GE(r.margin, -1e-8 * vol);
  }
  const auto q = catalog_quadratic(e, 0.0);
  EXPECT_NEAR(q.lhs, 64 * std::pow(kPi, 3), 1e-8 * q.lhs);
  EXPECT_NEAR(q.rhs, 4.0 * vol, 1e-8 * q.rhs);
}

TEST(Catalog, SurfaceProductClosedForm) {
  const auto e = catalog_surface_product(2, 3);
  const double vol = 4 * kPi * 8 * kPi;
  EXPECT_DOUBLE_EQ(e.R(), -4.0);
  EXPECT_DOUBLE_EQ(e.w(), -2.0 / 3.0);
  const auto r = catalog_linear(e, 0.5);
  EXPECT_NEAR(r.lhs, -4.0 * vol, 1e-8 * vol);
  EXPECT_NEAR(r.rhs, -4.0 * vol, 1e-8 * vol);
  EXPECT_THROW(catalog_surface_product(1, 3), InvalidArgument);
}

TEST(Catalog, GridEvaluationMatchesTheClosedForm) {
  const auto e = catalog_torus_times_surface(3, 10.0);
  // A flat grid chart of the same volume carrying the constant K and the Kaehler form.
  const double side = std::pow(e.volume(), 0.25);
  const GridSpec g({4, 4, 4, 4}, {side, side, side, side});
  const auto m = flat_metric(g);
  const double delta = 0.4;
  const ScalarField K(g, (1.0 - delta / 3.0) * e.R() + 2.0 * delta * e.w());
  const auto grid = lebrun_linear(SelfDualField(g, Vec3(std::sqrt(2.0), 0, 0)), m, K, e.c1_pairing());
  const auto closed = catalog_linear(e, delta);
  EXPECT_NEAR(grid.lhs, closed.lhs, 1e-8 * std::abs(closed.lhs));
  EXPECT_NEAR(grid.margin, closed.margin, 1e-8 * std::abs(closed.lhs));
}

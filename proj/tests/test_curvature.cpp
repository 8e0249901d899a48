#include "swlab/curvature.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace swlab;

namespace {

MetricField kaehler_product(const GridSpec& g, double amp) {
  return build_metric(generate(g, [&](const Vec4& x) -> Mat4 {
    const double e2u = std::exp(2.0 * amp * std::cos(x(2)));
    return Vec4(1.0, 1.0, e2u, e2u).asDiagonal();
  }));
}

Mat6 random_algebraic_curvature(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat6 r;
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) r(i, j) = r(j, i) = u(gen);
  const double b = r(0, 5) - r(1, 4) + r(2, 3);
  r(0, 5) -= b / 3;  r(5, 0) = r(0, 5);
  r(1, 4) += b / 3;  r(4, 1) = r(1, 4);
  r(2, 3) -= b / 3;  r(3, 2) = r(2, 3);
  return r;
}

Mat4 random_rotation(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Mat4 a;
  for (int i = 0; i < 16; ++i) a.data()[i] = n(gen);
  Eigen::HouseholderQR<Mat4> qr(a);
  Mat4 q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

}  // namespace

TEST(LowestEigenvalue, BasicCases) {
  EXPECT_EQ(lowest_eigenvalue(Mat3::Zero()), 0.0);
  EXPECT_NEAR(lowest_eigenvalue(Vec3(2, -1, -1).asDiagonal()), -1.0, 1e-15);
  Mat3 bad = Mat3::Identity();
  bad(0, 1) = 1e-3;
  EXPECT_THROW(lowest_eigenvalue(bad), InvalidArgument);
}

TEST(LowestEigenvalue, MatchesBisectionOracle) {
  auto gen = oracle::rng(42);
  for (int t = 0; t < 500; ++t) {
    const Mat3 m = oracle::random_symmetric(gen);
    EXPECT_NEAR(lowest_eigenvalue(m), oracle::bisection_lowest_eigenvalue(m), 1e-10);
  }
}

TEST(LowestEigenvalue, DegenerateSpectrumIsAccurate) {
  // Kaehler-type spectrum {R/6, -R/12, -R/12} in a rotated basis.
  auto gen = oracle::rng(3);
  for (double r : {-2.0, 1.0, 5.0}) {
    const Mat4 q4 = random_rotation(gen);
    const Mat3 q = q4.topLeftCorner<3, 3>().householderQr().householderQ();
    const Mat3 m = q * Vec3(r / 6, -r / 12, -r / 12).asDiagonal() * q.transpose();
    const Mat3 sym = 0.5 * (m + m.transpose());
    EXPECT_NEAR(lowest_eigenvalue(sym), std::min(r / 6, -r / 12), 1e-13 * std::abs(r));
  }
}

TEST(BuildMetric, FlatAndConformal) {
  const GridSpec g = GridSpec::cube(4);
  const MetricField flat = flat_metric(g);
  EXPECT_TRUE(flat.is_flat());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    EXPECT_EQ(flat.coframe()[i], Mat4::Identity());
    EXPECT_EQ(flat.vol()[i], 1.0);
  }
  const auto f = generate(g, [](const Vec4& x) { return 0.3 * std::sin(x(0) + x(3)); });
  const MetricField conf = conformal_metric(f);
  EXPECT_FALSE(conf.is_flat());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    EXPECT_LE((conf.coframe()[i] - std::exp(f[i]) * Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(conf.vol()[i], std::exp(4 * f[i]), 1e-13);
    EXPECT_LE((conf.g()[i] * conf.g_inv()[i] - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BuildMetric, RejectsIndefiniteNode) {
  const GridSpec g = GridSpec::cube(4);
  SymmetricTensorField samples(g, Mat4::Identity());
  samples[21](2, 2) = -0.5;
  try {
    build_metric(samples);
    FAIL() << "expected an error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("node 21"), std::string::npos);
  }
}

TEST(Curvature, FlatIsZero) {
  const auto cb = curvature_stack(flat_metric(GridSpec::cube(6)));
  for (std::size_t i = 0; i < cb.R.size(); ++i) {
    EXPECT_LE(std::abs(cb.R[i]), 1e-10);
    EXPECT_LE(cb.Wplus[i].cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(std::abs(cb.w[i]), 1e-10);
  }
}

TEST(Curvature, ConformalClosedForm) {
  const GridSpec g = GridSpec::cube(16);
  const double a = 0.1;
  const auto f = generate(g, [&](const Vec4& x) { return a * std::cos(x(1)); });
  const auto cb = curvature_stack(conformal_metric(f));
  double err_r = 0.0, err_w = 0.0, err_tr = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Vec4 x = g.position(i);
    const Vec4 grad(0.0, -a * std::sin(x(1)), 0.0, 0.0);
    const double r = oracle::conformal_scalar_curvature(f[i], grad, -a * std::cos(x(1)));
    err_r = std::max(err_r, std::abs(cb.R[i] - r));
    err_w = std::max(err_w, cb.Wplus[i].cwiseAbs().maxCoeff());
    err_tr = std::max(err_tr, std::abs(cb.Wplus[i].trace()));
  }
  EXPECT_LE(err_r, 1e-4);
  EXPECT_LE(err_w, 1e-4);
  EXPECT_LE(err_tr, 1e-12);
}

TEST(Curvature, KaehlerProductClosedForm) {
  const GridSpec g = GridSpec::cube(16);
  const double amp = 0.1;
  const auto cb = curvature_stack(kaehler_product(g, amp));
  double err_r = 0.0, err_eig = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Vec4 x = g.position(i);
    const double u = amp * std::cos(x(2));
    const double r = 2.0 * oracle::surface_gauss_curvature(u, -amp * std::cos(x(2)));
    err_r = std::max(err_r, std::abs(cb.R[i] - r));
    Eigen::SelfAdjointEigenSolver<Mat3> es(cb.Wplus[i]);
    Vec3 expect(r / 6, -r / 12, -r / 12);
    std::sort(expect.data(), expect.data() + 3);
    err_eig = std::max(err_eig, (es.eigenvalues() - expect).cwiseAbs().maxCoeff());
    EXPECT_LE(cb.w[i], 1e-12);
  }
  EXPECT_LE(err_r, 1e-4);
  EXPECT_LE(err_eig, 1e-4);
}

TEST(Curvature, KaehlerProductRefinement) {
  // Only x2 enters the metric, so refine that axis alone.
  const double amp = 0.2;
  double prev = 0.0;
  for (int n : {12, 24}) {
    const GridSpec g({4, 4, n, 4});
    const auto cb = curvature_stack(kaehler_product(g, amp));
    double err = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const double x2 = g.position(i)(2);
      const double r = 2.0 * oracle::surface_gauss_curvature(amp * std::cos(x2), -amp * std::cos(x2));
      err = std::max(err, std::abs(cb.R[i] - r));
    }
    if (prev > 0.0) {
      EXPECT_GE(prev / err, 16.0);
    }
    prev = err;
  }
  EXPECT_LE(prev, 2e-5);
}

TEST(Curvature, GaussBonnetProxyOnProduct) {
  double prev = 0.0;
  for (int n : {12, 24}) {
    const GridSpec g({4, 4, n, n});
    const MetricField m = kaehler_product(g, 0.3);
    const auto cb = curvature_stack(m);
    const double abs_r = integrate(map(cb.R, [](double r) { return std::abs(r); }), m.vol());
    const double rel = std::abs(integrate(cb.R, m.vol())) / abs_r;
    if (prev > 0.0) {
      EXPECT_GE(prev / rel, 16.0);
      EXPECT_LE(rel, 1e-5);
    }
    prev = rel;
  }
}

TEST(Curvature, FrameRotationConjugatesWplus) {
  const GridSpec g = GridSpec::cube(8);
  // A metric with W+ != 0: non-conformal perturbation.
  const MetricField m = build_metric(generate(g, [&](const Vec4& x) -> Mat4 {
    Mat4 h = Mat4::Identity();
    h(0, 1) = h(1, 0) = 0.1 * std::sin(x(2) + x(3));
    h(2, 2) += 0.2 * std::cos(x(0));
    return h;
  }));
  auto gen = oracle::rng(9);
  const Mat4 q = random_rotation(gen);
  const auto cb = curvature_stack(m);
  const auto cr = curvature_stack(m.with_frame_rotation(q));
  const auto h = forms::selfdual_basis();
  const Mat3 s = h.transpose() * forms::compound<2>(q) * h;
  EXPECT_LE((s * s.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  double wmax = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    EXPECT_NEAR(cr.R[i], cb.R[i], 1e-10);
    EXPECT_NEAR(cr.w[i], cb.w[i], 1e-10);
    EXPECT_LE((cr.Wplus[i] - s * cb.Wplus[i] * s.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    wmax = std::max(wmax, cb.Wplus[i].cwiseAbs().maxCoeff());
  }
  EXPECT_GT(wmax, 1e-3);
}

TEST(Curvature, WeylRouteMatchesRiemannSelfDualBlock) {
  auto gen = oracle::rng(17);
  const auto h = forms::selfdual_basis();
  for (int t = 0; t < 100; ++t) {
    const Mat6 r6 = random_algebraic_curvature(gen);
    double scal = 0.0;
    for (int p = 0; p < 6; ++p) scal += 2.0 * r6(p, p);
    const Mat3 route_a = selfdual_block(weyl_from_riemann(r6));
    const Mat3 route_b = h.transpose() * r6 * h - scal / 12.0 * Mat3::Identity();
    EXPECT_LE((route_a - route_b).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE(std::abs(route_a.trace()), 1e-13);
  }
}

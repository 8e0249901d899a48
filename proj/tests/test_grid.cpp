#include "swlab/forms.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace swlab;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ScalarField random_smooth(const GridSpec& g, unsigned seed) {
  auto gen = oracle::rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 8> c{};
  for (auto& x : c) x = u(gen);
  return generate(g, [&](const Vec4& x) {
    return c[0] * std::sin(x(0) + c[1]) + c[2] * std::cos(x(1) - x(2)) + c[3] * std::sin(2 * x(3)) +
           c[4] * std::cos(x(0) + x(3) + c[5]) + c[6] * std::sin(x(2)) * c[7];
  });
}

}  // namespace

TEST(GridSpec, RejectsBadDimsAndPeriods) {
  EXPECT_THROW(GridSpec({3, 4, 4, 4}), InvalidArgument);
  EXPECT_THROW(GridSpec({4, 4, 4, 4}, {1.0, 0.0, 1.0, 1.0}), InvalidArgument);
  EXPECT_NO_THROW(GridSpec({4, 5, 6, 7}, {1.0, 2.0, 3.0, 4.0}));
}

TEST(GridSpec, IndexRoundTrip) {
  const GridSpec g({4, 5, 6, 7}, {1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(g.node_count(), 4u * 5 * 6 * 7);
  for (std::size_t i = 0; i < g.node_count(); i += 13) EXPECT_EQ(g.index(g.coords(i)), i);
  EXPECT_EQ(g.index({-1, 0, 0, 0}), g.index({3, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(g.spacing(3), 4.0 / 7.0);
}

TEST(Field, RejectsWrongValueCount) {
  const GridSpec g = GridSpec::cube(4);
  EXPECT_THROW(ScalarField(g, std::vector<double>(10, 0.0)), InvalidArgument);
}

TEST(PartialDerivative, ConstantGivesZero) {
  const GridSpec g = GridSpec::cube(8);
  const auto d = partial_derivative(ScalarField(g, 1.0), 2);
  for (double v : d) EXPECT_EQ(v, 0.0);
}

TEST(PartialDerivative, SineOn32Nodes) {
  const GridSpec g({32, 4, 4, 4});
  const auto f = generate(g, [](const Vec4& x) { return std::sin(x(0)); });
  const auto exact = generate(g, [](const Vec4& x) { return std::cos(x(0)); });
  EXPECT_LE(max_abs_diff(partial_derivative(f, 0), exact), 1e-5);
}

TEST(PartialDerivative, EveryAxisAnisotropicPeriods) {
  const GridSpec g({16, 20, 24, 28}, {2.0, 3.0, 4.0, 5.0});
  for (int a = 0; a < 4; ++a) {
    const double k = 2 * kPi / g.period(a);
    const auto f = generate(g, [&](const Vec4& x) { return std::sin(k * x(a)); });
    const auto exact = generate(g, [&](const Vec4& x) { return k * std::cos(k * x(a)); });
    EXPECT_LE(max_abs_diff(partial_derivative(f, a), exact), 1e-4 * k) << "axis " << a;
  }
}

TEST(PartialDerivative, Linearity) {
  const GridSpec g = GridSpec::cube(8);
  const auto f = random_smooth(g, 1), h = random_smooth(g, 2);
  const auto lhs = partial_derivative(2.5 * f + (-0.75) * h, 1);
  const auto rhs = 2.5 * partial_derivative(f, 1) + (-0.75) * partial_derivative(h, 1);
  EXPECT_LE(max_abs_diff(lhs, rhs), 1e-13);
}

TEST(PartialDerivative, RejectsNonFinite) {
  ScalarField f(GridSpec::cube(4), 0.0);
  f[17] = std::nan("");
  EXPECT_THROW(partial_derivative(f, 0), NumericalError);
  EXPECT_THROW(partial_derivative(f, 4), InvalidArgument);
}

TEST(PartialDerivative, SummationByParts) {
  const GridSpec g({6, 7, 8, 9});
  const ScalarField vol = flat_volume(g);
  auto gen = oracle::rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(g.node_count()), b(g.node_count());
  for (auto& x : a) x = u(gen);
  for (auto& x : b) x = u(gen);
  const ScalarField fa(g, a), fb(g, b);
  for (int axis = 0; axis < 4; ++axis) {
    const double s = inner_product(partial_derivative(fa, axis), fb, vol) +
                     inner_product(fa, partial_derivative(fb, axis), vol);
    EXPECT_LE(std::abs(s), 1e-12) << "axis " << axis;
  }
}

TEST(PartialDerivative, RefinementOrder) {
  double prev = 0.0;
  for (int n : {8, 16}) {
    const GridSpec g({n, 4, 4, 4});
    const auto f = generate(g, [](const Vec4& x) { return std::sin(2 * x(0)); });
    const auto exact = generate(g, [](const Vec4& x) { return 2 * std::cos(2 * x(0)); });
    const double err = max_abs_diff(partial_derivative(f, 0), exact);
    if (n == 16) {
      EXPECT_GE(prev / err, std::pow(2.0, 3.5));
    }
    prev = err;
  }
}

TEST(SecondDerivative, MatchesAnalytic) {
  const GridSpec g({4, 24, 4, 4});
  const auto f = generate(g, [](const Vec4& x) { return std::cos(x(1)); });
  const auto exact = generate(g, [](const Vec4& x) { return -std::cos(x(1)); });
  EXPECT_LE(max_abs_diff(second_derivative(f, 1), exact), 1e-6);
}

TEST(Integrate, TorusVolumeAndSineSquared) {
  const GridSpec g = GridSpec::cube(8);
  const ScalarField vol = flat_volume(g);
  const double v = std::pow(2 * kPi, 4);
  EXPECT_NEAR(integrate(ScalarField(g, 1.0), vol), v, 1e-12 * v);
  const auto s2 = generate(g, [](const Vec4& x) { return std::sin(x(0)) * std::sin(x(0)); });
  EXPECT_NEAR(integrate(s2, vol), v / 2, 1e-10 * v);
  EXPECT_EQ(integrate(ScalarField(g, 0.0), vol), 0.0);
}

TEST(Integrate, RejectsNonPositiveVolume) {
  const GridSpec g = GridSpec::cube(4);
  ScalarField vol(g, 1.0);
  vol[3] = 0.0;
  EXPECT_THROW(integrate(ScalarField(g, 1.0), vol), InvalidArgument);
  EXPECT_THROW(lp_norm(ScalarField(g, 1.0), Norm::L2, vol), InvalidArgument);
}

TEST(LpNorm, Consistency) {
  const GridSpec g = GridSpec::cube(6);
  const ScalarField vol = flat_volume(g);
  EXPECT_DOUBLE_EQ(lp_norm(ScalarField(g, -3.0), Norm::Linf, vol), 3.0);
  const auto f = random_smooth(g, 3);
  const double l2 = lp_norm(f, Norm::L2, vol);
  EXPECT_NEAR(l2 * l2, integrate(map(f, [](double x) { return x * x; }), vol), 1e-10 * l2 * l2);
  const double l4 = lp_norm(f, Norm::L4, vol);
  EXPECT_NEAR(std::pow(l4, 4), integrate(map(f, [](double x) { return x * x * x * x; }), vol),
              1e-10 * std::pow(l4, 4));
  EXPECT_LE(l2, lp_norm(f, Norm::Linf, vol) * std::sqrt(volume(vol)));
}

TEST(Forms, DSquaredVanishes) {
  const GridSpec g = GridSpec::cube(8);
  const auto f = random_smooth(g, 11);
  const auto f1 = map(f, [](double x) { return forms::Comp<0>::Constant(x); });
  const auto ddf = exterior_derivative<1>(exterior_derivative<0>(f1));
  double m = 0.0;
  for (const auto& v : ddf) m = std::max(m, v.cwiseAbs().maxCoeff());
  EXPECT_LE(m, 1e-12);
}

TEST(Forms, StarSquaresToSign) {
  EXPECT_TRUE((forms::star_matrix<2>() * forms::star_matrix<2>()).isApprox(Mat6::Identity()));
  EXPECT_TRUE((forms::star_matrix<3>() * forms::star_matrix<1>()).isApprox(-Mat4::Identity()));
  const auto h = forms::selfdual_basis();
  EXPECT_TRUE((forms::star_matrix<2>() * h).isApprox(h));
  const auto k = forms::antiselfdual_basis();
  EXPECT_TRUE((forms::star_matrix<2>() * k).isApprox(-k));
  EXPECT_TRUE((h.transpose() * h).isApprox(Mat3::Identity()));
  EXPECT_NEAR((h.transpose() * k).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Forms, CompoundIsMultiplicative) {
  auto gen = oracle::rng(5);
  const Mat4 a = Mat4::Random(), b = Mat4::Random();
  (void)gen;
  EXPECT_TRUE(forms::compound<2>(a * b).isApprox(forms::compound<2>(a) * forms::compound<2>(b)));
  EXPECT_TRUE(forms::compound<3>(a * b).isApprox(forms::compound<3>(a) * forms::compound<3>(b)));
  EXPECT_TRUE(forms::compound<2>(a.transpose()).isApprox(forms::compound<2>(a).transpose()));
}

TEST(Forms, WedgeOfSelfDualIsInnerProduct) {
  const auto h = forms::selfdual_basis();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      EXPECT_NEAR(forms::wedge22(h.col(a), h.col(b)), a == b ? 1.0 : 0.0, 1e-15);
}

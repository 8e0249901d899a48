#pragma once

// Self-dual 2-forms on a sampled metric: embedding and projection, the
// metric Hodge star, d + d*, the Levi-Civita derivative on Lambda^+,
// both Laplacians, and checks of the Weitzenboeck identities.
//
// A SelfDualField holds coefficients in the basis eta_1..eta_3 built from
// the metric's orthonormal coframe; coordinate forms use the layouts of forms.hpp.

#include "swlab/curvature.hpp"
#include "swlab/theta.hpp"

namespace swlab {

/// (nabla sigma) in the frame: row a is the derivative along E_a, column A the eta_A coefficient.
using NablaSelfDual = Eigen::Matrix<double, 4, 3>;
using NablaSelfDualField = Field<NablaSelfDual>;

namespace sd_detail {

inline Mat4 antisym(const Vec6& v) {
  Mat4 m = Mat4::Zero();
  for (int p = 0; p < 6; ++p) {
    const auto P = forms::subset<2>(p);
    m(P[0], P[1]) = v(p);
    m(P[1], P[0]) = -v(p);
  }
  return m;
}

inline Vec6 upper(const Mat4& m) {
  Vec6 v;
  for (int p = 0; p < 6; ++p) {
    const auto P = forms::subset<2>(p);
    v(p) = m(P[0], P[1]);
  }
  return v;
}

/// (G_mu)_{kappa nu} = Gamma^kappa_{mu nu}.
inline Mat4 gamma_matrix(const ChristoffelSymbols& gam, int mu) {
  Mat4 g;
  for (int k = 0; k < 4; ++k) g.row(k) = gam[k].row(mu);
  return g;
}

/// Connection term of nabla_mu on a coordinate 2-form: Gamma^k_{mu nu} F_{k lam} + Gamma^k_{mu lam} F_{nu k}.
inline Vec6 gamma_action(const ChristoffelSymbols& gam, int mu, const Vec6& f) {
  const Mat4 g = gamma_matrix(gam, mu);
  const Mat4 fm = antisym(f);
  return upper(g.transpose() * fm + fm * g);
}

/// Transpose of gamma_action with respect to the component dot product.
inline Vec6 gamma_action_transpose(const ChristoffelSymbols& gam, int mu, const Vec6& r) {
  const Mat4 g = gamma_matrix(gam, mu);
  Mat4 rm = Mat4::Zero();
  for (int p = 0; p < 6; ++p) {
    const auto P = forms::subset<2>(p);
    rm(P[0], P[1]) = r(p);
  }
  const Mat4 y = g * rm + rm * g.transpose();
  return upper(y - y.transpose());
}

}  // namespace sd_detail

// ---------------------------------------------------------------------------
// Pointwise algebra

template <int K>
forms::Comp<K> to_frame(const forms::Comp<K>& a, const Mat4& frame) {
  return forms::compound<K>(frame.transpose()) * a;
}

template <int K>
forms::Comp<K> to_coordinates(const forms::Comp<K>& a, const Mat4& coframe) {
  return forms::compound<K>(coframe.transpose()) * a;
}

template <int K>
double form_norm2(const forms::Comp<K>& a, const Mat4& frame) {
  return to_frame<K>(a, frame).squaredNorm();
}

template <int K>
ScalarField pointwise_norm2(const Field<forms::Comp<K>>& a, const MetricField& m) {
  require_same_grid(a.grid(), m.grid(), "pointwise_norm2");
  return generate_indexed(a.grid(), [&](std::size_t i) { return form_norm2<K>(a[i], m.frame()[i]); });
}

inline ScalarField pointwise_norm2(const SelfDualField& s) {
  return map(s, [](const Vec3& v) { return v.squaredNorm(); });
}

/// Metric Hodge star on coordinate components.
template <int K>
Field<forms::Comp<4 - K>> hodge_star(const Field<forms::Comp<K>>& a, const MetricField& m) {
  require_same_grid(a.grid(), m.grid(), "hodge_star");
  const auto s = forms::star_matrix<K>();
  return generate_indexed(a.grid(), [&](std::size_t i) -> forms::Comp<4 - K> {
    return to_coordinates<4 - K>(s * to_frame<K>(a[i], m.frame()[i]), m.coframe()[i]);
  });
}

/// d* = - * d * on K-forms (any degree in dimension four).
template <int K>
Field<forms::Comp<K - 1>> codifferential(const Field<forms::Comp<K>>& a, const MetricField& m) {
  static_assert(K >= 1 && K <= 4);
  const auto sd = hodge_star<5 - K>(exterior_derivative<4 - K>(hodge_star<K>(a, m)), m);
  return map(sd, [](const forms::Comp<K - 1>& v) -> forms::Comp<K - 1> { return -v; });
}

// ---------------------------------------------------------------------------
// Lambda^+ <-> coordinate 2-forms

inline TwoFormField embed(const SelfDualField& s, const MetricField& m) {
  require_same_grid(s.grid(), m.grid(), "embed");
  const auto h = forms::selfdual_basis();
  return generate_indexed(s.grid(), [&](std::size_t i) -> Vec6 {
    return to_coordinates<2>(h * s[i], m.coframe()[i]);
  });
}

/// P+ = (1 + *)/2 with the metric star, on coordinate components.
inline TwoFormField selfdual_part(const TwoFormField& f, const MetricField& m) {
  return 0.5 * (f + hodge_star<2>(f, m));
}

inline TwoFormField antiselfdual_part(const TwoFormField& f, const MetricField& m) {
  return 0.5 * (f - hodge_star<2>(f, m));
}

/// eta-coefficients of P+ f.
inline SelfDualField project(const TwoFormField& f, const MetricField& m) {
  require_same_grid(f.grid(), m.grid(), "project");
  const auto h = forms::selfdual_basis();
  const auto p = selfdual_part(f, m);
  return generate_indexed(f.grid(), [&](std::size_t i) -> Vec3 {
    return h.transpose() * to_frame<2>(p[i], m.frame()[i]);
  });
}

/// Coefficients of P- f in the anti-self-dual basis.
inline SelfDualField project_asd(const TwoFormField& f, const MetricField& m) {
  require_same_grid(f.grid(), m.grid(), "project_asd");
  const auto k = forms::antiselfdual_basis();
  const auto p = antiselfdual_part(f, m);
  return generate_indexed(f.grid(), [&](std::size_t i) -> Vec3 {
    return k.transpose() * to_frame<2>(p[i], m.frame()[i]);
  });
}

// ---------------------------------------------------------------------------
// First-order operators

struct DDStar {
  ThreeFormField d;      ///< d sigma, coordinate components
  OneFormField dstar;    ///< d* sigma, coordinate components
  ScalarField norm2;     ///< |d sigma|^2 + |d* sigma|^2
};

inline DDStar d_plus_dstar_form(const TwoFormField& f, const MetricField& m) {
  DDStar r;
  r.d = exterior_derivative<2>(f);
  r.dstar = codifferential<2>(f, m);
  r.norm2 = pointwise_norm2<3>(r.d, m) + pointwise_norm2<1>(r.dstar, m);
  return r;
}

inline DDStar d_plus_dstar(const SelfDualField& s, const MetricField& m) {
  return d_plus_dstar_form(embed(s, m), m);
}

namespace sd_detail {

/// nabla_mu F for a coordinate 2-form field, one Vec6 column per mu.
inline Field<Eigen::Matrix<double, 6, 4>> nabla_two_form(const TwoFormField& f,
                                                         const Field<ChristoffelSymbols>& gam) {
  std::array<TwoFormField, 4> df;
  for (int mu = 0; mu < 4; ++mu) df[mu] = partial_derivative(f, mu);
  return generate_indexed(f.grid(), [&](std::size_t i) {
    Eigen::Matrix<double, 6, 4> t;
    for (int mu = 0; mu < 4; ++mu) t.col(mu) = df[mu][i] - gamma_action(gam[i], mu, f[i]);
    return t;
  });
}

/// - g^{nu mu} nabla_nu nabla_mu F for a coordinate 2-form field.
inline TwoFormField rough_laplacian_two_form(const TwoFormField& f, const MetricField& m,
                                             const Field<ChristoffelSymbols>& gam) {
  using T = Eigen::Matrix<double, 6, 4>;
  const auto t = nabla_two_form(f, gam);
  std::array<Field<T>, 4> dt;
  for (int nu = 0; nu < 4; ++nu) dt[nu] = partial_derivative(t, nu);
  return generate_indexed(f.grid(), [&](std::size_t i) -> Vec6 {
    const Mat4& ginv = m.g_inv()[i];
    const ChristoffelSymbols& g = gam[i];
    Vec6 acc = Vec6::Zero();
    for (int nu = 0; nu < 4; ++nu) {
      for (int mu = 0; mu < 4; ++mu) {
        if (ginv(nu, mu) == 0.0) continue;
        Vec6 v = dt[nu][i].col(mu) - gamma_action(g, nu, t[i].col(mu));
        for (int rho = 0; rho < 4; ++rho) v -= g[rho](nu, mu) * t[i].col(rho);
        acc -= ginv(nu, mu) * v;
      }
    }
    return acc;
  });
}

}  // namespace sd_detail

/// Levi-Civita derivative of sigma, expressed in the frame and the eta basis.
inline NablaSelfDualField covariant_derivative(const SelfDualField& s, const MetricField& m) {
  const auto gam = christoffel(m);
  const auto t = sd_detail::nabla_two_form(embed(s, m), gam);
  const auto h = forms::selfdual_basis();
  return generate_indexed(s.grid(), [&](std::size_t i) -> NablaSelfDual {
    const Mat4& e = m.frame()[i];
    const Mat6 c2 = forms::compound<2>(e.transpose());
    const Eigen::Matrix<double, 3, 4> coord = h.transpose() * c2 * t[i];  // (A, mu)
    return e.transpose() * coord.transpose();
  });
}

inline ScalarField pointwise_norm2(const NablaSelfDualField& n) {
  return map(n, [](const NablaSelfDual& v) { return v.squaredNorm(); });
}

/// Frame components of the metric gradient of a scalar field.
inline OneFormField frame_gradient(const ScalarField& f, const MetricField& m) {
  std::array<ScalarField, 4> df;
  for (int a = 0; a < 4; ++a) df[a] = partial_derivative(f, a);
  return generate_indexed(f.grid(), [&](std::size_t i) -> Vec4 {
    return m.frame()[i].transpose() * Vec4(df[0][i], df[1][i], df[2][i], df[3][i]);
  });
}

// ---------------------------------------------------------------------------
// Second-order operators and the Weitzenboeck formula

/// (d + d*)^2 sigma = (d d* + d* d) sigma as a coordinate 2-form.
inline TwoFormField hodge_laplacian(const SelfDualField& s, const MetricField& m) {
  const auto f = embed(s, m);
  const auto dd = d_plus_dstar_form(f, m);
  return codifferential<3>(dd.d, m) + exterior_derivative<1>(dd.dstar);
}

/// nabla* nabla sigma in the eta basis.
inline SelfDualField connection_laplacian(const SelfDualField& s, const MetricField& m) {
  return project(sd_detail::rough_laplacian_two_form(embed(s, m), m, christoffel(m)), m);
}

/// Pointwise W+(sigma, .) as eta coefficients.
inline SelfDualField apply_wplus(const Field<Mat3>& wplus, const SelfDualField& s) {
  return zip(wplus, s, [](const Mat3& w, const Vec3& v) -> Vec3 { return w * v; });
}

/// || (d+d*)^2 sigma - (nabla*nabla sigma + R sigma / 3 - 2 W+(sigma)) ||_2 / ||sigma||_2.
/// The difference is taken between full 2-forms, so anti-self-dual leakage counts too.
inline double weitzenboeck_residual(const SelfDualField& s, const MetricField& m, const CurvatureBundle& cb) {
  require_same_grid(s.grid(), m.grid(), "weitzenboeck_residual");
  const double norm = lp_norm(s, Norm::L2, m.vol());
  if (norm == 0.0) throw InvalidArgument("weitzenboeck_residual: sigma is zero");
  const auto lhs = hodge_laplacian(s, m);
  const auto rough = sd_detail::rough_laplacian_two_form(embed(s, m), m, christoffel(m));
  const auto curv = embed(generate_indexed(s.grid(), [&](std::size_t i) -> Vec3 {
                            return cb.R[i] / 3.0 * s[i] - 2.0 * (cb.Wplus[i] * s[i]);
                          }),
                          m);
  const auto defect = lhs - rough - curv;
  const auto n2 = pointwise_norm2<2>(defect, m);
  return std::sqrt(integrate(n2, m.vol())) / norm;
}

// ---------------------------------------------------------------------------
// Integral identities

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / (|lhs| + |rhs| + 1)
  double relative = 0.0;
};

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< rhs - lhs
};

namespace sd_detail {

inline IdentityCheck make_identity(double lhs, double rhs) {
  return {lhs, rhs, std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1.0)};
}

struct ThetaSigmaTerms {
  ScalarField dtheta_sigma2;  ///< |d theta (x) sigma|^2
  ScalarField nabla2;         ///< |nabla sigma|^2
  ScalarField cross;          ///< (d theta (x) sigma, nabla sigma)
  ScalarField sigma2;         ///< |sigma|^2
};

inline ThetaSigmaTerms theta_sigma_terms(const SelfDualField& s, const ThetaField& th, const MetricField& m) {
  require_same_grid(s.grid(), th.s.grid(), "identity check");
  const auto nab = covariant_derivative(s, m);
  ThetaSigmaTerms t;
  t.sigma2 = pointwise_norm2(s);
  t.nabla2 = pointwise_norm2(nab);
  t.dtheta_sigma2 = zip(th.dtheta_norm2, t.sigma2, [](double a, double b) { return a * b; });
  t.cross = generate_indexed(s.grid(), [&](std::size_t i) {
    const Vec4 dt = m.frame()[i].transpose() * th.dtheta[i];
    return double((dt * s[i].transpose()).cwiseProduct(nab[i]).sum());
  });
  return t;
}

}  // namespace sd_detail

/// lhs = ||(d+d*)(s sigma)||^2; rhs = the expansion through nabla and curvature.
inline IdentityCheck integral_identity_check_s(const SelfDualField& sig, const ThetaField& th,
                                               const MetricField& m, const CurvatureBundle& cb) {
  const auto ssig = th.s * sig;
  const double lhs = integrate(d_plus_dstar(ssig, m).norm2, m.vol());
  const auto t = sd_detail::theta_sigma_terms(sig, th, m);
  const auto integrand = generate_indexed(sig.grid(), [&](std::size_t i) {
    const double s = th.s[i], c = th.c[i];
    return c * c * t.dtheta_sigma2[i] + s * s * t.nabla2[i] + 2.0 * c * s * t.cross[i] +
           s * s * cb.R[i] / 3.0 * t.sigma2[i] - 2.0 * s * s * sig[i].dot(cb.Wplus[i] * sig[i]);
  });
  return sd_detail::make_identity(lhs, integrate(integrand, m.vol()));
}

/// lhs = ||nabla(c sigma)||^2; rhs = its expansion.
inline IdentityCheck integral_identity_check_c(const SelfDualField& sig, const ThetaField& th,
                                               const MetricField& m) {
  const double lhs = integrate(pointwise_norm2(covariant_derivative(th.c * sig, m)), m.vol());
  const auto t = sd_detail::theta_sigma_terms(sig, th, m);
  const auto integrand = generate_indexed(sig.grid(), [&](std::size_t i) {
    const double s = th.s[i], c = th.c[i];
    return s * s * t.dtheta_sigma2[i] + c * c * t.nabla2[i] - 2.0 * c * s * t.cross[i];
  });
  return sd_detail::make_identity(lhs, integrate(integrand, m.vol()));
}

/// ||(d+d*)(s sigma)||^2 + ||nabla(c sigma)||^2 against the w-bounded right-hand side.
inline InequalityCheck inequality_check_s_and_c(const SelfDualField& sig, const ThetaField& th,
                                                const MetricField& m, const CurvatureBundle& cb) {
  const double lhs = integrate(d_plus_dstar(th.s * sig, m).norm2, m.vol()) +
                     integrate(pointwise_norm2(covariant_derivative(th.c * sig, m)), m.vol());
  const auto t = sd_detail::theta_sigma_terms(sig, th, m);
  const auto integrand = generate_indexed(sig.grid(), [&](std::size_t i) {
    const double s2 = th.s[i] * th.s[i];
    return th.dtheta_norm2[i] * t.sigma2[i] + s2 * cb.R[i] / 3.0 * t.sigma2[i] -
           2.0 * s2 * cb.w[i] * t.sigma2[i] + t.nabla2[i];
  });
  const double rhs = integrate(integrand, m.vol());
  return {lhs, rhs, rhs - lhs};
}

struct KatoReport {
  double margin = 0.0;        ///< min over kept nodes of |nabla sigma| - |nabla |sigma||
  std::size_t nodes_checked = 0;
};

/// Kato inequality |nabla |sigma|| <= |nabla sigma| at nodes with |sigma| >= floor.
inline KatoReport kato_check(const SelfDualField& s, const MetricField& m, double floor) {
  const auto nab = covariant_derivative(s, m);
  const auto abs_s = map(s, [](const Vec3& v) { return v.norm(); });
  const auto grad = frame_gradient(abs_s, m);
  KatoReport r;
  r.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (abs_s[i] < floor) continue;
    ++r.nodes_checked;
    r.margin = std::min(r.margin, nab[i].norm() - grad[i].norm());
  }
  if (r.nodes_checked == 0) throw InvalidArgument("kato_check: every node is below the floor");
  return r;
}

}  // namespace swlab

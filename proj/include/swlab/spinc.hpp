#pragma once

// Spin^c algebra on a trivialized chart: Clifford model, the sigma map,
// U(1) connections, the flat-chart Dirac operator and checks of its
// Weitzenboeck formula and of the log Kato inequality.
//
// Conventions:
//   gamma(dx^i) = [[0, -rho_i^*], [rho_i, 0]] on W+ (+) W-,
//   rho_0 = I, rho_k = i s_k (s_k the Pauli matrices),
//   rho(eta_A) = -sqrt2 i s_A on W+,
//   sigma(Phi)_A = Phi^* s_A Phi / (2 sqrt2), so rho(sigma(Phi)) = -i (Phi Phi^*)_0.
// The spinor connection is d + i a; its determinant line carries F_A = 2i da,
// so iF_A^+ = -2 (da)^+ as a real self-dual form.

#include "swlab/selfdual.hpp"

#include <array>

namespace swlab {

using SpinorField = Field<Spinor>;
using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
/// Column i is nabla_i Phi.
using SpinorGradient = Eigen::Matrix<Complex, 2, 4>;

struct CliffordModel {
  std::array<Mat2c, 4> rho;      ///< W+ -> W- blocks of gamma(dx^i)
  std::array<Mat4c, 4> gamma;    ///< full chiral gamma matrices
  std::array<Mat2c, 3> rho_eta;  ///< action of eta_A on W+
  std::array<Mat2c, 3> pauli;

  static const CliffordModel& standard() {
    static const CliffordModel model = [] {
      CliffordModel c;
      const Complex i(0.0, 1.0);
      c.pauli[0] << 0, 1, 1, 0;
      c.pauli[1] << 0, -i, i, 0;
      c.pauli[2] << 1, 0, 0, -1;
      c.rho[0] = Mat2c::Identity();
      for (int k = 0; k < 3; ++k) c.rho[k + 1] = i * c.pauli[k];
      for (int k = 0; k < 4; ++k) {
        c.gamma[k] = Mat4c::Zero();
        c.gamma[k].topRightCorner<2, 2>() = -c.rho[k].adjoint();
        c.gamma[k].bottomLeftCorner<2, 2>() = c.rho[k];
      }
      for (int a = 0; a < 3; ++a) c.rho_eta[a] = -kSqrt2 * i * c.pauli[a];
      return c;
    }();
    return model;
  }

  /// rho(omega) on W+ for a self-dual form with eta coefficients omega.
  Mat2c act(const Vec3& omega) const {
    return omega(0) * rho_eta[0] + omega(1) * rho_eta[1] + omega(2) * rho_eta[2];
  }
};

/// sigma(Phi) at one node; |sigma|^2 = |Phi|^4 / 8.
inline Vec3 sigma_of(const Spinor& phi) {
  const auto& c = CliffordModel::standard();
  Vec3 s;
  for (int a = 0; a < 3; ++a) s(a) = (phi.adjoint() * c.pauli[a] * phi)(0, 0).real() / (2.0 * kSqrt2);
  return s;
}

inline SelfDualField sigma_map(const SpinorField& phi) {
  return map(phi, [](const Spinor& p) { return sigma_of(p); });
}

struct U1Connection {
  OneFormField a;       ///< the connection is d + i a on the spinor bundle
  TwoFormField curv;    ///< da, coordinate components
  SelfDualField curv_plus;  ///< iF_A^+ = -2 (da)^+ in the eta basis
};

inline U1Connection make_connection(const OneFormField& a, const MetricField& m) {
  require_same_grid(a.grid(), m.grid(), "make_connection");
  U1Connection c;
  c.a = a;
  c.curv = exterior_derivative<1>(a);
  c.curv_plus = -2.0 * project(c.curv, m);
  return c;
}

inline U1Connection trivial_connection(const MetricField& m) {
  return make_connection(OneFormField(m.grid(), Vec4::Zero()), m);
}

namespace spinc_detail {

inline void require_flat(const MetricField& m, const char* what) {
  if (!m.is_flat()) {
    throw UnsupportedConfiguration(std::string(what) + ": the Dirac operator is implemented on flat charts only");
  }
}

}  // namespace spinc_detail

/// (nabla_A)_i Phi = d_i Phi + i a_i Phi on a flat chart.
inline Field<SpinorGradient> spinor_gradient(const SpinorField& phi, const U1Connection& A) {
  require_same_grid(phi.grid(), A.a.grid(), "spinor_gradient");
  std::array<SpinorField, 4> d;
  for (int k = 0; k < 4; ++k) d[k] = partial_derivative(phi, k);
  const Complex i(0.0, 1.0);
  return generate_indexed(phi.grid(), [&](std::size_t n) -> SpinorGradient {
    SpinorGradient g;
    for (int k = 0; k < 4; ++k) g.col(k) = d[k][n] + i * A.a[n](k) * phi[n];
    return g;
  });
}

/// D_A Phi = sum_i rho_i (nabla_A)_i Phi, a negative-chirality spinor field.
inline SpinorField dirac(const SpinorField& phi, const U1Connection& A, const MetricField& m) {
  spinc_detail::require_flat(m, "dirac");
  const auto& c = CliffordModel::standard();
  const auto g = spinor_gradient(phi, A);
  return map(g, [&](const SpinorGradient& x) -> Spinor {
    Spinor s = Spinor::Zero();
    for (int k = 0; k < 4; ++k) s += c.rho[k] * x.col(k);
    return s;
  });
}

struct DiracIdentityCheck {
  double lhs = 0.0;  ///< int Re(D Phi, D(|Phi|^2 Phi))
  double rhs = 0.0;  ///< int |Phi|^2 |nabla Phi|^2 + |d|Phi|^2|^2 / 2 + R|Phi|^4/4 - 2 (iF+, |Phi|^2 sigma)
  /// |lhs - rhs| over the sum of the absolute values of lhs and of the rhs terms.
  double residual = 0.0;
};

/// Weitzenboeck formula for D_A integrated against |Phi|^2 Phi; R = 0 on the flat chart.
inline DiracIdentityCheck dirac_weitzenboeck_check(const SpinorField& phi, const U1Connection& A,
                                                   const MetricField& m) {
  spinc_detail::require_flat(m, "dirac_weitzenboeck_check");
  const auto n2 = map(phi, [](const Spinor& p) { return p.squaredNorm(); });
  const auto dphi = dirac(phi, A, m);
  const auto dpsi = dirac(zip(n2, phi, [](double r, const Spinor& p) -> Spinor { return r * p; }), A, m);
  const double lhs = integrate(zip(dphi, dpsi, [](const Spinor& x, const Spinor& y) {
                                 return x.dot(y).real();
                               }),
                               m.vol());
  const auto grad = spinor_gradient(phi, A);
  std::array<ScalarField, 4> dn2;
  for (int k = 0; k < 4; ++k) dn2[k] = partial_derivative(n2, k);
  const auto sig = sigma_map(phi);
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  const double cell = phi.grid().cell_volume();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double w = m.vol()[i] * cell;
    double g2 = 0.0;
    for (int k = 0; k < 4; ++k) g2 += dn2[k][i] * dn2[k][i];
    t1 += w * n2[i] * grad[i].squaredNorm();
    t2 += w * 0.5 * g2;
    t3 += w * (-2.0) * n2[i] * A.curv_plus[i].dot(sig[i]);
  }
  DiracIdentityCheck r;
  r.lhs = lhs;
  r.rhs = t1 + t2 + t3;
  const double scale = std::abs(lhs) + std::abs(t1) + std::abs(t2) + std::abs(t3);
  r.residual = scale > 0.0 ? std::abs(r.lhs - r.rhs) / scale : 0.0;
  return r;
}

struct LogKatoReport {
  double margin = 0.0;  ///< min over kept nodes of 2|nabla_A Phi|/|Phi| - |nabla sigma|/|sigma|
  std::size_t nodes_checked = 0;
};

/// Pointwise log Kato inequality on a flat chart; nodes with |Phi| < floor are skipped.
inline LogKatoReport log_kato_check(const SpinorField& phi, const U1Connection& A, const MetricField& m,
                                    double floor) {
  spinc_detail::require_flat(m, "log_kato_check");
  const auto grad = spinor_gradient(phi, A);
  const auto sig = sigma_map(phi);
  std::array<SelfDualField, 4> ds;
  for (int k = 0; k < 4; ++k) ds[k] = partial_derivative(sig, k);
  LogKatoReport r;
  r.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double np = phi[i].norm();
    if (np < floor) continue;
    ++r.nodes_checked;
    double ds2 = 0.0;
    for (int k = 0; k < 4; ++k) ds2 += ds[k][i].squaredNorm();
    r.margin = std::min(r.margin, 2.0 * grad[i].norm() / np - std::sqrt(ds2) / sig[i].norm());
  }
  if (r.nodes_checked == 0) throw InvalidArgument("log_kato_check: every node is below the floor");
  return r;
}

}  // namespace swlab

#pragma once

// Perturbed Seiberg-Witten residuals, a-priori bound checks, manufactured
// configurations, the key integral inequality and LeBrun-type reports.
//
// Throughout, "iF+" is the real self-dual form U1Connection::curv_plus, and the
// curvature equation of the perturbed system reads
//   sqrt8 iF+ = -F(x, |sigma(Phi)|) sigma(Phi) + eta,
// with F = beta(t)(K- + eps), eta = K+ omega_hat for the full variant.

#include "swlab/harmonic.hpp"
#include "swlab/lambda.hpp"
#include "swlab/spinc.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace swlab {

// ---------------------------------------------------------------------------
// Perturbations.

enum class PswVariant { simple, full, general };

inline const char* to_string(PswVariant v) {
  switch (v) {
    case PswVariant::simple: return "simple";
    case PswVariant::full: return "full";
    case PswVariant::general: return "general";
  }
  return "?";
}

/// F(node, t) for the general equations.
using PerturbationFunction = std::function<double(std::size_t, double)>;

struct PerturbationSpec {
  PswVariant variant = PswVariant::full;
  double epsilon = 0.0;                 ///< simple and full
  std::optional<SelfDualField> omega_hat;  ///< full; absent means zero
  PerturbationFunction F;               ///< general
  double kappa = 0.0, T = 0.0, delta = 0.0;  ///< general admissibility constants
  std::optional<SelfDualField> eta;     ///< general; absent means zero

  /// sqrt8 iF+ = -beta(|sigma|)((2R/3 + 2w)- + eps) sigma. Pair with simple_K.
  static PerturbationSpec simple(double eps) {
    PerturbationSpec p;
    p.variant = PswVariant::simple;
    p.epsilon = eps;
    return p;
  }
  static PerturbationSpec full(double eps, std::optional<SelfDualField> omega_hat = std::nullopt) {
    PerturbationSpec p;
    p.variant = PswVariant::full;
    p.epsilon = eps;
    p.omega_hat = std::move(omega_hat);
    return p;
  }
  static PerturbationSpec general(PerturbationFunction f, double kappa, double T, double delta,
                                  std::optional<SelfDualField> eta = std::nullopt) {
    PerturbationSpec p;
    p.variant = PswVariant::general;
    p.F = std::move(f);
    p.kappa = kappa;
    p.T = T;
    p.delta = delta;
    p.eta = std::move(eta);
    return p;
  }
};

/// K of the simple variant: theta = pi/2 and lambda = 0, i.e. 2R/3 + 2w.
inline KField simple_K(const CurvatureBundle& cb) {
  KField k;
  k.K = zip(cb.R, cb.w, [](double r, double w) { return 2.0 * r / 3.0 + 2.0 * w; });
  k.Kplus = map(k.K, positive_part);
  k.Kminus = map(k.K, negative_part);
  return k;
}

/// Smooth cutoff: 1 on [0, 1] and between 1/(2t) and 2/t beyond.
inline double smooth_cutoff(double t) {
  if (!(t >= 0.0)) throw InvalidArgument("smooth_cutoff: argument must be non-negative");
  if (t <= 1.0) return 1.0;
  const double s = t - 1.0;
  return 1.0 / (1.0 + s * std::exp(-1.0 / s));
}

struct MonopoleConfig {
  U1Connection A;
  SpinorField phi;
};

// ---------------------------------------------------------------------------
// Admissibility of the general perturbation.

struct AdmissibilityOptions {
  int t_samples_low = 64;    ///< uniform samples of [0, T]
  int t_samples_high = 64;   ///< geometric samples of [T, T * t_span]
  double t_span = 1e6;
  double eta_slack = 1e-12;  ///< relative to max(1, max K+)
  double t_slack = 1e-12;    ///< relative rounding allowance on the bounds for t F
  std::size_t max_reported = 8;
};

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<std::string> violations;  ///< first few violated samples
  std::size_t violation_count = 0;
};

inline AdmissibilityReport check_admissibility(const PerturbationSpec& p, const KField& K,
                                               const AdmissibilityOptions& o = {}) {
  if (p.variant != PswVariant::general) throw InvalidArgument("check_admissibility: needs the general variant");
  if (!p.F) throw InvalidArgument("check_admissibility: F is not set");
  if (!(p.kappa > 0.0 && p.T > 0.0 && p.delta > 0.0)) {
    throw InvalidArgument("check_admissibility: kappa, T and delta must be positive");
  }
  AdmissibilityReport r;
  auto flag = [&](std::string msg) {
    r.admissible = false;
    if (r.violations.size() < o.max_reported) r.violations.push_back(std::move(msg));
    ++r.violation_count;
  };
  std::vector<double> ts;
  for (int j = 0; j <= o.t_samples_low; ++j) ts.push_back(p.T * j / o.t_samples_low);
  for (int j = 1; j <= o.t_samples_high; ++j) ts.push_back(p.T * std::pow(o.t_span, double(j) / o.t_samples_high));
  const GridSpec& g = K.K.grid();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (double t : ts) {
      const double tf = t * p.F(i, t);
      const double lower = t < p.T ? 0.0 : K.Kminus[i] + p.delta;
      if (!std::isfinite(tf) || tf > p.kappa * (1.0 + o.t_slack) || tf < lower * (1.0 - o.t_slack)) {
        std::ostringstream os;
        os << "node " << i << " t=" << t << ": t F = " << tf << " outside [" << lower << ", " << p.kappa << "]";
        flag(os.str());
      }
    }
  }
  if (p.eta) {
    require_same_grid(p.eta->grid(), g, "check_admissibility");
    double kmax = 1.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) kmax = std::max(kmax, K.Kplus[i]);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const double n = (*p.eta)[i].norm();
      if (n > K.Kplus[i] + o.eta_slack * kmax) {
        std::ostringstream os;
        os << "node " << i << ": |eta| = " << n << " exceeds K+ = " << K.Kplus[i];
        flag(os.str());
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Residuals.

struct PswResidual {
  SpinorField r1;     ///< D_A Phi
  SelfDualField r2;   ///< sqrt8 iF+ + F sigma - eta
  double r1_l2 = 0.0, r1_linf = 0.0, r2_l2 = 0.0, r2_linf = 0.0;
  /// L2 norms of sqrt8 iF+, F sigma and eta: the scale r2 is gated against.
  double r2_scale = 0.0;
  /// ||d Phi||_2 + ||a||_inf ||Phi||_2, the sizes of the two parts of D_A: the scale r1 is gated against.
  double r1_scale = 0.0;
};

namespace functionals_detail {

inline void finish_residual(PswResidual& r, const MonopoleConfig& cfg, const MetricField& m, const SelfDualField& fs,
                            const SelfDualField& eta_term) {
  const auto& vol = m.vol();
  r.r1_l2 = lp_norm(r.r1, Norm::L2, vol);
  r.r1_linf = lp_norm(r.r1, Norm::Linf, vol);
  r.r2_l2 = lp_norm(r.r2, Norm::L2, vol);
  r.r2_linf = lp_norm(r.r2, Norm::Linf, vol);
  r.r2_scale = kSqrt8 * lp_norm(cfg.A.curv_plus, Norm::L2, vol) + lp_norm(fs, Norm::L2, vol) +
               lp_norm(eta_term, Norm::L2, vol);
  double dphi2 = 0.0;
  for (int k = 0; k < 4; ++k) dphi2 += std::pow(lp_norm(partial_derivative(cfg.phi, k), Norm::L2, vol), 2);
  r.r1_scale = std::sqrt(dphi2) + lp_norm(cfg.A.a, Norm::Linf, vol) * lp_norm(cfg.phi, Norm::L2, vol);
}

inline void require_config(const MonopoleConfig& cfg, const MetricField& m, const KField& K, const char* what) {
  require_same_grid(cfg.phi.grid(), m.grid(), what);
  require_same_grid(cfg.A.a.grid(), m.grid(), what);
  require_same_grid(K.K.grid(), m.grid(), what);
}

}  // namespace functionals_detail

/// Residual of D_A Phi = 0, sqrt8 iF+ = -beta(|sigma|)(K- + eps) sigma + K+ omega_hat.
/// The simple variant has omega_hat = 0 and expects K = simple_K(cb).
inline PswResidual psw_residual(const MonopoleConfig& cfg, const MetricField& m, const PerturbationSpec& p,
                                const KField& K) {
  if (p.variant == PswVariant::general) throw InvalidArgument("psw_residual: use general_psw_residual");
  if (!(p.epsilon > 0.0)) throw InvalidArgument("psw_residual: epsilon must be positive");
  if (p.variant == PswVariant::simple && p.omega_hat) {
    throw InvalidArgument("psw_residual: the simple variant has no omega_hat");
  }
  functionals_detail::require_config(cfg, m, K, "psw_residual");
  if (p.omega_hat) {
    require_same_grid(p.omega_hat->grid(), m.grid(), "psw_residual");
    for (std::size_t i = 0; i < p.omega_hat->size(); ++i) {
      if ((*p.omega_hat)[i].norm() > 1.0 + 1e-12) throw InvalidArgument("psw_residual: |omega_hat| exceeds 1");
    }
  }
  const auto sig = sigma_map(cfg.phi);
  PswResidual r;
  r.r1 = dirac(cfg.phi, cfg.A, m);
  const auto fs = generate_indexed(m.grid(), [&](std::size_t i) -> Vec3 {
    return (beta(sig[i].norm()) * (K.Kminus[i] + p.epsilon)) * sig[i];
  });
  const auto eta_term = generate_indexed(m.grid(), [&](std::size_t i) -> Vec3 {
    return p.omega_hat ? Vec3(K.Kplus[i] * (*p.omega_hat)[i]) : Vec3(Vec3::Zero());
  });
  r.r2 = generate_indexed(m.grid(), [&](std::size_t i) -> Vec3 {
    return (kSqrt8 * cfg.A.curv_plus[i] + fs[i]) - eta_term[i];
  });
  functionals_detail::finish_residual(r, cfg, m, fs, eta_term);
  return r;
}

/// Residual of D_A Phi = 0, sqrt8 iF+ = -F(x, |sigma|) sigma + eta. Throws AdmissibilityError
/// listing violated samples when F or eta fails the admissibility conditions against K.
inline PswResidual general_psw_residual(const MonopoleConfig& cfg, const MetricField& m, const PerturbationSpec& p,
                                        const KField& K, const AdmissibilityOptions& o = {}) {
  if (p.variant != PswVariant::general) throw InvalidArgument("general_psw_residual: needs the general variant");
  functionals_detail::require_config(cfg, m, K, "general_psw_residual");
  const auto adm = check_admissibility(p, K, o);
  if (!adm.admissible) {
    std::ostringstream os;
    os << "general_psw_residual: " << adm.violation_count << " admissibility violations";
    for (const auto& v : adm.violations) os << "; " << v;
    throw AdmissibilityError(os.str());
  }
  const auto sig = sigma_map(cfg.phi);
  PswResidual r;
  r.r1 = dirac(cfg.phi, cfg.A, m);
  const auto fs = generate_indexed(m.grid(), [&](std::size_t i) -> Vec3 { return p.F(i, sig[i].norm()) * sig[i]; });
  const SelfDualField eta_term = p.eta ? *p.eta : SelfDualField(m.grid(), Vec3::Zero());
  r.r2 = generate_indexed(m.grid(), [&](std::size_t i) -> Vec3 {
    return (kSqrt8 * cfg.A.curv_plus[i] + fs[i]) - eta_term[i];
  });
  functionals_detail::finish_residual(r, cfg, m, fs, eta_term);
  return r;
}

/// The general perturbation that reproduces the full variant: F = beta(t)(K- + eps), eta = K+ omega_hat,
/// with kappa = max K- + eps, T = 1 and delta = eps.
inline PerturbationSpec general_from_full(const PerturbationSpec& p, const KField& K) {
  if (p.variant == PswVariant::general) throw InvalidArgument("general_from_full: already general");
  const double eps = p.epsilon;
  const ScalarField km = K.Kminus;
  double kmax = 0.0;
  for (std::size_t i = 0; i < km.size(); ++i) kmax = std::max(kmax, km[i]);
  std::optional<SelfDualField> eta;
  if (p.omega_hat) {
    eta = generate_indexed(K.K.grid(), [&](std::size_t i) -> Vec3 { return K.Kplus[i] * (*p.omega_hat)[i]; });
  }
  return PerturbationSpec::general([km, eps](std::size_t i, double t) { return beta(t) * (km[i] + eps); },
                                   kmax + eps, 1.0, eps, std::move(eta));
}

// ---------------------------------------------------------------------------
// A-priori bounds.

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;      ///< rhs - lhs
  bool applicable = true;   ///< false when the residual gate is exceeded
  double gated_residual = 0.0;  ///< relative residual compared against the gate
};

/// Relative residual of the curvature equation: ||r2||_2 over its scale (0 when both vanish).
inline double relative_curvature_residual(const PswResidual& r) {
  return r.r2_scale > 0.0 ? r.r2_l2 / r.r2_scale : (r.r2_l2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
}

/// Relative residual of the Dirac equation: ||D_A Phi||_2 over r1_scale (0 when both vanish).
inline double relative_dirac_residual(const PswResidual& r) {
  return r.r1_scale > 0.0 ? r.r1_l2 / r.r1_scale : (r.r1_l2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
}

/// ||iF+||_inf <= (||K||_inf + eps)/sqrt8. Follows from the curvature equation alone, so only its
/// residual is gated. gate = infinity disables the gate.
inline BoundReport check_curvature_bound(const MonopoleConfig& cfg, const MetricField& m, const PerturbationSpec& p,
                                         const KField& K, double gate = 1e-6) {
  const auto res = psw_residual(cfg, m, p, K);
  BoundReport b;
  b.lhs = lp_norm(cfg.A.curv_plus, Norm::Linf, m.vol());
  b.rhs = (lp_norm(K.K, Norm::Linf, m.vol()) + p.epsilon) / kSqrt8;
  b.margin = b.rhs - b.lhs;
  b.gated_residual = relative_curvature_residual(res);
  b.applicable = b.gated_residual <= gate;
  return b;
}

/// int |Phi|^4 <= 8 (1 + max K- / eps) Vol. Both equations are gated.
inline BoundReport check_phi_l4_bound(const MonopoleConfig& cfg, const MetricField& m, const PerturbationSpec& p,
                                      const KField& K, double gate = 1e-6) {
  const auto res = psw_residual(cfg, m, p, K);
  double kmax = 0.0;
  for (std::size_t i = 0; i < K.Kminus.size(); ++i) kmax = std::max(kmax, K.Kminus[i]);
  BoundReport b;
  b.lhs = std::pow(lp_norm(cfg.phi, Norm::L4, m.vol()), 4);
  b.rhs = 8.0 * (1.0 + kmax / p.epsilon) * volume(m.vol());
  b.margin = b.rhs - b.lhs;
  b.gated_residual = std::max(relative_curvature_residual(res), relative_dirac_residual(res));
  b.applicable = b.gated_residual <= gate;
  return b;
}

/// int |sqrt8 iF+|^2 <= int (K- + eps)^2 on solutions with omega_hat = 0.
inline InequalityCheck curvature_energy_chain(const MonopoleConfig& cfg, const MetricField& m,
                                              const PerturbationSpec& p, const KField& K) {
  if (p.omega_hat) throw InvalidArgument("curvature_energy_chain: needs omega_hat = 0");
  InequalityCheck c;
  c.lhs = 8.0 * integrate(pointwise_norm2(cfg.A.curv_plus), m.vol());
  c.rhs = integrate(map(K.Kminus, [&](double k) { return (k + p.epsilon) * (k + p.epsilon); }), m.vol());
  c.margin = c.rhs - c.lhs;
  return c;
}

// ---------------------------------------------------------------------------
// Manufactured configurations.

/// A spinor with sigma(Phi) = s.
inline Spinor spinor_with_sigma(const Vec3& s) {
  const double r = s.norm();
  if (r == 0.0) return Spinor::Zero();
  const double n2 = kSqrt8 * r;  // |Phi|^2
  const Vec3 n = s / r;
  if (n(2) > -0.5) {
    const double c = std::sqrt(n2 / (2.0 * (1.0 + n(2))));
    return Spinor(Complex(c * (1.0 + n(2)), 0.0), c * Complex(n(0), n(1)));
  }
  const double c = std::sqrt(n2 / (2.0 * (1.0 - n(2))));
  return Spinor(c * Complex(n(0), -n(1)), Complex(c * (1.0 - n(2)), 0.0));
}

struct ManufacturedSolution {
  MonopoleConfig cfg;
  PerturbationSpec pert;
  KField K;
};

namespace functionals_detail {

inline KField constant_K(const GridSpec& g, double k) {
  KField K;
  K.K = ScalarField(g, k);
  K.Kplus = ScalarField(g, positive_part(k));
  K.Kminus = ScalarField(g, negative_part(k));
  return K;
}

}  // namespace functionals_detail

/// Given a, solves the curvature equation for Phi pointwise against K = -k, k = headroom * max |sqrt8 iF+|,
/// omega_hat = 0: sigma(Phi) = -sqrt8 iF+ / (k + eps). The curvature equation holds to rounding; the
/// Dirac equation is not imposed.
inline ManufacturedSolution manufacture_from_connection(const MetricField& m, const OneFormField& a, double eps,
                                                        double headroom = 1.0) {
  if (!(eps > 0.0) || !(headroom >= 1.0)) {
    throw InvalidArgument("manufacture_from_connection: need eps > 0 and headroom >= 1");
  }
  ManufacturedSolution s;
  s.cfg.A = make_connection(a, m);
  const double fmax = kSqrt8 * lp_norm(s.cfg.A.curv_plus, Norm::Linf, m.vol());
  const double k = headroom * fmax;
  s.K = functionals_detail::constant_K(m.grid(), -k);
  s.pert = PerturbationSpec::full(eps);
  s.cfg.phi = map(s.cfg.A.curv_plus, [&](const Vec3& f) { return spinor_with_sigma(-kSqrt8 * f / (k + eps)); });
  return s;
}

/// Phi = e^{-i chi} phi0 with a = d chi (discrete gradient, so F = 0 exactly), K = k > 0 constant and
/// omega_hat = eps beta(|sigma|) sigma / k. The curvature equation holds to rounding; the Dirac
/// residual is the product-rule defect of the stencil.
inline ManufacturedSolution manufacture_gauge_trivial(const MetricField& m, const ScalarField& chi,
                                                      const Spinor& phi0, double eps, double k) {
  const double sig = sigma_of(phi0).norm();
  if (!(eps > 0.0) || !(k >= eps * std::min(sig, 1.0)) || !(k > 0.0)) {
    throw InvalidArgument("manufacture_gauge_trivial: need eps > 0 and k >= eps min(|sigma|, 1)");
  }
  require_same_grid(chi.grid(), m.grid(), "manufacture_gauge_trivial");
  std::array<ScalarField, 4> d;
  for (int j = 0; j < 4; ++j) d[j] = partial_derivative(chi, j);
  ManufacturedSolution s;
  s.cfg.A = make_connection(
      generate_indexed(m.grid(), [&](std::size_t i) { return Vec4(d[0][i], d[1][i], d[2][i], d[3][i]); }), m);
  const Complex I(0.0, 1.0);
  s.cfg.phi = map(chi, [&](double c) -> Spinor { return std::exp(-I * c) * phi0; });
  s.K = functionals_detail::constant_K(m.grid(), k);
  const Vec3 s0 = sigma_of(phi0);
  s.pert = PerturbationSpec::full(eps, SelfDualField(m.grid(), Vec3(eps * beta(s0.norm()) * s0 / k)));
  return s;
}

// ---------------------------------------------------------------------------
// Key inequality for sigma = sigma(Phi).

struct KeyInequalityReport {
  double dd = 0.0, nabla = 0.0, kato = 0.0;  ///< ||(d+d*)(s sigma)||^2, ||nabla(c sigma)||^2, ||nabla|sigma|||^2
  double curvature = 0.0;  ///< int [(1 - s^2/3) R + 2 s^2 w - |d theta|^2] |sigma|^2
  double coupling = 0.0;   ///< int (sqrt8 iF+, |sigma| sigma)
  double dirac = 0.0;      ///< int Re(D_A Phi, D_A(|Phi|^2 Phi))
  double lhs = 0.0;        ///< dd + nabla + 2 kato
  double rhs = 0.0;        ///< -curvature + coupling + dirac / 2
  double margin = 0.0;     ///< rhs - lhs
  double scale = 0.0;      ///< sum of the absolute values of the six terms
};

inline KeyInequalityReport key_inequality(const MonopoleConfig& cfg, const ThetaField& th, const MetricField& m,
                                          const CurvatureBundle& cb) {
  require_same_grid(th.s.grid(), m.grid(), "key_inequality");
  const auto sig = sigma_map(cfg.phi);
  const auto& vol = m.vol();
  KeyInequalityReport r;
  r.dd = integrate(d_plus_dstar(th.s * sig, m).norm2, vol);
  r.nabla = integrate(pointwise_norm2(covariant_derivative(th.c * sig, m)), vol);
  const auto abs_sig = map(sig, [](const Vec3& v) { return v.norm(); });
  r.kato = integrate(map(frame_gradient(abs_sig, m), [](const Vec4& v) { return v.squaredNorm(); }), vol);
  r.curvature = integrate(generate_indexed(m.grid(), [&](std::size_t i) {
                            const double s2 = th.s[i] * th.s[i];
                            const double k = (1.0 - s2 / 3.0) * cb.R[i] + 2.0 * s2 * cb.w[i] - th.dtheta_norm2[i];
                            return k * sig[i].squaredNorm();
                          }),
                          vol);
  r.coupling = integrate(generate_indexed(m.grid(), [&](std::size_t i) {
                           return kSqrt8 * cfg.A.curv_plus[i].dot(sig[i].norm() * sig[i]);
                         }),
                         vol);
  r.dirac = dirac_weitzenboeck_check(cfg.phi, cfg.A, m).lhs;
  r.lhs = r.dd + r.nabla + 2.0 * r.kato;
  r.rhs = -r.curvature + r.coupling + 0.5 * r.dirac;
  r.margin = r.rhs - r.lhs;
  r.scale = std::abs(r.dd) + std::abs(r.nabla) + 2.0 * std::abs(r.kato) + std::abs(r.curvature) +
            std::abs(r.coupling) + 0.5 * std::abs(r.dirac);
  return r;
}

/// int K |sigma|^2 <= int (sqrt8 iF+, |sigma| sigma) + (1/2) int Re(D_A Phi, D_A(|Phi|^2 Phi)).
inline KeyInequalityReport key_inequality_reformulated(const MonopoleConfig& cfg, const KField& K,
                                                       const MetricField& m) {
  const auto sig = sigma_map(cfg.phi);
  const auto& vol = m.vol();
  KeyInequalityReport r;
  r.curvature = -integrate(zip(K.K, sig, [](double k, const Vec3& s) { return k * s.squaredNorm(); }), vol);
  r.coupling = integrate(generate_indexed(m.grid(), [&](std::size_t i) {
                           return kSqrt8 * cfg.A.curv_plus[i].dot(sig[i].norm() * sig[i]);
                         }),
                         vol);
  r.dirac = dirac_weitzenboeck_check(cfg.phi, cfg.A, m).lhs;
  r.lhs = -r.curvature;
  r.rhs = r.coupling + 0.5 * r.dirac;
  r.margin = r.rhs - r.lhs;
  r.scale = std::abs(r.curvature) + std::abs(r.coupling) + 0.5 * std::abs(r.dirac);
  return r;
}

// ---------------------------------------------------------------------------
// LeBrun-type reports.

struct InequalityReport {
  std::string kind;
  std::string lhs_formula, rhs_formula;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< rhs - lhs; the inequality asserts margin >= 0
  bool mixed_sign = false;  ///< K takes both signs on the grid
  std::map<std::string, double> inputs;
};

/// int (F/2pi) ^ omega by coordinate quadrature. Throws if ||dF||_inf exceeds tol (max |F| + 1).
inline double chern_pairing(const TwoFormField& f, const SelfDualField& omega, const MetricField& m,
                            double tol = 1e-6) {
  require_same_grid(f.grid(), m.grid(), "chern_pairing");
  const auto df = exterior_derivative<2>(f);
  const double dfn = lp_norm(df, Norm::Linf, flat_volume(f.grid()));
  const double fn = lp_norm(f, Norm::Linf, flat_volume(f.grid()));
  if (dfn > tol * (fn + 1.0)) {
    std::ostringstream os;
    os << "chern_pairing: representative is not closed, ||dF||_inf = " << dfn;
    throw InvalidArgument(os.str());
  }
  const auto w = embed(omega, m);
  const auto wedge = zip(f, w, [](const Vec6& a, const Vec6& b) {
    return a(0) * b(5) - a(1) * b(4) + a(2) * b(3) + a(3) * b(2) - a(4) * b(1) + a(5) * b(0);
  });
  return integrate(wedge, flat_volume(f.grid())) / (2.0 * kPi);
}

/// (c1+)^2 = sum_j <P(F/2pi), b_j>^2 over a W-orthonormal harmonic self-dual basis.
inline double c1plus_squared(const TwoFormField& f, const std::vector<SelfDualField>& basis, const MetricField& m) {
  const auto fp = (1.0 / (2.0 * kPi)) * project(f, m);
  double s = 0.0;
  for (const auto& b : basis) {
    const double c = inner_product(b, fp, m.vol());
    s += c * c;
  }
  return s;
}

struct LebrunOptions {
  double harmonic_tol = 1e-6;  ///< on ||(d+d*) omega||^2 / ||omega||^2
  bool allow_non_harmonic = false;
};

/// int K |omega|/sqrt2 dmu <= 4 pi c1 . [omega].
inline InequalityReport lebrun_linear(const SelfDualField& omega, const MetricField& m, const ScalarField& K,
                                      double c1_pairing, const LebrunOptions& o = {}) {
  require_same_grid(omega.grid(), m.grid(), "lebrun_linear");
  const double n2 = integrate(pointwise_norm2(omega), m.vol());
  if (n2 == 0.0) throw InvalidArgument("lebrun_linear: omega is zero");
  const double q = integrate(d_plus_dstar(omega, m).norm2, m.vol()) / n2;
  if (q > o.harmonic_tol && !o.allow_non_harmonic) {
    std::ostringstream os;
    os << "lebrun_linear: omega is not harmonic, quotient " << q;
    throw InvalidArgument(os.str());
  }
  InequalityReport r;
  r.kind = "lebrun_linear";
  r.lhs_formula = "int K |omega| / sqrt2 dmu";
  r.rhs_formula = "4 pi c1 . [omega]";
  r.lhs = integrate(zip(K, omega, [](double k, const Vec3& w) { return k * w.norm() / kSqrt2; }), m.vol());
  r.rhs = 4.0 * kPi * c1_pairing;
  r.margin = r.rhs - r.lhs;
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < K.size(); ++i) {
    pos = pos || K[i] > 0.0;
    neg = neg || K[i] < 0.0;
  }
  r.mixed_sign = pos && neg;
  r.inputs["harmonic_quotient"] = q;
  r.inputs["c1_pairing"] = c1_pairing;
  return r;
}

/// Corollary form with constant sin^2 theta = delta: K = (1 - delta/3) R + 2 delta w.
inline ScalarField lebrun_delta_K(const CurvatureBundle& cb, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidArgument("lebrun_delta_K: delta must lie in [0, 1]");
  return zip(cb.R, cb.w, [delta](double r, double w) { return (1.0 - delta / 3.0) * r + 2.0 * delta * w; });
}

/// 32 pi^2 (c1+)^2 <= int K-^2 dmu.
inline InequalityReport lebrun_quadratic(const KField& K, const MetricField& m, double c1plus_sq) {
  if (!(c1plus_sq >= 0.0)) throw InvalidArgument("lebrun_quadratic: (c1+)^2 must be non-negative");
  InequalityReport r;
  r.kind = "lebrun_quadratic";
  r.lhs_formula = "32 pi^2 (c1+)^2";
  r.rhs_formula = "int K-^2 dmu";
  r.lhs = 32.0 * kPi * kPi * c1plus_sq;
  r.rhs = integrate(map(K.Kminus, [](double k) { return k * k; }), m.vol());
  r.margin = r.rhs - r.lhs;
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < K.K.size(); ++i) {
    pos = pos || K.K[i] > 0.0;
    neg = neg || K.K[i] < 0.0;
  }
  r.mixed_sign = pos && neg;
  r.inputs["c1plus_sq"] = c1plus_sq;
  return r;
}

// ---------------------------------------------------------------------------
// Closed-form catalog: Kaehler products of constant-curvature surfaces with the
// anticanonical class, omega the Kaehler form (|omega| = sqrt2).

struct CatalogEntry {
  std::string name;
  double K1 = 0.0, K2 = 0.0;      ///< Gauss curvatures
  double A1 = 0.0, A2 = 0.0;      ///< areas
  double chi1 = 0.0, chi2 = 0.0;  ///< Euler characteristics

  double R() const { return 2.0 * (K1 + K2); }
  /// Lowest eigenvalue of W+ for a Kaehler metric: min(R/6, -R/12).
  double w() const { return std::min(R() / 6.0, -R() / 12.0); }
  double volume() const { return A1 * A2; }
  /// c1 . [omega] = chi1 A2 + chi2 A1.
  double c1_pairing() const { return chi1 * A2 + chi2 * A1; }
  /// (c1+)^2 = (c1 . [omega])^2 / [omega]^2 with [omega]^2 = 2 Vol.
  double c1plus_sq() const { return c1_pairing() * c1_pairing() / (2.0 * volume()); }
};

/// Flat torus of the given area times a hyperbolic surface (K = -1) of genus >= 2.
inline CatalogEntry catalog_torus_times_surface(int genus, double torus_area) {
  if (genus < 2 || !(torus_area > 0.0)) throw InvalidArgument("catalog: need genus >= 2 and positive area");
  const double chi = 2.0 - 2.0 * genus;
  return {"T2xSigma" + std::to_string(genus), 0.0, -1.0, torus_area, -2.0 * kPi * chi, 0.0, chi};
}

/// Product of two hyperbolic surfaces (K = -1) of genera g, h >= 2.
inline CatalogEntry catalog_surface_product(int g, int h) {
  if (g < 2 || h < 2) throw InvalidArgument("catalog: need genera >= 2");
  const double c1 = 2.0 - 2.0 * g, c2 = 2.0 - 2.0 * h;
  return {"Sigma" + std::to_string(g) + "xSigma" + std::to_string(h), -1.0, -1.0, -2.0 * kPi * c1, -2.0 * kPi * c2,
          c1, c2};
}

/// Constant-curvature evaluation of the linear report. delta outside [0, 1] is allowed for
/// coefficient sweeps and recorded in inputs.
inline InequalityReport catalog_linear(const CatalogEntry& e, double delta) {
  InequalityReport r;
  r.kind = "catalog_linear:" + e.name;
  r.lhs_formula = "((1 - delta/3) R + 2 delta w) Vol";
  r.rhs_formula = "4 pi (chi1 A2 + chi2 A1)";
  r.lhs = ((1.0 - delta / 3.0) * e.R() + 2.0 * delta * e.w()) * e.volume();
  r.rhs = 4.0 * kPi * e.c1_pairing();
  r.margin = r.rhs - r.lhs;
  r.inputs["delta"] = delta;
  r.inputs["R"] = e.R();
  r.inputs["w"] = e.w();
  r.inputs["volume"] = e.volume();
  return r;
}

inline InequalityReport catalog_quadratic(const CatalogEntry& e, double delta) {
  InequalityReport r;
  r.kind = "catalog_quadratic:" + e.name;
  r.lhs_formula = "32 pi^2 (c1+)^2";
  r.rhs_formula = "((1 - delta/3) R + 2 delta w)-^2 Vol";
  const double k = negative_part((1.0 - delta / 3.0) * e.R() + 2.0 * delta * e.w());
  r.lhs = 32.0 * kPi * kPi * e.c1plus_sq();
  r.rhs = k * k * e.volume();
  r.margin = r.rhs - r.lhs;
  r.inputs["delta"] = delta;
  r.inputs["c1plus_sq"] = e.c1plus_sq();
  return r;
}

}  // namespace swlab

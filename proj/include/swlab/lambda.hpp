#pragma once

// The Rayleigh quotient defining lambda_theta, its minimization over
// self-dual forms, the curvature function K_theta and the beta cutoff.

#include "swlab/operators.hpp"

#include <random>

namespace swlab {

/// beta(t) = 1 for t <= 1 and 1/t for t >= 1.
inline double beta(double t) {
  if (!(t >= 0.0)) throw InvalidArgument("beta: argument must be non-negative");
  return t <= 1.0 ? 1.0 : 1.0 / t;
}

struct QuotientTerms {
  double dd = 0.0;      ///< ||(d+d*)(s sigma)||^2
  double nabla = 0.0;   ///< ||nabla(c sigma)||^2
  double kato = 0.0;    ///< ||nabla |sigma|_eps||^2
  double norm2 = 0.0;   ///< ||sigma||^2
  double quotient() const { return (dd + nabla + 2.0 * kato) / norm2; }
};

/// Straight-line evaluation of the three energies from the selfdual.hpp routines.
inline QuotientTerms quotient_terms(const SelfDualField& sigma, const ThetaField& th, const MetricField& m,
                                    double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("rayleigh_quotient: smoothing must be non-negative");
  QuotientTerms t;
  t.norm2 = integrate(pointwise_norm2(sigma), m.vol());
  if (t.norm2 == 0.0) throw InvalidArgument("rayleigh_quotient: sigma is zero");
  t.dd = integrate(d_plus_dstar(th.s * sigma, m).norm2, m.vol());
  t.nabla = integrate(pointwise_norm2(covariant_derivative(th.c * sigma, m)), m.vol());
  const auto abs_eps = map(sigma, [eps](const Vec3& v) { return std::sqrt(v.squaredNorm() + eps * eps) - eps; });
  const auto grad = frame_gradient(abs_eps, m);
  t.kato = integrate(map(grad, [](const Vec4& v) { return v.squaredNorm(); }), m.vol());
  return t;
}

inline double rayleigh_quotient(const SelfDualField& sigma, const ThetaField& th, const MetricField& m,
                                double eps) {
  return quotient_terms(sigma, th, m, eps).quotient();
}

/// Operator-route quotient and its gradient, sharing one set of precomputed tables.
class LambdaFunctional {
 public:
  LambdaFunctional(const ThetaField& th, const MetricField& m) : ops_(m), s_(th.s), c_(th.c) {}

  const SelfDualOperators& ops() const { return ops_; }

  QuotientTerms terms(const SelfDualField& u, double eps) const {
    QuotientTerms t;
    t.norm2 = ops_.norm2(u);
    if (t.norm2 == 0.0) throw InvalidArgument("rayleigh_quotient: sigma is zero");
    t.dd = ops_.dd_energy(u, &s_);
    t.nabla = ops_.nabla_energy(u, &c_);
    t.kato = ops_.kato_energy(u, eps);
    return t;
  }

  double value(const SelfDualField& u, double eps) const { return terms(u, eps).quotient(); }

  /// Gradient of the quotient in the weighted inner product; W-orthogonal to u.
  SelfDualField gradient(const SelfDualField& u, double eps, double* value_out = nullptr) const {
    const QuotientTerms t = terms(u, eps);
    const double q = t.quotient();
    if (value_out) *value_out = q;
    const auto g = ops_.dd_energy_gradient(u, &s_) + ops_.nabla_energy_gradient(u, &c_) +
                   2.0 * ops_.kato_energy_gradient(u, eps);
    const auto gw = ops_.to_weighted_gradient(g);
    return generate_indexed(u.grid(), [&](std::size_t i) -> Vec3 { return (gw[i] - 2.0 * q * u[i]) / t.norm2; });
  }

 private:
  SelfDualOperators ops_;
  ScalarField s_, c_;
};

struct LambdaOptions {
  int random_starts = 8;
  bool constant_starts = true;  ///< adds eta_1, eta_2, eta_3
  /// Smoothing levels relative to the RMS of a unit-norm form, applied in order.
  std::vector<double> eps_schedule = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  int max_iterations = 200;     ///< per start and smoothing level
  double tolerance = 1e-6;      ///< on the weighted gradient norm relative to max(1, quotient)
  std::uint64_t seed = 1;
};

struct LambdaResult {
  double lambda = 0.0;
  SelfDualField minimizer;
  std::vector<double> quotient_history;  ///< best value so far after each iteration
  std::vector<double> start_values;      ///< final smoothing-free quotient per start
  double epsilon_final = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace lambda_detail {

/// Random combination of the constant and first Fourier modes on each axis.
inline SelfDualField low_frequency_start(const GridSpec& g, std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  std::array<Vec3, 9> a;  // constant, then cos and sin per axis
  for (auto& v : a) v = Vec3(n(gen), n(gen), n(gen));
  return generate(g, [&](const Vec4& x) -> Vec3 {
    Vec3 v = a[0];
    for (int k = 0; k < 4; ++k) {
      const double t = 2 * kPi * x(k) / g.period(k);
      v += a[1 + 2 * k] * std::cos(t) + a[2 + 2 * k] * std::sin(t);
    }
    return v;
  });
}

inline SelfDualField scaled(const SelfDualField& u, double f) { return f * u; }

/// Component of v tangent to the unit sphere at u.
inline SelfDualField tangent(const SelfDualOperators& ops, const SelfDualField& v, const SelfDualField& u) {
  return v - ops.inner(v, u) * u;
}

struct StageResult {
  SelfDualField u;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Polak-Ribiere+ conjugate gradients on the unit sphere of <.,.>_W with Armijo backtracking.
inline StageResult sphere_cg(const LambdaFunctional& f, SelfDualField u, double eps, int max_it, double tol,
                             std::vector<double>& history, double& best) {
  const auto& ops = f.ops();
  u = scaled(u, 1.0 / std::sqrt(ops.norm2(u)));
  double q = 0.0;
  SelfDualField g = tangent(ops, f.gradient(u, eps, &q), u);
  SelfDualField p = -1.0 * g;
  double gg = ops.norm2(g);
  double step = 1.0 / std::max(1.0, std::sqrt(gg));
  StageResult r;
  for (int it = 0; it < max_it; ++it) {
    if (std::sqrt(gg) <= tol * std::max(1.0, q)) {
      r.converged = true;
      break;
    }
    // Keep p tangent and a descent direction.
    p = tangent(ops, p, u);
    double slope = ops.inner(g, p);
    if (slope >= 0.0) {
      p = -1.0 * g;
      slope = -gg;
    }
    double t = step * 2.0;
    SelfDualField trial;
    double qt = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      trial = u + t * p;
      trial = scaled(trial, 1.0 / std::sqrt(ops.norm2(trial)));
      qt = f.value(trial, eps);
      if (qt <= q + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++r.iterations;
    if (!accepted) {
      // No decrease resolvable in floating point: treat as converged at this level.
      r.converged = true;
      break;
    }
    step = t;
    u = trial;
    double qn = 0.0;
    SelfDualField gn = tangent(ops, f.gradient(u, eps, &qn), u);
    const double ggn = ops.norm2(gn);
    const double beta_pr = std::max(0.0, (ggn - ops.inner(gn, g)) / gg);
    p = -1.0 * gn + beta_pr * p;
    g = std::move(gn);
    gg = ggn;
    q = qn;
    best = std::min(best, q);
    history.push_back(best);
  }
  r.u = std::move(u);
  r.value = q;
  return r;
}

}  // namespace lambda_detail

/// Multistart minimization of the quotient with smoothing continuation. The reported lambda is the
/// smoothing-free quotient of the best minimizer: an upper-bound estimate of the discrete minimum.
inline LambdaResult minimize_lambda(const ThetaField& th, const MetricField& m, const LambdaOptions& opts = {}) {
  require_same_grid(th.s.grid(), m.grid(), "minimize_lambda");
  if (opts.random_starts < 0 || (opts.random_starts == 0 && !opts.constant_starts)) {
    throw InvalidArgument("minimize_lambda: at least one start is required");
  }
  if (opts.eps_schedule.empty()) throw InvalidArgument("minimize_lambda: empty smoothing schedule");
  const LambdaFunctional f(th, m);
  const GridSpec& g = m.grid();
  const double rms = 1.0 / std::sqrt(volume(m.vol()));

  std::vector<SelfDualField> starts;
  if (opts.constant_starts) {
    for (int a = 0; a < 3; ++a) starts.emplace_back(g, Vec3::Unit(a));
  }
  std::mt19937_64 gen(opts.seed);
  for (int k = 0; k < opts.random_starts; ++k) starts.push_back(lambda_detail::low_frequency_start(g, gen));

  LambdaResult res;
  res.lambda = std::numeric_limits<double>::infinity();
  res.converged = true;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s0 : starts) {
    SelfDualField u = s0;
    bool conv = true;
    for (double rel : opts.eps_schedule) {
      const double eps = rel * rms;
      auto st = lambda_detail::sphere_cg(f, u, eps, opts.max_iterations, opts.tolerance, res.quotient_history, best);
      u = std::move(st.u);
      res.iterations += st.iterations;
      conv = st.converged;
    }
    res.converged = res.converged && conv;
    const double q0 = f.value(u, 0.0);
    res.start_values.push_back(q0);
    if (q0 < res.lambda) {
      res.lambda = q0;
      res.minimizer = u;
    }
  }
  res.epsilon_final = opts.eps_schedule.back() * rms;
  if (res.lambda < 0.0) {
    if (res.lambda < -1e-9) throw NumericalError("minimize_lambda: quotient is negative beyond round-off");
    res.lambda = 0.0;
  }
  return res;
}

struct KField {
  ScalarField K, Kplus, Kminus;
};

/// K = (1 - s^2/3) R + 2 s^2 w - |d theta|^2 + lambda, with K = K+ - K- and |K| = K+ + K-.
inline KField assemble_K(const ThetaField& th, const CurvatureBundle& cb, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("assemble_K: lambda must be non-negative");
  require_same_grid(th.s.grid(), cb.R.grid(), "assemble_K");
  KField k;
  k.K = generate_indexed(cb.R.grid(), [&](std::size_t i) {
    const double s2 = th.s[i] * th.s[i];
    return (1.0 - s2 / 3.0) * cb.R[i] + 2.0 * s2 * cb.w[i] - th.dtheta_norm2[i] + lambda;
  });
  k.Kplus = map(k.K, positive_part);
  k.Kminus = map(k.K, negative_part);
  return k;
}

}  // namespace swlab

#pragma once

// Near-kernel of (d + d*) on Lambda^+: harmonic self-dual forms by block
// LOBPCG in the weighted inner product. A grid-scale stabilizer removes the
// central-difference doubler modes, which d + d* alone cannot see.

#include "swlab/operators.hpp"

#include <random>

namespace swlab {

struct HarmonicOptions {
  int block = 8;               ///< Ritz vectors carried; the kernel must be smaller than block - guard
  int guard = 2;               ///< trailing Ritz vectors never counted into the kernel
  int max_iterations = 1000;
  double residual_tol = 1e-7;  ///< on ||M x - lambda x||_W / (1 + |lambda|) for unit x in the kernel
  double separation_tol = 1e-3;  ///< same measure for the first Ritz vector above count_tol
  std::uint64_t seed = 7;
};

struct HarmonicBasis {
  std::vector<SelfDualField> forms;   ///< W-orthonormal
  std::vector<double> quotients;      ///< Rayleigh quotients of the returned forms
  std::vector<double> ritz_values;    ///< leading Ritz values, ascending; the first above count_tol is resolved
  double count_tol = 0.0;
  int iterations = 0;
};

/// Default kernel threshold: 1e-6 times (mean |R| + max_k h_k^-2).
inline double default_count_tol(const MetricField& m, const ScalarField& scalar_curvature) {
  double h2 = 0.0;
  for (int k = 0; k < 4; ++k) h2 = std::max(h2, 1.0 / (m.grid().spacing(k) * m.grid().spacing(k)));
  const double mean_r =
      integrate(map(scalar_curvature, [](double r) { return std::abs(r); }), m.vol()) / volume(m.vol());
  return 1e-6 * (mean_r + h2);
}

namespace harmonic_detail {

inline Eigen::VectorXd flatten(const SelfDualField& u) {
  Eigen::VectorXd v(3 * u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v.segment<3>(3 * Eigen::Index(i)) = u[i];
  return v;
}

inline SelfDualField unflatten(const GridSpec& g, const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::vector<Vec3> out(g.node_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v.segment<3>(3 * Eigen::Index(i));
  return SelfDualField(g, std::move(out));
}

/// W-orthonormal basis of the span of the columns of z, dropping near-dependent directions.
inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& z, const Eigen::VectorXd& w) {
  if (z.cols() == 0) return z;
  const Eigen::MatrixXd gram = z.transpose() * w.asDiagonal() * z;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gram + gram.transpose()));
  const double top = es.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
    if (es.eigenvalues()(j) > 1e-12 * top && es.eigenvalues()(j) > 0.0) keep.push_back(j);
  Eigen::MatrixXd q(z.rows(), Eigen::Index(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    q.col(Eigen::Index(c)) = z * es.eigenvectors().col(keep[c]) / std::sqrt(es.eigenvalues()(keep[c]));
  }
  return q;
}

}  // namespace harmonic_detail

/// Energy whose minimizers are the discrete harmonic self-dual forms:
/// ||(d + d*) u||^2 plus the grid-scale stabilizer.
inline double harmonic_energy(const SelfDualOperators& ops, const SelfDualField& u) {
  return ops.dd_energy(u, nullptr) + ops.filter_energy(u);
}

/// L2-orthonormal forms spanning the eigenspaces of the stabilized Hodge energy below count_tol.
/// count_tol <= 0 selects default_count_tol.
inline HarmonicBasis harmonic_selfdual_basis(const MetricField& m, double count_tol = 0.0,
                                             const HarmonicOptions& opts = {}) {
  using harmonic_detail::flatten;
  using harmonic_detail::unflatten;
  if (opts.block < 2 || opts.guard < 0 || opts.guard >= opts.block) {
    throw InvalidArgument("harmonic_selfdual_basis: need block >= 2 and 0 <= guard < block");
  }
  const SelfDualOperators ops(m);
  const GridSpec& g = m.grid();
  if (count_tol <= 0.0) count_tol = default_count_tol(m, curvature_stack(m).R);
  const Eigen::Index n = 3 * Eigen::Index(g.node_count());
  const int p = opts.block;
  if (p > n) throw InvalidArgument("harmonic_selfdual_basis: block exceeds the problem size");

  Eigen::VectorXd w(n);
  for (std::size_t i = 0; i < g.node_count(); ++i) w.segment<3>(3 * Eigen::Index(i)).setConstant(ops.weight()[i]);

  // M = W^-1 A, with A the Hessian of half the energy; self-adjoint in <.,.>_W.
  auto apply = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const auto u = unflatten(g, x.col(c));
      const auto grad = ops.dd_energy_gradient(u, nullptr) + ops.filter_energy_gradient(u);
      y.col(c) = 0.5 * flatten(ops.to_weighted_gradient(grad));
    }
    return y;
  };

  std::mt19937_64 gen(opts.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index j = 0; j < x.size(); ++j) x.data()[j] = normal(gen);
  x = harmonic_detail::orthonormalize(x, w);
  if (x.cols() < p) throw NumericalError("harmonic_selfdual_basis: degenerate initial block");
  Eigen::MatrixXd mx = apply(x);
  Eigen::MatrixXd pdir(n, 0);
  Eigen::VectorXd theta(p);
  Eigen::VectorXd rnorm(p);

  // Rayleigh-Ritz on the initial block.
  {
    Eigen::MatrixXd t = x.transpose() * w.asDiagonal() * mx;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()));
    x = x * es.eigenvectors();
    mx = mx * es.eigenvectors();
    theta = es.eigenvalues();
  }

  const int checked = p - opts.guard;
  HarmonicBasis out;
  out.count_tol = count_tol;
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    Eigen::MatrixXd r = mx - x * theta.asDiagonal();
    for (int j = 0; j < p; ++j) rnorm(j) = std::sqrt(r.col(j).dot(w.cwiseProduct(r.col(j))));
    out.iterations = it;
    // Converged once every Ritz vector below count_tol is resolved and the next one is
    // resolved to separation_tol with its Ritz value, less its residual, clear of count_tol.
    int j = 0;
    while (j < checked && theta(j) < count_tol && rnorm(j) <= opts.residual_tol * (1.0 + std::abs(theta(j)))) ++j;
    if (j < checked && theta(j) >= count_tol && rnorm(j) <= opts.separation_tol * (1.0 + theta(j)) &&
        theta(j) - rnorm(j) >= count_tol) {
      converged = true;
      break;
    }
    // Search space [X, R, P]: R and P are made W-orthogonal to X, then orthonormalized together.
    Eigen::MatrixXd z(n, r.cols() + pdir.cols());
    z << r, pdir;
    z -= x * (x.transpose() * w.asDiagonal() * z);
    z = harmonic_detail::orthonormalize(z, w);
    z -= x * (x.transpose() * w.asDiagonal() * z);
    z = harmonic_detail::orthonormalize(z, w);
    const Eigen::MatrixXd mz = apply(z);

    const Eigen::Index k = p + z.cols();
    Eigen::MatrixXd q(n, k), mq(n, k);
    q << x, z;
    mq << mx, mz;
    Eigen::MatrixXd t = q.transpose() * w.asDiagonal() * mq;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()));
    const Eigen::MatrixXd c = es.eigenvectors().leftCols(p);
    x = q * c;
    mx = mq * c;
    pdir = z * c.bottomRows(z.cols());
    theta = es.eigenvalues().head(p);
  }
  if (!converged) {
    std::ostringstream os;
    os << "harmonic_selfdual_basis: no convergence after " << opts.max_iterations
       << " iterations; residuals";
    for (int j = 0; j < checked; ++j) os << " " << rnorm(j);
    throw NumericalError(os.str());
  }

  x = harmonic_detail::orthonormalize(x, w);
  {
    Eigen::MatrixXd t = x.transpose() * w.asDiagonal() * apply(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()));
    x = x * es.eigenvectors();
    theta = es.eigenvalues();
  }
  for (int j = 0; j < checked; ++j) out.ritz_values.push_back(theta(j));
  for (int j = 0; j < checked; ++j) {
    if (theta(j) >= count_tol) break;
    out.forms.push_back(unflatten(g, x.col(j)));
    out.quotients.push_back(theta(j));
  }
  if (int(out.forms.size()) == checked) {
    throw NumericalError("harmonic_selfdual_basis: every checked Ritz value is below count_tol; "
                         "increase the block size");
  }
  return out;
}

/// W-orthogonal projection of u onto the span of an orthonormal basis.
inline SelfDualField project_onto(const std::vector<SelfDualField>& basis, const SelfDualField& u,
                                  const MetricField& m) {
  SelfDualField acc(u.grid(), Vec3::Zero());
  for (const auto& b : basis) acc = acc + inner_product(b, u, m.vol()) * b;
  return acc;
}

}  // namespace swlab

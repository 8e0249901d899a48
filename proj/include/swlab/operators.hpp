#pragma once

// Matrix-free forward and adjoint forms of the self-dual operators, used by
// the iterative solvers. Each energy here is discretized exactly as the
// straight-line routines of selfdual.hpp discretize it, so the two routes agree
// to rounding; gradients are the exact gradients of those discrete energies.
//
// Fields of eta coefficients carry the weighted inner product
// <u, v>_W = sum_i w_i u_i . v_i with w_i = vol_i * cell volume.

#include "swlab/selfdual.hpp"

namespace swlab {

class SelfDualOperators {
 public:
  explicit SelfDualOperators(const MetricField& m) : grid_(m.grid()), gamma_(christoffel(m)) {
    const auto h = forms::selfdual_basis();
    const std::size_t n = grid_.node_count();
    embed_.resize(n);
    frame2_.resize(n);
    frame3_.resize(n);
    frame_.resize(n);
    std::vector<double> w(n);
    const double cell = grid_.cell_volume();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(n); ++ii) {
      const std::size_t i = std::size_t(ii);
      const Mat4& e = m.coframe()[i];
      const Mat4& fr = m.frame()[i];
      embed_[i] = forms::compound<2>(e.transpose()) * h;
      frame2_[i] = h.transpose() * forms::compound<2>(fr.transpose());
      frame3_[i] = forms::compound<3>(fr.transpose());
      frame_[i] = fr;
      w[i] = m.vol()[i] * cell;
    }
    weight_ = ScalarField(grid_, std::move(w));
  }

  const GridSpec& grid() const { return grid_; }
  /// Per-node quadrature weights vol * cell volume.
  const ScalarField& weight() const { return weight_; }

  double inner(const SelfDualField& u, const SelfDualField& v) const {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += weight_[i] * u[i].dot(v[i]);
    return s;
  }
  double norm2(const SelfDualField& u) const { return inner(u, u); }

  // -------------------------------------------------------------------------
  // (d + d*)(f u), f a scalar multiplier. On Lambda^+ the d* part has the
  // same pointwise norm as the d part, so the energy is 2 ||C3(E^T) d F||^2.

  ThreeFormField dd_forward(const SelfDualField& u, const ScalarField* f) const {
    const auto v = generate_indexed(grid_, [&](std::size_t i) -> Vec6 {
      return (f ? (*f)[i] : 1.0) * (embed_[i] * u[i]);
    });
    std::vector<Vec4> z(v.size(), Vec4::Zero());
    for (int k = 0; k < 4; ++k) {
      const auto t = forms::d_table<2>(k);
      const auto dv = partial_derivative(v, k);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += t * dv[i];
    }
    return generate_indexed(grid_, [&](std::size_t i) -> Vec4 { return frame3_[i] * z[i]; });
  }

  /// Transpose of dd_forward applied to r (Euclidean component pairing).
  SelfDualField dd_adjoint(const ThreeFormField& r, const ScalarField* f) const {
    const auto zbar = generate_indexed(grid_, [&](std::size_t i) -> Vec4 { return frame3_[i].transpose() * r[i]; });
    std::vector<Vec6> vbar(zbar.size(), Vec6::Zero());
    for (int k = 0; k < 4; ++k) {
      const auto tt = forms::d_table<2>(k).transpose().eval();
      const auto d = partial_derivative(map(zbar, [&](const Vec4& x) -> Vec6 { return tt * x; }), k);
      for (std::size_t i = 0; i < vbar.size(); ++i) vbar[i] -= d[i];
    }
    return generate_indexed(grid_, [&](std::size_t i) -> Vec3 {
      return (f ? (*f)[i] : 1.0) * (embed_[i].transpose() * vbar[i]);
    });
  }

  double dd_energy(const SelfDualField& u, const ScalarField* f) const {
    const auto y = dd_forward(u, f);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += weight_[i] * y[i].squaredNorm();
    return 2.0 * s;
  }

  /// Euclidean gradient of dd_energy.
  SelfDualField dd_energy_gradient(const SelfDualField& u, const ScalarField* f) const {
    const auto y = dd_forward(u, f);
    return dd_adjoint(generate_indexed(grid_, [&](std::size_t i) -> Vec4 { return 4.0 * weight_[i] * y[i]; }), f);
  }

  // -------------------------------------------------------------------------
  // nabla(f u) in the frame and eta basis.

  NablaSelfDualField nabla_forward(const SelfDualField& u, const ScalarField* f) const {
    const auto v = generate_indexed(grid_, [&](std::size_t i) -> Vec6 {
      return (f ? (*f)[i] : 1.0) * (embed_[i] * u[i]);
    });
    std::array<TwoFormField, 4> dv;
    for (int mu = 0; mu < 4; ++mu) dv[mu] = partial_derivative(v, mu);
    return generate_indexed(grid_, [&](std::size_t i) -> NablaSelfDual {
      Eigen::Matrix<double, 3, 4> coord;
      for (int mu = 0; mu < 4; ++mu)
        coord.col(mu) = frame2_[i] * (dv[mu][i] - sd_detail::gamma_action(gamma_[i], mu, v[i]));
      return frame_[i].transpose() * coord.transpose();
    });
  }

  SelfDualField nabla_adjoint(const NablaSelfDualField& r, const ScalarField* f) const {
    using Cols = Eigen::Matrix<double, 6, 4>;
    const auto tbar = generate_indexed(grid_, [&](std::size_t i) -> Cols {
      const Eigen::Matrix<double, 4, 3> byaxis = frame_[i] * r[i];  // (mu, A)
      return frame2_[i].transpose() * byaxis.transpose();
    });
    std::vector<Vec6> vbar(tbar.size(), Vec6::Zero());
    for (int mu = 0; mu < 4; ++mu) {
      const auto d = partial_derivative(map(tbar, [mu](const Cols& c) -> Vec6 { return c.col(mu); }), mu);
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(vbar.size()); ++ii) {
        const std::size_t i = std::size_t(ii);
        vbar[i] -= d[i] + sd_detail::gamma_action_transpose(gamma_[i], mu, tbar[i].col(mu));
      }
    }
    return generate_indexed(grid_, [&](std::size_t i) -> Vec3 {
      return (f ? (*f)[i] : 1.0) * (embed_[i].transpose() * vbar[i]);
    });
  }

  double nabla_energy(const SelfDualField& u, const ScalarField* f) const {
    const auto y = nabla_forward(u, f);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += weight_[i] * y[i].squaredNorm();
    return s;
  }

  SelfDualField nabla_energy_gradient(const SelfDualField& u, const ScalarField* f) const {
    const auto y = nabla_forward(u, f);
    return nabla_adjoint(map_weighted(y, 2.0), f);
  }

  // -------------------------------------------------------------------------
  // ||nabla |u|_eps||^2 with |u|_eps = sqrt(|u|^2 + eps^2) - eps.

  double kato_energy(const SelfDualField& u, double eps) const {
    const auto g = frame_gradient_of(smoothed_norm(u, eps));
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += weight_[i] * g[i].squaredNorm();
    return s;
  }

  SelfDualField kato_energy_gradient(const SelfDualField& u, double eps) const {
    const auto g = frame_gradient_of(smoothed_norm(u, eps));
    const auto r = generate_indexed(grid_, [&](std::size_t i) -> Vec4 {
      return frame_[i] * (2.0 * weight_[i] * g[i]);
    });
    std::vector<double> phibar(u.size(), 0.0);
    for (int k = 0; k < 4; ++k) {
      const auto d = partial_derivative(map(r, [k](const Vec4& x) { return x(k); }), k);
      for (std::size_t i = 0; i < phibar.size(); ++i) phibar[i] -= d[i];
    }
    return generate_indexed(grid_, [&](std::size_t i) -> Vec3 {
      const double n = std::sqrt(u[i].squaredNorm() + eps * eps);
      return n > 0.0 ? Vec3(phibar[i] / n * u[i]) : Vec3(Vec3::Zero());
    });
  }

  // -------------------------------------------------------------------------
  // Grid-scale stabilizer sum_k h_k^-2 ||N_k u||^2, N_k the Nyquist filter.
  // It vanishes to O(h^4) on smooth fields and is O(h^-2) on doubler modes.

  double filter_energy(const SelfDualField& u) const {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double h = grid_.spacing(k);
      const auto nu = nyquist_filter(u, k);
      double sk = 0.0;
      for (std::size_t i = 0; i < nu.size(); ++i) sk += weight_[i] * nu[i].squaredNorm();
      s += sk / (h * h);
    }
    return s;
  }

  SelfDualField filter_energy_gradient(const SelfDualField& u) const {
    std::vector<Vec3> g(u.size(), Vec3::Zero());
    for (int k = 0; k < 4; ++k) {
      const double h = grid_.spacing(k);
      const auto nu = nyquist_filter(u, k);
      const auto back = nyquist_filter(
          generate_indexed(grid_, [&](std::size_t i) -> Vec3 { return 2.0 * weight_[i] / (h * h) * nu[i]; }), k);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += back[i];
    }
    return SelfDualField(grid_, std::move(g));
  }

  /// Euclidean gradient divided by the weights: the gradient in <.,.>_W.
  SelfDualField to_weighted_gradient(const SelfDualField& g) const {
    return generate_indexed(grid_, [&](std::size_t i) -> Vec3 { return g[i] / weight_[i]; });
  }

 private:
  NablaSelfDualField map_weighted(const NablaSelfDualField& y, double factor) const {
    return generate_indexed(grid_, [&](std::size_t i) -> NablaSelfDual { return factor * weight_[i] * y[i]; });
  }

  ScalarField smoothed_norm(const SelfDualField& u, double eps) const {
    return map(u, [eps](const Vec3& v) { return std::sqrt(v.squaredNorm() + eps * eps) - eps; });
  }

  OneFormField frame_gradient_of(const ScalarField& phi) const {
    std::array<ScalarField, 4> d;
    for (int k = 0; k < 4; ++k) d[k] = partial_derivative(phi, k);
    return generate_indexed(grid_, [&](std::size_t i) -> Vec4 {
      return frame_[i].transpose() * Vec4(d[0][i], d[1][i], d[2][i], d[3][i]);
    });
  }

  GridSpec grid_;
  Field<ChristoffelSymbols> gamma_;
  std::vector<Eigen::Matrix<double, 6, 3>> embed_;   // C2(e^T) H
  std::vector<Eigen::Matrix<double, 3, 6>> frame2_;  // H^T C2(E^T)
  std::vector<Mat4> frame3_;                         // C3(E^T)
  std::vector<Mat4> frame_;                          // E
  ScalarField weight_;
};

}  // namespace swlab

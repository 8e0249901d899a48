#pragma once

// Riemannian metric samples with inverse, volume weight and orthonormal coframe.

#include "swlab/forms.hpp"

#include <optional>

namespace swlab {

/// Christoffel symbols at one node: gamma[k](i, j) = Gamma^k_{ij}.
using ChristoffelSymbols = std::array<Mat4, 4>;

class MetricField {
 public:
  MetricField() = default;

  const GridSpec& grid() const { return g_.grid(); }
  const SymmetricTensorField& g() const { return g_; }
  const SymmetricTensorField& g_inv() const { return g_inv_; }
  const ScalarField& vol() const { return vol_; }
  /// Rows are the coframe covectors: theta^a = coframe(a, mu) dx^mu, coframe^T coframe = g.
  const Field<Mat4>& coframe() const { return coframe_; }
  /// Inverse of the coframe: E_a = frame(mu, a) d/dx^mu.
  const Field<Mat4>& frame() const { return frame_; }
  bool is_flat() const { return flat_; }

  /// Same metric with the coframe replaced by Q * coframe for a constant Q in SO(4).
  MetricField with_frame_rotation(const Mat4& q) const {
    if ((q.transpose() * q - Mat4::Identity()).cwiseAbs().maxCoeff() > 1e-12 ||
        q.determinant() < 0.0) {
      throw InvalidArgument("with_frame_rotation: Q must be a proper rotation");
    }
    MetricField out = *this;
    out.coframe_ = map(coframe_, [&](const Mat4& e) -> Mat4 { return q * e; });
    out.frame_ = map(out.coframe_, [](const Mat4& e) -> Mat4 { return e.inverse(); });
    return out;
  }

  friend MetricField build_metric(const SymmetricTensorField& g);

 private:
  SymmetricTensorField g_;
  SymmetricTensorField g_inv_;
  ScalarField vol_;
  Field<Mat4> coframe_;
  Field<Mat4> frame_;
  bool flat_ = false;
};

/// Validates symmetry and positive definiteness node by node; coframe is the upper Cholesky factor.
inline MetricField build_metric(const SymmetricTensorField& g) {
  require_finite(g, "build_metric");
  const GridSpec& grid = g.grid();
  const std::size_t n = grid.node_count();
  MetricField m;
  std::vector<Mat4> ginv(n), e(n), E(n);
  std::vector<double> vol(n);
  bool flat = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Mat4& gi = g[i];
    const double scale = std::max(1.0, gi.cwiseAbs().maxCoeff());
    if ((gi - gi.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InvalidArgument("build_metric: metric not symmetric at node " + std::to_string(i));
    }
    Eigen::LLT<Mat4> llt(gi);
    if (llt.info() != Eigen::Success) {
      const auto c = grid.coords(i);
      throw InvalidArgument("build_metric: metric not positive definite at node " +
                            std::to_string(i) + " (" + std::to_string(c[0]) + "," +
                            std::to_string(c[1]) + "," + std::to_string(c[2]) + "," +
                            std::to_string(c[3]) + ")");
    }
    const Mat4 upper = llt.matrixU();
    e[i] = upper;
    E[i] = upper.triangularView<Eigen::Upper>().solve(Mat4::Identity());
    ginv[i] = E[i] * E[i].transpose();
    vol[i] = upper.diagonal().prod();
    flat = flat && (gi == Mat4::Identity());
  }
  m.g_ = g;
  m.g_inv_ = SymmetricTensorField(grid, std::move(ginv));
  m.vol_ = ScalarField(grid, std::move(vol));
  m.coframe_ = Field<Mat4>(grid, std::move(e));
  m.frame_ = Field<Mat4>(grid, std::move(E));
  m.flat_ = flat;
  return m;
}

inline MetricField flat_metric(const GridSpec& grid) {
  return build_metric(SymmetricTensorField(grid, Mat4::Identity()));
}

/// Conformally flat metric e^{2f} delta.
inline MetricField conformal_metric(const ScalarField& f) {
  return build_metric(map(f, [](double fi) -> Mat4 { return std::exp(2.0 * fi) * Mat4::Identity(); }));
}

/// Kaehler product of the flat (x0, x1) torus with the surface e^{2u}(dx2^2 + dx3^2).
/// u must not depend on x0 or x1.
inline MetricField kaehler_product_metric(const ScalarField& u) {
  for (int a = 0; a < 2; ++a) {
    const auto du = partial_derivative(u, a);
    for (std::size_t i = 0; i < du.size(); ++i) {
      if (std::abs(du[i]) > 1e-12 * (1.0 + std::abs(u[i]))) {
        throw InvalidArgument("kaehler_product_metric: u depends on x" + std::to_string(a));
      }
    }
  }
  return build_metric(map(u, [](double ui) -> Mat4 {
    const double e = std::exp(2.0 * ui);
    return Vec4(1.0, 1.0, e, e).asDiagonal();
  }));
}

/// First derivatives of the metric components, one field per axis.
inline std::array<SymmetricTensorField, 4> metric_derivatives(const MetricField& m) {
  std::array<SymmetricTensorField, 4> dg;
  for (int a = 0; a < 4; ++a) dg[a] = partial_derivative(m.g(), a);
  return dg;
}

inline ChristoffelSymbols christoffel_at(const Mat4& ginv, const std::array<Mat4, 4>& dg) {
  // first[k](i, j) = Gamma_{k i j} = (d_i g_kj + d_j g_ki - d_k g_ij) / 2
  ChristoffelSymbols first;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        first[k](i, j) = 0.5 * (dg[i](k, j) + dg[j](k, i) - dg[k](i, j));
  ChristoffelSymbols up;
  for (int k = 0; k < 4; ++k) {
    up[k].setZero();
    for (int l = 0; l < 4; ++l) up[k] += ginv(k, l) * first[l];
  }
  return up;
}

inline Field<ChristoffelSymbols> christoffel(const MetricField& m) {
  const GridSpec& grid = m.grid();
  if (m.is_flat()) {
    ChristoffelSymbols zero;
    for (auto& z : zero) z.setZero();
    return Field<ChristoffelSymbols>(grid, zero);
  }
  const auto dg = metric_derivatives(m);
  return generate_indexed(grid, [&](std::size_t i) {
    return christoffel_at(m.g_inv()[i], {dg[0][i], dg[1][i], dg[2][i], dg[3][i]});
  });
}

}  // namespace swlab

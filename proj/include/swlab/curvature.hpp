#pragma once

// Curvature of a sampled metric: Riemann in the orthonormal frame, scalar
// curvature, self-dual Weyl endomorphism and its lowest eigenvalue.
//
// Sign convention: R_{abab} is the sectional curvature of the (a, b) plane,
// Ric_{bd} = sum_a R_{abad}, so round spheres have R > 0.

#include "swlab/metric.hpp"

namespace swlab {

struct CurvatureBundle {
  ScalarField R;
  Field<Mat3> Wplus;
  ScalarField w;
};

/// Smallest eigenvalue of a symmetric 3x3 matrix.
inline double lowest_eigenvalue(const Mat3& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("lowest_eigenvalue: matrix is not symmetric");
  }
  if (!a.allFinite()) throw NumericalError("lowest_eigenvalue: non-finite entry");
  Eigen::SelfAdjointEigenSolver<Mat3> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

namespace curvature_detail {

/// R_{abcd} from the pair-indexed 6x6 matrix (any index order).
inline double component(const Mat6& r6, int a, int b, int c, int d) {
  if (a == b || c == d) return 0.0;
  double sign = 1.0;
  if (a > b) { std::swap(a, b); sign = -sign; }
  if (c > d) { std::swap(c, d); sign = -sign; }
  return sign * r6(forms::subset_index<2>({a, b, 0, 0}), forms::subset_index<2>({c, d, 0, 0}));
}

inline Mat4 ricci(const Mat6& r6) {
  Mat4 ric = Mat4::Zero();
  for (int b = 0; b < 4; ++b)
    for (int d = 0; d < 4; ++d)
      for (int a = 0; a < 4; ++a) ric(b, d) += component(r6, a, b, a, d);
  return ric;
}

}  // namespace curvature_detail

/// Weyl part of a frame curvature tensor (pair-indexed).
inline Mat6 weyl_from_riemann(const Mat6& r6) {
  const Mat4 ric = curvature_detail::ricci(r6);
  const double scal = ric.trace();
  auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };
  Mat6 w6;
  for (int p = 0; p < 6; ++p) {
    const auto P = forms::subset<2>(p);
    const int a = P[0], b = P[1];
    for (int q = 0; q < 6; ++q) {
      const auto Q = forms::subset<2>(q);
      const int c = Q[0], d = Q[1];
      const double ricci_part = 0.5 * (delta(a, c) * ric(b, d) - delta(a, d) * ric(b, c) -
                                       delta(b, c) * ric(a, d) + delta(b, d) * ric(a, c));
      const double scalar_part = scal / 6.0 * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c));
      w6(p, q) = r6(p, q) - ricci_part + scalar_part;
    }
  }
  return w6;
}

/// Restriction of a pair-indexed operator to the self-dual basis: M_AB = eta_A . W eta_B.
inline Mat3 selfdual_block(const Mat6& w6) {
  const auto h = forms::selfdual_basis();
  Mat3 out = h.transpose() * w6 * h;
  return 0.5 * (out + out.transpose());
}

/// Frame components R_{abcd} (pair-indexed 6x6) of the Riemann tensor at every node.
inline Field<Mat6> frame_riemann(const MetricField& m) {
  const GridSpec& grid = m.grid();
  if (m.is_flat()) return Field<Mat6>(grid, Mat6::Zero());

  const auto dg = metric_derivatives(m);
  // Second derivatives: pure ones by the compact stencil, mixed ones by composition.
  std::array<std::array<const SymmetricTensorField*, 4>, 4> dd{};
  std::vector<SymmetricTensorField> store;
  store.reserve(10);
  for (int a = 0; a < 4; ++a) store.push_back(second_derivative(m.g(), a));
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) store.push_back(partial_derivative(dg[a], b));
  {
    std::size_t k = 0;
    for (int a = 0; a < 4; ++a) dd[a][a] = &store[k++];
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        dd[a][b] = &store[k];
        dd[b][a] = &store[k++];
      }
  }

  return generate_indexed(grid, [&](std::size_t i) {
    const Mat4& g = m.g()[i];
    const Mat4& ginv = m.g_inv()[i];
    const std::array<Mat4, 4> dgi = {dg[0][i], dg[1][i], dg[2][i], dg[3][i]};
    const ChristoffelSymbols up = christoffel_at(ginv, dgi);
    // low[k](i, j) = Gamma_{k i j}
    ChristoffelSymbols low;
    for (int k = 0; k < 4; ++k) {
      low[k].setZero();
      for (int l = 0; l < 4; ++l) low[k] += g(k, l) * up[l];
    }
    auto ddg = [&](int a, int b, int r, int s) { return (*dd[a][b])[i](r, s); };
    Mat6 rc;
    for (int p = 0; p < 6; ++p) {
      const auto P = forms::subset<2>(p);
      const int rho = P[0], sig = P[1];
      for (int q = 0; q < 6; ++q) {
        const auto Q = forms::subset<2>(q);
        const int mu = Q[0], nu = Q[1];
        double v = 0.5 * (ddg(sig, mu, rho, nu) + ddg(rho, nu, sig, mu) - ddg(sig, nu, rho, mu) -
                          ddg(rho, mu, sig, nu));
        for (int al = 0; al < 4; ++al) {
          v += up[al](sig, mu) * low[al](rho, nu) - up[al](sig, nu) * low[al](rho, mu);
        }
        rc(p, q) = v;
      }
    }
    const Mat6 c2 = forms::compound<2>(m.frame()[i]);
    return Mat6(c2.transpose() * rc * c2);
  });
}

inline CurvatureBundle curvature_from_riemann(const Field<Mat6>& r6) {
  CurvatureBundle cb;
  const GridSpec& grid = r6.grid();
  std::vector<double> R(grid.node_count()), w(grid.node_count());
  std::vector<Mat3> wp(grid.node_count());
  const std::ptrdiff_t n = std::ptrdiff_t(grid.node_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::size_t i = std::size_t(k);
    R[i] = curvature_detail::ricci(r6[i]).trace();
    wp[i] = selfdual_block(weyl_from_riemann(r6[i]));
    w[i] = wp[i].allFinite() ? lowest_eigenvalue(wp[i]) : std::nan("");
  }
  cb.R = ScalarField(grid, std::move(R));
  cb.Wplus = Field<Mat3>(grid, std::move(wp));
  cb.w = ScalarField(grid, std::move(w));
  require_finite(cb.R, "curvature_stack");
  require_finite(cb.w, "curvature_stack");
  return cb;
}

inline CurvatureBundle curvature_stack(const MetricField& m) {
  return curvature_from_riemann(frame_riemann(m));
}

}  // namespace swlab

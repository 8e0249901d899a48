#pragma once

// Exterior algebra of R^4: k-form component layouts, compound matrices,
// flat Hodge star, exterior derivative and wedge on grid fields.
//
// A k-form is stored as its C(4,k) strictly increasing components in
// lexicographic order:
//   k = 1: 0 1 2 3
//   k = 2: 01 02 03 12 13 23
//   k = 3: 012 013 023 123

#include "swlab/grid.hpp"

#include <array>

namespace swlab {

namespace forms {

inline constexpr std::array<int, 5> kDim = {1, 4, 6, 4, 1};

template <int K>
using Comp = Eigen::Matrix<double, kDim[K], 1>;

/// Axis list of the i-th basis element of degree K.
template <int K>
constexpr std::array<int, 4> subset(int i) {
  if constexpr (K == 0) {
    return {0, 0, 0, 0};
  } else if constexpr (K == 1) {
    return {i, 0, 0, 0};
  } else if constexpr (K == 2) {
    constexpr int t[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    return {t[i][0], t[i][1], 0, 0};
  } else if constexpr (K == 3) {
    constexpr int t[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    return {t[i][0], t[i][1], t[i][2], 0};
  } else {
    return {0, 1, 2, 3};
  }
}

/// Index of the sorted subset `s` (length K) among degree-K basis elements.
template <int K>
constexpr int subset_index(const std::array<int, 4>& s) {
  for (int i = 0; i < kDim[K]; ++i) {
    const auto t = subset<K>(i);
    bool eq = true;
    for (int j = 0; j < K; ++j) eq = eq && (t[j] == s[j]);
    if (eq) return i;
  }
  return -1;
}

/// C_K(M): matrix of K x K minors, rows and columns indexed by degree-K subsets.
/// C_K(AB) = C_K(A) C_K(B) and C_K(M^T) = C_K(M)^T.
template <int K>
Eigen::Matrix<double, kDim[K], kDim[K]> compound(const Mat4& m) {
  Eigen::Matrix<double, kDim[K], kDim[K]> c;
  if constexpr (K == 0) {
    c(0, 0) = 1.0;
  } else if constexpr (K == 1) {
    c = m;
  } else if constexpr (K == 4) {
    c(0, 0) = m.determinant();
  } else {
    for (int r = 0; r < kDim[K]; ++r) {
      const auto I = subset<K>(r);
      for (int q = 0; q < kDim[K]; ++q) {
        const auto J = subset<K>(q);
        Eigen::Matrix<double, K, K> sub;
        for (int a = 0; a < K; ++a)
          for (int b = 0; b < K; ++b) sub(a, b) = m(I[a], J[b]);
        c(r, q) = sub.determinant();
      }
    }
  }
  return c;
}

namespace detail {
constexpr int permutation_sign(std::array<int, 4> p) {
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}
}  // namespace detail

/// Flat Hodge star on orthonormal-frame components, degree K -> 4-K.
template <int K>
Eigen::Matrix<double, kDim[4 - K], kDim[K]> star_matrix() {
  Eigen::Matrix<double, kDim[4 - K], kDim[K]> s = Eigen::Matrix<double, kDim[4 - K], kDim[K]>::Zero();
  for (int i = 0; i < kDim[K]; ++i) {
    const auto I = subset<K>(i);
    std::array<int, 4> comp{};
    std::array<bool, 4> used{};
    for (int a = 0; a < K; ++a) used[I[a]] = true;
    int n = 0;
    for (int a = 0; a < 4; ++a)
      if (!used[a]) comp[n++] = a;
    std::array<int, 4> perm{};
    for (int a = 0; a < K; ++a) perm[a] = I[a];
    for (int a = 0; a < 4 - K; ++a) perm[K + a] = comp[a];
    s(subset_index<4 - K>(comp), i) = detail::permutation_sign(perm);
  }
  return s;
}

/// Selection table A_axis with (d alpha) = sum_axis A_axis * d_axis(alpha) on degree-K components.
template <int K>
Eigen::Matrix<double, kDim[K + 1], kDim[K]> d_table(int axis) {
  Eigen::Matrix<double, kDim[K + 1], kDim[K]> t = Eigen::Matrix<double, kDim[K + 1], kDim[K]>::Zero();
  for (int j = 0; j < kDim[K + 1]; ++j) {
    const auto J = subset<K + 1>(j);
    for (int p = 0; p <= K; ++p) {
      if (J[p] != axis) continue;
      std::array<int, 4> rest{};
      int n = 0;
      for (int q = 0; q <= K; ++q)
        if (q != p) rest[n++] = J[q];
      t(j, subset_index<K>(rest)) = (p % 2 == 0) ? 1.0 : -1.0;
    }
  }
  return t;
}

/// The three self-dual basis 2-forms (columns), orthonormal under the frame metric.
inline Eigen::Matrix<double, 6, 3> selfdual_basis() {
  Eigen::Matrix<double, 6, 3> h = Eigen::Matrix<double, 6, 3>::Zero();
  const double r = 1.0 / kSqrt2;
  h(0, 0) = r;  h(5, 0) = r;   // e01 + e23
  h(1, 1) = r;  h(4, 1) = -r;  // e02 - e13
  h(2, 2) = r;  h(3, 2) = r;   // e03 + e12
  return h;
}

/// The three anti-self-dual basis 2-forms (columns).
inline Eigen::Matrix<double, 6, 3> antiselfdual_basis() {
  Eigen::Matrix<double, 6, 3> h = Eigen::Matrix<double, 6, 3>::Zero();
  const double r = 1.0 / kSqrt2;
  h(0, 0) = r;  h(5, 0) = -r;
  h(1, 1) = r;  h(4, 1) = r;
  h(2, 2) = r;  h(3, 2) = -r;
  return h;
}

/// Coefficient of dx0^dx1^dx2^dx3 in alpha ^ beta for two 2-forms.
inline double wedge22(const Vec6& a, const Vec6& b) {
  return a(0) * b(5) - a(1) * b(4) + a(2) * b(3) + a(3) * b(2) - a(4) * b(1) + a(5) * b(0);
}

}  // namespace forms

/// Exterior derivative of a coordinate-component K-form field.
template <int K>
Field<forms::Comp<K + 1>> exterior_derivative(const Field<forms::Comp<K>>& alpha) {
  static_assert(K >= 0 && K < 4);
  using Out = forms::Comp<K + 1>;
  std::vector<Out> acc(alpha.size(), Out::Zero());
  for (int axis = 0; axis < 4; ++axis) {
    const auto table = forms::d_table<K>(axis);
    const auto da = partial_derivative(alpha, axis);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += table * da[i];
  }
  return Field<Out>(alpha.grid(), std::move(acc));
}

}  // namespace swlab

#pragma once

// Periodic 4D lattice charts, node-valued fields, finite differences and
// metric-weighted quadrature.

#include "swlab/core.hpp"

#include <array>
#include <cstddef>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

namespace swlab {

class GridSpec {
 public:
  static constexpr int kMinDims = 4;

  GridSpec() : GridSpec({kMinDims, kMinDims, kMinDims, kMinDims}) {}

  explicit GridSpec(std::array<int, 4> dims,
                    std::array<double, 4> periods = {2 * kPi, 2 * kPi, 2 * kPi, 2 * kPi})
      : dims_(dims), periods_(periods) {
    for (int a = 0; a < 4; ++a) {
      if (dims_[a] < kMinDims) {
        throw InvalidArgument("GridSpec: dims[" + std::to_string(a) + "] = " +
                              std::to_string(dims_[a]) + " is below the minimum of 4");
      }
      if (!(periods_[a] > 0.0) || !std::isfinite(periods_[a])) {
        throw InvalidArgument("GridSpec: periods[" + std::to_string(a) + "] must be positive");
      }
    }
    strides_[3] = 1;
    for (int a = 2; a >= 0; --a) strides_[a] = strides_[a + 1] * std::size_t(dims_[a + 1]);
  }

  static GridSpec cube(int n, double period = 2 * kPi) {
    return GridSpec({n, n, n, n}, {period, period, period, period});
  }

  const std::array<int, 4>& dims() const { return dims_; }
  const std::array<double, 4>& periods() const { return periods_; }
  int dim(int axis) const { return dims_[axis]; }
  double period(int axis) const { return periods_[axis]; }
  double spacing(int axis) const { return periods_[axis] / dims_[axis]; }
  std::size_t stride(int axis) const { return strides_[axis]; }
  std::size_t node_count() const { return strides_[0] * std::size_t(dims_[0]); }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < 4; ++a) v *= spacing(a);
    return v;
  }
  double coordinate_volume() const {
    return periods_[0] * periods_[1] * periods_[2] * periods_[3];
  }

  std::array<int, 4> coords(std::size_t node) const {
    std::array<int, 4> c{};
    for (int a = 0; a < 4; ++a) {
      c[a] = int(node / strides_[a]);
      node -= std::size_t(c[a]) * strides_[a];
    }
    return c;
  }

  std::size_t index(const std::array<int, 4>& c) const {
    std::size_t idx = 0;
    for (int a = 0; a < 4; ++a) {
      int ca = c[a] % dims_[a];
      if (ca < 0) ca += dims_[a];
      idx += std::size_t(ca) * strides_[a];
    }
    return idx;
  }

  Vec4 position(std::size_t node) const {
    const auto c = coords(node);
    return {c[0] * spacing(0), c[1] * spacing(1), c[2] * spacing(2), c[3] * spacing(3)};
  }

  bool operator==(const GridSpec& o) const { return dims_ == o.dims_ && periods_ == o.periods_; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }

  std::string describe() const {
    std::ostringstream os;
    os << dims_[0] << "x" << dims_[1] << "x" << dims_[2] << "x" << dims_[3];
    return os.str();
  }

 private:
  std::array<int, 4> dims_;
  std::array<double, 4> periods_;
  std::array<std::size_t, 4> strides_{};
};

namespace detail {
template <class T, class = void>
struct plain {
  using type = T;
};
template <class T>
struct plain<T, std::enable_if_t<std::is_base_of_v<Eigen::EigenBase<T>, T>>> {
  using type = typename T::PlainObject;
};
}  // namespace detail

template <class T>
using plain_t = typename detail::plain<std::decay_t<T>>::type;

/// Node-valued field on a periodic chart. Storage is axis-major (axis 3 fastest).
template <class T>
class Field {
 public:
  using value_type = T;

  Field() = default;
  Field(const GridSpec& grid, const T& fill) : grid_(grid), values_(grid.node_count(), fill) {}
  Field(const GridSpec& grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count()) {
      throw InvalidArgument("Field: value count " + std::to_string(values_.size()) +
                            " does not match node count " + std::to_string(grid_.node_count()));
    }
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& operator[](std::size_t i) { return values_[i]; }
  const std::vector<T>& values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  /// Index of the first non-finite node, or size() when all are finite.
  std::size_t first_non_finite() const {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!all_finite(values_[i])) return i;
    return values_.size();
  }

 private:
  GridSpec grid_;
  std::vector<T> values_;
};

using ScalarField = Field<double>;
using OneFormField = Field<Vec4>;
using TwoFormField = Field<Vec6>;
using ThreeFormField = Field<Vec4>;
using SelfDualField = Field<Vec3>;
using SymmetricTensorField = Field<Mat4>;

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": grid mismatch (" + a.describe() + " vs " +
                          b.describe() + ")");
  }
}

template <class T>
void require_finite(const Field<T>& f, const char* what) {
  const std::size_t bad = f.first_non_finite();
  if (bad != f.size()) {
    const auto c = f.grid().coords(bad);
    std::ostringstream os;
    os << what << ": non-finite value at node " << bad << " (" << c[0] << "," << c[1] << ","
       << c[2] << "," << c[3] << ")";
    throw NumericalError(os.str());
  }
}

/// Field from a function of the node position x (coordinates in [0, period)).
template <class F>
auto generate(const GridSpec& grid, F&& f) {
  using T = plain_t<std::invoke_result_t<F&, const Vec4&>>;
  std::vector<T> v(grid.node_count());
  const std::ptrdiff_t n = std::ptrdiff_t(v.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) v[std::size_t(i)] = f(grid.position(std::size_t(i)));
  return Field<T>(grid, std::move(v));
}

/// Field from a function of the flat node index.
template <class F>
auto generate_indexed(const GridSpec& grid, F&& f) {
  using T = plain_t<std::invoke_result_t<F&, std::size_t>>;
  std::vector<T> v(grid.node_count());
  const std::ptrdiff_t n = std::ptrdiff_t(v.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) v[std::size_t(i)] = f(std::size_t(i));
  return Field<T>(grid, std::move(v));
}

template <class T, class F>
auto map(const Field<T>& a, F&& f) {
  return generate_indexed(a.grid(), [&](std::size_t i) { return f(a[i]); });
}

template <class A, class B, class F>
auto zip(const Field<A>& a, const Field<B>& b, F&& f) {
  require_same_grid(a.grid(), b.grid(), "zip");
  return generate_indexed(a.grid(), [&](std::size_t i) { return f(a[i], b[i]); });
}

template <class T>
Field<T> operator+(const Field<T>& a, const Field<T>& b) {
  return zip(a, b, [](const T& x, const T& y) -> T { return x + y; });
}
template <class T>
Field<T> operator-(const Field<T>& a, const Field<T>& b) {
  return zip(a, b, [](const T& x, const T& y) -> T { return x - y; });
}
template <class T>
Field<T> operator*(double s, const Field<T>& a) {
  return map(a, [s](const T& x) -> T { return s * x; });
}
/// Pointwise product of a scalar field with any field.
template <class T>
Field<T> operator*(const ScalarField& s, const Field<T>& a) {
  return zip(s, a, [](double x, const T& y) -> T { return x * y; });
}

// ---------------------------------------------------------------------------
// Finite differences

namespace stencil {
// 6th-order central first derivative: offsets 1..3, antisymmetric.
inline constexpr std::array<double, 3> kFirst = {45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0};
// 6th-order central second derivative: centre and offsets 1..3, symmetric.
inline constexpr double kSecondCentre = -49.0 / 18.0;
inline constexpr std::array<double, 3> kSecond = {3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
inline constexpr int kRadius = 3;
}  // namespace stencil

namespace detail {

// Visits every node with the wrapped neighbour indices at offsets -3..3 along `axis`.
template <class Visit>
void for_each_line_node(const GridSpec& g, int axis, Visit&& visit) {
  const std::size_t n = std::size_t(g.dim(axis));
  const std::size_t stride = g.stride(axis);
  const std::size_t block = n * stride;
  const std::size_t outer = g.node_count() / block;
  std::vector<std::array<std::ptrdiff_t, 7>> offsets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int o = -stencil::kRadius; o <= stencil::kRadius; ++o) {
      const std::ptrdiff_t j = (std::ptrdiff_t(i) + o + 7 * std::ptrdiff_t(n)) % std::ptrdiff_t(n);
      offsets[i][std::size_t(o + stencil::kRadius)] =
          (j - std::ptrdiff_t(i)) * std::ptrdiff_t(stride);
    }
  }
  const std::ptrdiff_t lines = std::ptrdiff_t(outer * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t oi = 0; oi < lines; ++oi) {
    const std::size_t o = std::size_t(oi) / n;
    const std::size_t i = std::size_t(oi) % n;
    const std::size_t base = o * block + i * stride;
    for (std::size_t in = 0; in < stride; ++in) visit(base + in, offsets[i]);
  }
}

}  // namespace detail

/// d f / d x_axis by the 6th-order central stencil with periodic wraparound.
template <class T>
Field<T> partial_derivative(const Field<T>& f, int axis) {
  if (axis < 0 || axis > 3) throw InvalidArgument("partial_derivative: axis must be in 0..3");
  require_finite(f, "partial_derivative");
  const GridSpec& g = f.grid();
  const double inv_h = 1.0 / g.spacing(axis);
  std::vector<T> out(g.node_count());
  detail::for_each_line_node(g, axis, [&](std::size_t idx, const std::array<std::ptrdiff_t, 7>& off) {
    const T* p = &f[idx];
    T acc = stencil::kFirst[0] * (p[off[4]] - p[off[2]]);
    acc += stencil::kFirst[1] * (p[off[5]] - p[off[1]]);
    acc += stencil::kFirst[2] * (p[off[6]] - p[off[0]]);
    out[idx] = inv_h * acc;
  });
  return Field<T>(g, std::move(out));
}

/// d^2 f / d x_axis^2 by the compact 6th-order central stencil.
template <class T>
Field<T> second_derivative(const Field<T>& f, int axis) {
  if (axis < 0 || axis > 3) throw InvalidArgument("second_derivative: axis must be in 0..3");
  require_finite(f, "second_derivative");
  const GridSpec& g = f.grid();
  const double inv_h2 = 1.0 / (g.spacing(axis) * g.spacing(axis));
  std::vector<T> out(g.node_count());
  detail::for_each_line_node(g, axis, [&](std::size_t idx, const std::array<std::ptrdiff_t, 7>& off) {
    const T* p = &f[idx];
    T acc = stencil::kSecondCentre * p[0];
    acc += stencil::kSecond[0] * (p[off[4]] + p[off[2]]);
    acc += stencil::kSecond[1] * (p[off[5]] + p[off[1]]);
    acc += stencil::kSecond[2] * (p[off[6]] + p[off[0]]);
    out[idx] = inv_h2 * acc;
  });
  return Field<T>(g, std::move(out));
}

/// Undivided sixth difference along `axis`, normalized so the Nyquist mode maps to itself.
/// Vanishes to O(h^6) on smooth data; used to suppress grid-scale (doubler) modes.
template <class T>
Field<T> nyquist_filter(const Field<T>& f, int axis) {
  const GridSpec& g = f.grid();
  std::vector<T> out(g.node_count());
  detail::for_each_line_node(g, axis, [&](std::size_t idx, const std::array<std::ptrdiff_t, 7>& off) {
    const T* p = &f[idx];
    T acc = -20.0 * p[0];
    acc += 15.0 * (p[off[4]] + p[off[2]]);
    acc += -6.0 * (p[off[5]] + p[off[1]]);
    acc += 1.0 * (p[off[6]] + p[off[0]]);
    out[idx] = (-1.0 / 64.0) * acc;
  });
  return Field<T>(g, std::move(out));
}

// ---------------------------------------------------------------------------
// Quadrature

inline void require_positive_volume(const ScalarField& vol, const char* what) {
  for (std::size_t i = 0; i < vol.size(); ++i) {
    if (!(vol[i] > 0.0)) {
      throw InvalidArgument(std::string(what) + ": volume weight must be positive (node " +
                            std::to_string(i) + ")");
    }
  }
}

/// Sum of f * vol * cell volume in node order.
inline double integrate(const ScalarField& f, const ScalarField& vol) {
  require_same_grid(f.grid(), vol.grid(), "integrate");
  require_positive_volume(vol, "integrate");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * vol[i];
  return s * f.grid().cell_volume();
}

inline double volume(const ScalarField& vol) {
  return integrate(ScalarField(vol.grid(), 1.0), vol);
}

/// L2 inner product of two fields whose components are orthonormal-frame coefficients.
template <class T>
double inner_product(const Field<T>& u, const Field<T>& v, const ScalarField& vol) {
  require_same_grid(u.grid(), v.grid(), "inner_product");
  require_same_grid(u.grid(), vol.grid(), "inner_product");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if constexpr (std::is_arithmetic_v<T>) {
      s += u[i] * v[i] * vol[i];
    } else {
      s += u[i].dot(v[i]) * vol[i];
    }
  }
  return s * u.grid().cell_volume();
}

enum class Norm { L2, L4, Linf };

/// Lp norm of the pointwise Euclidean norm of f (components taken as orthonormal coefficients).
template <class T>
double lp_norm(const Field<T>& f, Norm p, const ScalarField& vol) {
  require_same_grid(f.grid(), vol.grid(), "lp_norm");
  require_positive_volume(vol, "lp_norm");
  if (p == Norm::Linf) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::sqrt(squared_norm(f[i])));
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a2 = squared_norm(f[i]);
    s += (p == Norm::L2 ? a2 : a2 * a2) * vol[i];
  }
  s *= f.grid().cell_volume();
  return p == Norm::L2 ? std::sqrt(s) : std::sqrt(std::sqrt(s));
}

inline ScalarField flat_volume(const GridSpec& g) { return ScalarField(g, 1.0); }

}  // namespace swlab

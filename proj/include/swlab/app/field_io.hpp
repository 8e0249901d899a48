#pragma once

// Field containers on disk.
//
// Binary layout, little-endian:
//   "SWLF"  u32 version = 1  i32 dims[4]  f64 periods[4]  u32 components
//   f64 values[node_count * components], node-major in grid index order.
// CSV layout:
//   # swlab-field dims=D0,D1,D2,D3 periods=L0,L1,L2,L3 components=C
//   node,c0,c1,...
//   one row per node.

#include "swlab/spinc.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace swlab::app {

static_assert(std::endian::native == std::endian::little, "field containers assume a little-endian host");

/// Grid plus a node-major array of components.
struct RawField {
  GridSpec grid;
  int components = 0;
  std::vector<double> data;

  const double* node(std::size_t i) const { return data.data() + i * std::size_t(components); }
};

template <class T>
struct FieldTraits;

template <>
struct FieldTraits<double> {
  static constexpr int components = 1;
  static void write(const double& v, double* out) { out[0] = v; }
  static double read(const double* in) { return in[0]; }
};

template <int N>
struct FieldTraits<Eigen::Matrix<double, N, 1>> {
  static constexpr int components = N;
  static void write(const Eigen::Matrix<double, N, 1>& v, double* out) {
    for (int k = 0; k < N; ++k) out[k] = v(k);
  }
  static Eigen::Matrix<double, N, 1> read(const double* in) {
    Eigen::Matrix<double, N, 1> v;
    for (int k = 0; k < N; ++k) v(k) = in[k];
    return v;
  }
};

/// Spinors as (Re z0, Im z0, Re z1, Im z1).
template <>
struct FieldTraits<Spinor> {
  static constexpr int components = 4;
  static void write(const Spinor& v, double* out) {
    out[0] = v(0).real();
    out[1] = v(0).imag();
    out[2] = v(1).real();
    out[3] = v(1).imag();
  }
  static Spinor read(const double* in) { return Spinor(Complex(in[0], in[1]), Complex(in[2], in[3])); }
};

/// Symmetric 3x3 matrices as the upper triangle, row by row.
template <>
struct FieldTraits<Mat3> {
  static constexpr int components = 6;
  static void write(const Mat3& m, double* out) {
    int k = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) out[k++] = m(i, j);
  }
  static Mat3 read(const double* in) {
    Mat3 m;
    int k = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) m(i, j) = m(j, i) = in[k++];
    return m;
  }
};

/// Symmetric 4x4 matrices (metrics) as the upper triangle, row by row.
template <>
struct FieldTraits<Mat4> {
  static constexpr int components = 10;
  static void write(const Mat4& m, double* out) {
    int k = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) out[k++] = m(i, j);
  }
  static Mat4 read(const double* in) {
    Mat4 m;
    int k = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) m(i, j) = m(j, i) = in[k++];
    return m;
  }
};

template <class T>
RawField to_raw(const Field<T>& f) {
  RawField r{f.grid(), FieldTraits<T>::components, {}};
  r.data.resize(f.size() * std::size_t(r.components));
  for (std::size_t i = 0; i < f.size(); ++i) FieldTraits<T>::write(f[i], r.data.data() + i * std::size_t(r.components));
  return r;
}

template <class T>
Field<T> from_raw(const RawField& r) {
  if (r.components != FieldTraits<T>::components) {
    throw InvalidArgument("field file has " + std::to_string(r.components) + " components, expected " +
                          std::to_string(FieldTraits<T>::components));
  }
  return generate_indexed(r.grid, [&](std::size_t i) { return FieldTraits<T>::read(r.node(i)); });
}

namespace field_io_detail {

inline constexpr char kMagic[4] = {'S', 'W', 'L', 'F'};
inline constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw InvalidArgument(path + ": truncated field file");
  return v;
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace field_io_detail

inline void write_binary(const RawField& f, const std::string& path) {
  using namespace field_io_detail;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  put(os, kVersion);
  for (int a = 0; a < 4; ++a) put(os, std::int32_t(f.grid.dim(a)));
  for (int a = 0; a < 4; ++a) put(os, f.grid.period(a));
  put(os, std::uint32_t(f.components));
  os.write(reinterpret_cast<const char*>(f.data.data()), std::streamsize(f.data.size() * sizeof(double)));
  if (!os) throw InvalidArgument("write to " + path + " failed");
}

inline RawField read_binary(const std::string& path) {
  using namespace field_io_detail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw InvalidArgument(path + ": not a field file");
  if (get<std::uint32_t>(is, path) != kVersion) throw InvalidArgument(path + ": unsupported field file version");
  std::array<int, 4> dims{};
  std::array<double, 4> periods{};
  for (auto& d : dims) d = get<std::int32_t>(is, path);
  for (auto& p : periods) p = get<double>(is, path);
  RawField r{GridSpec(dims, periods), int(get<std::uint32_t>(is, path)), {}};
  if (r.components <= 0 || r.components > 64) throw InvalidArgument(path + ": bad component count");
  r.data.resize(r.grid.node_count() * std::size_t(r.components));
  if (!is.read(reinterpret_cast<char*>(r.data.data()), std::streamsize(r.data.size() * sizeof(double)))) {
    throw InvalidArgument(path + ": truncated field file");
  }
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    if (!std::isfinite(r.data[i])) throw InvalidArgument(path + ": non-finite value at node " + std::to_string(i / r.components));
  }
  return r;
}

inline void write_csv(const RawField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open " + path + " for writing");
  os << std::setprecision(17);
  const auto& d = f.grid.dims();
  const auto& p = f.grid.periods();
  os << "# swlab-field dims=" << d[0] << ',' << d[1] << ',' << d[2] << ',' << d[3] << " periods=" << p[0] << ','
     << p[1] << ',' << p[2] << ',' << p[3] << " components=" << f.components << '\n';
  os << "node";
  for (int c = 0; c < f.components; ++c) os << ",c" << c;
  os << '\n';
  for (std::size_t i = 0; i < f.grid.node_count(); ++i) {
    os << i;
    for (int c = 0; c < f.components; ++c) os << ',' << f.node(i)[c];
    os << '\n';
  }
  if (!os) throw InvalidArgument("write to " + path + " failed");
}

inline RawField read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open " + path);
  std::string line;
  std::array<int, 4> dims{};
  std::array<double, 4> periods{};
  int comps = 0;
  if (!std::getline(is, line) ||
      std::sscanf(line.c_str(), "# swlab-field dims=%d,%d,%d,%d periods=%lf,%lf,%lf,%lf components=%d", &dims[0],
                  &dims[1], &dims[2], &dims[3], &periods[0], &periods[1], &periods[2], &periods[3], &comps) != 9) {
    throw InvalidArgument(path + ":1: missing or malformed field header");
  }
  RawField r{GridSpec(dims, periods), comps, {}};
  if (comps <= 0 || comps > 64) throw InvalidArgument(path + ":1: bad component count");
  std::getline(is, line);
  r.data.resize(r.grid.node_count() * std::size_t(comps));
  for (std::size_t i = 0; i < r.grid.node_count(); ++i) {
    const int lineno = int(i) + 3;
    if (!std::getline(is, line)) throw InvalidArgument(path + ":" + std::to_string(lineno) + ": missing row");
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    if (cell != std::to_string(i)) throw InvalidArgument(path + ":" + std::to_string(lineno) + ": node index out of order");
    for (int c = 0; c < comps; ++c) {
      if (!std::getline(row, cell, ',')) throw InvalidArgument(path + ":" + std::to_string(lineno) + ": too few columns");
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || !std::isfinite(v)) {
        throw InvalidArgument(path + ":" + std::to_string(lineno) + ": bad value in column " + std::to_string(c + 2));
      }
      r.data[i * std::size_t(comps) + std::size_t(c)] = v;
    }
  }
  return r;
}

/// Chooses CSV for a .csv suffix and the binary container otherwise.
inline void write_field(const RawField& f, const std::string& path) {
  field_io_detail::has_suffix(path, ".csv") ? write_csv(f, path) : write_binary(f, path);
}

inline RawField read_field(const std::string& path) {
  return field_io_detail::has_suffix(path, ".csv") ? read_csv(path) : read_binary(path);
}

}  // namespace swlab::app

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace swlab {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Complex = std::complex<double>;
using Spinor = Eigen::Vector2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline const double kSqrt8 = std::sqrt(8.0);

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, failed factorizations, solver breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the inputs does not hold (bad shapes, mismatched grids).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The operation is not defined for this configuration (e.g. Dirac on a curved chart).
class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

/// An admissibility or applicability condition failed; message lists the offending samples.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

inline double positive_part(double f) { return f > 0.0 ? f : 0.0; }
inline double negative_part(double f) { return f < 0.0 ? -f : 0.0; }

template <class T>
inline bool all_finite(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::isfinite(v);
  } else if constexpr (std::is_same_v<typename T::Scalar, Complex>) {
    return v.real().allFinite() && v.imag().allFinite();
  } else {
    return v.allFinite();
  }
}

template <class T>
inline double squared_norm(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return double(v) * double(v);
  } else {
    return v.squaredNorm();
  }
}

template <class T>
inline T zero_value() {
  if constexpr (std::is_arithmetic_v<T>) {
    return T(0);
  } else {
    return T::Zero();
  }
}

}  // namespace swlab

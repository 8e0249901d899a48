#pragma once

// Seeded smooth random fields for the checks run by the command-line tool.
// Every sampler is a trigonometric polynomial in the angles 2 pi x_k / L_k with
// at most one mode per axis, so all finite-difference contracts apply.

#include "swlab/spinc.hpp"

#include <random>

namespace swlab::app {

namespace samplers_detail {

inline Vec4 angles(const GridSpec& g, const Vec4& x) {
  Vec4 t;
  for (int k = 0; k < 4; ++k) t(k) = 2 * kPi * x(k) / g.period(k);
  return t;
}

}  // namespace samplers_detail

/// Constant plus first Fourier modes on each axis with normal coefficients.
inline SelfDualField random_selfdual(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  std::array<Vec3, 9> a;
  for (auto& v : a) v = Vec3(n(gen), n(gen), n(gen));
  return generate(g, [&](const Vec4& x) -> Vec3 {
    const Vec4 t = samplers_detail::angles(g, x);
    Vec3 v = a[0];
    for (int k = 0; k < 4; ++k) v += a[1 + 2 * k] * std::cos(t(k)) + a[2 + 2 * k] * std::sin(t(k));
    return v;
  });
}

/// |sigma| >= 4 - 2 sqrt3 > 0.5 at every node: a constant of norm 4 plus eight modes of size at most sqrt3 / 4.
inline SelfDualField random_selfdual_nonvanishing(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 c0(u(gen), u(gen), u(gen));
  c0 = 4.0 * (c0.norm() > 0.0 ? Vec3(c0.normalized()) : Vec3::UnitX());
  std::array<Vec3, 8> a;
  for (auto& v : a) v = 0.25 * Vec3(u(gen), u(gen), u(gen));
  return generate(g, [&](const Vec4& x) -> Vec3 {
    const Vec4 t = samplers_detail::angles(g, x);
    Vec3 v = c0;
    for (int k = 0; k < 4; ++k) v += a[2 * k] * std::cos(t(k)) + a[2 * k + 1] * std::sin(t(k));
    return v;
  });
}

/// Spinor with |Phi| >= 0.48 at every node: Re z0 >= 0.6 before an overall factor of at least 0.8.
inline SpinorField random_spinor(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 12> c{};
  for (auto& x : c) x = u(gen);
  return generate(g, [&](const Vec4& x) -> Spinor {
    const Vec4 t = samplers_detail::angles(g, x);
    const Complex z0(1.0 + 0.2 * c[0] * std::sin(t(0) + c[1]) + 0.2 * c[2] * std::cos(t(1)),
                     0.2 * c[3] * std::cos(t(2) - t(3)));
    const Complex z1(0.2 * c[4] * std::sin(t(3) + c[5]) + 0.1 * c[6],
                     0.2 * c[7] * std::cos(t(0) + t(1)) + 0.1 * c[8] * std::sin(t(2)));
    return (1.0 + 0.2 * c[9]) * Spinor(z0, z1);
  });
}

/// Periodic potential with components of size at most 0.5 times amplitude.
inline OneFormField random_potential(const GridSpec& g, std::uint64_t seed, double amplitude = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::array<double, 8> c{};
  for (auto& x : c) x = u(gen);
  return generate(g, [&](const Vec4& x) -> Vec4 {
    const Vec4 t = samplers_detail::angles(g, x);
    return amplitude * Vec4(c[0] * std::sin(t(1) + c[4]), c[1] * std::cos(t(2) - t(0)), c[2] * std::sin(t(3)) + c[5],
                            c[3] * std::cos(t(0) + c[6]));
  });
}

/// Smooth periodic gauge function of size at most amplitude.
inline ScalarField random_gauge(const GridSpec& g, std::uint64_t seed, double amplitude) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 4> c{};
  for (auto& x : c) x = u(gen);
  return generate(g, [&](const Vec4& x) {
    const Vec4 t = samplers_detail::angles(g, x);
    return amplitude * 0.5 * (c[0] * std::sin(t(0) + c[1]) + c[2] * std::cos(t(1) + t(2) + c[3]));
  });
}

}  // namespace swlab::app

#pragma once

// Circle-valued functions theta: X -> R/2piZ, stored as the pair (sin, cos).

#include "swlab/metric.hpp"

namespace swlab {

struct ThetaField {
  ScalarField s;             ///< sin theta
  ScalarField c;             ///< cos theta
  OneFormField dtheta;       ///< coordinate components of d theta
  ScalarField dtheta_norm2;  ///< |d theta|^2 in the metric
};

/// d theta = c ds - s dc; never lifts theta to a real-valued function.
inline ThetaField theta_from_pair(const ScalarField& s, const ScalarField& c, const MetricField& m) {
  require_same_grid(s.grid(), m.grid(), "theta_from_pair");
  require_same_grid(c.grid(), m.grid(), "theta_from_pair");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s[i] * s[i] + c[i] * c[i] - 1.0) > 1e-12) {
      throw InvalidArgument("theta_from_pair: s^2 + c^2 != 1 at node " + std::to_string(i));
    }
  }
  ThetaField t;
  t.s = s;
  t.c = c;
  std::array<ScalarField, 4> ds, dc;
  for (int a = 0; a < 4; ++a) {
    ds[a] = partial_derivative(s, a);
    dc[a] = partial_derivative(c, a);
  }
  t.dtheta = generate_indexed(s.grid(), [&](std::size_t i) {
    Vec4 v;
    for (int a = 0; a < 4; ++a) v(a) = c[i] * ds[a][i] - s[i] * dc[a][i];
    return v;
  });
  t.dtheta_norm2 = generate_indexed(s.grid(), [&](std::size_t i) {
    return double(t.dtheta[i].dot(m.g_inv()[i] * t.dtheta[i]));
  });
  return t;
}

/// Samples are read modulo 2 pi.
inline ThetaField theta_from_angle(const ScalarField& theta, const MetricField& m) {
  require_finite(theta, "theta_from_angle");
  return theta_from_pair(map(theta, [](double x) { return std::sin(x); }),
                         map(theta, [](double x) { return std::cos(x); }), m);
}

inline ThetaField constant_theta(double value, const MetricField& m) {
  return theta_from_angle(ScalarField(m.grid(), value), m);
}

}  // namespace swlab

// Scalar curvature of g = e^{2f} delta with f = 0.1 cos x1, compared with
// R = -6 e^{-2f} (f'' + f'^2) at two resolutions.

#include "swlab/curvature.hpp"

#include <cstdio>

int main() {
  using namespace swlab;
  for (int n : {8, 16}) {
    const GridSpec g = GridSpec::cube(n);
    const auto f = generate(g, [](const Vec4& x) { return 0.1 * std::cos(x(1)); });
    const auto cb = curvature_stack(conformal_metric(f));
    double err = 0.0, wmax = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const double x1 = g.position(i)(1);
      const double fx = 0.1 * std::cos(x1), d1 = -0.1 * std::sin(x1), d2 = -0.1 * std::cos(x1);
      err = std::max(err, std::abs(cb.R[i] + 6.0 * std::exp(-2.0 * fx) * (d2 + d1 * d1)));
      wmax = std::max(wmax, cb.Wplus[i].norm());
    }
    std::printf("n=%2d  max|R - R_exact| = %.3e  max|W+| = %.3e\n", n, err, wmax);
  }
}

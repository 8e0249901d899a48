// lambda on the flat torus: zero for constant theta (eta_1 is parallel and
// dtheta = 0), strictly positive when theta winds once along x0.

#include "swlab/lambda.hpp"

#include <cstdio>

int main() {
  using namespace swlab;
  const GridSpec g = GridSpec::cube(8);
  const auto m = flat_metric(g);
  LambdaOptions opts;
  opts.random_starts = 2;

  const auto flat = minimize_lambda(constant_theta(0.0, m), m, opts);
  std::printf("constant theta:  lambda = %.3e (%d iterations)\n", flat.lambda, flat.iterations);

  const auto th = theta_from_angle(generate(g, [](const Vec4& x) { return x(0); }), m);
  const auto wind = minimize_lambda(th, m, opts);
  std::printf("theta = x0:      lambda = %.6f, per start:", wind.lambda);
  for (double v : wind.start_values) std::printf(" %.6f", v);
  std::printf("\n");
}

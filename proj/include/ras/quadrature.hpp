#pragma once

#include <cmath>
#include <vector>

namespace ras {

// Gauss-Hermite rule for integral f(t) e^{-t^2} dt: nodes are symmetric about
// zero, weights positive. Cached per order; thread-safe.
struct GaussHermiteRule {
  std::vector<double> x, w;
};

const GaussHermiteRule& gauss_hermite(int n);

// E[f(Y)] for Y ~ N(mu, sigma^2) at a fixed order.
template <class F>
double gauss_expect(double mu, double sigma, int n, F&& f) {
  const GaussHermiteRule& r = gauss_hermite(n);
  const double scale = std::sqrt(2.0) * sigma;
  double acc = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(mu + scale * r.x[i]);
  return acc / std::sqrt(M_PI);
}

// Adaptive order escalation until two consecutive rules agree to tol
// (absolute). The integrands here are entire in t, so convergence is spectral
// and the first pair nearly always suffices.
template <class F>
double gauss_expect_adaptive(double mu, double sigma, F&& f, double tol = 1e-11) {
  static const int orders[] = {96, 144, 216, 324};
  double prev = gauss_expect(mu, sigma, orders[0], f);
  for (std::size_t i = 1; i < sizeof(orders) / sizeof(orders[0]); ++i) {
    double cur = gauss_expect(mu, sigma, orders[i], f);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace ras

#include "ras/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace ras {
namespace {

// Symmetric tridiagonal QL with implicit shifts. d is the diagonal, e the
// subdiagonal (e[i] couples i and i+1), z a row vector carried through the
// rotations. On return d holds the eigenvalues and z[i] the first component
// of the i-th eigenvector.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
  const int n = int(d.size());
  e.resize(n, 0.0);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      int m = l;
      for (; m < n - 1; ++m) {
        double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (iter++ == 60) throw std::runtime_error("gauss_hermite: eigensolver stalled");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      int i = m - 1;
      for (; i >= l; --i) {
        double f = s * e[i];
        double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        double zt = z[i + 1];
        z[i + 1] = s * z[i] + c * zt;
        z[i] = c * z[i] - s * zt;
      }
      if (r == 0.0 && i >= l) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
// physicists' Hermite weight (zero diagonal, off-diagonal sqrt(j/2)), the
// weight at node i is sqrt(pi) times the squared first eigenvector entry.
// Stable at the orders the adaptive integrator escalates to, where Newton
// polishing of asymptotic root guesses starts merging neighbouring roots.
GaussHermiteRule compute_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  std::vector<double> d(n, 0.0), e(n, 0.0), z(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) e[i] = std::sqrt((i + 1) / 2.0);
  z[0] = 1.0;
  tridiag_ql(d, e, z);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

  const double sqrt_pi = std::sqrt(M_PI);
  GaussHermiteRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = d[order[i]];
    r.w[i] = sqrt_pi * z[order[i]] * z[order[i]];
  }
  return r;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  static std::map<int, GaussHermiteRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

}  // namespace ras

#include "resd/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace resd {

namespace {

// Newton iteration on P_n with the Chebyshev-like initial guess; standard
// Golub-Welsch-free construction, accurate to machine precision for the
// sizes used here (n <= 2000).
GaussRule build(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be > 0");
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double pi = 3.14159265358979323846;
  std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Evaluate P_n and P_n' by the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (std::size_t j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

}  // namespace resd

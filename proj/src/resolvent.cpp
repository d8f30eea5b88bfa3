#include "resd/resolvent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>

#include "resd/errors.hpp"
#include "resd/quadrature.hpp"

namespace resd {

namespace {

// Composite Gauss integration of g over [lo, hi], panels capped so the
// oscillation k per panel stays moderate.
template <class G>
cplx integrate_panels(double lo, double hi, double absk, const G& g) {
  if (!(hi > lo)) return 0.0;
  const double cap = 2.0 / std::max(1.0, absk);
  const int np = std::max(1, int(std::ceil((hi - lo) / cap)));
  const GaussRule& rule = gauss_legendre(24);
  cplx acc = 0.0;
  for (int p = 0; p < np; ++p) {
    double a = lo + (hi - lo) * p / np;
    double b = lo + (hi - lo) * (p + 1) / np;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t q = 0; q < rule.x.size(); ++q)
      acc += half * rule.w[q] * g(mid + half * rule.x[q]);
  }
  return acc;
}

}  // namespace

cplx free_resolvent(const SurfacePoint& p, const SampledFn& psi, double x) {
  const cplx k = p.k();
  const double absk = std::abs(k);
  auto g = [&](double y) {
    return -std::exp(-k * std::abs(x - y)) / (2.0 * k) * psi.f(y);
  };
  if (x > psi.lo && x < psi.hi)
    return integrate_panels(psi.lo, x, absk, g) +
           integrate_panels(x, psi.hi, absk, g);
  return integrate_panels(psi.lo, psi.hi, absk, g);
}

struct NystromSystem::Impl {
  SurfacePoint p;
  Potential pot;
  double a1, a2;
  int N;
  int pm;  // panel rule order for the product integration
  std::vector<double> x;
  std::vector<double> bw;
  Eigen::MatrixXcd A;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  double rcond = 0.0;
  mutable double sigma = -1.0;
  mutable std::mutex sig_mu;

  Impl(const SurfacePoint& p_, const Potential& pot_, int N_)
      : p(p_), pot(pot_), N(N_) {}

  // Product-integration row: weights w_j with
  // sum_j w_j u_j ~ int_{a1}^{a2} G(xi, y) V(y) l_j(y) u_j dy,
  // the kernel kink at y = xi being a panel edge.
  std::vector<cplx> row(double xi) const {
    std::vector<cplx> w(N, cplx(0.0));
    std::vector<cplx> terms(N);
    const cplx k = p.k();
    const double split = std::clamp(xi, a1, a2);
    const GaussRule& rule = gauss_legendre(pm);
    const double span = a2 - a1;
    const double side_lo[2] = {a1, split};
    const double side_hi[2] = {split, a2};
    for (int s = 0; s < 2; ++s) {
      if (!(side_hi[s] - side_lo[s] > 1e-300)) continue;
      const double mid = 0.5 * (side_lo[s] + side_hi[s]);
      const double half = 0.5 * (side_hi[s] - side_lo[s]);
      for (std::size_t q = 0; q < rule.x.size(); ++q) {
        const double y = mid + half * rule.x[q];
        const cplx kern = -std::exp(-k * std::abs(xi - y)) / (2.0 * k);
        const cplx f = half * rule.w[q] * kern * pot.eval_piecewise(y, mid);
        // Barycentric Lagrange basis on the global nodes.
        int hit = -1;
        cplx denom = 0.0;
        for (int j = 0; j < N; ++j) {
          double d = y - x[j];
          if (std::abs(d) < 1e-14 * span) {
            hit = j;
            break;
          }
          terms[j] = bw[j] / d;
          denom += terms[j];
        }
        if (hit >= 0) {
          w[hit] += f;
        } else {
          for (int j = 0; j < N; ++j) w[j] += f * terms[j] / denom;
        }
      }
    }
    return w;
  }
};

NystromSystem::NystromSystem(const SurfacePoint& p, const Potential& pot,
                             int N) {
  if (!pot.compact_support())
    fail(Err::UnsupportedPotential,
         "the Nystrom discretization needs a compactly supported potential");
  if (N < 8) fail(Err::UnsupportedPotential, "Nystrom order below 8");
  impl_ = std::make_shared<Impl>(p, pot, N);
  Impl& im = *impl_;
  auto [a1, a2] = *pot.support();
  im.a1 = a1;
  im.a2 = a2;
  im.pm = N / 2 + 16;

  const GaussRule& rule = gauss_legendre(N);
  im.x.resize(N);
  for (int j = 0; j < N; ++j)
    im.x[j] = 0.5 * (a1 + a2) + 0.5 * (a2 - a1) * rule.x[j];

  // Barycentric weights on a log scale; Gauss nodes are well spread, signs
  // alternate.
  std::vector<double> lw(N);
  double lmax = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < N; ++j) {
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      if (i != j) s -= std::log(std::abs(im.x[j] - im.x[i]));
    lw[j] = s;
    lmax = std::max(lmax, s);
  }
  im.bw.resize(N);
  for (int j = 0; j < N; ++j)
    im.bw[j] = ((N - 1 - j) % 2 == 0 ? 1.0 : -1.0) * std::exp(lw[j] - lmax);

  im.A = Eigen::MatrixXcd::Identity(N, N);
  for (int i = 0; i < N; ++i) {
    std::vector<cplx> r = im.row(im.x[i]);
    for (int j = 0; j < N; ++j) im.A(i, j) -= r[j];
  }
  im.lu.compute(im.A);
  im.rcond = im.lu.rcond();
}

const SurfacePoint& NystromSystem::point() const { return impl_->p; }
int NystromSystem::size() const { return impl_->N; }
const std::vector<double>& NystromSystem::nodes() const { return impl_->x; }
double NystromSystem::rcond() const { return impl_->rcond; }

double NystromSystem::sigma_min() const {
  Impl& im = *impl_;
  std::lock_guard lk(im.sig_mu);
  if (im.sigma < 0.0) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(im.A);
    im.sigma = svd.singularValues().minCoeff();
  }
  return im.sigma;
}

std::vector<cplx> NystromSystem::solve(const SampledFn& phi) const {
  const Impl& im = *impl_;
  if (im.rcond < 1e-13)
    fail(Err::SingularAtResonance,
         "I - K is numerically singular (rcond " + std::to_string(im.rcond) +
             "); the point sits on a generalized eigenvalue");
  Eigen::VectorXcd rhs(im.N);
  for (int i = 0; i < im.N; ++i)
    rhs(i) = free_resolvent(im.p, phi, im.x[i]);
  Eigen::VectorXcd u = im.lu.solve(rhs);
  return {u.data(), u.data() + im.N};
}

cplx NystromSystem::extend(const SampledFn& phi, const std::vector<cplx>& u,
                           double x) const {
  const Impl& im = *impl_;
  if (int(u.size()) != im.N)
    fail(Err::UnsupportedPotential, "node solution has the wrong length");
  std::vector<cplx> r = im.row(x);
  cplx acc = free_resolvent(im.p, phi, x);
  for (int j = 0; j < im.N; ++j) acc += r[j] * u[j];
  return acc;
}

std::vector<cplx> generalized_resolvent(const NystromSystem& sys,
                                        const SampledFn& phi,
                                        const std::vector<double>& xs) {
  std::vector<cplx> u = sys.solve(phi);
  std::vector<cplx> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    out[i] = sys.extend(phi, u, xs[i]);
  return out;
}

double nystrom_sigma_min(const SurfacePoint& p, const Potential& pot, int N) {
  return NystromSystem(p, pot, N).sigma_min();
}

std::vector<cplx> riesz_projection(const SurfacePoint& root, double radius,
                                   int M, const Potential& pot,
                                   const SampledFn& phi,
                                   const std::vector<double>& xs,
                                   const std::vector<cplx>& other_roots, int N,
                                   double exclusion_margin) {
  const cplx k0 = root.k();
  if (!(radius > 0.0) || M < 4)
    fail(Err::ContourInvalid, "need radius > 0 and at least 4 contour nodes");
  if (std::abs(k0.real()) - radius < exclusion_margin)
    fail(Err::ContourInvalid,
         "contour circle reaches within the exclusion margin of the cut "
         "Re k = 0");
  for (cplx kr : other_roots) {
    double d = std::abs(kr - k0);
    if (d > 1e-12 && d < 1.5 * radius)
      fail(Err::ContourInvalid,
           "another root lies within 1.5 radii of the contour centre");
  }
  std::vector<cplx> acc(xs.size(), cplx(0.0));
  for (int m = 0; m < M; ++m) {
    double s = 2.0 * kPi * m / M;
    cplx eis = std::polar(1.0, s);
    cplx km = k0 + radius * eis;
    NystromSystem sys(SurfacePoint(km), pot, N);
    std::vector<cplx> u = sys.solve(phi);
    for (std::size_t j = 0; j < xs.size(); ++j)
      acc[j] += km * eis * sys.extend(phi, u, xs[j]);
  }
  for (auto& v : acc) v *= -2.0 * radius / M;
  return acc;
}

}  // namespace resd

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "resd/potential.hpp"
#include "resd/surface.hpp"

namespace resd {

// Function known on an interval; f may be called anywhere inside [lo, hi].
struct SampledFn {
  double lo = 0.0;
  double hi = 0.0;
  std::function<cplx(double)> f;
};

// Free resolvent (lambda + d^2/dx^2)^{-1} applied to psi at x, kernel
// -e^{-k|x-y|}/(2k).  Composite Gauss quadrature split at the kink y = x.
cplx free_resolvent(const SurfacePoint& p, const SampledFn& psi, double x);

// Nystrom discretization of u = A phi + A V u on the support of a
// compactly supported potential: N-point Gauss-Legendre nodes, with each
// matrix row built by product integration (the kernel kink at y_i is a
// panel edge; the Lagrange basis on the global nodes is integrated by
// barycentric evaluation on finer panels).
class NystromSystem {
 public:
  NystromSystem(const SurfacePoint& p, const Potential& pot, int N);

  const SurfacePoint& point() const;
  int size() const;
  const std::vector<double>& nodes() const;

  // Reciprocal condition estimate of I - K from the LU factors.
  double rcond() const;
  // Smallest singular value of I - K.
  double sigma_min() const;

  // Solution samples at the nodes; throws SingularAtResonance when I - K is
  // numerically singular (rcond < 1e-13).
  std::vector<cplx> solve(const SampledFn& phi) const;

  // Nystrom extension of a node solution to arbitrary x.
  cplx extend(const SampledFn& phi, const std::vector<cplx>& u,
              double x) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Convenience: solve and extend to the points xs.
std::vector<cplx> generalized_resolvent(const NystromSystem& sys,
                                        const SampledFn& phi,
                                        const std::vector<double>& xs);

double nystrom_sigma_min(const SurfacePoint& p, const Potential& pot, int N);

// Riesz projection onto the eigenspace at a located root: M-point periodic
// trapezoid rule on the k-circle of the given radius,
//   P phi(x) = -(2 rho / M) sum_m k_m e^{i s_m} (R_{lambda(k_m)} phi)(x).
// Validates that the circle stays off the cut and the branch point by
// exclusion_margin and that no other root sits within 1.5 radius.
std::vector<cplx> riesz_projection(const SurfacePoint& root, double radius,
                                   int M, const Potential& pot,
                                   const SampledFn& phi,
                                   const std::vector<double>& xs,
                                   const std::vector<cplx>& other_roots = {},
                                   int N = 200,
                                   double exclusion_margin = 1e-3);

}  // namespace resd

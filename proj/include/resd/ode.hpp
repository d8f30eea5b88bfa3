#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "resd/potential.hpp"
#include "resd/surface.hpp"

namespace resd {

struct OdeTols {
  double rel = 1e-10;
  double abs = 1e-12;

  OdeTols() = default;
  OdeTols(double tol) : rel(tol), abs(0.01 * tol) {}  // NOLINT: implicit
  OdeTols(double r, double a) : rel(r), abs(a) {}
};

// Sample grid along the ray z = t e^{i theta}, t in [-L, L].  Contains the
// panel edges of a composite 16-point Gauss quadrature plus the interior
// nodes, as one ascending array; qw holds the quadrature weight of each
// point (zero at panel edges), so sums over index ranges integrate between
// edges.  Panel edges always include -L, L, 0 and the requested anchors and
// potential breakpoints, so the ODE solver lands on every sample exactly.
struct RayGrid {
  double theta = 0.0;
  double L = 0.0;
  std::vector<double> t;
  std::vector<double> qw;
  std::vector<std::size_t> edges;  // indices into t, ascending

  // Index of an edge point with t[i] == x (exact); throws if absent.
  std::size_t index_of(double x) const;
  bool is_edge(std::size_t i) const;
};

RayGrid make_ray_grid(const Potential& pot, double theta, double L,
                      const std::vector<double>& anchors,
                      double wavenumber_hint);

// One solution sampled on a RayGrid.  du is the z-derivative (the ray
// parameter t relates to z by z = t e^{i theta}).  d2l/d2r hold the
// t-second derivative u'' = e^{2 i theta}(V - lambda) u evaluated with the
// potential piece to the left/right of the point, which differ only at
// breakpoints; dense output on an interval uses the inward-facing limits.
struct SolutionSamples {
  std::vector<cplx> u, du, d2l, d2r;
};

// Simultaneous integration of the pair (nu1, nu2) with nu1 = 1, nu1' = 0,
// nu2 = 0, nu2' = 1 at t = x0 (z-derivatives); x0 must be a grid edge.
std::pair<SolutionSamples, SolutionSamples> solve_fundamental(
    const SurfacePoint& p, const Potential& pot, const RayGrid& g, double x0,
    const OdeTols& tol);

// Same solver with caller-chosen initial data (ic = value and z-derivative
// of each solution at x0); used by the linearity checks.
std::pair<SolutionSamples, SolutionSamples> solve_with_ic(
    const SurfacePoint& p, const Potential& pot, const RayGrid& g, double x0,
    const OdeTols& tol, const std::array<cplx, 4>& ic);

// Jost pair: mu_plus ~ e^{-k z} as t -> +L, mu_minus ~ e^{+k z} as
// t -> -L, both integrated across the whole grid.  Requires
// Re(k e^{i theta}) > 0, otherwise the boundary data does not decay.
std::pair<SolutionSamples, SolutionSamples> solve_jost(
    const SurfacePoint& p, const Potential& pot, const RayGrid& g,
    const OdeTols& tol);

// Quintic-Hermite dense output between grid samples.
cplx dense_value(const RayGrid& g, const SolutionSamples& s, double x);
cplx dense_deriv(const RayGrid& g, const SolutionSamples& s, double x);

// max over grid points of |W(nu1, nu2) - 1| with W the z-Wronskian; a
// conservation check for the fundamental pair.
double wronskian_defect(const RayGrid& g, const SolutionSamples& a,
                        const SolutionSamples& b);

// Convenience bundle for callers outside the determinant pipeline.
struct SolutionPair {
  SurfacePoint point;
  RayGrid grid;
  SolutionSamples a, b;

  cplx value(int which, double x) const;
  cplx deriv(int which, double x) const;
};

SolutionPair fundamental_pair(const SurfacePoint& p, const Potential& pot,
                              double theta, double L, double x0 = 0.0,
                              const OdeTols& tol = {});
SolutionPair jost_pair(const SurfacePoint& p, const Potential& pot,
                       double theta, double L, const OdeTols& tol = {});

}  // namespace resd

#pragma once

#include <vector>

#include "resd/surface.hpp"

namespace resd::oracle {

enum class Family {
  SquareWellEq425,
  SquareWellTanCot,
  PoschlTellerFirst,
  PoschlTellerSecond,
  Semiclassical,
};

struct OracleRoot {
  SurfacePoint point;
  Family family;
  int n;            // index where the family has one, else 0
  double residual;  // defining-equation residual at the reported point
};

// Characteristic residual e^{2 kappa d} - ((kappa - k)/h)^2... precisely
// e^{2 kappa d} - (kappa - k)^4 / h^2 with kappa = sqrt(h - lambda)
// canonicalized to Re kappa >= 0; on the borderline |Re kappa| < 1e-10 both
// orientations are tried and the smaller residual returned.  Zero exactly at
// generalized eigenvalues of the well.
cplx squarewell_characteristic(const SurfacePoint& p, cplx h, double a1,
                               double a2);

// All first-sheet bound states of the well (h real negative): roots
// r = -lambda in (0, -h) of the tan/cot pair, by bracketed bisection.
std::vector<SurfacePoint> squarewell_bound_states(double h, double a1,
                                                  double a2);

// Closed-form determinant for the square well, any surface point off
// lambda in {0, h}.  The formula is invariant under kappa -> -kappa, so no
// branch choice is needed.
cplx squarewell_bbD_closed(const SurfacePoint& p, cplx h, double a1,
                           double a2);

// Roots k = s sqrt(V0 + 1/4) - n - 1/2, s = +-1, filtered to the requested
// sheet.  The admissible n-range is left to the caller; numerics show it
// starts at n = 0.
std::vector<OracleRoot> poschl_teller_roots(cplx V0, Sheet sheet, int n_min,
                                            int n_max);

struct SemiclassicalRoot {
  SurfacePoint exact;  // k = s sqrt(V0 + hbar^2/4) - hbar (n + 1/2)
  cplx leading;        // lambda = -V0 + s 2i sqrt(-V0) (n + 1/2) hbar
  int n;
  int sign;            // s
};

// Second-sheet semiclassical ladder for V(x) = V0 / cosh^2(x / hbar)-type
// scaling, V0 < 0.
std::vector<SemiclassicalRoot> semiclassical_roots(double V0, double hbar,
                                                   int n_min, int n_max);

}  // namespace resd::oracle

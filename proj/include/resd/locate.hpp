#pragma once

#include <string>
#include <vector>

#include "resd/dfun.hpp"

namespace resd {

// Axis-aligned search rectangle in the k-plane.  lo is the bottom-left
// corner, hi the top-right.  The rectangle must stay off the cut Re k = 0
// and the branch point; edges closer than exclusion_margin are pushed away
// with a warning.
struct ContourSpec {
  cplx lo;
  cplx hi;
  int max_depth = 12;
  int boundary_samples = 64;
  double exclusion_margin = 1e-3;
};

struct ResonanceResult {
  SurfacePoint point;
  double abs_D;        // |determinant| at the accepted point
  int multiplicity;    // winding number of the enclosing box
  cplx C1;             // eigenfunction combination, |C1|^2 + |C2|^2 = 1
  cplx C2;
  double eigen_residual;
  int iterations;      // refinement iterations spent
};

// Unresolved box: winding > 1 at max_depth, or refinement failed inside it.
struct Cluster {
  cplx lo;
  cplx hi;
  int winding = 0;
};

struct LocateOutcome {
  std::vector<ResonanceResult> roots;
  std::vector<Cluster> clusters;
  std::vector<std::string> warnings;
  long long evaluations = 0;
};

// Winding number of the determinant around the rectangle boundary, by phase
// tracking with adaptive sample doubling.  Throws ZeroOnBoundary if |D| dips
// below 1e-9 times its maximum on the boundary, PhaseTrackingFailed if eight
// doublings still leave a phase jump >= pi/2 between neighbours.
int count_zeros(const ContourSpec& spec, const Potential& pot,
                const DConfig& cfg = {});

// Subdivision search: bisect until each box holds winding <= 1 (or max_depth),
// refine by Muller iteration from the box centre, validate each candidate as
// an eigenvalue.  theta and L are resolved once for the whole rectangle so
// every evaluation lives on one analytic branch.
LocateOutcome find_resonances(const ContourSpec& spec, const Potential& pot,
                              const DConfig& cfg = {}, double root_tol = 1e-9,
                              double eig_tol = 1e-6, int threads = 1);

struct EigenfunctionSample {
  double x;
  cplx mu;
};

struct Eigenfunction {
  std::vector<EigenfunctionSample> samples;
  cplx C1;
  cplx C2;
  double residual;  // max |D(x, mu)| over samples / max |mu|
  double sv_ratio;  // smallest/largest singular value of the anchor matrix
};

// Eigenfunction at a previously located root.  sample_xs become evaluation
// anchors (defaults are used when empty); throws NotARoot when the anchor
// matrix is far from rank deficient (singular value ratio > 0.1).
Eigenfunction eigenfunction(const SurfacePoint& root, const Potential& pot,
                            const DConfig& cfg = {},
                            const std::vector<double>& sample_xs = {},
                            double eig_tol = 1e-6);

}  // namespace resd

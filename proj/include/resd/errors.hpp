#pragma once

#include <stdexcept>
#include <string>

namespace resd {

// Failure vocabulary shared by all modules. Each value names a precondition
// or runtime condition that callers may want to catch individually.
enum class Err {
  BranchPoint,               // lambda = 0 / k = 0 requested
  OutsideAnalyticityDomain,  // potential evaluated off its sector, bad theta
  StepSizeUnderflow,         // integrator step collapsed
  DecayViolation,            // Jost boundary condition not decaying
  DivergentIntegral,         // D-integral convergence condition fails
  XDependenceDetected,       // anchor spread of the determinant too large
  ZeroOnBoundary,            // |D| below floor on a contour edge
  PhaseTrackingFailed,       // winding unresolved after max resampling
  MaxDepthExceeded,          // subdivision bottomed out (reported, not thrown)
  NotARoot,                  // eigenvector extraction at a non-root
  SingularAtResonance,       // Nystrom system numerically singular
  ContourInvalid,            // projection circle ill-placed
  UnsupportedPotential,      // operation needs a different potential class
  NoAdmissibleRay,           // no rotation angle satisfies the constraints
  RegionUnreachable,         // point reachable by neither strip nor sector
  ExcludedPoint,             // inside the excluded set around the cut
};

const char* to_string(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace resd

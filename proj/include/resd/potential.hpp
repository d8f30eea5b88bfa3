#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "resd/surface.hpp"

namespace resd {

// Potential V on the line, possibly with an analytic continuation into the
// sector |arg z| < half_angle().  Built through the named factories; "custom"
// takes a user callable plus the decay/analyticity metadata the library
// cannot infer.
class Potential {
 public:
  enum class Kind { SquareWell, PoschlTeller, Custom };

  // Square well of depth h on [a1, a2] (h complex, a1 < a2).  Supported only
  // on the real line; jump points a1, a2 are breakpoints.
  static Potential square_well(cplx h, double a1, double a2);

  // V(z) = -V0 / cosh(z)^2, analytic on |Im z| < pi/2; the usable dilation
  // sector is |arg z| < half_angle (default 1.2, must stay below pi/2).
  static Potential poschl_teller(cplx V0, double half_angle = 1.2);

  // User-supplied V. decay_rate a > 0 such that |V(x)| <~ e^{-2a|x|}
  // (infinity for compact support, in which case support must be given);
  // half_angle 0 means real-axis evaluation only.
  static Potential custom(std::function<cplx(cplx)> f, double decay_rate,
                          double half_angle,
                          std::optional<std::pair<double, double>> support =
                              std::nullopt,
                          std::vector<double> breakpoints = {});

  Kind kind() const { return kind_; }

  // Evaluate V at z.  Off-axis z requires half_angle() > 0 and
  // |arg z| < half_angle() (checked); square wells are real-axis only.
  cplx eval(cplx z) const;

  // Square-well evaluation with the piece chosen by a witness point, so the
  // integrator can query values at a jump from a definite side.
  cplx eval_piecewise(double x, double witness) const;

  // Half the decay exponent of V: |V(x)| <~ e^{-2a|x|}.  The unrotated
  // representation of the determinant converges exactly for |Re k| < a.
  double decay_rate() const { return decay_rate_; }
  double half_angle() const { return half_angle_; }
  std::optional<std::pair<double, double>> support() const { return support_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  bool compact_support() const { return support_.has_value(); }

  // Upper bound for int_{|y| >= x} |V(y e^{i theta})| e^{c |y|} dy, the
  // tail of the D-integrals beyond a truncation point x > 0.  Infinite when
  // the integral diverges.
  double tail_bound(double x, double theta, double c) const;

  // Magnitude scale used for step-size and panel-width heuristics.
  double scale() const { return scale_; }

  // Parameter accessors (meaningful for the matching kind only).
  cplx well_depth() const { return h_; }
  double well_left() const { return a1_; }
  double well_right() const { return a2_; }
  cplx pt_depth() const { return v0_; }

 private:
  Potential() = default;

  Kind kind_ = Kind::Custom;
  std::function<cplx(cplx)> f_;
  double decay_rate_ = 0.0;
  double half_angle_ = 0.0;
  std::optional<std::pair<double, double>> support_;
  std::vector<double> breakpoints_;
  double scale_ = 1.0;
  cplx h_{};
  double a1_ = 0.0, a2_ = 0.0;
  cplx v0_{};
};

}  // namespace resd

#pragma once

#include <cmath>
#include <complex>

#include "resd/errors.hpp"

namespace resd {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

enum class Sheet { First, Second, Cut };

const char* to_string(Sheet s);

// Point on the two-sheeted Riemann surface of sqrt(-lambda), parametrized by
// the uniformizing coordinate k with lambda = -k^2.  Re k > 0 is the first
// (physical) sheet, Re k < 0 the second, Re k = 0 the image of the branch
// cut [0, inf).  The branch point k = 0 is excluded.
class SurfacePoint {
 public:
  explicit SurfacePoint(cplx k) : k_(k) {
    if (k == cplx(0.0)) fail(Err::BranchPoint, "k = 0 is not on the surface");
  }

  cplx k() const { return k_; }
  cplx lambda() const { return -k_ * k_; }

  Sheet sheet() const {
    if (k_.real() > 0.0) return Sheet::First;
    if (k_.real() < 0.0) return Sheet::Second;
    return Sheet::Cut;
  }

  // Principal argument of k, in (-pi, pi].
  double arg_k() const { return std::arg(k_); }

  // Argument of lambda on the surface: 2 arg k - pi, ranging over
  // (-3 pi, pi].  First sheet corresponds to (-pi, pi) mod the cut.
  double arg_lambda() const { return 2.0 * std::arg(k_) - kPi; }

  // sqrt(lambda) continued along the surface equals -i k.
  cplx sqrt_lambda() const { return cplx(0.0, -1.0) * k_; }

  friend bool operator==(const SurfacePoint& a, const SurfacePoint& b) {
    return a.k_ == b.k_;
  }

 private:
  cplx k_;
};

// Map (lambda, sheet) to the surface.  For lambda on the positive real axis
// the two sheets meet; the result is the Cut point with k = i sqrt(lambda)
// regardless of the requested sheet.
inline SurfacePoint from_lambda(cplx lambda, Sheet sheet) {
  if (lambda == cplx(0.0)) fail(Err::BranchPoint, "lambda = 0 requested");
  cplx k = std::sqrt(-lambda);  // principal branch, Re k >= 0
  if (k.real() == 0.0) {
    // Positive real lambda: normalize to the upper imaginary k-axis.
    return SurfacePoint(cplx(0.0, std::abs(k.imag())));
  }
  switch (sheet) {
    case Sheet::First:
      return SurfacePoint(k);
    case Sheet::Second:
      return SurfacePoint(-k);
    case Sheet::Cut:
      fail(Err::BranchPoint,
           "Cut sheet only arises for positive real lambda");
  }
  fail(Err::BranchPoint, "unreachable");
}

// Strip criterion |Re k| < a for the unrotated representation of the
// continued resolvent; a is the exponential decay rate of the potential.
inline bool in_strip(const SurfacePoint& p, double decay_rate) {
  return std::abs(p.k().real()) < decay_rate;
}

// Sector criterion |arg k| < pi/2 + alpha for the dilated representation;
// alpha is the half-angle of the potential's analyticity sector.
inline bool in_sector(const SurfacePoint& p, double half_angle) {
  if (!(half_angle > 0.0) || !(half_angle < kPi / 2.0))
    fail(Err::OutsideAnalyticityDomain,
         "sector half-angle must lie in (0, pi/2)");
  return std::abs(p.arg_k()) < kPi / 2.0 + half_angle;
}

}  // namespace resd

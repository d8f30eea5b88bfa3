#include "resd/potential.hpp"

#include <algorithm>
#include <cmath>

namespace resd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_lo^hi e^{c|y|} dy for lo <= hi.
double exp_abs_integral(double c, double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (c == 0.0) return hi - lo;
  auto pos_part = [&](double a, double b) {  // a, b >= 0
    return (std::exp(c * b) - std::exp(c * a)) / c;
  };
  if (lo >= 0.0) return pos_part(lo, hi);
  if (hi <= 0.0) return pos_part(-hi, -lo);
  return pos_part(0.0, -lo) + pos_part(0.0, hi);
}

}  // namespace

Potential Potential::square_well(cplx h, double a1, double a2) {
  if (!(a1 < a2)) fail(Err::UnsupportedPotential, "square well needs a1 < a2");
  Potential p;
  p.kind_ = Kind::SquareWell;
  p.decay_rate_ = kInf;
  p.half_angle_ = 0.0;
  p.support_ = std::make_pair(a1, a2);
  p.breakpoints_ = {a1, a2};
  p.scale_ = std::abs(h);
  p.h_ = h;
  p.a1_ = a1;
  p.a2_ = a2;
  return p;
}

Potential Potential::poschl_teller(cplx V0, double half_angle) {
  if (!(half_angle > 0.0) || !(half_angle < kPi / 2.0))
    fail(Err::OutsideAnalyticityDomain,
         "Poeschl-Teller half-angle must lie in (0, pi/2)");
  Potential p;
  p.kind_ = Kind::PoschlTeller;
  p.decay_rate_ = 1.0;  // |V| ~ 4|V0| e^{-2|x|}
  p.half_angle_ = half_angle;
  p.scale_ = std::abs(V0);
  p.v0_ = V0;
  return p;
}

Potential Potential::custom(std::function<cplx(cplx)> f, double decay_rate,
                            double half_angle,
                            std::optional<std::pair<double, double>> support,
                            std::vector<double> breakpoints) {
  if (!f) fail(Err::UnsupportedPotential, "custom potential needs a callable");
  bool compact = support.has_value();
  if (!compact && !(decay_rate > 0.0))
    fail(Err::UnsupportedPotential,
         "custom potential needs decay_rate > 0 or a compact support");
  if (half_angle < 0.0 || half_angle >= kPi / 2.0)
    fail(Err::OutsideAnalyticityDomain,
         "custom half-angle must lie in [0, pi/2)");
  Potential p;
  p.kind_ = Kind::Custom;
  p.f_ = std::move(f);
  p.decay_rate_ = compact ? kInf : decay_rate;
  p.half_angle_ = half_angle;
  p.support_ = support;
  p.breakpoints_ = std::move(breakpoints);
  std::sort(p.breakpoints_.begin(), p.breakpoints_.end());
  // Sampled magnitude scale; heuristic only, used for step sizing and the
  // custom tail bound.
  double lo = compact ? support->first : -5.0;
  double hi = compact ? support->second : 5.0;
  double m = 0.0;
  for (int i = 0; i <= 256; ++i) {
    double x = lo + (hi - lo) * i / 256.0;
    m = std::max(m, std::abs(p.f_(cplx(x, 0.0))));
  }
  p.scale_ = m > 0.0 ? m : 1.0;
  return p;
}

cplx Potential::eval(cplx z) const {
  if (z.imag() != 0.0) {
    if (half_angle_ == 0.0)
      fail(Err::OutsideAnalyticityDomain,
           "potential defined on the real axis only");
    if (std::abs(std::arg(z)) >= half_angle_ &&
        std::abs(std::arg(-z)) >= half_angle_)
      fail(Err::OutsideAnalyticityDomain,
           "z outside the analyticity sector");
  }
  switch (kind_) {
    case Kind::SquareWell: {
      double x = z.real();
      if (x < a1_ || x > a2_) return cplx(0.0);
      if (x == a1_ || x == a2_) return 0.5 * h_;  // jump midpoint
      return h_;
    }
    case Kind::PoschlTeller: {
      cplx c = std::cosh(z);
      return -v0_ / (c * c);
    }
    case Kind::Custom:
      return f_(z);
  }
  return cplx(0.0);
}

cplx Potential::eval_piecewise(double x, double witness) const {
  if (kind_ != Kind::SquareWell) return eval(cplx(x, 0.0));
  return (a1_ < witness && witness < a2_) ? h_ : cplx(0.0);
}

double Potential::tail_bound(double x, double theta, double c) const {
  if (theta != 0.0 && std::abs(theta) >= half_angle_)
    fail(Err::OutsideAnalyticityDomain, "rotation exceeds the sector");
  switch (kind_) {
    case Kind::SquareWell: {
      double r = std::max(x, 0.0);
      return std::abs(h_) * (exp_abs_integral(c, std::max(a1_, r), a2_) +
                             exp_abs_integral(c, a1_, std::min(a2_, -r)));
    }
    case Kind::PoschlTeller: {
      // |V(y e^{i theta})| <= 4|V0| e^{-2 y cos theta} / (1-e^{-2 x cos theta})^2
      // for y >= x > 0; integrate the envelope times e^{c y} over both tails.
      double ct = std::cos(theta);
      if (!(x > 0.0) || !(c < 2.0 * ct)) return kInf;
      double damp = 1.0 - std::exp(-2.0 * x * ct);
      return 2.0 * 4.0 * std::abs(v0_) * std::exp((c - 2.0 * ct) * x) /
             ((2.0 * ct - c) * damp * damp);
    }
    case Kind::Custom: {
      if (support_) {
        double r = std::max({std::abs(support_->first),
                             std::abs(support_->second)});
        if (x >= r) return 0.0;
        return scale_ * (exp_abs_integral(c, std::max(support_->first, x),
                                          support_->second) +
                         exp_abs_integral(c, support_->first,
                                          std::min(support_->second, -x)));
      }
      double ct = std::cos(theta);
      double rate = 2.0 * decay_rate_ * ct;
      if (!(x > 0.0) || !(c < rate)) return kInf;
      return 2.0 * scale_ * std::exp((c - rate) * x) / (rate - c);
    }
  }
  return kInf;
}

}  // namespace resd

#include "resd/dfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace resd {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double rotated_rule(const SurfacePoint& p, double alpha) {
  double phi = p.arg_k();
  double s = (phi >= 0.0) ? 1.0 : -1.0;
  double th = -s * std::min(0.9 * alpha,
                            std::max(0.2, std::abs(phi) - kPi / 2.0 + 0.2));
  if (std::abs(phi + th) >= kPi / 2.0)
    fail(Err::NoAdmissibleRay,
         "no rotation within the sector makes Re(k e^{i theta}) > 0 at "
         "arg k = " + fmt(phi));
  return th;
}

// Growth rate c of |kernel(y)| |mu(y)| in the tail-bound integrals: zero
// whenever the kernel decay matches the solution growth (rotated rays and
// the first sheet), 2|Re k| for the unrotated second sheet.
double tail_growth(const SurfacePoint& p, double theta) {
  if (theta == 0.0 && p.k().real() < 0.0)
    return 2.0 * std::abs(p.k().real());
  return 0.0;
}

double search_L(const Potential& pot, double theta, double c,
                double quad_tol) {
  if (pot.compact_support()) {
    auto s = *pot.support();
    return std::max(std::abs(s.first), std::abs(s.second)) + 1.0;
  }
  const double target = std::max(quad_tol * 1e-2, 1e-15);
  double L = 2.0;
  while (L < 200.0 && !(pot.tail_bound(L, theta, c) < target)) L += 0.5;
  return L;
}

}  // namespace

double select_theta(const SurfacePoint& p, const Potential& pot,
                    const DConfig& cfg) {
  const double a = pot.decay_rate();
  const double alpha = pot.half_angle();
  const double rek = std::abs(p.k().real());
  switch (cfg.method) {
    case Method::RealAxis:
      if (!in_strip(p, a))
        fail(Err::DivergentIntegral,
             "real-axis representation needs |Re k| < " + fmt(a) +
                 ", got " + fmt(rek));
      return 0.0;
    case Method::RotatedRay:
      if (alpha <= 0.0)
        fail(Err::NoAdmissibleRay, "potential has no analyticity sector");
      if (!in_sector(p, alpha))
        fail(Err::RegionUnreachable,
             "arg k = " + fmt(p.arg_k()) + " outside the dilation sector");
      return rotated_rule(p, alpha);
    case Method::Auto:
      break;
  }
  if (a - rek >= cfg.strip_margin) return 0.0;
  if (alpha > 0.0 && in_sector(p, alpha)) return rotated_rule(p, alpha);
  if (in_strip(p, a)) return 0.0;  // thin margin, warned by the evaluator
  fail(Err::RegionUnreachable,
       "point fails both criteria: |Re k| = " + fmt(rek) +
           " >= decay rate " + fmt(a) +
           (alpha > 0.0 ? " and arg k = " + fmt(p.arg_k()) +
                              " outside sector half-angle " + fmt(alpha)
                        : " and the potential has no analytic sector"));
}

double region_theta(cplx klo, cplx khi, const Potential& pot,
                    const DConfig& cfg) {
  const double a = pot.decay_rate();
  const double alpha = pot.half_angle();
  // Boundary samples of the rectangle; winding contours stay on these edges
  // so validating the samples validates the evaluations.
  std::vector<SurfacePoint> pts;
  const int n = 33;
  auto push = [&](cplx k) {
    if (k != cplx(0.0)) pts.emplace_back(k);
  };
  for (int i = 0; i <= n; ++i) {
    double s = static_cast<double>(i) / n;
    push(cplx(klo.real() + s * (khi.real() - klo.real()), klo.imag()));
    push(cplx(klo.real() + s * (khi.real() - klo.real()), khi.imag()));
    push(cplx(klo.real(), klo.imag() + s * (khi.imag() - klo.imag())));
    push(cplx(khi.real(), klo.imag() + s * (khi.imag() - klo.imag())));
  }
  double maxre = 0.0;
  for (const auto& q : pts)
    maxre = std::max(maxre, std::abs(q.k().real()));

  auto validate = [&](double th) {
    for (const auto& q : pts) {
      if (th == 0.0) {
        if (!(std::abs(q.k().real()) < a))
          fail(Err::DivergentIntegral,
               "region leaves the strip |Re k| < " + fmt(a));
      } else if (!((q.k() * std::exp(cplx(0.0, th))).real() > 0.0)) {
        fail(Err::NoAdmissibleRay,
             "theta = " + fmt(th) + " fails Re(k e^{i theta}) > 0 at k = (" +
                 fmt(q.k().real()) + ", " + fmt(q.k().imag()) + ")");
      }
    }
    return th;
  };

  if (!std::isnan(cfg.theta)) return validate(cfg.theta);
  if (cfg.method == Method::RealAxis) return validate(0.0);
  if (cfg.method != Method::RotatedRay && a - maxre >= cfg.strip_margin)
    return 0.0;

  bool crosses_negative_axis =
      khi.real() <= 0.0 && klo.imag() < 0.0 && khi.imag() > 0.0;
  if (alpha <= 0.0 || crosses_negative_axis) {
    if (cfg.method != Method::RotatedRay && maxre < a) return validate(0.0);
    fail(Err::RegionUnreachable,
         "region admits neither the strip (max |Re k| = " + fmt(maxre) +
             ", decay rate " + fmt(a) + ") nor a single rotated ray");
  }
  double pmin = kPi, pmax = -kPi;
  for (const auto& q : pts) {
    if (!in_sector(q, alpha))
      fail(Err::RegionUnreachable,
           "region corner leaves the dilation sector");
    pmin = std::min(pmin, q.arg_k());
    pmax = std::max(pmax, q.arg_k());
  }
  double th = std::clamp(-(pmin + pmax) / 2.0, -0.9 * alpha, 0.9 * alpha);
  if (std::abs(th) < 0.2) th = (th <= 0.0) ? -0.2 : 0.2;
  for (const auto& q : pts) {
    if (std::abs(q.arg_k() + th) >= kPi / 2.0 - 0.01)
      fail(Err::NoAdmissibleRay,
           "the midpoint ray theta = " + fmt(th) +
               " cannot cover the whole region; pass theta explicitly");
  }
  return validate(th);
}

double auto_L(const SurfacePoint& p, const Potential& pot, double theta,
              double quad_tol) {
  return search_L(pot, theta, tail_growth(p, theta), quad_tol);
}

DEvaluator::DEvaluator(const SurfacePoint& p, const Potential& pot,
                       DConfig cfg)
    : p_(p), pot_(pot), cfg_(std::move(cfg)) {
  double theta;
  if (std::isnan(cfg_.theta)) {
    theta = select_theta(p_, pot_, cfg_);
  } else {
    theta = cfg_.theta;
    if (theta == 0.0) {
      if (!in_strip(p_, pot_.decay_rate()))
        fail(Err::DivergentIntegral,
             "theta = 0 outside the strip |Re k| < " +
                 fmt(pot_.decay_rate()));
    } else {
      if (pot_.half_angle() <= 0.0)
        fail(Err::NoAdmissibleRay, "potential has no analyticity sector");
      if (std::abs(theta) >= pot_.half_angle())
        fail(Err::OutsideAnalyticityDomain,
             "|theta| = " + fmt(std::abs(theta)) + " >= half-angle " +
                 fmt(pot_.half_angle()));
      if (!((p_.k() * std::exp(cplx(0.0, theta))).real() > 0.0))
        fail(Err::DivergentIntegral,
             "Re(k e^{i theta}) <= 0: rotated integrals diverge");
    }
  }
  if (theta == 0.0) {
    double margin = pot_.decay_rate() - std::abs(p_.k().real());
    if (margin < cfg_.strip_margin)
      warnings_.push_back("NearStripBoundary: decay margin " + fmt(margin) +
                          " below " + fmt(cfg_.strip_margin));
  }

  const double c = tail_growth(p_, theta);
  double L = cfg_.L > 0.0 ? cfg_.L : search_L(pot_, theta, c, cfg_.quad_tol);
  if (!pot_.compact_support()) {
    double tb = pot_.tail_bound(L, theta, c);
    if (!(tb < cfg_.quad_tol))
      warnings_.push_back("TruncationTailAboveTol: tail bound " + fmt(tb) +
                          " at L = " + fmt(L));
  }
  // Floating-range guard for the unrotated second sheet, where kernel and
  // solution both grow like e^{|Re k| t}.
  if (c * (L + 1.0) > 600.0)
    fail(Err::DivergentIntegral,
         "second-sheet truncation needs exponents beyond double range; "
         "reduce |Re k| or supply a rotated ray");

  if (cfg_.x_eval.empty()) {
    double s = std::min(1.0, L);
    anchors_ = {-0.7 * s, -0.3 * s, 0.0, 0.4 * s, 0.9 * s};
  } else {
    anchors_ = cfg_.x_eval;
    std::sort(anchors_.begin(), anchors_.end());
    anchors_.erase(std::unique(anchors_.begin(), anchors_.end()),
                   anchors_.end());
    for (double x : anchors_)
      if (std::abs(x) > L)
        fail(Err::OutsideAnalyticityDomain,
             "anchor x = " + fmt(x) + " beyond truncation L = " + fmt(L));
  }

  std::vector<double> must = anchors_;
  must.push_back(cfg_.x0);
  double hint = std::sqrt(std::abs(p_.lambda()) + pot_.scale());
  grid_ = make_ray_grid(pot_, theta, L, must, hint);

  auto pair = solve_fundamental(p_, pot_, grid_, cfg_.x0, cfg_.ode_tol);
  nu1_ = std::move(pair.first);
  nu2_ = std::move(pair.second);

  anchor_idx_.reserve(anchors_.size());
  for (double x : anchors_) anchor_idx_.push_back(grid_.index_of(x));

  vn_.resize(grid_.t.size(), cplx(0.0));
  cplx ray = std::exp(cplx(0.0, theta));
  for (std::size_t i = 0; i < grid_.t.size(); ++i) {
    if (grid_.qw[i] == 0.0) continue;  // panel edges carry no weight
    vn_[i] = (theta == 0.0) ? pot_.eval_piecewise(grid_.t[i], grid_.t[i])
                            : pot_.eval(grid_.t[i] * ray);
  }
}

DValue DEvaluator::d_value(const SolutionSamples& mu, std::size_t ai) const {
  const std::size_t idx = anchor_idx_.at(ai);
  const double x = grid_.t[idx];
  const cplx k = p_.k();
  const cplx ray = std::exp(cplx(0.0, grid_.theta));
  const cplx kappa = k * ray;
  cplx IR(0.0), IL(0.0);
  for (std::size_t i = idx + 1; i < grid_.t.size(); ++i) {
    if (grid_.qw[i] == 0.0) continue;
    IR += grid_.qw[i] * std::exp(-kappa * (grid_.t[i] - x)) * vn_[i] *
          mu.u[i];
  }
  for (std::size_t i = 0; i < idx; ++i) {
    if (grid_.qw[i] == 0.0) continue;
    IL += grid_.qw[i] * std::exp(kappa * (grid_.t[i] - x)) * vn_[i] *
          mu.u[i];
  }
  DValue out;
  out.D = mu.u[idx] + ray / (2.0 * k) * (IR + IL);
  out.Dp = ray * mu.du[idx] + ray * ray * 0.5 * (IR - IL);
  return out;
}

void DEvaluator::compute_determinant() const {
  std::vector<cplx> dets(anchors_.size());
  double scale = 0.0;
  for (std::size_t a = 0; a < anchors_.size(); ++a) {
    DValue d1 = d_value(nu1_, a);
    DValue d2 = d_value(nu2_, a);
    dets[a] = d1.D * d2.Dp - d2.D * d1.Dp;
    scale = std::max({scale, std::abs(d1.D * d2.Dp), std::abs(d2.D * d1.Dp)});
    // At a resonance a whole column of the matrix can cancel to noise, making
    // the term products useless as a yardstick. Floor the scale with the
    // pre-cancellation magnitudes of the solutions themselves.
    const std::size_t idx = anchor_idx_.at(a);
    double m1 = std::max(std::abs(nu1_.u[idx]), std::abs(nu1_.du[idx]));
    double m2 = std::max(std::abs(nu2_.u[idx]), std::abs(nu2_.du[idx]));
    scale = std::max(scale, m1 * m2);
  }
  cplx mean(0.0);
  for (const cplx& d : dets) mean += d;
  mean /= static_cast<double>(dets.size());
  double spread = 0.0;
  for (std::size_t a = 0; a < dets.size(); ++a)
    for (std::size_t b = a + 1; b < dets.size(); ++b)
      spread = std::max(spread, std::abs(dets[a] - dets[b]));
  spread /= std::max(scale, 1e-300);
  if (spread > 1e3 * cfg_.quad_tol)
    fail(Err::XDependenceDetected,
         "anchor spread " + fmt(spread) + " exceeds 1e3 * quad_tol; the "
         "determinant should not depend on x");
  det_ = mean;
  spread_ = spread;
  have_det_ = true;
}

cplx DEvaluator::bbD() const {
  if (!have_det_) compute_determinant();
  return det_;
}

double DEvaluator::anchor_spread() const {
  if (!have_det_) compute_determinant();
  return spread_;
}

cplx DEvaluator::bbD_of(const SolutionSamples& a,
                        const SolutionSamples& b) const {
  cplx mean(0.0);
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    DValue da = d_value(a, i);
    DValue db = d_value(b, i);
    mean += da.D * db.Dp - db.D * da.Dp;
  }
  return mean / static_cast<double>(anchors_.size());
}

const SolutionSamples& DEvaluator::jost_plus() {
  if (!have_jost_) {
    auto pair = solve_jost(p_, pot_, grid_, cfg_.ode_tol);
    jp_ = std::move(pair.first);
    jm_ = std::move(pair.second);
    have_jost_ = true;
  }
  return jp_;
}

const SolutionSamples& DEvaluator::jost_minus() {
  jost_plus();
  return jm_;
}

cplx DEvaluator::evans() {
  jost_plus();
  std::size_t i = grid_.index_of(cfg_.x0);
  cplx ray = std::exp(cplx(0.0, grid_.theta));
  return ray * (jp_.u[i] * jm_.du[i] - jp_.du[i] * jm_.u[i]);
}

double DEvaluator::equivalence_defect() {
  cplx e = evans();
  cplx d = bbD();
  return std::abs(2.0 * p_.k() * d - e) / std::max(std::abs(e), 1e-300);
}

cplx bbD(const SurfacePoint& p, const Potential& pot, const DConfig& cfg) {
  return DEvaluator(p, pot, cfg).bbD();
}

cplx evans(const SurfacePoint& p, const Potential& pot, const DConfig& cfg) {
  return DEvaluator(p, pot, cfg).evans();
}

double check_equivalence(const SurfacePoint& p, const Potential& pot,
                         const DConfig& cfg) {
  return DEvaluator(p, pot, cfg).equivalence_defect();
}

}  // namespace resd

#include "resd/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "resd/errors.hpp"

namespace resd::oracle {

namespace {

void check_excluded(cplx lambda, cplx h) {
  if (std::abs(lambda) == 0.0 || std::abs(lambda - h) == 0.0)
    fail(Err::ExcludedPoint,
         "square-well closed forms are singular at lambda = 0 and lambda = h");
}

cplx char_residual(cplx kappa, cplx k, cplx h, double d) {
  cplx q = kappa - k;
  return std::exp(2.0 * kappa * d) - q * q * q * q / (h * h);
}

}  // namespace

cplx squarewell_characteristic(const SurfacePoint& p, cplx h, double a1,
                               double a2) {
  check_excluded(p.lambda(), h);
  const double d = a2 - a1;
  cplx kappa = std::sqrt(h - p.lambda());  // principal, Re >= 0
  cplx r = char_residual(kappa, p.k(), h, d);
  if (std::abs(kappa.real()) < 1e-10) {
    cplx r2 = char_residual(-kappa, p.k(), h, d);
    if (std::abs(r2) < std::abs(r)) r = r2;
  }
  return r;
}

std::vector<SurfacePoint> squarewell_bound_states(double h, double a1,
                                                  double a2) {
  const double d = a2 - a1;
  if (!(h < 0.0) || !(d > 0.0))
    fail(Err::UnsupportedPotential,
         "bound-state enumeration needs h < 0 and a nonempty well");

  // Parametrize by u = kappa d / 2 with kappa = sqrt(-h - k^2) in (0, sqrt(-h)),
  // k = sqrt(-h - kappa^2) the decay rate.  Even states solve tan u = k/kappa,
  // odd states cot u = -k/kappa.  Each branch is searched by sign scan plus
  // bisection; no monotonicity assumption.
  const double umax = 0.5 * d * std::sqrt(-h);
  auto k_of_u = [&](double u) {
    double kap = 2.0 * u / d;
    double r = -h - kap * kap;
    return std::sqrt(std::max(r, 0.0));
  };
  auto even_f = [&](double u) { return std::tan(u) - k_of_u(u) / (2.0 * u / d); };
  auto odd_f = [&](double u) { return 1.0 / std::tan(u) + k_of_u(u) / (2.0 * u / d); };

  std::vector<SurfacePoint> out;
  auto scan_branch = [&](double lo, double hi, auto&& f) {
    lo = std::max(lo, 1e-12);
    hi = std::min(hi, umax - 1e-12);
    if (hi <= lo) return;
    const int ns = 128;
    double prev_u = lo, prev_f = f(lo);
    for (int i = 1; i <= ns; ++i) {
      double u = lo + (hi - lo) * i / ns;
      double fu = f(u);
      if (std::isfinite(prev_f) && std::isfinite(fu) && prev_f * fu < 0.0) {
        double a = prev_u, b = u, fa = prev_f;
        for (int it = 0; it < 200; ++it) {
          double m = 0.5 * (a + b), fm = f(m);
          if (fa * fm <= 0.0)
            b = m;
          else
            a = m, fa = fm;
        }
        double kr = k_of_u(0.5 * (a + b));
        if (kr > 0.0) out.emplace_back(cplx(kr, 0.0));
      }
      prev_u = u;
      prev_f = fu;
    }
  };

  const double pi = kPi;
  for (int m = 0; m * pi < umax; ++m) {
    scan_branch(m * pi, m * pi + 0.5 * pi, even_f);          // tan > 0 half
    scan_branch(m * pi + 0.5 * pi, (m + 1) * pi, odd_f);     // cot < 0 half
  }
  std::sort(out.begin(), out.end(), [](const SurfacePoint& x, const SurfacePoint& y) {
    return x.k().real() < y.k().real();
  });
  return out;
}

cplx squarewell_bbD_closed(const SurfacePoint& p, cplx h, double a1,
                           double a2) {
  check_excluded(p.lambda(), h);
  if (h == cplx(0.0)) return cplx(1.0);
  const double d = a2 - a1;
  const cplx k = p.k();
  // kappa = k sqrt(1 + h/k^2) keeps kappa near k when |h| is small, so the
  // formula stays finite through the shallow-well limit; the expression is
  // branch-invariant so any square root of h - lambda is acceptable.
  cplx kappa = k * std::sqrt(cplx(1.0) + h / (k * k));
  cplx sum = kappa + k;
  // (kappa-k)^4/h^2 = ((kappa-k)/(kappa+k))^2 since h = kappa^2 - k^2; the
  // ratio form avoids dividing by a small h.
  cplx ratio = (kappa - k) / sum;
  cplx bracket = cplx(1.0) - ratio * ratio * std::exp(-2.0 * kappa * d);
  return std::exp((kappa - k) * d) * sum * sum / (4.0 * k * kappa) * bracket;
}

std::vector<OracleRoot> poschl_teller_roots(cplx V0, Sheet sheet, int n_min,
                                            int n_max) {
  cplx inner = std::sqrt(V0 + 0.25);
  std::vector<OracleRoot> out;
  for (int n = n_min; n <= n_max; ++n) {
    for (int s : {+1, -1}) {
      cplx k = double(s) * inner - (n + 0.5);
      if (k.real() > 0.0 ? sheet != Sheet::First
                         : (k.real() < 0.0 ? sheet != Sheet::Second : true))
        continue;
      bool dup = false;
      for (const auto& r : out)
        if (std::abs(r.point.k() - k) < 1e-12) dup = true;
      if (dup) continue;
      cplx half = k + double(n) + 0.5;
      double resid = std::abs(half * half - (V0 + 0.25));
      out.push_back({SurfacePoint(k),
                     sheet == Sheet::First ? Family::PoschlTellerFirst
                                           : Family::PoschlTellerSecond,
                     n, resid});
    }
  }
  std::sort(out.begin(), out.end(), [](const OracleRoot& a, const OracleRoot& b) {
    if (a.n != b.n) return a.n < b.n;
    return a.point.k().imag() > b.point.k().imag();
  });
  return out;
}

std::vector<SemiclassicalRoot> semiclassical_roots(double V0, double hbar,
                                                   int n_min, int n_max) {
  if (!(V0 < 0.0) || !(hbar > 0.0))
    fail(Err::UnsupportedPotential,
         "semiclassical ladder needs V0 < 0 and hbar > 0");
  cplx inner = std::sqrt(cplx(V0 + 0.25 * hbar * hbar));
  std::vector<SemiclassicalRoot> out;
  for (int n = n_min; n <= n_max; ++n) {
    for (int s : {+1, -1}) {
      cplx k = double(s) * inner - hbar * (n + 0.5);
      if (!(k.real() < 0.0)) continue;  // second sheet only
      cplx leading =
          cplx(-V0) + cplx(0.0, 2.0 * double(s) * std::sqrt(-V0)) * (n + 0.5) * hbar;
      out.push_back({SurfacePoint(k), leading, n, s});
    }
  }
  return out;
}

}  // namespace resd::oracle

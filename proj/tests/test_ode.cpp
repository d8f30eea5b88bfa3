#include "resd/ode.hpp"

#include "doctest.h"

#include <array>
#include <cmath>

using namespace resd;

namespace {

Potential zero_pot() {
  return Potential::custom([](cplx) { return cplx(0.0); }, 0.0, 1.0,
                           std::make_pair(-0.5, 0.5));
}

}  // namespace

TEST_CASE("ode: free fundamental pair is cosh / sinh") {
  Potential z = zero_pot();
  SurfacePoint p(cplx(1.3, 0.4));
  cplx k = p.k();
  RayGrid g = make_ray_grid(z, 0.0, 4.0, {}, std::abs(k));
  auto [nu1, nu2] = solve_fundamental(p, z, g, 0.0, OdeTols(1e-12));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    cplx t(g.t[i]);
    worst = std::max(worst, std::abs(nu1.u[i] - std::cosh(k * t)));
    worst = std::max(worst, std::abs(nu1.du[i] - k * std::sinh(k * t)));
    worst = std::max(worst, std::abs(nu2.u[i] - std::sinh(k * t) / k));
    worst = std::max(worst, std::abs(nu2.du[i] - std::cosh(k * t)));
  }
  // relative to the endpoint magnitude cosh(|k| L) ~ 120
  CHECK(worst < 1e-8);
  CHECK(wronskian_defect(g, nu1, nu2) < 1e-10);
}

TEST_CASE("ode: free solutions on a rotated ray track cosh(k t e^{i "
          "theta})") {
  Potential z = zero_pot();
  SurfacePoint p(cplx(-0.8, 1.1));
  cplx k = p.k();
  double th = 0.7;
  cplx ray = std::polar(1.0, th);
  RayGrid g = make_ray_grid(z, th, 3.0, {}, std::abs(k));
  auto [nu1, nu2] = solve_fundamental(p, z, g, 0.0, OdeTols(1e-12));
  std::size_t i = g.index_of(2.0);
  cplx zz = 2.0 * ray;
  CHECK(std::abs(nu1.u[i] - std::cosh(k * zz)) < 1e-9);
  CHECK(std::abs(nu2.du[i] - std::cosh(k * zz)) < 1e-9);
}

TEST_CASE("ode: square well solution matches the piecewise closed form") {
  // h = -10, lambda = -1: inside the well u'' = -9u, outside u'' = u.
  Potential sw = Potential::square_well(cplx(-10.0), -1.0, 1.0);
  SurfacePoint p(cplx(1.0, 0.0));
  RayGrid g = make_ray_grid(sw, 0.0, 3.0, {}, 1.0);
  auto [nu1, nu2] = solve_fundamental(p, sw, g, 0.0, OdeTols(1e-12));
  // nu1 = cos(3t) on [-1, 1]
  std::size_t i0 = g.index_of(1.0);
  CHECK(std::abs(nu1.u[i0] - std::cos(3.0)) < 1e-11);
  CHECK(std::abs(nu1.du[i0] + 3.0 * std::sin(3.0)) < 1e-11);
  // matched continuation to t = 3: A cosh(t-1) + B sinh(t-1)
  double s = 2.0;
  cplx ref = std::cos(3.0) * std::cosh(s) - 3.0 * std::sin(3.0) * std::sinh(s);
  std::size_t i3 = g.index_of(3.0);
  CHECK(std::abs(nu1.u[i3] - ref) < 1e-10);
  // nu2 = sin(3t)/3 inside
  std::size_t im = g.index_of(-1.0);
  CHECK(std::abs(nu2.u[im] + std::sin(3.0) / 3.0) < 1e-11);
  CHECK(wronskian_defect(g, nu1, nu2) < 1e-10);
}

TEST_CASE("ode: Poschl-Teller odd solution is sech(z) tanh(z) at lambda = "
          "-1") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  SurfacePoint p(cplx(1.0, 0.0));
  for (double th : {0.0, -0.35}) {
    cplx ray = std::polar(1.0, th);
    RayGrid g = make_ray_grid(pt, th, 6.0, {}, 1.0);
    auto [nu1, nu2] = solve_fundamental(p, pt, g, 0.0, OdeTols(1e-12));
    double worst = 0.0;
    for (double x : {-4.0, -1.5, 2.0, 5.0}) {
      std::size_t i = g.index_of(x);
      cplx zz = x * ray;
      cplx ref = std::tanh(zz) / std::cosh(zz);
      worst = std::max(worst, std::abs(nu2.u[i] - ref));
    }
    CHECK(worst < 1e-10);
    CHECK(wronskian_defect(g, nu1, nu2) < 1e-9);
  }
}

TEST_CASE("ode: dense output interpolates between samples") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  SurfacePoint p(cplx(1.0, 0.0));
  RayGrid g = make_ray_grid(pt, 0.0, 5.0, {}, 1.0);
  auto [nu1, nu2] = solve_fundamental(p, pt, g, 0.0, OdeTols(1e-12));
  (void)nu1;
  for (double x : {0.1234, -1.87654, 3.999}) {
    cplx ref = std::tanh(cplx(x)) / std::cosh(cplx(x));
    cplx refd = (1.0 - 2.0 * std::pow(std::tanh(cplx(x)), 2)) /
                std::cosh(cplx(x));
    CHECK(std::abs(dense_value(g, nu2, x) - ref) < 1e-9);
    CHECK(std::abs(dense_deriv(g, nu2, x) - refd) < 1e-7);
  }
}

TEST_CASE("ode: solutions depend linearly on the initial data") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  SurfacePoint p(cplx(0.7, 0.6));
  RayGrid g = make_ray_grid(pt, 0.0, 5.0, {}, 1.0);
  OdeTols tol(1e-12);
  auto [nu1, nu2] = solve_fundamental(p, pt, g, 0.0, tol);
  std::array<cplx, 4> ic = {cplx(0.3, -1.1), cplx(2.0, 0.5), cplx(-0.7, 0.2),
                            cplx(0.0, 1.4)};
  auto [w1, w2] = solve_with_ic(p, pt, g, 0.0, tol, ic);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    worst = std::max(worst, std::abs(w1.u[i] - (ic[0] * nu1.u[i] +
                                                ic[1] * nu2.u[i])));
    worst = std::max(worst, std::abs(w2.du[i] - (ic[2] * nu1.du[i] +
                                                 ic[3] * nu2.du[i])));
  }
  double mag = 0.0;
  for (std::size_t i = 0; i < g.t.size(); ++i)
    mag = std::max(mag, std::abs(w1.u[i]));
  CHECK(worst / mag < 1e-9);
}

TEST_CASE("ode: Jost solutions carry pure exponentials outside the well") {
  Potential sw = Potential::square_well(cplx(-10.0), 0.0, 1.0);
  SurfacePoint p(cplx(0.9, 0.35));
  cplx k = p.k();
  RayGrid g = make_ray_grid(sw, 0.0, 3.0, {}, std::abs(k));
  auto [mp, mm] = solve_jost(p, sw, g, OdeTols(1e-12));
  // mu_plus = e^{-k t} exactly for t >= 1, mu_minus = e^{k t} for t <= 0
  for (double x : {1.0, 1.8, 2.6}) {
    std::size_t i = g.index_of(x);
    CHECK(std::abs(mp.u[i] - std::exp(-k * x)) /
              std::abs(std::exp(-k * x)) < 1e-9);
  }
  for (double x : {-2.5, -0.9, 0.0}) {
    std::size_t i = g.index_of(x);
    CHECK(std::abs(mm.u[i] - std::exp(k * x)) / std::abs(std::exp(k * x)) <
          1e-9);
  }
}

TEST_CASE("ode: Jost boundary data must decay") {
  Potential sw = Potential::square_well(cplx(-10.0), 0.0, 1.0);
  SurfacePoint p(cplx(-0.9, 0.35));  // second sheet, theta = 0
  RayGrid g = make_ray_grid(sw, 0.0, 3.0, {}, 1.0);
  try {
    solve_jost(p, sw, g, OdeTols(1e-10));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Err::DecayViolation);
  }
}

TEST_CASE("ode: x0 must be a grid edge") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  SurfacePoint p(cplx(1.0, 0.0));
  RayGrid g = make_ray_grid(pt, 0.0, 4.0, {}, 1.0);
  CHECK_THROWS(solve_fundamental(p, pt, g, 0.333, OdeTols(1e-10)));
}

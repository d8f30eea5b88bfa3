#include "resd/oracle.hpp"

#include "doctest.h"

#include <cmath>

using namespace resd;

TEST_CASE("oracle: square-well bound state counts and residuals") {
  // depth 10, width 1: sqrt(10)/2 just clears pi/2, so exactly two states
  auto narrow = oracle::squarewell_bound_states(-10.0, 0.0, 1.0);
  CHECK(narrow.size() == 2);
  // width 2 fits three
  auto wide = oracle::squarewell_bound_states(-10.0, -1.0, 1.0);
  CHECK(wide.size() == 3);
  for (const auto& p : wide) {
    CHECK(p.sheet() == Sheet::First);
    CHECK(p.k().imag() == 0.0);
    cplx r = oracle::squarewell_characteristic(p, cplx(-10.0), -1.0, 1.0);
    CHECK(std::abs(r) < 1e-10);
    // bound states are roots of the closed-form determinant too
    CHECK(std::abs(oracle::squarewell_bbD_closed(p, cplx(-10.0), -1.0, 1.0)) <
          1e-9);
  }
  // energies interlace below zero and above the well bottom
  for (std::size_t i = 1; i < wide.size(); ++i)
    CHECK(wide[i - 1].lambda().real() < wide[i].lambda().real());
  CHECK(wide.front().lambda().real() > -10.0);
  CHECK(wide.back().lambda().real() < 0.0);
}

TEST_CASE("oracle: closed-form determinant tends to 1 for a vanishing "
          "well") {
  SurfacePoint p(cplx(0.8, 0.3));
  CHECK(oracle::squarewell_bbD_closed(p, cplx(0.0), 0.0, 1.0) == cplx(1.0));
  cplx weak = oracle::squarewell_bbD_closed(p, cplx(1e-8), 0.0, 1.0);
  CHECK(std::abs(weak - cplx(1.0)) < 1e-7);
}

TEST_CASE("oracle: closed form rejects the excluded energies") {
  // lambda = h makes the inside momentum vanish
  CHECK_THROWS_AS(oracle::squarewell_bbD_closed(
                      SurfacePoint(cplx(std::sqrt(10.0), 0.0)), cplx(-10.0),
                      0.0, 1.0),
                  Error);
}

TEST_CASE("oracle: Poschl-Teller ladder on both sheets") {
  auto first = oracle::poschl_teller_roots(cplx(6.0), Sheet::First, 0, 10);
  REQUIRE(first.size() == 2);
  CHECK(std::abs(first[0].point.k() - cplx(2.0)) < 1e-12);
  CHECK(std::abs(first[1].point.k() - cplx(1.0)) < 1e-12);

  auto second = oracle::poschl_teller_roots(cplx(6.0), Sheet::Second, 0, 4);
  for (const auto& r : second) {
    CHECK(r.point.k().real() < 0.0);
    // each root sits on the ladder k = +-sqrt(V0 + 1/4) - n - 1/2
    cplx inner = std::sqrt(cplx(6.25));
    cplx up = r.point.k() + cplx(r.n + 0.5);
    CHECK((std::abs(up - inner) < 1e-10 || std::abs(up + inner) < 1e-10));
  }

  // V0 = -1: the n = 0 resonance pair off the real axis
  auto pair = oracle::poschl_teller_roots(cplx(-1.0), Sheet::Second, 0, 0);
  REQUIRE(pair.size() == 2);
  double rt3 = std::sqrt(3.0) / 2.0;
  bool up_found = false, dn_found = false;
  for (const auto& r : pair) {
    if (std::abs(r.point.k() - cplx(-0.5, rt3)) < 1e-12) up_found = true;
    if (std::abs(r.point.k() - cplx(-0.5, -rt3)) < 1e-12) dn_found = true;
  }
  CHECK(up_found);
  CHECK(dn_found);
}

TEST_CASE("oracle: semiclassical ladder collapses onto the leading order") {
  double prev = -1.0;
  for (double h : {0.2, 0.1, 0.05}) {
    auto roots = oracle::semiclassical_roots(-1.0, h, 0, 0);
    REQUIRE(!roots.empty());
    // pick the member with Im lambda > 0
    const oracle::SemiclassicalRoot* r = nullptr;
    for (const auto& c : roots)
      if (c.exact.lambda().imag() > 0.0) r = &c;
    REQUIRE(r != nullptr);
    double ratio = std::abs(r->exact.lambda() - r->leading) / (h * h);
    if (prev > 0.0) {
      CHECK(ratio / prev < 2.0);
      CHECK(prev / ratio < 2.0);
    }
    prev = ratio;
  }
}

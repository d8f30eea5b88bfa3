#include "resd/locate.hpp"

#include "doctest.h"

#include <cmath>

#include "resd/oracle.hpp"

using namespace resd;

TEST_CASE("locate: winding numbers around Poschl-Teller roots") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  DConfig cfg;
  CHECK(count_zeros({cplx(0.5, -0.4), cplx(1.6, 0.4)}, pt, cfg) == 1);
  CHECK(count_zeros({cplx(0.4, -0.3), cplx(2.4, 0.3)}, pt, cfg) == 2);
  CHECK(count_zeros({cplx(1.1, 0.3), cplx(1.9, 0.9)}, pt, cfg) == 0);
}

TEST_CASE("locate: refines the first-sheet Poschl-Teller pair") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  DConfig cfg;
  LocateOutcome out =
      find_resonances({cplx(0.4, -0.3), cplx(2.4, 0.3)}, pt, cfg);
  REQUIRE(out.roots.size() == 2);
  CHECK(out.clusters.empty());
  CHECK(std::abs(out.roots[0].point.k() - cplx(1.0)) < 1e-8);
  CHECK(std::abs(out.roots[1].point.k() - cplx(2.0)) < 1e-8);
  for (const auto& r : out.roots) {
    CHECK(r.multiplicity == 1);
    CHECK(r.abs_D < 1e-10);
    CHECK(r.eigen_residual < 1e-6);
    // the eigenvector coefficients are normalized
    CHECK(std::abs(std::sqrt(std::norm(r.C1) + std::norm(r.C2)) - 1.0) <
          1e-12);
  }
}

TEST_CASE("locate: square-well bound states agree with the bisection "
          "oracle") {
  Potential sw = Potential::square_well(cplx(-10.0), -1.0, 1.0);
  auto expected = oracle::squarewell_bound_states(-10.0, -1.0, 1.0);
  DConfig cfg;
  LocateOutcome out =
      find_resonances({cplx(0.02, -0.25), cplx(3.3, 0.25)}, sw, cfg);
  REQUIRE(out.roots.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(std::abs(out.roots[i].point.k() - expected[i].k()) < 1e-8);
}

TEST_CASE("locate: empty box yields no roots and no work after the "
          "winding") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  DConfig cfg;
  LocateOutcome out =
      find_resonances({cplx(0.3, 0.6), cplx(0.9, 1.4)}, pt, cfg);
  CHECK(out.roots.empty());
  CHECK(out.clusters.empty());
}

TEST_CASE("locate: second-sheet pair through a rotated ray") {
  // V0 = -1: resonances at k = -1/2 +- i sqrt(3)/2; the upper one sits in
  // the strip and needs no rotation
  Potential pt = Potential::poschl_teller(cplx(-1.0));
  DConfig cfg;
  cfg.method = Method::RealAxis;
  LocateOutcome out =
      find_resonances({cplx(-0.9, 0.5), cplx(-0.1, 1.2)}, pt, cfg);
  REQUIRE(out.roots.size() == 1);
  CHECK(std::abs(out.roots[0].point.k() -
                 cplx(-0.5, std::sqrt(3.0) / 2.0)) < 1e-8);
  CHECK(out.roots[0].point.sheet() == Sheet::Second);
}

TEST_CASE("locate: eigenfunction samples solve the equation") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  DConfig cfg;
  std::vector<double> xs;
  for (int i = 0; i <= 16; ++i) xs.push_back(-2.0 + 4.0 * i / 16.0);
  Eigenfunction ef = eigenfunction(SurfacePoint(cplx(1.0)), pt, cfg, xs);
  CHECK(ef.residual < 1e-6);
  CHECK(ef.sv_ratio < 1e-8);
  REQUIRE(ef.samples.size() == xs.size());
  // lambda = -1 eigenfunction is sech tanh up to scale; compare shapes at
  // two symmetric points
  cplx a = ef.samples[2].mu, b = ef.samples[14].mu;
  double x = xs[14];
  cplx ref = std::tanh(x) / std::cosh(x);
  CHECK(std::abs(a + b) / std::abs(b) < 1e-7);  // odd
  CHECK(std::abs(b / ref - ef.samples[8 + 4].mu /
                               (std::tanh(xs[12]) / std::cosh(xs[12]))) /
            std::abs(b / ref) <
        1e-6);  // single overall scale
}

TEST_CASE("locate: eigenfunction extraction refuses a non-root") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  DConfig cfg;
  try {
    eigenfunction(SurfacePoint(cplx(1.37, 0.11)), pt, cfg, {0.0, 0.5});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotARoot);
  }
}

TEST_CASE("locate: contour validation") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  DConfig cfg;
  // degenerate rectangle
  CHECK_THROWS_AS(count_zeros({cplx(1.0, 0.5), cplx(1.0, 1.5)}, pt, cfg),
                  Error);
  // box entirely inside the excluded band around the cut
  try {
    count_zeros({cplx(-5e-4, 0.5), cplx(5e-4, 1.5)}, pt, cfg);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Err::ExcludedPoint);
  }
}

TEST_CASE("locate: threaded and serial searches agree") {
  Potential pt = Potential::poschl_teller(cplx(6.0));
  DConfig cfg;
  ContourSpec spec{cplx(0.4, -0.3), cplx(2.4, 0.3)};
  LocateOutcome serial = find_resonances(spec, pt, cfg, 1e-9, 1e-6, 1);
  LocateOutcome threaded = find_resonances(spec, pt, cfg, 1e-9, 1e-6, 4);
  REQUIRE(serial.roots.size() == threaded.roots.size());
  for (std::size_t i = 0; i < serial.roots.size(); ++i)
    CHECK(std::abs(serial.roots[i].point.k() -
                   threaded.roots[i].point.k()) < 1e-12);
}

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "resd/ode.hpp"

namespace resd {

enum class Method { Auto, RealAxis, RotatedRay };

struct DConfig {
  Method method = Method::Auto;
  double theta = std::numeric_limits<double>::quiet_NaN();  // NaN: automatic
  double L = 0.0;                                           // <= 0: automatic
  std::vector<double> x_eval;  // empty: default anchors scaled to the grid
  double quad_tol = 1e-10;
  OdeTols ode_tol = {};
  double x0 = 0.0;
  double strip_margin = 0.05;
};

struct DValue {
  cplx D, Dp;  // D(x, lambda, mu) and its x-derivative
};

// Automatic ray angle for a single point: 0 inside the decay strip (with
// margin), otherwise the rotated-ray rule theta = -sgn(arg k) *
// min(0.9 alpha, max(0.2, |arg k| - pi/2 + 0.2)).
double select_theta(const SurfacePoint& p, const Potential& pot,
                    const DConfig& cfg = {});

// One ray angle valid on a whole rectangle (corners klo, khi); the angle is
// validated against boundary samples of the rectangle.
double region_theta(cplx klo, cplx khi, const Potential& pot,
                    const DConfig& cfg = {});

// Smallest truncation length with the integral tails below quad_tol.
double auto_L(const SurfacePoint& p, const Potential& pot, double theta,
              double quad_tol);

// Evaluator for D(x, lambda, mu) and the 2x2 determinant at one surface
// point.  Construction fixes the ray, the truncation, the grid and the
// fundamental pair; evaluations on further solution samples (Jost pairs,
// recombined pairs) reuse the same grid.  Immutable after construction
// except for the lazily solved Jost pair.
class DEvaluator {
 public:
  DEvaluator(const SurfacePoint& p, const Potential& pot, DConfig cfg = {});

  const SurfacePoint& point() const { return p_; }
  double theta() const { return grid_.theta; }
  double L() const { return grid_.L; }
  const RayGrid& grid() const { return grid_; }
  const std::vector<double>& anchors() const { return anchors_; }
  const SolutionSamples& nu1() const { return nu1_; }
  const SolutionSamples& nu2() const { return nu2_; }

  // D and D' at anchor index ai for a solution sampled on grid().
  DValue d_value(const SolutionSamples& mu, std::size_t ai) const;

  // Determinant of [[D(nu1), D(nu2)], [D'(nu1), D'(nu2)]] averaged over the
  // anchors; anchor_spread() is the max pairwise difference relative to the
  // determinant's term magnitude.
  cplx bbD() const;
  double anchor_spread() const;

  // Determinant on an arbitrary pair sampled on this grid.
  cplx bbD_of(const SolutionSamples& a, const SolutionSamples& b) const;

  // Jost-based quantities; solve on first use.
  const SolutionSamples& jost_plus();
  const SolutionSamples& jost_minus();
  cplx evans();

  // |2k bbD - E| / max(|E|, floor).
  double equivalence_defect();

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void compute_determinant() const;

  SurfacePoint p_;
  const Potential& pot_;
  DConfig cfg_;
  RayGrid grid_;
  std::vector<double> anchors_;
  std::vector<std::size_t> anchor_idx_;
  std::vector<cplx> vn_;  // V at grid samples along the ray
  SolutionSamples nu1_, nu2_;
  bool have_jost_ = false;
  SolutionSamples jp_, jm_;
  mutable bool have_det_ = false;
  mutable cplx det_;
  mutable double spread_ = 0.0;
  std::vector<std::string> warnings_;
};

// Convenience one-shot forms.
cplx bbD(const SurfacePoint& p, const Potential& pot, const DConfig& cfg = {});
cplx evans(const SurfacePoint& p, const Potential& pot,
           const DConfig& cfg = {});
double check_equivalence(const SurfacePoint& p, const Potential& pot,
                         const DConfig& cfg = {});

}  // namespace resd

#include "resd/ode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "resd/quadrature.hpp"

namespace resd {

namespace {

// q(t, witness) = e^{2 i theta} (V(t e^{i theta}) - lambda); the witness
// point selects the square-well piece so stage evaluations at a jump are
// taken from the interior of the current interval.
using QFun = std::function<cplx(double, double)>;

QFun make_q(const SurfacePoint& p, const Potential& pot, double theta) {
  if (pot.kind() == Potential::Kind::SquareWell && theta != 0.0)
    fail(Err::OutsideAnalyticityDomain,
         "square well admits no rotated ray");
  cplx lambda = p.lambda();
  cplx ph2 = std::exp(cplx(0.0, 2.0 * theta));
  cplx ray = std::exp(cplx(0.0, theta));
  return [=, &pot](double t, double witness) -> cplx {
    cplx V = (pot.kind() == Potential::Kind::SquareWell ||
              (theta == 0.0 && !pot.breakpoints().empty()))
                 ? pot.eval_piecewise(t, witness)
                 : pot.eval(t * ray);
    return ph2 * (V - lambda);
  };
}

using State = std::array<cplx, 4>;

State deriv(const QFun& q, double t, double w, const State& y) {
  cplx qq = q(t, w);
  return {y[1], qq * y[0], y[3], qq * y[2]};
}

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                 a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Advance y from ta to tb (either direction) within one smooth interval;
// witness stays fixed.  k1 carries the FSAL derivative and must be valid at
// entry for (ta, y).
void step_interval(const QFun& q, double ta, double tb, double witness,
                   State& y, State& k1, const OdeTols& tol) {
  double t = ta;
  double h = tb - ta;
  const double dir = (tb > ta) ? 1.0 : -1.0;
  while (true) {
    bool last = ((t + h) - tb) * dir >= 0.0;
    if (last) h = tb - t;

    auto at = [&](double frac, const State& yy) {
      return deriv(q, t + frac * h, witness, yy);
    };
    State y2, y3, y4, y5, y6, y7;
    for (int i = 0; i < 4; ++i) y2[i] = y[i] + h * a21 * k1[i];
    State k2 = at(c2, y2);
    for (int i = 0; i < 4; ++i)
      y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    State k3 = at(c3, y3);
    for (int i = 0; i < 4; ++i)
      y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    State k4 = at(c4, y4);
    for (int i = 0; i < 4; ++i)
      y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                          a54 * k4[i]);
    State k5 = at(c5, y5);
    for (int i = 0; i < 4; ++i)
      y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    State k6 = at(1.0, y6);
    for (int i = 0; i < 4; ++i)
      y7[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                          a75 * k5[i] + a76 * k6[i]);
    State k7 = at(1.0, y7);  // FSAL: y7 is the 5th-order result

    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
      cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                    e6 * k6[i] + e7 * k7[i]);
      double sc = tol.abs +
                  tol.rel * std::max(std::abs(y[i]), std::abs(y7[i]));
      err += std::norm(e / sc);
    }
    err = std::sqrt(err / 4.0);

    bool ok = std::isfinite(err) && err <= 1.0;
    if (ok) {
      t = last ? tb : t + h;
      y = y7;
      k1 = k7;
      if (last) return;
    }
    double fac = std::isfinite(err) && err > 0.0
                     ? 0.9 * std::pow(err, -0.2)
                     : (ok ? 5.0 : 0.5);
    h *= std::clamp(fac, 0.2, 5.0);
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
      fail(Err::StepSizeUnderflow, "ray integration stalled at t = " +
                                       std::to_string(t));
  }
}

struct Recorder {
  const RayGrid* g;
  const QFun* q;
  double theta;
  SolutionSamples* A;
  SolutionSamples* B;

  void operator()(std::size_t i, const State& y) const {
    cplx em = std::exp(cplx(0.0, -theta));
    double ti = g->t[i];
    double wl = (i > 0) ? 0.5 * (g->t[i - 1] + ti) : ti;
    double wr = (i + 1 < g->t.size()) ? 0.5 * (ti + g->t[i + 1]) : ti;
    cplx ql = (*q)(ti, wl), qr = (*q)(ti, wr);
    A->u[i] = y[0];
    A->du[i] = em * y[1];
    A->d2l[i] = ql * y[0];
    A->d2r[i] = qr * y[0];
    if (B) {
      B->u[i] = y[2];
      B->du[i] = em * y[3];
      B->d2l[i] = ql * y[2];
      B->d2r[i] = qr * y[2];
    }
  }
};

// March from grid index i0 to i1 recording at every sample in between.  The
// FSAL derivative is refreshed at each grid point because the witness (and
// with it the potential piece) can change across a breakpoint.
void sweep(const RayGrid& g, const QFun& q, std::size_t i0, std::size_t i1,
           State y, const OdeTols& tol, const Recorder& rec) {
  rec(i0, y);
  std::size_t i = i0;
  while (i != i1) {
    std::size_t j = (i1 > i0) ? i + 1 : i - 1;
    double w = 0.5 * (g.t[i] + g.t[j]);
    State k1 = deriv(q, g.t[i], w, y);
    step_interval(q, g.t[i], g.t[j], w, y, k1, tol);
    rec(j, y);
    i = j;
  }
}

void alloc(SolutionSamples& s, std::size_t n) {
  s.u.assign(n, cplx(0.0));
  s.du.assign(n, cplx(0.0));
  s.d2l.assign(n, cplx(0.0));
  s.d2r.assign(n, cplx(0.0));
}

}  // namespace

std::size_t RayGrid::index_of(double x) const {
  auto it = std::lower_bound(t.begin(), t.end(), x - 1e-9);
  std::size_t best = t.size();
  double bd = 1e-9 * std::max(1.0, std::abs(x));
  for (; it != t.end() && *it <= x + bd; ++it) {
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (qw[i] == 0.0 && std::abs(*it - x) <= bd) {
      best = i;
      break;
    }
  }
  if (best == t.size())
    fail(Err::OutsideAnalyticityDomain,
         "x = " + std::to_string(x) + " is not a grid edge");
  return best;
}

bool RayGrid::is_edge(std::size_t i) const { return qw[i] == 0.0; }

RayGrid make_ray_grid(const Potential& pot, double theta, double L,
                      const std::vector<double>& anchors,
                      double wavenumber_hint) {
  if (!(L > 0.0)) fail(Err::DivergentIntegral, "truncation length must be > 0");
  std::vector<double> e = {-L, 0.0, L};
  for (double a : anchors)
    if (std::abs(a) <= L) e.push_back(a);
  for (double b : pot.breakpoints())
    if (std::abs(b) < L) e.push_back(b);
  std::sort(e.begin(), e.end());
  const double merge = 1e-9 * std::max(1.0, L);
  std::vector<double> edges;
  for (double x : e)
    if (edges.empty() || x - edges.back() > merge) edges.push_back(x);

  const double w_max = 3.2 / std::max(1.0, wavenumber_hint);
  const GaussRule& gl = gauss_legendre(16);

  RayGrid g;
  g.theta = theta;
  g.L = L;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    double a = edges[s], b = edges[s + 1];
    int m = static_cast<int>(std::ceil((b - a) / w_max));
    m = std::max(m, 1);
    for (int j = 0; j < m; ++j) {
      double lo = a + (b - a) * j / m;
      double hi = (j + 1 == m) ? b : a + (b - a) * (j + 1) / m;
      if (j == 0) lo = a;  // keep the edge value exact
      g.edges.push_back(g.t.size());
      g.t.push_back(lo);
      g.qw.push_back(0.0);
      double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (std::size_t n = 0; n < 16; ++n) {
        g.t.push_back(mid + half * gl.x[n]);
        g.qw.push_back(half * gl.w[n]);
      }
    }
  }
  g.edges.push_back(g.t.size());
  g.t.push_back(edges.back());
  g.qw.push_back(0.0);
  return g;
}

std::pair<SolutionSamples, SolutionSamples> solve_with_ic(
    const SurfacePoint& p, const Potential& pot, const RayGrid& g, double x0,
    const OdeTols& tol, const std::array<cplx, 4>& ic) {
  QFun q = make_q(p, pot, g.theta);
  std::size_t i0 = g.index_of(x0);
  SolutionSamples A, B;
  alloc(A, g.t.size());
  alloc(B, g.t.size());
  Recorder rec{&g, &q, g.theta, &A, &B};
  cplx ray = std::exp(cplx(0.0, g.theta));
  // ic holds z-derivatives; the state carries t-derivatives.
  State y0 = {ic[0], ray * ic[1], ic[2], ray * ic[3]};
  if (i0 + 1 < g.t.size()) sweep(g, q, i0, g.t.size() - 1, y0, tol, rec);
  if (i0 > 0) sweep(g, q, i0, 0, y0, tol, rec);
  return {std::move(A), std::move(B)};
}

std::pair<SolutionSamples, SolutionSamples> solve_fundamental(
    const SurfacePoint& p, const Potential& pot, const RayGrid& g, double x0,
    const OdeTols& tol) {
  return solve_with_ic(p, pot, g, x0, tol,
                       {cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)});
}

std::pair<SolutionSamples, SolutionSamples> solve_jost(
    const SurfacePoint& p, const Potential& pot, const RayGrid& g,
    const OdeTols& tol) {
  cplx k = p.k();
  cplx ray = std::exp(cplx(0.0, g.theta));
  if (!((k * ray).real() > 0.0))
    fail(Err::DecayViolation,
         "Jost boundary data grows: Re(k e^{i theta}) <= 0");
  QFun q = make_q(p, pot, g.theta);
  SolutionSamples P, M;
  alloc(P, g.t.size());
  alloc(M, g.t.size());

  // mu_plus from t = +L, mu_minus from t = -L; each occupies the first slot
  // of the 4-component state, the spare slot rides along as zero.
  cplx wP = std::exp(-k * g.L * ray);
  Recorder recP{&g, &q, g.theta, &P, nullptr};
  State yP = {wP, -k * ray * wP, cplx(0.0), cplx(0.0)};
  sweep(g, q, g.t.size() - 1, 0, yP, tol, recP);

  cplx wM = std::exp(k * (-g.L) * ray);
  Recorder recM{&g, &q, g.theta, &M, nullptr};
  State yM = {wM, k * ray * wM, cplx(0.0), cplx(0.0)};
  sweep(g, q, 0, g.t.size() - 1, yM, tol, recM);
  return {std::move(P), std::move(M)};
}

namespace {

// Quintic Hermite on [t0, t1] from values, first t-derivatives and second
// t-derivatives at the ends.
cplx hermite5(double s, double h, cplx u0, cplx m0, cplx c0, cplx u1,
              cplx m1, cplx c1, bool want_deriv) {
  double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  if (!want_deriv) {
    double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    double H2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    double H3 = 10 * s3 - 15 * s4 + 6 * s5;
    double H4 = -4 * s3 + 7 * s4 - 3 * s5;
    double H5 = 0.5 * (s3 - 2 * s4 + s5);
    return H0 * u0 + H1 * (h * m0) + H2 * (h * h * c0) + H3 * u1 +
           H4 * (h * m1) + H5 * (h * h * c1);
  }
  double D0 = -30 * s2 + 60 * s3 - 30 * s4;
  double D1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  double D2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
  double D3 = 30 * s2 - 60 * s3 + 30 * s4;
  double D4 = -12 * s2 + 28 * s3 - 15 * s4;
  double D5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
  return (D0 * u0 + D1 * (h * m0) + D2 * (h * h * c0) + D3 * u1 +
          D4 * (h * m1) + D5 * (h * h * c1)) /
         h;
}

cplx dense_eval(const RayGrid& g, const SolutionSamples& s, double x,
                bool want_deriv) {
  if (x < g.t.front() || x > g.t.back())
    fail(Err::OutsideAnalyticityDomain,
         "dense output requested beyond the truncation range");
  auto it = std::upper_bound(g.t.begin(), g.t.end(), x);
  std::size_t i = (it == g.t.begin())
                      ? 0
                      : static_cast<std::size_t>(it - g.t.begin()) - 1;
  if (i + 1 >= g.t.size()) i = g.t.size() - 2;
  cplx ray = std::exp(cplx(0.0, g.theta));
  if (g.t[i] == x && !want_deriv) return s.u[i];
  if (g.t[i] == x && want_deriv) return s.du[i];
  double h = g.t[i + 1] - g.t[i];
  double frac = (x - g.t[i]) / h;
  cplx v = hermite5(frac, h, s.u[i], ray * s.du[i], s.d2r[i], s.u[i + 1],
                    ray * s.du[i + 1], s.d2l[i + 1], want_deriv);
  // Stored derivatives are z-derivatives; the interpolation runs in t.
  return want_deriv ? v / ray : v;
}

}  // namespace

cplx dense_value(const RayGrid& g, const SolutionSamples& s, double x) {
  return dense_eval(g, s, x, false);
}

cplx dense_deriv(const RayGrid& g, const SolutionSamples& s, double x) {
  return dense_eval(g, s, x, true);
}

double wronskian_defect(const RayGrid& g, const SolutionSamples& a,
                        const SolutionSamples& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    cplx w = a.u[i] * b.du[i] - a.du[i] * b.u[i];
    worst = std::max(worst, std::abs(w - cplx(1.0)));
  }
  return worst;
}

cplx SolutionPair::value(int which, double x) const {
  return dense_value(grid, which == 0 ? a : b, x);
}

cplx SolutionPair::deriv(int which, double x) const {
  return dense_deriv(grid, which == 0 ? a : b, x);
}

SolutionPair fundamental_pair(const SurfacePoint& p, const Potential& pot,
                              double theta, double L, double x0,
                              const OdeTols& tol) {
  double hint = std::sqrt(std::abs(p.lambda()) + pot.scale());
  RayGrid g = make_ray_grid(pot, theta, L, {x0}, hint);
  auto [A, B] = solve_fundamental(p, pot, g, x0, tol);
  return SolutionPair{p, std::move(g), std::move(A), std::move(B)};
}

SolutionPair jost_pair(const SurfacePoint& p, const Potential& pot,
                       double theta, double L, const OdeTols& tol) {
  double hint = std::sqrt(std::abs(p.lambda()) + pot.scale());
  RayGrid g = make_ray_grid(pot, theta, L, {0.0}, hint);
  auto [A, B] = solve_jost(p, pot, g, tol);
  return SolutionPair{p, std::move(g), std::move(A), std::move(B)};
}

}  // namespace resd

#include "resd/locate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <mutex>
#include <optional>

#include "resd/errors.hpp"

namespace resd {

namespace {

struct Rect {
  cplx lo, hi;
};

cplx rect_center(const Rect& r) { return 0.5 * (r.lo + r.hi); }
double rect_diam(const Rect& r) { return std::abs(r.hi - r.lo); }

bool rect_contains(const Rect& r, cplx z, double slack) {
  return z.real() >= r.lo.real() - slack && z.real() <= r.hi.real() + slack &&
         z.imag() >= r.lo.imag() - slack && z.imag() <= r.hi.imag() + slack;
}

struct Engine {
  const Potential& pot;
  DConfig cfg;  // theta and L resolved for the whole region
  Rect region;
  double root_tol;
  double eig_tol;
  int max_depth;
  int edge_samples;  // initial samples per edge
  std::map<std::pair<double, double>, cplx> cache;
  std::mutex cache_mu;
  long long evals = 0;
  bool have_eval_warnings = false;
  LocateOutcome* out = nullptr;
  std::mutex out_mu;

  cplx eval(cplx k) {
    std::pair<double, double> key{k.real(), k.imag()};
    {
      std::lock_guard lk(cache_mu);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    DEvaluator ev(SurfacePoint(k), pot, cfg);
    cplx d = ev.bbD();
    std::lock_guard lk(cache_mu);
    cache.emplace(key, d);
    ++evals;
    if (!have_eval_warnings) {
      have_eval_warnings = true;
      std::lock_guard lo(out_mu);
      for (const auto& w : ev.warnings()) out->warnings.push_back(w);
    }
    return d;
  }

  void warn(std::string s) {
    std::lock_guard lk(out_mu);
    out->warnings.push_back(std::move(s));
  }
};

// Phase increment of D along the segment a -> b.  Samples are placed at
// dyadic fractions so each doubling reuses every previous evaluation from
// the cache.
double edge_phase(Engine& e, cplx a, cplx b) {
  int n = e.edge_samples;
  for (int attempt = 0;; ++attempt, n *= 2) {
    double total = 0.0;
    double minabs = std::numeric_limits<double>::infinity();
    double maxabs = 0.0;
    bool ok = true;
    cplx prev = e.eval(a);
    minabs = std::min(minabs, std::abs(prev));
    maxabs = std::max(maxabs, std::abs(prev));
    for (int i = 1; i <= n; ++i) {
      cplx z = a + (b - a) * (double(i) / n);
      cplx f = e.eval(z);
      double af = std::abs(f);
      minabs = std::min(minabs, af);
      maxabs = std::max(maxabs, af);
      if (af == 0.0)
        fail(Err::ZeroOnBoundary, "determinant vanishes on a contour edge");
      double d = std::arg(f / prev);
      if (!(std::abs(d) < 0.5 * kPi)) {
        ok = false;
        break;
      }
      total += d;
      prev = f;
    }
    if (minabs < 1e-9 * maxabs)
      fail(Err::ZeroOnBoundary,
           "determinant within 1e-9 of zero on a contour edge");
    if (ok) return total;
    if (attempt >= 8)
      fail(Err::PhaseTrackingFailed,
           "phase step >= pi/2 persists after eight sample doublings");
  }
}

int rect_winding(Engine& e, const Rect& r) {
  cplx c1 = r.lo;
  cplx c2{r.hi.real(), r.lo.imag()};
  cplx c3 = r.hi;
  cplx c4{r.lo.real(), r.hi.imag()};
  double total = edge_phase(e, c1, c2) + edge_phase(e, c2, c3) +
                 edge_phase(e, c3, c4) + edge_phase(e, c4, c1);
  double w = total / (2.0 * kPi);
  long rounded = std::lround(w);
  if (std::abs(w - double(rounded)) > 0.25)
    fail(Err::PhaseTrackingFailed,
         "boundary phase does not close to an integer winding");
  return int(rounded);
}

struct MullerOut {
  cplx z{};
  double absf = std::numeric_limits<double>::infinity();
  int iters = 0;
  bool converged = false;
};

// Muller iteration from z0.  Runs past the |D| tolerance down to step
// stagnation so the root is polished as far as the evaluation noise allows.
MullerOut muller(Engine& e, cplx z0, double scale, double ftol) {
  MullerOut best;
  cplx p0 = z0 + scale * cplx(-0.31, -0.17);
  cplx p1 = z0 + scale * cplx(0.27, 0.23);
  cplx p2 = z0;
  cplx f0 = e.eval(p0), f1 = e.eval(p1), f2 = e.eval(p2);
  auto consider = [&](cplx z, cplx f, int it) {
    double af = std::abs(f);
    if (af < best.absf) {
      best.z = z;
      best.absf = af;
      best.iters = it;
    }
  };
  consider(p0, f0, 0);
  consider(p1, f1, 0);
  consider(p2, f2, 0);
  for (int it = 1; it <= 50; ++it) {
    cplx q = (p2 - p1) / (p1 - p0);
    cplx A = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
    cplx B = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
    cplx C = (1.0 + q) * f2;
    cplx disc = std::sqrt(B * B - 4.0 * A * C);
    cplx den = (std::abs(B + disc) >= std::abs(B - disc)) ? B + disc : B - disc;
    cplx step;
    if (den == cplx(0.0)) {
      if (f2 == f1) break;
      step = -(p2 - p1) * f2 / (f2 - f1);
    } else {
      step = -(p2 - p1) * 2.0 * C / den;
    }
    double sl = std::abs(step);
    if (!std::isfinite(sl) || sl == 0.0) break;
    if (sl > 2.0 * scale) step *= 2.0 * scale / sl;
    cplx p3 = p2 + step;
    cplx f3 = e.eval(p3);
    if (!std::isfinite(std::abs(f3))) break;
    consider(p3, f3, it);
    if (std::abs(step) < 5e-16 * std::max(1.0, std::abs(p3))) break;
    p0 = p1;
    f0 = f1;
    p1 = p2;
    f1 = f2;
    p2 = p3;
    f2 = f3;
  }
  best.converged = best.absf < ftol;
  return best;
}

struct EigData {
  cplx C1, C2;
  double residual = 0.0;
  double ratio = 0.0;
  std::vector<EigenfunctionSample> samples;
};

// Rank-deficiency extraction on the anchor matrix.  Value rows carry
// D(x_a, nu_i); derivative rows are scaled by 1/max(1, |k|) so both kinds
// weigh comparably.
EigData eigen_from(DEvaluator& ev) {
  const auto& anchors = ev.anchors();
  const std::size_t na = anchors.size();
  const double dscale = 1.0 / std::max(1.0, std::abs(ev.point().k()));
  Eigen::MatrixXcd M(2 * na, 2);
  std::vector<DValue> v1(na), v2(na);
  for (std::size_t a = 0; a < na; ++a) {
    v1[a] = ev.d_value(ev.nu1(), a);
    v2[a] = ev.d_value(ev.nu2(), a);
    M(2 * a, 0) = v1[a].D;
    M(2 * a, 1) = v2[a].D;
    M(2 * a + 1, 0) = v1[a].Dp * dscale;
    M(2 * a + 1, 1) = v2[a].Dp * dscale;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
  EigData out;
  out.ratio = svd.singularValues()(1) / svd.singularValues()(0);
  Eigen::Vector2cd C = svd.matrixV().col(1);
  // Deterministic phase: largest component rotated to the positive real axis.
  cplx big = std::abs(C(0)) >= std::abs(C(1)) ? C(0) : C(1);
  if (std::abs(big) > 0.0) C *= std::abs(big) / big;
  out.C1 = C(0);
  out.C2 = C(1);

  double max_d = 0.0, max_mu = 0.0;
  const auto& g = ev.grid();
  out.samples.reserve(na);
  for (std::size_t a = 0; a < na; ++a) {
    max_d = std::max(max_d, std::abs(out.C1 * v1[a].D + out.C2 * v2[a].D));
    std::size_t i = g.index_of(anchors[a]);
    cplx mu = out.C1 * ev.nu1().u[i] + out.C2 * ev.nu2().u[i];
    max_mu = std::max(max_mu, std::abs(mu));
    out.samples.push_back({anchors[a], mu});
  }
  out.residual = max_mu > 0.0 ? max_d / max_mu
                              : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<double> residual_anchors(double L) {
  const double X = std::min(2.5, 0.8 * L);
  std::vector<double> xs(20);
  for (int i = 0; i < 20; ++i) xs[i] = -X + 2.0 * X * i / 19.0;
  return xs;
}

std::optional<ResonanceResult> make_result(Engine& e, cplx z, int mult,
                                           int iters, std::string& why) {
  DConfig c = e.cfg;
  c.x_eval = residual_anchors(c.L);
  DEvaluator ev(SurfacePoint(z), e.pot, c);
  EigData ed = eigen_from(ev);
  if (ed.ratio > 0.1) {
    why = "anchor matrix is not rank deficient (singular value ratio " +
          std::to_string(ed.ratio) + ")";
    return std::nullopt;
  }
  if (!(ed.residual < e.eig_tol)) {
    why = "eigenfunction residual " + std::to_string(ed.residual) +
          " exceeds tolerance";
    return std::nullopt;
  }
  return ResonanceResult{SurfacePoint(z), std::abs(e.eval(z)), mult,
                         ed.C1,           ed.C2,               ed.residual,
                         iters};
}

void push_cluster(Engine& e, const Rect& r, int w, const std::string& why) {
  std::lock_guard lk(e.out_mu);
  e.out->clusters.push_back({r.lo, r.hi, w});
  e.out->warnings.push_back("unresolved box [" + std::to_string(r.lo.real()) +
                            "," + std::to_string(r.hi.real()) + "]x[" +
                            std::to_string(r.lo.imag()) + "," +
                            std::to_string(r.hi.imag()) +
                            "] winding " + std::to_string(w) + ": " + why);
}

void handle_leaf(Engine& e, const Rect& r, int w, std::string note) {
  try {
    MullerOut m = muller(e, rect_center(r), 0.6 * rect_diam(r), e.root_tol);
    if (!m.converged) {
      push_cluster(e, r, w, note + "refinement did not reach |D| < root_tol");
      return;
    }
    if (!rect_contains(r, m.z, 0.3 * rect_diam(r))) {
      push_cluster(e, r, w, note + "refined point escaped the box");
      return;
    }
    std::string why;
    auto res = make_result(e, m.z, w, m.iters, why);
    if (!res) {
      push_cluster(e, r, w, note + why);
      return;
    }
    std::lock_guard lk(e.out_mu);
    e.out->roots.push_back(*res);
  } catch (const Error& err) {
    push_cluster(e, r, w, note + "evaluation failed: " + err.what());
  }
}

void subdivide(Engine& e, const Rect& r, int w, int depth, int threads) {
  if (w == 0) return;
  if (w < 0) {
    push_cluster(e, r, w, "negative winding, phase tracking inconsistent");
    return;
  }
  if (w == 1) {
    handle_leaf(e, r, w, "");
    return;
  }
  if (depth >= e.max_depth) {
    handle_leaf(e, r, w, "max depth reached with winding > 1; ");
    return;
  }

  // Split into four boxes; a root sitting on an internal edge shows up as
  // ZeroOnBoundary, answered by moving the split point.
  const double jit[] = {0.5, 0.57, 0.41};
  for (int attempt = 0; attempt < 3; ++attempt) {
    double fx = jit[attempt], fy = jit[attempt];
    double mx = r.lo.real() + fx * (r.hi.real() - r.lo.real());
    double my = r.lo.imag() + fy * (r.hi.imag() - r.lo.imag());
    Rect kids[4] = {
        {r.lo, {mx, my}},
        {{mx, r.lo.imag()}, {r.hi.real(), my}},
        {{r.lo.real(), my}, {mx, r.hi.imag()}},
        {{mx, my}, r.hi},
    };
    int kw[4];
    int sum = 0;
    try {
      for (int i = 0; i < 4; ++i) {
        kw[i] = rect_winding(e, kids[i]);
        sum += kw[i];
      }
    } catch (const Error& err) {
      if (attempt + 1 < 3) continue;
      push_cluster(e, r, w, std::string("subdivision failed: ") + err.what());
      return;
    }
    if (sum != w) {
      if (attempt + 1 < 3) continue;
      push_cluster(e, r, w, "child windings sum to " + std::to_string(sum) +
                                ", expected " + std::to_string(w));
      return;
    }
    if (depth == 0 && threads > 1) {
      std::vector<std::future<void>> fs;
      for (int i = 0; i < 4; ++i)
        fs.push_back(std::async(std::launch::async, [&, i] {
          subdivide(e, kids[i], kw[i], depth + 1, 1);
        }));
      for (auto& f : fs) f.get();
    } else {
      for (int i = 0; i < 4; ++i) subdivide(e, kids[i], kw[i], depth + 1, 1);
    }
    return;
  }
}

Rect validate_region(const ContourSpec& s, std::vector<std::string>& w) {
  if (!(s.lo.real() < s.hi.real()) || !(s.lo.imag() < s.hi.imag()))
    fail(Err::ContourInvalid, "search rectangle is degenerate");
  const double m = s.exclusion_margin;
  double lo_re = s.lo.real(), hi_re = s.hi.real();
  if (lo_re < m && hi_re > -m) {
    if (hi_re > m && lo_re < -m) {
      if (hi_re >= -lo_re) {
        w.push_back(
            "search rectangle crosses the cut Re k = 0; keeping the Re k > 0 "
            "part");
        lo_re = m;
      } else {
        w.push_back(
            "search rectangle crosses the cut Re k = 0; keeping the Re k < 0 "
            "part");
        hi_re = -m;
      }
    } else if (hi_re > m) {
      w.push_back("search rectangle touched the cut; left edge moved to the "
                  "exclusion margin");
      lo_re = m;
    } else if (lo_re < -m) {
      w.push_back("search rectangle touched the cut; right edge moved to the "
                  "exclusion margin");
      hi_re = -m;
    } else {
      fail(Err::ExcludedPoint,
           "search rectangle lies inside the excluded strip |Re k| < margin");
    }
  }
  return {{lo_re, s.lo.imag()}, {hi_re, s.hi.imag()}};
}

DConfig region_config(const Rect& r, const Potential& pot, const DConfig& in) {
  DConfig c = in;
  double th = region_theta(r.lo, r.hi, pot, c);
  c.method = th == 0.0 ? Method::RealAxis : Method::RotatedRay;
  c.theta = th;
  if (!(c.L > 0.0)) {
    double worst_re = std::max(std::abs(r.lo.real()), std::abs(r.hi.real()));
    double im = (std::abs(r.lo.imag()) >= std::abs(r.hi.imag()) ? r.lo.imag()
                                                                : r.hi.imag());
    SurfacePoint worst{cplx(r.lo.real() < 0.0 ? -worst_re : worst_re, im)};
    c.L = auto_L(worst, pot, th, c.quad_tol);
  }
  return c;
}

}  // namespace

int count_zeros(const ContourSpec& spec, const Potential& pot,
                const DConfig& cfg) {
  LocateOutcome scratch;
  Rect r = validate_region(spec, scratch.warnings);
  Engine e{pot,
           region_config(r, pot, cfg),
           r,
           1e-9,
           1e-6,
           spec.max_depth,
           std::max(8, spec.boundary_samples / 4),
           {},
           {},
           0,
           false,
           &scratch,
           {}};
  return rect_winding(e, r);
}

LocateOutcome find_resonances(const ContourSpec& spec, const Potential& pot,
                              const DConfig& cfg, double root_tol,
                              double eig_tol, int threads) {
  LocateOutcome out;
  Rect r = validate_region(spec, out.warnings);
  Engine e{pot,
           region_config(r, pot, cfg),
           r,
           root_tol,
           eig_tol,
           spec.max_depth,
           std::max(8, spec.boundary_samples / 4),
           {},
           {},
           0,
           false,
           &out,
           {}};
  int w = rect_winding(e, r);
  subdivide(e, r, w, 0, threads);

  auto& roots = out.roots;
  std::sort(roots.begin(), roots.end(),
            [](const ResonanceResult& a, const ResonanceResult& b) {
              if (a.point.k().real() != b.point.k().real())
                return a.point.k().real() < b.point.k().real();
              return a.point.k().imag() < b.point.k().imag();
            });
  const double tol = std::max(1e-8 * rect_diam(r), 1e-13);
  std::vector<ResonanceResult> unique;
  for (auto& rr : roots) {
    bool dup = false;
    for (auto& kept : unique)
      if (std::abs(kept.point.k() - rr.point.k()) < tol) {
        kept.multiplicity = std::max(kept.multiplicity, rr.multiplicity);
        dup = true;
        break;
      }
    if (!dup) unique.push_back(rr);
  }
  roots = std::move(unique);
  out.evaluations = e.evals;
  return out;
}

Eigenfunction eigenfunction(const SurfacePoint& root, const Potential& pot,
                            const DConfig& cfg,
                            const std::vector<double>& sample_xs,
                            double eig_tol) {
  DConfig c = cfg;
  if (!sample_xs.empty()) {
    c.x_eval = sample_xs;
    std::sort(c.x_eval.begin(), c.x_eval.end());
    c.x_eval.erase(std::unique(c.x_eval.begin(), c.x_eval.end()),
                   c.x_eval.end());
  }
  DEvaluator ev(root, pot, c);
  EigData ed = eigen_from(ev);
  if (ed.ratio > 0.1)
    fail(Err::NotARoot,
         "anchor matrix is not rank deficient at the requested point "
         "(singular value ratio " +
             std::to_string(ed.ratio) + ")");
  (void)eig_tol;
  return {std::move(ed.samples), ed.C1, ed.C2, ed.residual, ed.ratio};
}

}  // namespace resd

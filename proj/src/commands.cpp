#include "resd/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include "resd/errors.hpp"
#include "resd/locate.hpp"
#include "resd/oracle.hpp"
#include "resd/resolvent.hpp"

namespace resd {

namespace {

using nlohmann::ordered_json;
using clock_t_ = std::chrono::steady_clock;

double ms_since(clock_t_::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_t_::now() - t0)
      .count();
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int emit(const RunConfig& rc, const std::string& text) {
  if (rc.out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(rc.out_path);
  if (!f) {
    std::cerr << "cannot open output file " << rc.out_path << "\n";
    return 1;
  }
  f << text;
  return 0;
}

ordered_json doc_skeleton(const std::string& cmd) {
  ordered_json doc;
  doc["schema"] = "resonance-d/1";
  doc["command"] = cmd;
  doc["data"] = ordered_json::object();
  doc["meta"] = ordered_json::object();
  return doc;
}

void put_tolerances(ordered_json& meta, const RunConfig& rc) {
  meta["tolerances"] = {{"ode_tol", rc.ode_tol},
                        {"quad_tol", rc.quad_tol},
                        {"root_tol", rc.root_tol},
                        {"eig_tol", rc.eig_tol}};
}

const Potential& need_potential(const RunConfig& rc) {
  if (!rc.potential)
    throw std::runtime_error("this command needs a \"potential\" block");
  return *rc.potential;
}

std::vector<cplx> points_from(const RunConfig& rc) {
  std::vector<cplx> pts;
  if (rc.raw.contains("points")) {
    for (const auto& j : rc.raw.at("points")) pts.push_back(cplx_from_json(j));
  } else {
    // Default first-sheet sweep: twenty points with Re k > 0.
    for (int j = 0; j < 20; ++j)
      pts.emplace_back(0.25 + 0.12 * j, -0.5 + j / 19.0);
  }
  return pts;
}

std::vector<double> xs_from(const RunConfig& rc, const char* key,
                            std::vector<double> fallback) {
  if (!rc.raw.contains(key)) return fallback;
  const auto& j = rc.raw.at(key);
  std::vector<double> xs;
  if (j.is_array()) {
    for (const auto& v : j) xs.push_back(v.get<double>());
  } else {
    double lo = j.at("lo").get<double>();
    double hi = j.at("hi").get<double>();
    int n = j.at("n").get<int>();
    for (int i = 0; i < n; ++i)
      xs.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  }
  return xs;
}

SampledFn phi_from(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "indicator") {
    double lo = j.at("lo").get<double>(), hi = j.at("hi").get<double>();
    return {lo, hi, [](double) { return cplx(1.0); }};
  }
  if (kind == "gaussian") {
    double c = j.at("center").get<double>(), w = j.at("width").get<double>();
    double lo = j.at("lo").get<double>(), hi = j.at("hi").get<double>();
    return {lo, hi, [c, w](double x) {
              double t = (x - c) / w;
              return cplx(std::exp(-t * t));
            }};
  }
  throw std::runtime_error("unknown phi kind \"" + kind + "\"");
}

ordered_json result_to_json(const ResonanceResult& r) {
  ordered_json o;
  o["k"] = cplx_to_json(r.point.k());
  o["lambda"] = cplx_to_json(r.point.lambda());
  o["sheet"] = to_string(r.point.sheet());
  o["abs_D"] = r.abs_D;
  o["multiplicity"] = r.multiplicity;
  o["C1"] = cplx_to_json(r.C1);
  o["C2"] = cplx_to_json(r.C2);
  o["eigen_residual"] = r.eigen_residual;
  o["iterations"] = r.iterations;
  return o;
}

int cmd_resonances(const RunConfig& rc, int threads) {
  const Potential& pot = need_potential(rc);
  if (!rc.has_region)
    throw std::runtime_error("resonances needs a \"region\" block");
  auto t0 = clock_t_::now();
  LocateOutcome out = find_resonances(rc.region, pot, rc.dconfig(),
                                      rc.root_tol, rc.eig_tol, threads);
  ordered_json doc = doc_skeleton("resonances");
  auto& data = doc["data"];
  data["resonances"] = ordered_json::array();
  for (const auto& r : out.roots) data["resonances"].push_back(result_to_json(r));
  data["clusters"] = ordered_json::array();
  for (const auto& c : out.clusters)
    data["clusters"].push_back({{"k_lo", cplx_to_json(c.lo)},
                                {"k_hi", cplx_to_json(c.hi)},
                                {"winding", c.winding}});
  auto& meta = doc["meta"];
  put_tolerances(meta, rc);
  meta["evaluations"] = out.evaluations;
  meta["warnings"] = out.warnings;
  meta["wall_time_ms"] = ms_since(t0);
  int rcode = emit(rc, doc.dump(2) + "\n");
  if (rcode != 0) return rcode;
  return out.clusters.empty() ? 0 : 2;
}

int cmd_scan(const RunConfig& rc, int threads) {
  const Potential& pot = need_potential(rc);
  if (!rc.raw.contains("grid"))
    throw std::runtime_error("scan needs a \"grid\" block");
  const auto& g = rc.raw.at("grid");
  double re_lo = g.at("k_re").at(0).get<double>();
  double re_hi = g.at("k_re").at(1).get<double>();
  double im_lo = g.at("k_im").at(0).get<double>();
  double im_hi = g.at("k_im").at(1).get<double>();
  int nx = g.at("steps").at(0).get<int>();
  int ny = g.at("steps").at(1).get<int>();
  if (nx < 1 || ny < 1) throw std::runtime_error("grid steps must be >= 1");
  const double margin = 1e-3;

  struct Cell {
    cplx k;
    bool excluded = false;
    bool failed = false;
    std::string error;
    cplx lambda;
    std::string sheet;
    double absd = 0.0, argd = 0.0;
  };
  std::vector<Cell> cells(std::size_t(nx) * ny);
  DConfig dc = rc.dconfig();
  auto work = [&](int iy0, int iy1) {
    for (int iy = iy0; iy < iy1; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        Cell& c = cells[std::size_t(iy) * nx + ix];
        double re = nx == 1 ? re_lo : re_lo + (re_hi - re_lo) * ix / (nx - 1);
        double im = ny == 1 ? im_lo : im_lo + (im_hi - im_lo) * iy / (ny - 1);
        c.k = cplx(re, im);
        if (std::abs(re) < margin) {
          c.excluded = true;
          c.error = "excluded";
          continue;
        }
        try {
          SurfacePoint p{c.k};
          cplx d = bbD(p, pot, dc);
          c.lambda = p.lambda();
          c.sheet = to_string(p.sheet());
          c.absd = std::abs(d);
          c.argd = std::arg(d);
        } catch (const Error& e) {
          c.failed = true;
          c.error = to_string(e.code());
        }
      }
  };
  int nt = std::max(1, threads);
  if (nt == 1 || ny == 1) {
    work(0, ny);
  } else {
    std::vector<std::future<void>> fs;
    int chunk = (ny + nt - 1) / nt;
    for (int s = 0; s < ny; s += chunk)
      fs.push_back(std::async(std::launch::async, work, s,
                              std::min(ny, s + chunk)));
    for (auto& f : fs) f.get();
  }

  std::string out = "k_re,k_im,lambda_re,lambda_im,sheet,absD,argD,error\n";
  for (const auto& c : cells) {
    out += g17(c.k.real()) + "," + g17(c.k.imag()) + ",";
    if (c.excluded || c.failed) {
      out += ",,,,," + c.error + "\n";
    } else {
      out += g17(c.lambda.real()) + "," + g17(c.lambda.imag()) + "," +
             c.sheet + "," + g17(c.absd) + "," + g17(c.argd) + ",\n";
    }
  }
  return emit(rc, out);
}

// Shared by evans and compare: equivalence rows over the sample points.
ordered_json equivalence_rows(const RunConfig& rc, const Potential& pot,
                              double& max_defect) {
  ordered_json rows = ordered_json::array();
  max_defect = 0.0;
  for (cplx k : points_from(rc)) {
    ordered_json row;
    row["k"] = cplx_to_json(k);
    try {
      DEvaluator ev(SurfacePoint(k), pot, rc.dconfig());
      cplx d = ev.bbD();
      cplx e = ev.evans();
      row["bbD"] = cplx_to_json(d);
      row["evans"] = cplx_to_json(e);
      double defect = ev.equivalence_defect();
      row["defect"] = defect;
      max_defect = std::max(max_defect, defect);
    } catch (const Error& e) {
      row["error"] = to_string(e.code());
    }
    rows.push_back(row);
  }
  return rows;
}

int cmd_evans(const RunConfig& rc) {
  const Potential& pot = need_potential(rc);
  auto t0 = clock_t_::now();
  ordered_json doc = doc_skeleton("evans");
  double maxd = 0.0;
  doc["data"]["points"] = equivalence_rows(rc, pot, maxd);
  doc["data"]["max_defect"] = maxd;
  put_tolerances(doc["meta"], rc);
  doc["meta"]["wall_time_ms"] = ms_since(t0);
  return emit(rc, doc.dump(2) + "\n");
}

int cmd_compare(const RunConfig& rc) {
  const Potential& pot = need_potential(rc);
  auto t0 = clock_t_::now();
  ordered_json doc = doc_skeleton("compare");
  double maxd = 0.0;
  doc["data"]["equivalence"] = equivalence_rows(rc, pot, maxd);
  doc["data"]["max_defect"] = maxd;

  if (pot.kind() == Potential::Kind::SquareWell) {
    ordered_json rows = ordered_json::array();
    double max_rel = 0.0;
    for (cplx k : points_from(rc)) {
      ordered_json row;
      row["k"] = cplx_to_json(k);
      try {
        SurfacePoint p{k};
        cplx num = bbD(p, pot, rc.dconfig());
        cplx cf = oracle::squarewell_bbD_closed(p, pot.well_depth(),
                                                pot.well_left(),
                                                pot.well_right());
        double rel = std::abs(num - cf) / std::max(1e-300, std::abs(cf));
        row["closed_form"] = cplx_to_json(cf);
        row["rel_err"] = rel;
        max_rel = std::max(max_rel, rel);
      } catch (const Error& e) {
        row["error"] = to_string(e.code());
      }
      rows.push_back(row);
    }
    doc["data"]["closed_form"] = rows;
    doc["data"]["closed_form_max_rel_err"] = max_rel;
  } else if (pot.kind() == Potential::Kind::PoschlTeller) {
    // |bbD| at the first-sheet oracle roots, expected near zero.
    ordered_json rows = ordered_json::array();
    for (const auto& r :
         oracle::poschl_teller_roots(pot.pt_depth(), Sheet::First, 0, 6)) {
      if (r.point.k().real() < 0.05 || r.point.k().real() > 5.0) continue;
      ordered_json row;
      row["k"] = cplx_to_json(r.point.k());
      row["n"] = r.n;
      try {
        row["absD"] = std::abs(bbD(r.point, pot, rc.dconfig()));
      } catch (const Error& e) {
        row["error"] = to_string(e.code());
      }
      rows.push_back(row);
    }
    doc["data"]["oracle_roots"] = rows;
  }
  put_tolerances(doc["meta"], rc);
  doc["meta"]["wall_time_ms"] = ms_since(t0);
  return emit(rc, doc.dump(2) + "\n");
}

int cmd_eigenfunction(const RunConfig& rc) {
  const Potential& pot = need_potential(rc);
  if (!rc.raw.contains("root"))
    throw std::runtime_error("eigenfunction needs a \"root\" entry");
  SurfacePoint root{cplx_from_json(rc.raw.at("root"))};
  std::vector<double> xs = xs_from(rc, "sample_xs", {});
  auto t0 = clock_t_::now();
  Eigenfunction ef = eigenfunction(root, pot, rc.dconfig(), xs, rc.eig_tol);
  ordered_json doc = doc_skeleton("eigenfunction");
  auto& data = doc["data"];
  data["root"] = cplx_to_json(root.k());
  data["lambda"] = cplx_to_json(root.lambda());
  data["sheet"] = to_string(root.sheet());
  data["C1"] = cplx_to_json(ef.C1);
  data["C2"] = cplx_to_json(ef.C2);
  data["residual"] = ef.residual;
  data["sv_ratio"] = ef.sv_ratio;
  data["samples"] = ordered_json::array();
  for (const auto& s : ef.samples)
    data["samples"].push_back({{"x", s.x}, {"mu", cplx_to_json(s.mu)}});
  put_tolerances(doc["meta"], rc);
  doc["meta"]["wall_time_ms"] = ms_since(t0);
  return emit(rc, doc.dump(2) + "\n");
}

int cmd_project(const RunConfig& rc) {
  const Potential& pot = need_potential(rc);
  if (!rc.raw.contains("root") || !rc.raw.contains("phi"))
    throw std::runtime_error("project needs \"root\" and \"phi\" entries");
  SurfacePoint root{cplx_from_json(rc.raw.at("root"))};
  SampledFn phi = phi_from(rc.raw.at("phi"));
  double radius = rc.raw.value("radius", 0.05);
  int M = rc.raw.value("contour_points", 64);
  int N = rc.raw.value("nystrom_n", 200);
  std::vector<double> xs = xs_from(rc, "xs", [&] {
    std::vector<double> v;
    for (int i = 0; i < 41; ++i) v.push_back(-2.0 + 4.0 * i / 40.0);
    return v;
  }());
  std::vector<cplx> others;
  if (rc.raw.contains("other_roots"))
    for (const auto& j : rc.raw.at("other_roots"))
      others.push_back(cplx_from_json(j));

  auto t0 = clock_t_::now();
  std::vector<cplx> proj = riesz_projection(root, radius, M, pot, phi, xs,
                                            others, N,
                                            rc.has_region
                                                ? rc.region.exclusion_margin
                                                : 1e-3);

  // Rank-one diagnostic: distance of the projection from the span of the
  // stored eigenfunction, relative to its own norm.
  double defect = -1.0;
  ordered_json efj = ordered_json::array();
  try {
    Eigenfunction ef = eigenfunction(root, pot, rc.dconfig(), xs, rc.eig_tol);
    cplx num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      num += std::conj(ef.samples[i].mu) * proj[i];
      den += std::conj(ef.samples[i].mu) * ef.samples[i].mu;
    }
    cplx c = den != cplx(0.0) ? num / den : cplx(0.0);
    double n2 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      n2 += std::norm(proj[i] - c * ef.samples[i].mu);
      d2 += std::norm(proj[i]);
    }
    defect = d2 > 0.0 ? std::sqrt(n2 / d2) : 0.0;
    for (const auto& s : ef.samples)
      efj.push_back({{"x", s.x}, {"mu", cplx_to_json(s.mu)}});
  } catch (const Error&) {
    // Projection over an empty contour has no eigenfunction to compare with.
  }

  ordered_json doc = doc_skeleton("project");
  auto& data = doc["data"];
  data["root"] = cplx_to_json(root.k());
  data["radius"] = radius;
  data["contour_points"] = M;
  data["nystrom_n"] = N;
  data["samples"] = ordered_json::array();
  for (std::size_t i = 0; i < xs.size(); ++i)
    data["samples"].push_back({{"x", xs[i]}, {"value", cplx_to_json(proj[i])}});
  if (defect >= 0.0) {
    data["proportionality_defect"] = defect;
    data["eigenfunction"] = efj;
  }
  put_tolerances(doc["meta"], rc);
  doc["meta"]["wall_time_ms"] = ms_since(t0);
  return emit(rc, doc.dump(2) + "\n");
}

int cmd_oracle(const RunConfig& rc) {
  if (!rc.raw.contains("oracle"))
    throw std::runtime_error("oracle needs an \"oracle\" block");
  const auto& o = rc.raw.at("oracle");
  const std::string op = o.at("op").get<std::string>();
  ordered_json doc = doc_skeleton("oracle");
  auto& data = doc["data"];
  data["op"] = op;

  struct SwParams {
    cplx h;
    double a1, a2;
  };
  auto sw_params = [&]() -> SwParams {
    if (o.contains("h"))
      return {cplx_from_json(o.at("h")), o.at("a1").get<double>(),
              o.at("a2").get<double>()};
    if (rc.potential && rc.potential->kind() == Potential::Kind::SquareWell)
      return {rc.potential->well_depth(), rc.potential->well_left(),
              rc.potential->well_right()};
    throw std::runtime_error("square-well oracle needs h, a1, a2");
  };

  if (op == "squarewell_bound_states") {
    SwParams sw = sw_params();
    data["roots"] = ordered_json::array();
    for (const auto& p :
         oracle::squarewell_bound_states(sw.h.real(), sw.a1, sw.a2))
      data["roots"].push_back(
          {{"k", cplx_to_json(p.k())}, {"lambda", cplx_to_json(p.lambda())}});
  } else if (op == "squarewell_bbD" || op == "squarewell_characteristic") {
    SwParams sw = sw_params();
    data["values"] = ordered_json::array();
    for (cplx k : points_from(rc)) {
      SurfacePoint p{k};
      cplx v = op == "squarewell_bbD"
                   ? oracle::squarewell_bbD_closed(p, sw.h, sw.a1, sw.a2)
                   : oracle::squarewell_characteristic(p, sw.h, sw.a1, sw.a2);
      data["values"].push_back(
          {{"k", cplx_to_json(k)}, {"value", cplx_to_json(v)}});
    }
  } else if (op == "poschl_teller_roots") {
    cplx v0 = cplx_from_json(o.at("V0"));
    Sheet sheet = o.value("sheet", std::string("first")) == "second"
                      ? Sheet::Second
                      : Sheet::First;
    data["roots"] = ordered_json::array();
    for (const auto& r : oracle::poschl_teller_roots(
             v0, sheet, o.value("n_min", 0), o.value("n_max", 8)))
      data["roots"].push_back({{"k", cplx_to_json(r.point.k())},
                               {"lambda", cplx_to_json(r.point.lambda())},
                               {"n", r.n},
                               {"residual", r.residual}});
  } else if (op == "semiclassical_roots") {
    data["roots"] = ordered_json::array();
    for (const auto& r : oracle::semiclassical_roots(
             o.at("V0").get<double>(), o.at("hbar").get<double>(),
             o.value("n_min", 0), o.value("n_max", 0)))
      data["roots"].push_back({{"k", cplx_to_json(r.exact.k())},
                               {"lambda", cplx_to_json(r.exact.lambda())},
                               {"lambda_leading", cplx_to_json(r.leading)},
                               {"n", r.n},
                               {"sign", r.sign}});
  } else {
    throw std::runtime_error("unknown oracle op \"" + op + "\"");
  }
  return emit(rc, doc.dump(2) + "\n");
}

}  // namespace

int run_command(const std::string& cmd, RunConfig rc, int threads,
                const std::string& out_override) {
  if (!out_override.empty()) rc.out_path = out_override;
  if (threads <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    threads = hc > 0 ? int(hc) : 1;
  }
  try {
    if (cmd == "resonances") return cmd_resonances(rc, threads);
    if (cmd == "scan") return cmd_scan(rc, threads);
    if (cmd == "evans") return cmd_evans(rc);
    if (cmd == "compare") return cmd_compare(rc);
    if (cmd == "eigenfunction") return cmd_eigenfunction(rc);
    if (cmd == "project") return cmd_project(rc);
    if (cmd == "oracle") return cmd_oracle(rc);
    std::cerr << "unknown command \"" << cmd << "\"\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace resd

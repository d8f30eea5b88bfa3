#include "resd/config.hpp"

#include <fstream>
#include <sstream>

namespace resd {

using nlohmann::json;

cplx cplx_from_json(const json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw std::runtime_error("expected a number or a [re, im] pair, got " +
                           j.dump());
}

json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

namespace {

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

Potential parse_potential(const json& p) {
  const std::string kind = p.at("kind").get<std::string>();
  if (kind == "zero") {
    return Potential::custom([](cplx) { return cplx(0.0); }, 0.0, 0.0,
                             std::make_pair(-0.5, 0.5));
  }
  if (kind == "square_well") {
    return Potential::square_well(cplx_from_json(p.at("h")),
                                  p.at("a1").get<double>(),
                                  p.at("a2").get<double>());
  }
  if (kind == "poschl_teller") {
    double alpha = p.value("half_angle", 1.2);
    return Potential::poschl_teller(cplx_from_json(p.at("V0")), alpha);
  }
  throw std::runtime_error("unknown potential kind \"" + kind + "\"");
}

ContourSpec parse_region(const json& r) {
  ContourSpec s;
  s.lo = cplx_from_json(r.at("k_lo"));
  s.hi = cplx_from_json(r.at("k_hi"));
  s.max_depth = r.value("max_depth", s.max_depth);
  s.boundary_samples = r.value("boundary_samples", s.boundary_samples);
  s.exclusion_margin = r.value("exclusion_margin", s.exclusion_margin);
  return s;
}

}  // namespace

DConfig RunConfig::dconfig() const {
  DConfig c;
  c.method = method;
  c.theta = theta;
  c.L = L;
  c.quad_tol = quad_tol;
  c.ode_tol = OdeTols(ode_tol);
  return c;
}

RunConfig parse_config(const std::string& text) {
  RunConfig rc;
  try {
    rc.raw = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error at line " +
                             std::to_string(line_of_offset(text, e.byte)) +
                             ": " + e.what());
  }
  const json& j = rc.raw;
  if (!j.is_object()) throw std::runtime_error("config root must be an object");

  try {
    if (j.contains("potential")) {
      rc.potential = parse_potential(j.at("potential"));
    }
    if (j.contains("region")) {
      rc.region = parse_region(j.at("region"));
      rc.has_region = true;
    }
    if (j.contains("method")) {
      const std::string m = j.at("method").get<std::string>();
      if (m == "auto")
        rc.method = Method::Auto;
      else if (m == "real_axis")
        rc.method = Method::RealAxis;
      else if (m == "rotated_ray")
        rc.method = Method::RotatedRay;
      else
        throw std::runtime_error("unknown method \"" + m + "\"");
    }
    rc.theta = j.value("theta", rc.theta);
    rc.L = j.value("L", rc.L);
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      rc.ode_tol = t.value("ode_tol", rc.ode_tol);
      rc.quad_tol = t.value("quad_tol", rc.quad_tol);
      rc.root_tol = t.value("root_tol", rc.root_tol);
      rc.eig_tol = t.value("eig_tol", rc.eig_tol);
      for (double v : {rc.ode_tol, rc.quad_tol, rc.root_tol, rc.eig_tol})
        if (!(v > 0.0))
          throw std::runtime_error("tolerances must be positive");
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      rc.format = o.value("format", rc.format);
      if (rc.format != "json" && rc.format != "csv")
        throw std::runtime_error("output.format must be \"json\" or \"csv\"");
      rc.out_path = o.value("path", rc.out_path);
    }
    if (rc.method == Method::RotatedRay && rc.potential &&
        !(rc.potential->half_angle() > 0.0))
      throw std::runtime_error(
          "method rotated_ray needs a potential with half_angle > 0");
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config error: ") + e.what());
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace resd

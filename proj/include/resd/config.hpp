#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "resd/dfun.hpp"
#include "resd/locate.hpp"
#include "resd/potential.hpp"

namespace resd {

// Parsed run configuration.  The raw document is kept alongside the decoded
// common fields so commands can read their own blocks.
struct RunConfig {
  nlohmann::json raw;

  std::optional<Potential> potential;

  bool has_region = false;
  ContourSpec region;

  Method method = Method::Auto;
  double theta = std::numeric_limits<double>::quiet_NaN();
  double L = 0.0;

  double ode_tol = 1e-10;
  double quad_tol = 1e-10;
  double root_tol = 1e-9;
  double eig_tol = 1e-6;

  std::string format = "json";  // "json" or "csv"
  std::string out_path;         // empty: stdout

  DConfig dconfig() const;
};

// Throws std::runtime_error with a line-numbered message on parse or
// validation failure.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// [re, im] array (or a bare number) -> complex.
cplx cplx_from_json(const nlohmann::json& j);
nlohmann::json cplx_to_json(cplx z);

}  // namespace resd

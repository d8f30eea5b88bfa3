#pragma once

#include <cstddef>
#include <vector>

namespace resd {

struct GaussRule {
  std::vector<double> x;  // nodes on (-1, 1), ascending
  std::vector<double> w;  // positive weights
};

// Gauss-Legendre rule with n points.  Results are cached per n.
const GaussRule& gauss_legendre(std::size_t n);

}  // namespace resd

#pragma once

#include <cstddef>
#include <vector>

namespace fibermatch {

// Composite Gauss-Legendre rule: `panels` equal panels on [a, b], 20 nodes each.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels);

}  // namespace fibermatch

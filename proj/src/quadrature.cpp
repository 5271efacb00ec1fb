#include "fibermatch/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include "fibermatch/error.hpp"

namespace fibermatch {

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels) {
  if (!(b > a) || panels == 0) throw InvalidArgument("composite_gauss_legendre: empty interval");
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const auto& abscissa = Gauss::abscissa();
  const auto& weight = Gauss::weights();

  QuadratureRule rule;
  rule.nodes.reserve(panels * 2 * abscissa.size());
  rule.weights.reserve(panels * 2 * abscissa.size());
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t i = abscissa.size(); i-- > 0;) {
      rule.nodes.push_back(mid - half * abscissa[i]);
      rule.weights.push_back(half * weight[i]);
    }
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      rule.nodes.push_back(mid + half * abscissa[i]);
      rule.weights.push_back(half * weight[i]);
    }
  }
  return rule;
}

}  // namespace fibermatch

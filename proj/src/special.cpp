#include "fibermatch/special.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>

#include "fibermatch/error.hpp"

namespace fibermatch::special {

double bessel_j(int order, double x) { return boost::math::cyl_bessel_j(order, x); }

double bessel_k(int order, double x) { return boost::math::cyl_bessel_k(order, x); }

double bessel_zero(int l, int m) {
  if (l < 0 || m < 1) throw InvalidArgument("bessel_zero: need l >= 0 and m >= 1");

  auto f = [l](double x) { return bessel_j(l, x); };

  // Consecutive zeros of J_l are more than 2.9 apart, so a step of 0.5 never
  // skips a pair. J_l has no zero in (0, l].
  constexpr double kStep = 0.5;
  double lo = l > 0 ? static_cast<double>(l) : kStep;
  double f_lo = f(lo);
  int found = 0;
  for (int guard = 0; guard < 1'000'000; ++guard) {
    const double hi = lo + kStep;
    const double f_hi = f(hi);
    if (f_hi == 0.0) {
      if (++found == m) return hi;
      lo = hi + 1e-9;
      f_lo = f(lo);
      continue;
    }
    if ((f_lo < 0.0) != (f_hi < 0.0)) {
      if (++found == m) {
        std::uintmax_t iters = 200;
        auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
        auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);
        return 0.5 * (a + b);
      }
    }
    lo = hi;
    f_lo = f_hi;
  }
  throw ConvergenceError("bessel_zero: zero scan did not terminate");
}

double laguerre(int n, double alpha, double x) {
  if (n < 0) throw InvalidArgument("laguerre: negative degree");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace fibermatch::special

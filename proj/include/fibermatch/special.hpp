#pragma once

// Special functions used by the mode models.
//
// Bessel J and K are thin wrappers over Boost.Math (relative accuracy of
// order 1e-15 on [0, 50]). Bessel zeros and Laguerre polynomials are
// computed here.

namespace fibermatch::special {

double bessel_j(int order, double x);
double bessel_k(int order, double x);

/// m-th positive zero of J_l (l >= 0, m >= 1), accurate to ~1e-14 relative.
/// Zeros are bracketed by a sign-change scan starting at x = l and then
/// refined with TOMS 748.
double bessel_zero(int l, int m);

/// Generalized Laguerre polynomial L_n^(alpha)(x) by upward recurrence.
double laguerre(int n, double alpha, double x);

}  // namespace fibermatch::special

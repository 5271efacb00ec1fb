#include "fibermatch/mode_solver.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "fibermatch/error.hpp"
#include "fibermatch/special.hpp"
#include "fibermatch/units.hpp"

namespace fibermatch {

using special::bessel_j;
using special::bessel_k;

double bessel_zero(int l, int m) { return special::bessel_zero(l, m); }

double characteristic_residual(double core_param, double cladding_param) {
  const double u = core_param;
  const double w = cladding_param;
  // Small-argument forms W K1(W) -> 1, K0(W) -> -ln(W/2) - gamma avoid overflow.
  const double cladding_side = w < 1e-100 ? 1.0 / (-std::log(0.5 * w) - std::numbers::egamma)
                                          : w * bessel_k(1, w) / bessel_k(0, w);
  return u * bessel_j(1, u) / bessel_j(0, u) - cladding_side;
}

namespace {

auto tight_tolerance() { return boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 3); }

}  // namespace

StepIndexSolution solve_step_index(double v_param) {
  if (!(v_param > 0.0) || !std::isfinite(v_param)) throw InvalidArgument("solve_step_index: V must be positive");
  const double v = v_param;
  const double j01 = special::bessel_zero(0, 1);

  auto cladding_of = [v](double u) { return std::sqrt((v - u) * (v + u)); };
  auto f_core = [&](double u) { return characteristic_residual(u, cladding_of(u)); };

  const double u_lo = v * 1e-6;
  const double u_hi = std::min(v, j01) * (1.0 - 1e-13);
  const double f_lo = f_core(u_lo);
  const double f_hi = f_core(u_hi);

  std::uintmax_t iters = 200;
  if (f_lo < 0.0 && f_hi > 0.0) {
    auto [a, b] = boost::math::tools::toms748_solve(f_core, u_lo, u_hi, f_lo, f_hi, tight_tolerance(), iters);
    const double u = 0.5 * (a + b);
    return {u, cladding_of(u)};
  }

  // Near cutoff (small V) the root sits closer to U = V than double precision
  // resolves in U; solve for s = ln W instead.
  if (f_lo < 0.0 && v < j01) {
    auto f_log = [&](double s) {
      const double w = std::exp(s);
      return characteristic_residual(std::sqrt(std::max(v * v - w * w, 0.0)), w);
    };
    const double s_lo = -700.0;
    const double s_hi = std::log(cladding_of(u_hi));
    const double g_lo = f_log(s_lo);
    const double g_hi = f_log(s_hi);
    if (g_lo > 0.0 && g_hi < 0.0) {
      auto [a, b] = boost::math::tools::toms748_solve(f_log, s_lo, s_hi, g_lo, g_hi, tight_tolerance(), iters);
      const double w = std::exp(0.5 * (a + b));
      return {std::sqrt(std::max(v * v - w * w, 0.0)), w};
    }
    if (g_lo <= 0.0) {
      // W below exp(-700): the mode is unbounded to double precision.
      return {v, 0.0};
    }
  }
  throw ConvergenceError("solve_step_index: no LP01 root bracketed for V = " + std::to_string(v));
}

SmfSpec SmfSpec::from_v_param(double core_radius, double v_param) {
  const auto sol = solve_step_index(v_param);
  SmfSpec spec{core_radius, v_param, sol.core_param, sol.cladding_param};
  spec.validate();
  return spec;
}

SmfSpec SmfSpec::thorlabs_780hp() { return from_v_param(2.2 * kMicrometre, 2.362); }

void SmfSpec::validate() const {
  if (!(core_radius > 0.0)) throw InvalidArgument("SmfSpec: core radius must be positive");
  if (!(v_param > 0.0)) throw InvalidArgument("SmfSpec: V must be positive");
  if (!(core_param > 0.0) || !(cladding_param > 0.0))
    throw InvalidArgument("SmfSpec: U and W must be positive (solve the characteristic equation first)");
  const double v2 = v_param * v_param;
  if (std::abs(core_param * core_param + cladding_param * cladding_param - v2) > 1e-10 * v2)
    throw InvalidArgument("SmfSpec: U^2 + W^2 != V^2");
}

void HcfSpec::validate() const {
  if (!(core_radius > 0.0)) throw InvalidArgument("HcfSpec: core radius must be positive");
  if (!(core_index >= 1.0)) throw InvalidArgument("HcfSpec: core index must be >= 1");
}

SmfMode::SmfMode(const SmfSpec& spec) : spec_(spec) {
  spec_.validate();
  core_scale_ = 1.0 / bessel_j(0, spec_.core_param);
  cladding_scale_ = 1.0 / bessel_k(0, spec_.cladding_param);
}

double SmfMode::operator()(double r) const {
  const double x = r / spec_.core_radius;
  if (x <= 1.0) return bessel_j(0, spec_.core_param * x) * core_scale_;
  return bessel_k(0, spec_.cladding_param * x) * cladding_scale_;
}

HcfMode::HcfMode(const HcfSpec& spec, int l, int m) : l_(l), m_(m), core_radius_(spec.core_radius) {
  spec.validate();
  if (l < 0 || m < 1) throw InvalidArgument("HcfMode: need l >= 0 and m >= 1");
  zero_ = special::bessel_zero(l, m);
}

double HcfMode::operator()(double r) const {
  if (r > core_radius_) return 0.0;
  return bessel_j(l_, zero_ * r / core_radius_);
}

double HcfMode::norm2() const {
  const double jn = bessel_j(l_ + 1, zero_);
  return 0.5 * core_radius_ * core_radius_ * jn * jn;
}

RadialField smf_field(const SmfSpec& spec, std::span<const double> radii) {
  return sample_field(SmfMode(spec), radii, 0);
}

RadialField hcf_mode(const HcfSpec& spec, int l, int m, std::span<const double> radii) {
  return sample_field(HcfMode(spec, l, m), radii, l);
}

}  // namespace fibermatch

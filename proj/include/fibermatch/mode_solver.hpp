#pragma once

#include <span>

#include "fibermatch/radial_field.hpp"

namespace fibermatch {

// LP01 partition of the fibre parameter into core (U) and cladding (W)
// parameters, U^2 + W^2 = V^2.
struct StepIndexSolution {
  double core_param = 0.0;
  double cladding_param = 0.0;
};

// Solves the weakly-guiding LP01 characteristic equation
//   U J1(U) / J0(U) = W K1(W) / K0(W)
// on the fundamental branch 0 < U < min(V, j01). Throws InvalidArgument for
// V <= 0 and ConvergenceError if no root is bracketed.
StepIndexSolution solve_step_index(double v_param);

// U J1(U)/J0(U) - W K1(W)/K0(W); zero at a solution.
double characteristic_residual(double core_param, double cladding_param);

struct SmfSpec {
  double core_radius = 0.0;  // metres
  double v_param = 0.0;
  double core_param = 0.0;
  double cladding_param = 0.0;

  // Solves for U and W from V.
  static SmfSpec from_v_param(double core_radius, double v_param);
  // 780HP: r_S = 2.2 um, V = 2.362 (U = 1.636, W = 1.704).
  static SmfSpec thorlabs_780hp();

  void validate() const;
};

struct HcfSpec {
  double core_radius = 0.0;  // metres
  double core_index = 1.0;   // air core

  void validate() const;
};

// Analytic SMF LP01 profile, unity at the core boundary.
class SmfMode {
 public:
  explicit SmfMode(const SmfSpec& spec);
  double operator()(double r) const;
  const SmfSpec& spec() const { return spec_; }

 private:
  SmfSpec spec_;
  double core_scale_;      // 1 / J0(U)
  double cladding_scale_;  // 1 / K0(W)
};

// Truncated Bessel mode of a hollow core: J_l(j_lm R / r_H) inside, 0 outside.
class HcfMode {
 public:
  HcfMode(const HcfSpec& spec, int l, int m);
  double operator()(double r) const;

  int l() const { return l_; }
  int m() const { return m_; }
  double core_radius() const { return core_radius_; }
  double zero() const { return zero_; }
  // Closed form of the integral of psi^2 R dR over the core: r_H^2 J_{l+1}(j_lm)^2 / 2.
  double norm2() const;

 private:
  int l_;
  int m_;
  double core_radius_;
  double zero_;
};

RadialField smf_field(const SmfSpec& spec, std::span<const double> radii);
RadialField hcf_mode(const HcfSpec& spec, int l, int m, std::span<const double> radii);

// m-th positive zero of J_l.
double bessel_zero(int l, int m);

}  // namespace fibermatch

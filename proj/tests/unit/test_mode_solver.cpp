#include <doctest.h>

#include <cmath>

#include "fibermatch/error.hpp"
#include "fibermatch/mode_solver.hpp"
#include "fibermatch/units.hpp"
#include "support/oracles.hpp"

using namespace fibermatch;
namespace oracle = fibermatch::testing;

TEST_CASE("step-index solve reproduces the 780HP parameters") {
  const auto s = solve_step_index(2.362);
  CHECK(s.core_param == doctest::Approx(1.636).epsilon(0.002 / 1.636));
  CHECK(s.cladding_param == doctest::Approx(1.704).epsilon(0.002 / 1.704));
  // Independent bisection with series J and integral K.
  CHECK(s.core_param == doctest::Approx(oracle::oracle_core_param(2.362)).epsilon(1e-10));
  // Frozen high-precision root.
  CHECK(s.core_param == doctest::Approx(1.6355831780217741).epsilon(1e-11));
  CHECK(s.cladding_param == doctest::Approx(1.7040867547669614).epsilon(1e-11));
}

TEST_CASE("step-index solutions satisfy the characteristic equation") {
  for (double v : {0.1, 0.2, 0.4, 1.0, 2.0, 2.362, 2.404, 2.5, 4.0, 10.0, 50.0}) {
    CAPTURE(v);
    const auto s = solve_step_index(v);
    CHECK(std::abs(characteristic_residual(s.core_param, s.cladding_param)) < 1e-8);
    CHECK(std::hypot(s.core_param, s.cladding_param) == doctest::Approx(v).epsilon(1e-10));
    CHECK(s.core_param > 0.0);
    CHECK(s.core_param < bessel_zero(0, 1));
  }
}

TEST_CASE("step-index limits") {
  SUBCASE("small V: the cladding parameter goes to zero") {
    double previous = 1.0;
    for (double v : {0.5, 0.1, 0.02}) {
      const double w = solve_step_index(v).cladding_param;
      CHECK(w < previous);
      previous = w;
    }
    CHECK(previous < 1e-20);
    // Far below cutoff W underflows; U collapses onto V.
    const auto tiny = solve_step_index(1e-3);
    CHECK(tiny.cladding_param == 0.0);
    CHECK(tiny.core_param == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(std::isfinite(characteristic_residual(tiny.core_param, tiny.cladding_param)));
  }
  SUBCASE("large V: U approaches j01") {
    CHECK(solve_step_index(50.0).core_param == doctest::Approx(2.405).epsilon(0.05));
  }
  CHECK_THROWS_AS(solve_step_index(0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_step_index(-1.0), InvalidArgument);
}

TEST_CASE("SMF field") {
  const auto spec = SmfSpec::thorlabs_780hp();
  const SmfMode mode(spec);
  SUBCASE("continuity at the core boundary") {
    const double a = spec.core_radius;
    CHECK(mode(a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(mode(a * (1 - 1e-12)) - mode(a * (1 + 1e-12))) < 1e-9);
  }
  SUBCASE("axis value is 1 / J0(U)") {
    const double expected = 1.0 / oracle::series_j(0, spec.core_param);
    CHECK(mode(0.0) == doctest::Approx(expected).epsilon(1e-11));
    CHECK(mode(0.0) == doctest::Approx(2.29852).epsilon(1e-5));
  }
  SUBCASE("cladding decay") {
    const double expected = oracle::integral_k(0, 5.0 * spec.cladding_param) / oracle::integral_k(0, spec.cladding_param);
    CHECK(mode(5.0 * spec.core_radius) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(std::abs(mode(5.0 * spec.core_radius)) < 1e-2 * mode(0.0));
  }
  SUBCASE("sampled field") {
    const auto radii = uniform_radial_grid(4.0 * spec.core_radius, 257);
    const auto f = smf_field(spec, radii);
    CHECK(f.azimuthal_order == 0);
    CHECK(f.size() == 257);
    CHECK(f.amplitudes[0].real() == doctest::Approx(mode(0.0)));
    for (std::size_t i = 1; i < f.size(); ++i) CHECK(f.amplitudes[i].real() < f.amplitudes[i - 1].real());
  }
  CHECK_THROWS_AS(SmfSpec::from_v_param(0.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(SmfSpec::from_v_param(2e-6, 0.0), InvalidArgument);
}

TEST_CASE("HCF truncated Bessel modes") {
  const HcfSpec spec{17.5 * kMicrometre, 1.0};
  const auto radii = uniform_radial_grid(4.0 * spec.core_radius, 1001);
  for (int l : {0, 1, 2})
    for (int m : {1, 2, 3}) {
      CAPTURE(l);
      CAPTURE(m);
      const HcfMode mode(spec, l, m);
      CHECK(std::abs(mode(spec.core_radius)) < 1e-12);
      const auto f = hcf_mode(spec, l, m, radii);
      CHECK(f.azimuthal_order == l);
      for (std::size_t i = 0; i < f.size(); ++i)
        if (f.radii[i] > spec.core_radius) CHECK(f.amplitudes[i] == Complex(0.0, 0.0));
    }
  CHECK(HcfMode(spec, 0, 1)(0.0) == 1.0);
  CHECK(HcfMode(spec, 1, 1).zero() == doctest::Approx(3.83).epsilon(1e-3));

  SUBCASE("closed-form norm against quadrature") {
    const HcfMode mode(spec, 0, 1);
    const auto fine = uniform_radial_grid(spec.core_radius, 20001);
    double sum = 0.0;
    for (std::size_t i = 1; i < fine.size(); ++i) {
      const double a = fine[i - 1], b = fine[i];
      sum += 0.5 * (b - a) * (mode(a) * mode(a) * a + mode(b) * mode(b) * b);
    }
    CHECK(mode.norm2() == doctest::Approx(sum).epsilon(1e-7));
  }
  CHECK_THROWS_AS(HcfMode(spec, -1, 1), InvalidArgument);
  CHECK_THROWS_AS(HcfMode(spec, 0, 0), InvalidArgument);
  CHECK_THROWS_AS((HcfSpec{0.0, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((HcfSpec{1e-5, 0.9}.validate()), InvalidArgument);
}

TEST_CASE("radial field invariants") {
  RadialField f;
  f.radii = {0.0, 1.0, 2.0};
  f.amplitudes = {1.0, 0.5, 0.25};
  CHECK_NOTHROW(f.validate());
  CHECK(f.at(0.5).real() == doctest::Approx(0.75));
  CHECK(f.at(3.0) == Complex(0.0, 0.0));
  auto bad = f;
  bad.radii = {0.1, 1.0, 2.0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = f;
  bad.radii = {0.0, 2.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = f;
  bad.amplitudes[1] = std::nan("");
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = f;
  bad.azimuthal_order = -1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

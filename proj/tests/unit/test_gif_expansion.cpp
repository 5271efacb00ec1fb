#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fibermatch/error.hpp"
#include "fibermatch/gif_expansion.hpp"
#include "fibermatch/interconnect.hpp"
#include "fibermatch/mode_solver.hpp"
#include "fibermatch/units.hpp"

using namespace fibermatch;

namespace {

const GifSpec kGif = GifSpec::thorlabs_gif625();

// Composite Simpson rule; `points` must be even.
double simpson_overlap(const GifSpec& spec, int l, int m1, int m2, std::size_t points) {
  const double r_max = 4.0 * spec.core_radius;
  double sum = 0.0;
  for (std::size_t i = 0; i <= points; ++i) {
    const double r = r_max * static_cast<double>(i) / static_cast<double>(points);
    const double w = (i == 0 || i == points) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * gif_mode_value(spec, l, m1, r) * gif_mode_value(spec, l, m2, r) * r;
  }
  return sum * r_max / (3.0 * static_cast<double>(points));
}

double peak_abs(const RadialField& f) {
  double p = 0.0;
  for (const auto& a : f.amplitudes) p = std::max(p, std::abs(a));
  return p;
}

// Radius where the intensity first falls to 1/e^2 of its axis value.
double intensity_radius(const RadialField& f) {
  const double threshold = std::norm(f.amplitudes[0]) * std::exp(-2.0);
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double a = std::norm(f.amplitudes[i - 1]), b = std::norm(f.amplitudes[i]);
    if (b <= threshold) return f.radii[i - 1] + (f.radii[i] - f.radii[i - 1]) * (a - threshold) / (a - b);
  }
  return f.extent();
}

}  // namespace

TEST_CASE("GIF specification") {
  CHECK(kGif.core_radius == doctest::Approx(29.884e-6).epsilon(1e-4));
  CHECK(kGif.focusing_param == doctest::Approx(std::sqrt(2 * 0.0178) / kGif.core_radius));
  CHECK(kGif.core_index() == doctest::Approx(1.4575).epsilon(1e-4));
  CHECK(kGif.quarter_pitch() == doctest::Approx(248.79e-6).epsilon(1e-3));
  CHECK_THROWS_AS(GifSpec::from_core_radius(0.0, 66.2, 0.0178, 780e-9), InvalidArgument);
  CHECK_THROWS_AS(GifSpec::from_core_radius(30e-6, 66.2, 1.2, 780e-9), InvalidArgument);
  CHECK_THROWS_AS(GifSpec::from_core_radius(30e-6, -1.0, 0.0178, 780e-9), InvalidArgument);
}

TEST_CASE("GIF mode shapes") {
  const double r0 = kGif.core_radius;
  for (double rh : {0.0, 0.1, 0.3, 0.7}) {
    const double x = kGif.fibre_param * rh * rh;
    CHECK(gif_mode_value(kGif, 0, 1, rh * r0) == doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-13));
    CHECK(gif_mode_value(kGif, 0, 2, rh * r0) == doctest::Approx((1.0 - x) * std::exp(-0.5 * x)).epsilon(1e-12));
    CHECK(gif_mode_value(kGif, 1, 2, rh * r0) ==
          doctest::Approx(rh * (2.0 - x) * std::exp(-0.5 * x)).epsilon(1e-12).scale(1e-12));
  }
  CHECK(gif_mode_value(kGif, 0, 2, 0.0) == 1.0);
  const auto radii = uniform_radial_grid(r0, 11);
  CHECK(gif_mode(kGif, 2, 3, radii).azimuthal_order == 2);
}

TEST_CASE("GIF modes are orthogonal and match the closed-form norm") {
  for (int l : {0, 1, 3}) {
    for (int m1 = 1; m1 <= 6; ++m1) {
      const double n1 = gif_mode_norm2(kGif, l, m1);
      CHECK(simpson_overlap(kGif, l, m1, m1, 40000) == doctest::Approx(n1).epsilon(1e-8));
      for (int m2 = m1 + 1; m2 <= 6; ++m2) {
        const double cross = simpson_overlap(kGif, l, m1, m2, 40000);
        CHECK(std::abs(cross) < 1e-8 * std::sqrt(n1 * gif_mode_norm2(kGif, l, m2)));
      }
    }
  }
}

TEST_CASE("normalized basis stays finite at high order") {
  const GifModeBasis basis(kGif, 0, 200);
  std::vector<double> out(200);
  for (double r : {0.0, 5e-6, 20e-6, 60e-6, 120e-6}) {
    basis.evaluate(r, out);
    for (double v : out) CHECK(std::isfinite(v));
  }
}

TEST_CASE("propagation constants") {
  const double k_n1 = kGif.fibre_param / (kGif.core_radius * std::sqrt(2.0 * kGif.profile_height));
  auto hand_beta = [&](int l, int m) {
    // With g = sqrt(2 Delta)/r_G the bracket is 1 - 4 Delta (2m + l - 1) / V.
    return k_n1 * std::sqrt(1.0 - 4.0 * kGif.profile_height * (2.0 * m + l - 1.0) / kGif.fibre_param);
  };
  CHECK(gif_beta(kGif, 0, 1) - gif_beta(kGif, 0, 2) ==
        doctest::Approx(hand_beta(0, 1) - hand_beta(0, 2)).epsilon(1e-9));
  CHECK(gif_beta(kGif, 2, 5) == doctest::Approx(hand_beta(2, 5)).epsilon(1e-14));

  double previous = gif_beta(kGif, 0, 1);
  for (int m = 2; gif_mode_guided(kGif, 0, m); ++m) {
    const double beta = gif_beta(kGif, 0, m);
    CHECK(beta < previous);
    CHECK(beta > 0.0);
    previous = beta;
  }
  // First mode beyond cutoff: bracket <= 0.
  int cutoff = 1;
  while (gif_mode_guided(kGif, 0, cutoff)) ++cutoff;
  CHECK_THROWS_AS(gif_beta(kGif, 0, cutoff), NotGuided);
  CHECK(gif_beta(kGif, 0, cutoff - 1) < 0.25 * gif_beta(kGif, 0, 1));

  // Adjacent radial orders are spaced by twice the focusing constant, to first order.
  CHECK(gif_beta(kGif, 0, 1) - gif_beta(kGif, 0, 2) == doctest::Approx(2.0 * kGif.focusing_param).epsilon(1e-2));
}

TEST_CASE("expansion of a GIF eigenmode is a single coefficient") {
  const auto radii = uniform_radial_grid(4.0 * kGif.core_radius, 4096);
  const auto source = gif_mode(kGif, 0, 1, radii);
  const auto e = expand_source(source, kGif);
  REQUIRE(!e.entries.empty());
  CHECK(std::abs(e.entries[0].amplitude) == doctest::Approx(1.0).epsilon(1e-9));
  // Linear interpolation of the sampled source leaks a little into other orders.
  for (std::size_t i = 1; i < e.entries.size(); ++i) CHECK(std::abs(e.entries[i].amplitude) < 1e-5);

  const auto exact = expand_profile([](double r) { return gif_mode_value(kGif, 0, 1, r); }, kGif);
  CHECK(std::abs(exact.entries[0].amplitude) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 1; i < exact.entries.size(); ++i) CHECK(std::abs(exact.entries[i].amplitude) < 1e-12);

  const auto higher = expand_source(gif_mode(kGif, 0, 3, radii), kGif);
  CHECK(std::abs(higher.entries[2].amplitude) == doctest::Approx(1.0).epsilon(1e-10));

  SUBCASE("non-axisymmetric source expands on its own order") {
    const auto e1 = expand_source(gif_mode(kGif, 1, 2, radii), kGif);
    CHECK(e1.azimuthal_order == 1);
    for (const auto& entry : e1.entries) CHECK(entry.l == 1);
    CHECK(std::abs(e1.entries[1].amplitude) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("SMF source expansion") {
  const auto smf = SmfSpec::thorlabs_780hp();
  const auto radii = uniform_radial_grid(4.0 * kGif.core_radius, 4096);
  const auto source = smf_field(smf, radii);
  const auto e = expand_source(source, kGif);

  CHECK(e.entries.size() == 60);
  CHECK(e.total_power() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.reconstruction_eta >= 0.999);
  CHECK(e.tail_power < 1e-4);
  for (const auto& entry : e.entries) {
    CHECK(entry.l == 0);
    CHECK(entry.beta > 0.0);
    // Real source, real basis: coefficients are real.
    CHECK(std::abs(entry.amplitude.imag()) < 1e-15);
  }

  SUBCASE("power is conserved under propagation") {
    for (double L : {0.0, 1e-6, 123.4e-6, 250e-6, 1e-3, 0.1}) {
      double p = 0.0;
      for (const auto& entry : e.entries) p += std::norm(entry.amplitude * std::polar(1.0, entry.beta * L));
      CHECK(std::abs(p - 1.0) < 1e-12);
      const auto out = propagate(e, L, radii);
      // Trapezoid R dR weights carry an O(h^2) error at the axis.
      CHECK(radial_norm2(out) == doctest::Approx(1.0).epsilon(1e-4));
    }
  }

  SUBCASE("L = 0 reconstruction matches the source") {
    const auto rebuilt = propagate(e, 0.0, radii);
    CHECK(overlap_efficiency(rebuilt, source) >= 0.999);
    CHECK(overlap_efficiency(rebuilt, source) == doctest::Approx(e.reconstruction_eta).epsilon(1e-12));
  }

  SUBCASE("more modes never hurt the reconstruction") {
    double previous = 0.0;
    for (int m_max : {5, 10, 20, 40, 60, 80}) {
      ExpansionOptions options;
      options.m_max = m_max;
      options.min_reconstruction = 0.0;
      options.max_tail_power = 1.0;
      const double eta = expand_source(source, kGif, options).reconstruction_eta;
      CHECK(eta >= previous - 1e-12);
      previous = eta;
    }
  }

  SUBCASE("coarse truncation is reported") {
    ExpansionOptions options;
    options.m_max = 8;
    CHECK_THROWS_AS(expand_source(source, kGif, options), TruncationTooCoarse);
  }

  SUBCASE("sampled and analytic routes agree") {
    // The sampled route interpolates the source linearly across the core edge kink.
    const SmfMode mode(smf);
    const auto analytic = expand_profile([&](double r) { return mode(r); }, kGif);
    for (std::size_t i = 0; i < e.entries.size(); ++i)
      CHECK(std::abs(analytic.entries[i].amplitude - e.entries[i].amplitude) < 5e-5);
  }

  SUBCASE("the exit beam at 250 um matches a Gaussian-beam lens estimate") {
    // Gaussian SMF spot (Marcuse fit) imaged through a parabolic lens:
    // w(L)^2 = w0^2 cos^2(gL) + (2 / (k n1 g w0))^2 sin^2(gL).
    const double v = smf.v_param;
    const double w0 = smf.core_radius * (0.65 + 1.619 / std::pow(v, 1.5) + 2.879 / std::pow(v, 6.0));
    const double gl = kGif.focusing_param * 250e-6;
    const double w_far = 2.0 / (kGif.axial_wavenumber() * kGif.focusing_param * w0);
    const double expected = std::hypot(w0 * std::cos(gl), w_far * std::sin(gl));
    const auto exit = propagate(e, 250e-6, radii);
    CHECK(intensity_radius(exit) == doctest::Approx(expected).epsilon(0.10));
    CHECK(peak_abs(exit) == doctest::Approx(std::abs(exit.amplitudes[0])).epsilon(1e-9));
  }
}

TEST_CASE("expansion argument checks") {
  const auto radii = uniform_radial_grid(100e-6, 64);
  RadialField zero;
  zero.radii = radii;
  zero.amplitudes.assign(radii.size(), Complex{0.0, 0.0});
  CHECK_THROWS_AS(expand_source(zero, kGif), DegenerateField);
  ExpansionOptions options;
  options.m_max = 0;
  CHECK_THROWS_AS(expand_source(gif_mode(kGif, 0, 1, radii), kGif, options), InvalidArgument);
  const auto e = expand_source(gif_mode(kGif, 0, 1, uniform_radial_grid(120e-6, 2048)), kGif);
  CHECK_THROWS_AS(propagate(e, -1e-6, radii), InvalidArgument);
}

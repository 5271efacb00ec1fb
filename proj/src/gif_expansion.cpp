#include "fibermatch/gif_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fibermatch/error.hpp"
#include "fibermatch/quadrature.hpp"
#include "fibermatch/units.hpp"

namespace fibermatch {

GifSpec GifSpec::from_numerical_aperture(double fibre_param, double profile_height, double numerical_aperture,
                                         double wavelength) {
  if (!(numerical_aperture > 0.0)) throw InvalidArgument("GifSpec: NA must be positive");
  const double core_radius = fibre_param * wavelength / (2.0 * kPi * numerical_aperture);
  return from_core_radius(core_radius, fibre_param, profile_height, wavelength);
}

GifSpec GifSpec::from_core_radius(double core_radius, double fibre_param, double profile_height,
                                  double wavelength) {
  GifSpec spec;
  spec.core_radius = core_radius;
  spec.fibre_param = fibre_param;
  spec.profile_height = profile_height;
  spec.wavelength = wavelength;
  spec.focusing_param = core_radius > 0.0 && profile_height > 0.0 ? std::sqrt(2.0 * profile_height) / core_radius : 0.0;
  spec.validate();
  return spec;
}

GifSpec GifSpec::thorlabs_gif625() { return from_numerical_aperture(66.2, 1.78e-2, 0.275, 780.0 * kNanometre); }

double GifSpec::axial_wavenumber() const { return fibre_param / (core_radius * std::sqrt(2.0 * profile_height)); }

double GifSpec::core_index() const { return axial_wavenumber() * wavelength / (2.0 * kPi); }

double GifSpec::quarter_pitch() const { return kPi / (2.0 * focusing_param); }

void GifSpec::validate() const {
  if (!(core_radius > 0.0)) throw InvalidArgument("GifSpec: core radius must be positive");
  if (!(fibre_param > 0.0)) throw InvalidArgument("GifSpec: V must be positive");
  if (!(profile_height > 0.0 && profile_height < 1.0)) throw InvalidArgument("GifSpec: Delta must lie in (0, 1)");
  if (!(focusing_param > 0.0)) throw InvalidArgument("GifSpec: focusing parameter must be positive");
  if (!(wavelength > 0.0)) throw InvalidArgument("GifSpec: wavelength must be positive");
}

namespace {

void check_indices(int l, int m) {
  if (l < 0 || m < 1) throw InvalidArgument("GIF mode indices need l >= 0 and m >= 1");
}

// Fills out[n] = Rh^l L_n^{(l)}(x) exp(-x/2) for n = 0..size-1, x = V Rh^2.
// The exponential is folded into the recurrence seed so nothing overflows.
void scaled_laguerre_gauss(const GifSpec& spec, int l, double r, std::span<double> out) {
  if (out.empty()) return;
  const double rh = r / spec.core_radius;
  const double x = spec.fibre_param * rh * rh;
  const double alpha = static_cast<double>(l);
  const double seed = std::pow(rh, l) * std::exp(-0.5 * x);
  out[0] = seed;
  if (out.size() == 1) return;
  out[1] = (1.0 + alpha - x) * seed;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = ((2.0 * kk + 1.0 + alpha - x) * out[k] - (kk + alpha) * out[k - 1]) / (kk + 1.0);
  }
}

double bracket_term(const GifSpec& spec, int l, int m) {
  const double g = spec.focusing_param;
  const double r = spec.core_radius;
  return 1.0 - 2.0 * r * r * g * g * (2.0 * m + l - 1.0) / spec.fibre_param;
}

}  // namespace

double gif_mode_value(const GifSpec& spec, int l, int m, double r) {
  check_indices(l, m);
  std::vector<double> buf(static_cast<std::size_t>(m));
  scaled_laguerre_gauss(spec, l, r, buf);
  return buf.back();
}

RadialField gif_mode(const GifSpec& spec, int l, int m, std::span<const double> radii) {
  spec.validate();
  check_indices(l, m);
  std::vector<double> buf(static_cast<std::size_t>(m));
  return sample_field(
      [&](double r) {
        scaled_laguerre_gauss(spec, l, r, buf);
        return buf.back();
      },
      radii, l);
}

double gif_mode_norm2(const GifSpec& spec, int l, int m) {
  check_indices(l, m);
  const double n = m - 1.0;
  const double v = spec.fibre_param;
  const double log_ratio = std::lgamma(n + l + 1.0) - std::lgamma(n + 1.0) - l * std::log(v);
  return spec.core_radius * spec.core_radius / (2.0 * v) * std::exp(log_ratio);
}

void normalized_gif_modes(const GifSpec& spec, int l, std::span<double> out, double r) {
  GifModeBasis(spec, l, static_cast<int>(out.size())).evaluate(r, out);
}

GifModeBasis::GifModeBasis(const GifSpec& spec, int l, int m_max) : spec_(spec), l_(l) {
  if (l < 0 || m_max < 0) throw InvalidArgument("GifModeBasis: need l >= 0 and m_max >= 0");
  inv_norm_.resize(static_cast<std::size_t>(m_max));
  for (int m = 1; m <= m_max; ++m) inv_norm_[static_cast<std::size_t>(m - 1)] = 1.0 / std::sqrt(gif_mode_norm2(spec, l, m));
}

void GifModeBasis::evaluate(double r, std::span<double> out) const {
  scaled_laguerre_gauss(spec_, l_, r, out);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= inv_norm_[k];
}

bool gif_mode_guided(const GifSpec& spec, int l, int m) { return bracket_term(spec, l, m) > 0.0; }

double gif_beta(const GifSpec& spec, int l, int m) {
  check_indices(l, m);
  const double bracket = bracket_term(spec, l, m);
  if (!(bracket > 0.0))
    throw NotGuided("GIF mode (" + std::to_string(l) + "," + std::to_string(m) + ") is beyond cutoff");
  return spec.axial_wavenumber() * std::sqrt(bracket);
}

double ModeExpansion::total_power() const {
  double p = 0.0;
  for (const auto& e : entries) p += std::norm(e.amplitude);
  return p;
}

Complex ModeExpansion::field_at(double r, double length) const {
  if (entries.empty()) return {0.0, 0.0};
  std::vector<double> modes(static_cast<std::size_t>(entries.back().m));
  normalized_gif_modes(source_spec, azimuthal_order, modes, r);
  Complex sum{0.0, 0.0};
  for (const auto& e : entries)
    sum += e.amplitude * modes[static_cast<std::size_t>(e.m - 1)] * std::polar(1.0, e.beta * length);
  return sum;
}

namespace {

// Shared tail of both expansion routes: keeps guided modes, normalizes, and
// fills the diagnostics that do not depend on the source representation.
ModeExpansion assemble(const GifSpec& spec, int l, const std::vector<Complex>& projections, double source_norm2,
                       const ExpansionOptions& options) {
  if (!(source_norm2 > 0.0)) throw DegenerateField("expand_source: source field has zero norm");
  ModeExpansion expansion;
  expansion.source_spec = spec;
  expansion.azimuthal_order = l;
  double projected = 0.0;
  for (int m = 1; m <= options.m_max; ++m) {
    if (!gif_mode_guided(spec, l, m)) break;
    const Complex p = projections[static_cast<std::size_t>(m - 1)];
    expansion.entries.push_back({l, m, p, gif_beta(spec, l, m)});
    projected += std::norm(p);
  }
  if (expansion.entries.empty() || !(projected > 0.0))
    throw TruncationTooCoarse("expand_source: no guided mode overlaps the source");
  expansion.captured_power = projected / source_norm2;
  const double scale = 1.0 / std::sqrt(projected);
  for (auto& e : expansion.entries) e.amplitude *= scale;

  const std::size_t n = expansion.entries.size();
  const std::size_t tail = std::max<std::size_t>(1, (n + 9) / 10);
  for (std::size_t i = n - tail; i < n; ++i) expansion.tail_power += std::norm(expansion.entries[i].amplitude);
  return expansion;
}

void check_truncation(const ModeExpansion& expansion, const ExpansionOptions& options) {
  if (expansion.reconstruction_eta < options.min_reconstruction)
    throw TruncationTooCoarse("expand_source: L = 0 reconstruction overlap " +
                              std::to_string(expansion.reconstruction_eta) + " below " +
                              std::to_string(options.min_reconstruction) + "; raise m_max");
  if (expansion.tail_power > options.max_tail_power)
    throw TruncationTooCoarse("expand_source: tail power " + std::to_string(expansion.tail_power) +
                              " exceeds " + std::to_string(options.max_tail_power) + "; raise m_max");
}

void validate_options(const ExpansionOptions& options) {
  if (options.m_max < 1) throw InvalidArgument("expand_source: m_max must be >= 1");
  if (options.quadrature_panels == 0) throw InvalidArgument("expand_source: need at least one quadrature panel");
}

}  // namespace

ModeExpansion expand_source(const RadialField& source, const GifSpec& spec, const ExpansionOptions& options) {
  source.validate();
  spec.validate();
  validate_options(options);
  const int l = source.azimuthal_order;
  const auto m_max = static_cast<std::size_t>(options.m_max);

  const double extent = options.extent > 0.0 ? options.extent : source.extent();
  const auto rule = composite_gauss_legendre(0.0, extent, options.quadrature_panels);
  std::vector<Complex> projections(m_max, Complex{0.0, 0.0});
  const GifModeBasis basis(spec, l, options.m_max);
  std::vector<double> modes(m_max);
  double source_norm2 = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double r = rule.nodes[q];
    const double w = rule.weights[q] * r;
    const Complex s = source.at(r);
    basis.evaluate(r, modes);
    for (std::size_t k = 0; k < m_max; ++k) projections[k] += w * modes[k] * s;
    source_norm2 += w * std::norm(s);
  }

  auto expansion = assemble(spec, l, projections, source_norm2, options);

  const RadialField rebuilt = propagate(expansion, 0.0, source.radii);
  const double num = std::norm(radial_inner_product(rebuilt, source));
  const double den = radial_norm2(rebuilt) * radial_norm2(source);
  expansion.reconstruction_eta = den > 0.0 ? std::min(1.0, num / den) : 0.0;
  check_truncation(expansion, options);
  return expansion;
}

ModeExpansion expand_profile(const std::function<double(double)>& profile, const GifSpec& spec,
                             const ExpansionOptions& options, int azimuthal_order) {
  spec.validate();
  validate_options(options);
  if (azimuthal_order < 0) throw InvalidArgument("expand_profile: negative azimuthal order");
  const auto m_max = static_cast<std::size_t>(options.m_max);

  const double extent = options.extent > 0.0 ? options.extent : kGridExtentFactor * spec.core_radius;
  const auto rule = composite_gauss_legendre(0.0, extent, options.quadrature_panels);
  std::vector<Complex> projections(m_max, Complex{0.0, 0.0});
  const GifModeBasis basis(spec, azimuthal_order, options.m_max);
  std::vector<double> modes(m_max);
  double source_norm2 = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double r = rule.nodes[q];
    const double w = rule.weights[q] * r;
    const double s = profile(r);
    basis.evaluate(r, modes);
    for (std::size_t k = 0; k < m_max; ++k) projections[k] += w * modes[k] * s;
    source_norm2 += w * s * s;
  }

  auto expansion = assemble(spec, azimuthal_order, projections, source_norm2, options);
  // With an orthonormal basis the L = 0 overlap equals the captured power.
  expansion.reconstruction_eta = std::min(1.0, expansion.captured_power);
  check_truncation(expansion, options);
  return expansion;
}

RadialField propagate(const ModeExpansion& expansion, double length, std::span<const double> radii) {
  if (!(length >= 0.0)) throw InvalidArgument("propagate: length must be >= 0");
  RadialField out;
  out.radii.assign(radii.begin(), radii.end());
  out.azimuthal_order = expansion.azimuthal_order;
  out.amplitudes.assign(radii.size(), Complex{0.0, 0.0});
  if (expansion.entries.empty()) return out;

  std::vector<Complex> phased;
  phased.reserve(expansion.entries.size());
  for (const auto& e : expansion.entries) phased.push_back(e.amplitude * std::polar(1.0, e.beta * length));

  const GifModeBasis basis(expansion.source_spec, expansion.azimuthal_order, expansion.entries.back().m);
  std::vector<double> modes(static_cast<std::size_t>(basis.m_max()));
  for (std::size_t i = 0; i < radii.size(); ++i) {
    basis.evaluate(radii[i], modes);
    Complex sum{0.0, 0.0};
    for (std::size_t k = 0; k < phased.size(); ++k)
      sum += phased[k] * modes[static_cast<std::size_t>(expansion.entries[k].m - 1)];
    out.amplitudes[i] = sum;
  }
  return out;
}

}  // namespace fibermatch

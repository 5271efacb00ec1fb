#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fibermatch/radial_field.hpp"

namespace fibermatch {

// Parabolic-profile graded-index fibre.
struct GifSpec {
  double core_radius = 0.0;     // r_G, metres
  double fibre_param = 0.0;     // V_G
  double profile_height = 0.0;  // Delta
  double focusing_param = 0.0;  // g, 1/metres
  double wavelength = 0.0;      // metres

  // r_G = V lambda / (2 pi NA) and g = sqrt(2 Delta) / r_G.
  static GifSpec from_numerical_aperture(double fibre_param, double profile_height, double numerical_aperture,
                                         double wavelength);
  // Same, but with the core radius given directly.
  static GifSpec from_core_radius(double core_radius, double fibre_param, double profile_height, double wavelength);
  // GIF625 at 780 nm: V = 66.2, Delta = 1.78e-2, NA = 0.275.
  static GifSpec thorlabs_gif625();

  // k n1 = V / (r_G sqrt(2 Delta)).
  double axial_wavenumber() const;
  double core_index() const;
  // Length over which a launched beam is collimated, pi / (2 g).
  double quarter_pitch() const;

  void validate() const;
};

// g_{l,m}(R) = Rh^l L^{(l)}_{m-1}(V Rh^2) exp(-V Rh^2 / 2), Rh = R / r_G.
double gif_mode_value(const GifSpec& spec, int l, int m, double r);
RadialField gif_mode(const GifSpec& spec, int l, int m, std::span<const double> radii);

// Closed form of the integral of g_{l,m}^2 R dR over [0, inf):
// r_G^2 (m-1+l)! / (2 (m-1)! V^{l+1}).
double gif_mode_norm2(const GifSpec& spec, int l, int m);

// Unit-normalized g_{l,1..m_max}(r) written into `out` (size m_max).
void normalized_gif_modes(const GifSpec& spec, int l, std::span<double> out, double r);

// Unit-normalized modes of one azimuthal order with cached normalizations.
class GifModeBasis {
 public:
  GifModeBasis(const GifSpec& spec, int l, int m_max);
  // out[k] = normalized g_{l,k+1}(r); out.size() must equal m_max().
  void evaluate(double r, std::span<double> out) const;
  int m_max() const { return static_cast<int>(inv_norm_.size()); }

 private:
  GifSpec spec_;
  int l_;
  std::vector<double> inv_norm_;
};

// Propagation constant; throws NotGuided when the bracketed term is <= 0.
double gif_beta(const GifSpec& spec, int l, int m);
bool gif_mode_guided(const GifSpec& spec, int l, int m);

struct ModeEntry {
  int l = 0;
  int m = 1;
  Complex amplitude;  // coefficient of the unit-normalized mode
  double beta = 0.0;  // rad/m
};

struct ModeExpansion {
  std::vector<ModeEntry> entries;
  GifSpec source_spec;
  int azimuthal_order = 0;
  double captured_power = 0.0;      // fraction of source power in the retained modes, before renormalization
  double tail_power = 0.0;          // power in the last 10 % of retained modes, after renormalization
  double reconstruction_eta = 0.0;  // overlap of the L = 0 reconstruction with the source

  double total_power() const;
  // Field at radius r after length L (unit-normalized mode basis).
  Complex field_at(double r, double length) const;
};

struct ExpansionOptions {
  int m_max = 60;
  double min_reconstruction = 0.999;
  double max_tail_power = 1e-4;
  std::size_t quadrature_panels = 64;
  double extent = 0.0;  // integration range; 0 selects 4 max(r_G, source extent)
};

// Projects a sampled source onto the GIF modes of the source's azimuthal order.
// Amplitudes are normalized to unit total power. Throws TruncationTooCoarse
// when the reconstruction or tail-power check fails.
ModeExpansion expand_source(const RadialField& source, const GifSpec& spec, const ExpansionOptions& options = {});

// Same projection for an analytic real profile (axisymmetric unless l given).
ModeExpansion expand_profile(const std::function<double(double)>& profile, const GifSpec& spec,
                             const ExpansionOptions& options = {}, int azimuthal_order = 0);

RadialField propagate(const ModeExpansion& expansion, double length, std::span<const double> radii);

}  // namespace fibermatch

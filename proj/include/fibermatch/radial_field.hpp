#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fibermatch {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultGridPoints = 4096;
// Radial grids extend to this multiple of the largest core radius involved.
inline constexpr double kGridExtentFactor = 4.0;

// A field amplitude psi(R) e^{i l theta} sampled on a radial grid.
struct RadialField {
  std::vector<double> radii;  // metres, strictly increasing from 0
  std::vector<Complex> amplitudes;
  int azimuthal_order = 0;

  std::size_t size() const { return radii.size(); }
  double extent() const { return radii.empty() ? 0.0 : radii.back(); }

  // Throws InvalidArgument if the grid or amplitudes break the invariants.
  void validate() const;

  // Linear interpolation; zero beyond the last sample.
  Complex at(double r) const;
};

std::vector<double> uniform_radial_grid(double r_max, std::size_t points = kDefaultGridPoints);

template <class Profile>
RadialField sample_field(const Profile& profile, std::span<const double> radii, int azimuthal_order) {
  RadialField f;
  f.radii.assign(radii.begin(), radii.end());
  f.amplitudes.reserve(radii.size());
  for (double r : radii) f.amplitudes.emplace_back(profile(r));
  f.azimuthal_order = azimuthal_order;
  return f;
}

// Trapezoid weights for the measure R dR on an arbitrary grid.
std::vector<double> radial_weights(std::span<const double> radii);

// Integral of conj(a) b R dR over the common support (the 2 pi factor is
// omitted). Fields on different grids are interpolated onto a shared uniform
// grid first.
Complex radial_inner_product(const RadialField& a, const RadialField& b);

// Integral of |f|^2 R dR.
double radial_norm2(const RadialField& f);

}  // namespace fibermatch

#include "fibermatch/radial_field.hpp"

#include <algorithm>
#include <cmath>

#include "fibermatch/error.hpp"

namespace fibermatch {

void RadialField::validate() const {
  if (radii.size() < 2) throw InvalidArgument("RadialField: need at least two samples");
  if (radii.size() != amplitudes.size()) throw InvalidArgument("RadialField: radii/amplitudes size mismatch");
  if (radii.front() != 0.0) throw InvalidArgument("RadialField: grid must start at R = 0");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw InvalidArgument("RadialField: radii must be strictly increasing");
  for (const auto& a : amplitudes)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw InvalidArgument("RadialField: non-finite amplitude");
  if (azimuthal_order < 0) throw InvalidArgument("RadialField: negative azimuthal order");
}

Complex RadialField::at(double r) const {
  if (radii.empty() || r < 0.0 || r > radii.back()) return {0.0, 0.0};
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  if (it == radii.end()) return amplitudes.back();
  const auto hi = static_cast<std::size_t>(it - radii.begin());
  const std::size_t lo = hi - 1;
  const double t = (r - radii[lo]) / (radii[hi] - radii[lo]);
  return amplitudes[lo] + t * (amplitudes[hi] - amplitudes[lo]);
}

std::vector<double> uniform_radial_grid(double r_max, std::size_t points) {
  if (!(r_max > 0.0) || points < 2) throw InvalidArgument("uniform_radial_grid: need r_max > 0 and >= 2 points");
  std::vector<double> grid(points);
  const double step = r_max / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = step * static_cast<double>(i);
  grid.back() = r_max;
  return grid;
}

std::vector<double> radial_weights(std::span<const double> radii) {
  std::vector<double> w(radii.size(), 0.0);
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    const double half = 0.5 * (radii[i + 1] - radii[i]);
    w[i] += half * radii[i];
    w[i + 1] += half * radii[i + 1];
  }
  return w;
}

namespace {

RadialField resampled(const RadialField& f, std::span<const double> grid) {
  RadialField out;
  out.radii.assign(grid.begin(), grid.end());
  out.amplitudes.reserve(grid.size());
  for (double r : grid) out.amplitudes.push_back(f.at(r));
  out.azimuthal_order = f.azimuthal_order;
  return out;
}

Complex inner_same_grid(const RadialField& a, const RadialField& b) {
  const auto w = radial_weights(a.radii);
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return sum;
}

}  // namespace

Complex radial_inner_product(const RadialField& a, const RadialField& b) {
  if (a.radii == b.radii) return inner_same_grid(a, b);
  const auto grid = uniform_radial_grid(std::max(a.extent(), b.extent()), std::max(a.size(), b.size()));
  return inner_same_grid(resampled(a, grid), resampled(b, grid));
}

double radial_norm2(const RadialField& f) {
  const auto w = radial_weights(f.radii);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * std::norm(f.amplitudes[i]);
  return sum;
}

}  // namespace fibermatch

#include "fibermatch/interconnect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fibermatch/error.hpp"
#include "fibermatch/quadrature.hpp"
#include "fibermatch/special.hpp"
#include "fibermatch/units.hpp"

namespace fibermatch {

namespace {

// Quadrature can overshoot 1 by rounding; anything beyond that is a bug.
double checked_efficiency(double numerator, double denominator) {
  if (!(denominator > 0.0)) throw DegenerateField("overlap: field with zero norm");
  const double eta = numerator / denominator;
  if (eta > 1.0 + 1e-12) throw ConvergenceError("overlap: efficiency " + std::to_string(eta) + " exceeds 1");
  return std::clamp(eta, 0.0, 1.0);
}

void require_axisymmetric(const RadialField& f1, const RadialField& f2) {
  if (f1.azimuthal_order != 0 || f2.azimuthal_order != 0)
    throw InvalidArgument("offset_efficiency: fields must be axisymmetric");
}

struct PolarGrid {
  std::vector<double> radii;
  std::vector<double> weights;  // R dR
  std::vector<Complex> inner;   // f1 at the radii
  std::vector<double> cos_theta;
  double dtheta = 0.0;
};

PolarGrid polar_grid(const RadialField& f1, const OffsetQuadrature& q) {
  if (q.azimuthal_nodes < 1) throw InvalidArgument("offset_efficiency: need azimuthal nodes");
  PolarGrid g;
  if (q.radial_nodes == 0) {
    g.radii = f1.radii;
    g.inner = f1.amplitudes;
  } else {
    g.radii = uniform_radial_grid(f1.extent(), q.radial_nodes);
    g.inner.reserve(g.radii.size());
    for (double r : g.radii) g.inner.push_back(f1.at(r));
  }
  g.weights = radial_weights(g.radii);
  g.dtheta = 2.0 * kPi / static_cast<double>(q.azimuthal_nodes);
  g.cos_theta.resize(q.azimuthal_nodes);
  for (std::size_t k = 0; k < q.azimuthal_nodes; ++k) g.cos_theta[k] = std::cos(g.dtheta * static_cast<double>(k));
  return g;
}

// One radial row: sum over theta of f2 at the displaced point.
struct RowSums {
  Complex cross;
  double displaced_norm = 0.0;
};

RowSums row_sums(const PolarGrid& g, std::size_t i, const RadialField& f2, double offset) {
  const double r = g.radii[i];
  RowSums s{{0.0, 0.0}, 0.0};
  for (double c : g.cos_theta) {
    // Distance from the displaced centre (offset, 0) to (r cos t, r sin t).
    const double rho = std::sqrt(std::max(r * r + offset * offset - 2.0 * r * offset * c, 0.0));
    const Complex v = f2.at(rho);
    s.cross += v;
    s.displaced_norm += std::norm(v);
  }
  return s;
}

double finish_offset(const PolarGrid& g, const std::vector<RowSums>& rows) {
  Complex cross{0.0, 0.0};
  double n1 = 0.0;
  double n2 = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double w = g.weights[i] * g.dtheta;
    cross += w * std::conj(g.inner[i]) * rows[i].cross;
    n1 += w * static_cast<double>(g.cos_theta.size()) * std::norm(g.inner[i]);
    n2 += w * rows[i].displaced_norm;
  }
  return checked_efficiency(std::norm(cross), n1 * n2);
}

}  // namespace

double overlap_efficiency(const RadialField& f1, const RadialField& f2) {
  f1.validate();
  f2.validate();
  if (f1.azimuthal_order != f2.azimuthal_order) return 0.0;
  const double n1 = radial_norm2(f1);
  const double n2 = radial_norm2(f2);
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw DegenerateField("overlap_efficiency: field with zero norm");
  return checked_efficiency(std::norm(radial_inner_product(f1, f2)), n1 * n2);
}

double offset_efficiency(const RadialField& f1, const RadialField& f2, double offset,
                         const OffsetQuadrature& quadrature) {
  f1.validate();
  f2.validate();
  require_axisymmetric(f1, f2);
  if (!(offset >= 0.0)) throw InvalidArgument("offset_efficiency: offset must be >= 0");
  const PolarGrid g = polar_grid(f1, quadrature);
  std::vector<RowSums> rows(g.radii.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = row_sums(g, static_cast<std::size_t>(i), f2, offset);
  return finish_offset(g, rows);
}

double offset_efficiency_serial(const RadialField& f1, const RadialField& f2, double offset,
                                const OffsetQuadrature& quadrature) {
  f1.validate();
  f2.validate();
  require_axisymmetric(f1, f2);
  if (!(offset >= 0.0)) throw InvalidArgument("offset_efficiency: offset must be >= 0");
  const PolarGrid g = polar_grid(f1, quadrature);
  std::vector<RowSums> rows(g.radii.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = row_sums(g, i, f2, offset);
  return finish_offset(g, rows);
}

double SweepRange::value(std::size_t i) const {
  if (points <= 1) return min;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
}

std::vector<double> SweepRange::values() const {
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) v[i] = value(i);
  return v;
}

MapOptimum EfficiencyGrid::optimum(double tie_tolerance) const {
  if (eta.empty()) throw InvalidArgument("EfficiencyGrid::optimum: empty grid");
  const double best = *std::max_element(eta.begin(), eta.end());
  MapOptimum opt;
  opt.eta_max = best;
  for (std::size_t i = 0; i < gif_lengths.size(); ++i) {
    for (std::size_t j = 0; j < core_radii.size(); ++j) {
      if (at(i, j) >= best - tie_tolerance) {
        opt.gif_length += gif_lengths[i];
        opt.core_radius += core_radii[j];
        ++opt.tied_cells;
      }
    }
  }
  opt.gif_length /= static_cast<double>(opt.tied_cells);
  opt.core_radius /= static_cast<double>(opt.tied_cells);
  return opt;
}

namespace {

void validate_range(const SweepRange& r, const std::string& what, bool allow_zero) {
  if (r.points < 1) throw InvalidArgument(what + ": need at least one point");
  if (allow_zero ? !(r.min >= 0.0) : !(r.min > 0.0)) throw InvalidArgument(what + ": values out of range");
  if (r.points > 1 && !(r.max > r.min)) throw InvalidArgument(what + ": range must be ascending");
}

// c_m = integral of g_m(R) psi_H(R) R dR over the core, and N_H = integral of psi_H^2 R dR.
struct HcfProjection {
  std::vector<double> coefficients;
  double norm2 = 0.0;
};

HcfProjection project_hcf(const GifModeBasis& basis, const HcfMode& hcf, std::size_t panels) {
  HcfProjection p;
  p.coefficients.assign(static_cast<std::size_t>(basis.m_max()), 0.0);
  const auto rule = composite_gauss_legendre(0.0, hcf.core_radius(), panels);
  std::vector<double> modes(p.coefficients.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double r = rule.nodes[q];
    const double w = rule.weights[q] * r;
    const double h = hcf(r);
    basis.evaluate(r, modes);
    for (std::size_t k = 0; k < modes.size(); ++k) p.coefficients[k] += w * modes[k] * h;
    p.norm2 += w * h * h;
  }
  return p;
}

double modal_efficiency(const ModeExpansion& expansion, std::span<const Complex> phases, const HcfProjection& p) {
  Complex sum{0.0, 0.0};
  for (std::size_t k = 0; k < expansion.entries.size(); ++k) {
    const auto& e = expansion.entries[k];
    sum += e.amplitude * phases[k] * p.coefficients[static_cast<std::size_t>(e.m - 1)];
  }
  return checked_efficiency(std::norm(sum), expansion.total_power() * p.norm2);
}

std::vector<Complex> phase_factors(const ModeExpansion& expansion, double length) {
  std::vector<Complex> ph;
  ph.reserve(expansion.entries.size());
  for (const auto& e : expansion.entries) ph.push_back(std::polar(1.0, e.beta * length));
  return ph;
}

}  // namespace

double coupling_efficiency(const ModeExpansion& expansion, double gif_length, const HcfSpec& hcf,
                           std::size_t quadrature_panels) {
  if (expansion.entries.empty()) throw DegenerateField("coupling_efficiency: empty expansion");
  if (expansion.azimuthal_order != 0) return 0.0;
  const GifModeBasis basis(expansion.source_spec, 0, expansion.entries.back().m);
  const auto p = project_hcf(basis, HcfMode(hcf, 0, 1), quadrature_panels);
  return modal_efficiency(expansion, phase_factors(expansion, gif_length), p);
}

EfficiencyGrid efficiency_map(const ModeExpansion& expansion, const SweepRange& lengths, const SweepRange& core_radii,
                              const MapOptions& options) {
  validate_range(lengths, "GIF lengths", true);
  validate_range(core_radii, "core radii", false);
  if (expansion.entries.empty()) throw DegenerateField("efficiency_map: empty expansion");
  if (expansion.azimuthal_order != 0) throw InvalidArgument("efficiency_map: source must be axisymmetric");

  EfficiencyGrid grid;
  grid.gif_lengths = lengths.values();
  grid.core_radii = core_radii.values();
  grid.eta.assign(grid.gif_lengths.size() * grid.core_radii.size(), 0.0);

  const GifModeBasis basis(expansion.source_spec, 0, expansion.entries.back().m);
  std::vector<HcfProjection> projections(grid.core_radii.size());
  const auto n_radii = static_cast<std::ptrdiff_t>(grid.core_radii.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < n_radii; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    projections[jj] = project_hcf(basis, HcfMode(HcfSpec{grid.core_radii[jj], 1.0}, 0, 1), options.quadrature_panels);
  }

  const auto n_lengths = static_cast<std::ptrdiff_t>(grid.gif_lengths.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n_lengths; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const auto phases = phase_factors(expansion, grid.gif_lengths[ii]);
    for (std::size_t j = 0; j < grid.core_radii.size(); ++j)
      grid.eta[ii * grid.core_radii.size() + j] = modal_efficiency(expansion, phases, projections[j]);
  }
  return grid;
}

EfficiencyGrid efficiency_map(const SmfSpec& smf, const GifSpec& gif, const SweepRange& lengths,
                              const SweepRange& core_radii, const MapOptions& options) {
  const SmfMode source(smf);
  const auto expansion = expand_profile([&source](double r) { return source(r); }, gif, options.expansion);
  return efficiency_map(expansion, lengths, core_radii, options);
}

EfficiencyGrid efficiency_map_serial(const SmfSpec& smf, const GifSpec& gif, const SweepRange& lengths,
                                     const SweepRange& core_radii, const MapOptions& options) {
  validate_range(lengths, "GIF lengths", true);
  validate_range(core_radii, "core radii", false);
  const double extent = kGridExtentFactor * std::max(gif.core_radius, core_radii.max);
  const auto radii = uniform_radial_grid(extent, options.grid_points);
  const auto expansion = expand_source(smf_field(smf, radii), gif, options.expansion);

  EfficiencyGrid grid;
  grid.gif_lengths = lengths.values();
  grid.core_radii = core_radii.values();
  grid.eta.reserve(grid.gif_lengths.size() * grid.core_radii.size());

  std::vector<RadialField> hcf_fields;
  hcf_fields.reserve(grid.core_radii.size());
  for (double r : grid.core_radii) hcf_fields.push_back(hcf_mode(HcfSpec{r, 1.0}, 0, 1, radii));

  for (double length : grid.gif_lengths) {
    const RadialField exit = propagate(expansion, length, radii);
    for (const auto& hcf : hcf_fields) grid.eta.push_back(overlap_efficiency(exit, hcf));
  }
  return grid;
}

double efficiency_to_db(double eta) {
  if (!(eta > 0.0) || eta > 1.0) throw InvalidArgument("efficiency must lie in (0, 1]");
  return -10.0 * std::log10(eta);
}

LossBudget insertion_loss_budget(double eta_in, double eta_out, double attenuation, double hcf_length) {
  if (!(attenuation >= 0.0)) throw InvalidArgument("insertion_loss_budget: attenuation must be >= 0");
  if (!(hcf_length >= 0.0)) throw InvalidArgument("insertion_loss_budget: HCF length must be >= 0");
  LossBudget budget;
  budget.interface_losses = {efficiency_to_db(eta_in), efficiency_to_db(eta_out)};
  budget.attenuation = attenuation;
  budget.hcf_length = hcf_length;
  budget.total = budget.interface_losses[0] + budget.interface_losses[1] + budget.fibre_loss();
  return budget;
}

}  // namespace fibermatch

#pragma once

#include <cstddef>
#include <vector>

#include "fibermatch/gif_expansion.hpp"
#include "fibermatch/mode_solver.hpp"
#include "fibermatch/radial_field.hpp"

namespace fibermatch {

// Power coupling between two fields,
//   eta = |<f1, f2>|^2 / (<f1, f1> <f2, f2>),  dS = 2 pi R dR,
// using the conjugated inner product. Fields of different azimuthal order are
// orthogonal and return exactly 0. Throws DegenerateField for a zero norm.
double overlap_efficiency(const RadialField& f1, const RadialField& f2);

struct OffsetQuadrature {
  std::size_t radial_nodes = 0;  // 0 reuses the sample grid of f1
  std::size_t azimuthal_nodes = 256;
};

// Overlap of f1 with f2 displaced laterally by `offset` metres, by polar
// quadrature centred on f1 (f2 interpolated at the displaced points). Both
// fields must be axisymmetric. Parallel over radial rows.
double offset_efficiency(const RadialField& f1, const RadialField& f2, double offset,
                         const OffsetQuadrature& quadrature = {});
// Serial reference for offset_efficiency.
double offset_efficiency_serial(const RadialField& f1, const RadialField& f2, double offset,
                                const OffsetQuadrature& quadrature = {});

struct SweepRange {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 1;

  double value(std::size_t i) const;
  std::vector<double> values() const;
};

struct MapOptimum {
  double gif_length = 0.0;   // metres
  double core_radius = 0.0;  // metres
  double eta_max = 0.0;
  std::size_t tied_cells = 0;
};

// eta(L, r_H) sampled on a dense grid, row-major with L as the slow index.
struct EfficiencyGrid {
  std::vector<double> gif_lengths;
  std::vector<double> core_radii;
  std::vector<double> eta;

  double at(std::size_t length_index, std::size_t radius_index) const {
    return eta[length_index * core_radii.size() + radius_index];
  }
  // Cells within `tie_tolerance` of the maximum all count; the reported
  // location is their centroid.
  MapOptimum optimum(double tie_tolerance = 1e-6) const;
};

struct MapOptions {
  ExpansionOptions expansion;
  std::size_t grid_points = kDefaultGridPoints;  // serial reference only
  std::size_t quadrature_panels = 16;            // per-core-radius projections
};

// Fast route: one source expansion, per-radius modal projections c_m(r_H)
// of the HCF LP01 mode, then eta = |sum a_m c_m e^{i beta_m L}|^2 / N_H.
// OpenMP-parallel over radii and lengths.
EfficiencyGrid efficiency_map(const SmfSpec& smf, const GifSpec& gif, const SweepRange& lengths,
                              const SweepRange& core_radii, const MapOptions& options = {});
EfficiencyGrid efficiency_map(const ModeExpansion& expansion, const SweepRange& lengths,
                              const SweepRange& core_radii, const MapOptions& options = {});

// Serial reference: expands the sampled SMF field, propagates it onto a
// radial grid for every L, and evaluates overlap_efficiency against the
// sampled HCF mode for every r_H.
EfficiencyGrid efficiency_map_serial(const SmfSpec& smf, const GifSpec& gif, const SweepRange& lengths,
                                     const SweepRange& core_radii, const MapOptions& options = {});

// Modal-route efficiency for one (L, r_H) cell.
double coupling_efficiency(const ModeExpansion& expansion, double gif_length, const HcfSpec& hcf,
                           std::size_t quadrature_panels = 16);

struct LossBudget {
  std::vector<double> interface_losses;  // dB
  double attenuation = 0.0;              // dB/m
  double hcf_length = 0.0;               // m
  double total = 0.0;                    // dB

  double fibre_loss() const { return attenuation * hcf_length; }
};

// Loss of a single interface in dB, -10 log10(eta).
double efficiency_to_db(double eta);

LossBudget insertion_loss_budget(double eta_in, double eta_out, double attenuation, double hcf_length);

}  // namespace fibermatch

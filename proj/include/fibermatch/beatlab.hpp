#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fibermatch/radial_field.hpp"

namespace fibermatch {

enum class TransmissionScale { Decibel, Linear };

inline constexpr std::size_t kMinSpectrumSamples = 64;

// Transmission versus wavelength.
struct Spectrum {
  std::vector<double> wavelengths;  // metres, strictly increasing
  std::vector<double> transmission;
  TransmissionScale scale = TransmissionScale::Linear;
  std::string label;
  bool reversed_on_load = false;  // input file was in descending wavelength order

  void validate() const;
  // dB values become 10^(T/10); linear values are returned unchanged.
  std::vector<double> linear_transmission() const;
};

// CSV with header `wavelength_nm,transmission_db` or
// `wavelength_nm,transmission_linear`; `#` starts a comment line.
// Descending files are reversed and flagged. Throws ParseError.
Spectrum load_spectrum(const std::filesystem::path& path);
Spectrum parse_spectrum(std::istream& in, const std::string& label = {});
void write_spectrum(std::ostream& out, const Spectrum& spectrum);

enum class Window { Rectangular, Hann, Hamming };
Window parse_window(const std::string& name);
std::string to_string(Window window);

struct BeatOptions {
  Window window = Window::Hann;
  std::size_t zero_padding = 4;
  std::size_t resample_points = 0;  // 0: next power of two >= input length
};

// One-sided Fourier transform of the mean-subtracted linear transmission on a
// uniform wavelength grid. Abscissa is the beat frequency 1/dlambda in 1/m.
// Bin values are scaled so that a fringe A cos(2 pi f lambda + phi) shows up
// with magnitude A, and their phase is referenced to the centre wavelength.
struct BeatSpectrum {
  std::vector<double> frequencies;  // 1/m, DC removed
  std::vector<Complex> bins;
  double bin_width = 0.0;           // 1/m
  double sample_spacing = 0.0;      // metres
  double centre_wavelength = 0.0;   // metres
  double mean_level = 0.0;          // removed mean transmission
  std::size_t samples = 0;          // resampled length before padding
  double signal_energy = 0.0;       // sum of squares of the transformed sequence
  double spectral_energy = 0.0;     // full two-sided |Y|^2 sum / N

  double amplitude(std::size_t i) const { return std::abs(bins[i]); }
  double phase(std::size_t i) const;  // wrapped to (-pi, pi]
  double nyquist() const { return 0.5 / sample_spacing; }
  double parseval_residual() const;
};

BeatSpectrum beat_spectrum(const Spectrum& spectrum, const BeatOptions& options = {});

struct FrequencyBand {
  double min = 0.0;  // 1/m
  double max = 0.0;
};

struct BeatPeak {
  double beat_frequency = 0.0;  // 1/m
  double amplitude = 0.0;
  double phase = 0.0;  // radians, (-pi, pi]
  std::size_t bin = 0;
  bool at_band_edge = false;  // no quadratic refinement was applied
};

struct PeakOptions {
  double threshold_factor = 5.0;  // multiple of the median amplitude in the band
};

// Amplitudes below this fraction of the mean transmission are rounding noise.
inline constexpr double kRoundingFloor = 1e-12;

// Local maxima in the band above threshold, strongest first.
std::vector<BeatPeak> find_peaks(const BeatSpectrum& spectrum, const FrequencyBand& band,
                                 const PeakOptions& options = {});
// Strongest peak in the band; throws NoPeak.
BeatPeak find_beat_peak(const BeatSpectrum& spectrum, const FrequencyBand& band, const PeakOptions& options = {});

struct HomPoint {
  double hcf_length = 0.0;        // L_H, metres
  double inv_beat_spacing = 0.0;  // 1/dlambda, 1/m
  double sigma = 0.0;             // optional uncertainty of inv_beat_spacing; 0 = unit weight
};

struct HomFit {
  std::vector<HomPoint> points;
  double slope = 0.0;  // 1/m^2
  double slope_stderr = 0.0;
  double intercept = 0.0;  // 1/m
  double intercept_stderr = 0.0;
  double reference_u = 0.0;  // U_a
  double hom_u = 0.0;        // U_b
  double hom_u_stderr = 0.0;
  double tau = 0.0;  // s/m
  double tau_stderr = 0.0;
  double core_radius = 0.0;
  double wavelength = 0.0;
};

// Weighted least-squares line 1/dlambda = slope L_H + intercept, then
// U_b = sqrt(U_a^2 + 8 pi^2 r_H^2 slope). Standard errors come from the
// residual scatter and are NaN with only two points. Throws SingularFit when
// the lengths do not vary, and a data Error when the slope is negative.
HomFit fit_hom(std::span<const HomPoint> points, double core_radius, double reference_u, double wavelength);

// tau = slope lambda^2 / (2 pi c), in s/m.
double group_delay(double slope, double wavelength);

// Slope of 1/dlambda against L_H expected for two modes of an air core.
double beat_slope(double reference_u, double hom_u, double core_radius);

struct DroopSample {
  double distance = 0.0;  // metres between fibre ends
  Spectrum spectrum;
};

struct DroopPoint {
  double distance = 0.0;
  double delta_phase = 0.0;  // radians, relative to the first sample
};

// Beat phase of the peak found in the first spectrum, tracked through the
// rest and unwrapped along the sequence.
std::vector<DroopPoint> droop_phase(std::span<const DroopSample> samples, const FrequencyBand& band,
                                    const BeatOptions& options = {}, const PeakOptions& peak_options = {});

double wrap_phase(double phase);

}  // namespace fibermatch

#include "fibermatch/beatlab.hpp"

#include <boost/math/interpolators/makima.hpp>
#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <string_view>

#include "fibermatch/error.hpp"
#include "fibermatch/units.hpp"

namespace fibermatch {

void Spectrum::validate() const {
  if (wavelengths.size() != transmission.size()) throw InvalidArgument("Spectrum: column size mismatch");
  if (wavelengths.size() < kMinSpectrumSamples)
    throw ParseError("Spectrum: " + std::to_string(wavelengths.size()) + " samples, need at least " +
                     std::to_string(kMinSpectrumSamples));
  for (std::size_t i = 0; i < wavelengths.size(); ++i) {
    if (!std::isfinite(wavelengths[i]) || !std::isfinite(transmission[i]))
      throw ParseError("Spectrum: non-finite sample");
    if (i > 0 && !(wavelengths[i] > wavelengths[i - 1]))
      throw ParseError("Spectrum: wavelengths must be strictly increasing");
  }
}

std::vector<double> Spectrum::linear_transmission() const {
  if (scale == TransmissionScale::Linear) return transmission;
  std::vector<double> out(transmission.size());
  std::transform(transmission.begin(), transmission.end(), out.begin(),
                 [](double db) { return std::pow(10.0, db / 10.0); });
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw ParseError("spectrum: cannot parse number '" + std::string(field) + "'", line);
  return value;
}

}  // namespace

Spectrum parse_spectrum(std::istream& in, const std::string& label) {
  Spectrum s;
  s.label = label;
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw ParseError("spectrum: expected two comma-separated columns", line);
    const auto first = trim(text.substr(0, comma));
    const auto second = trim(text.substr(comma + 1));
    if (second.find(',') != std::string_view::npos) throw ParseError("spectrum: too many columns", line);
    if (!have_header) {
      if (first != "wavelength_nm") throw ParseError("spectrum: header must start with wavelength_nm", line);
      if (second == "transmission_db")
        s.scale = TransmissionScale::Decibel;
      else if (second == "transmission_linear")
        s.scale = TransmissionScale::Linear;
      else
        throw ParseError("spectrum: second column must be transmission_db or transmission_linear", line);
      have_header = true;
      continue;
    }
    s.wavelengths.push_back(parse_number(first, line) * kNanometre);
    s.transmission.push_back(parse_number(second, line));
  }
  if (!have_header) throw ParseError("spectrum: missing header");

  if (s.wavelengths.size() >= 2 && s.wavelengths.front() > s.wavelengths.back()) {
    std::reverse(s.wavelengths.begin(), s.wavelengths.end());
    std::reverse(s.transmission.begin(), s.transmission.end());
    s.reversed_on_load = true;
  }
  s.validate();
  return s;
}

Spectrum load_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spectrum file " + path.string());
  try {
    return parse_spectrum(in, path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_spectrum(std::ostream& out, const Spectrum& spectrum) {
  out << "wavelength_nm,"
      << (spectrum.scale == TransmissionScale::Decibel ? "transmission_db" : "transmission_linear") << '\n';
  char buf[64];
  for (std::size_t i = 0; i < spectrum.wavelengths.size(); ++i) {
    auto n1 = std::to_chars(buf, buf + sizeof buf, spectrum.wavelengths[i] / kNanometre).ptr;
    *n1++ = ',';
    auto n2 = std::to_chars(n1, buf + sizeof buf, spectrum.transmission[i]).ptr;
    out.write(buf, n2 - buf);
    out << '\n';
  }
}

Window parse_window(const std::string& name) {
  if (name == "hann") return Window::Hann;
  if (name == "hamming") return Window::Hamming;
  if (name == "rectangular" || name == "none") return Window::Rectangular;
  throw InvalidArgument("unknown window '" + name + "' (hann, hamming, rectangular)");
}

std::string to_string(Window window) {
  switch (window) {
    case Window::Hann: return "hann";
    case Window::Hamming: return "hamming";
    case Window::Rectangular: return "rectangular";
  }
  return "unknown";
}

double wrap_phase(double phase) {
  double w = std::remainder(phase, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double BeatSpectrum::phase(std::size_t i) const { return wrap_phase(std::arg(bins[i])); }

double BeatSpectrum::parseval_residual() const {
  if (signal_energy == 0.0) return std::abs(spectral_energy);
  return std::abs(spectral_energy - signal_energy) / signal_energy;
}

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Real-to-complex transform of `input` (length n), returns n/2 + 1 bins.
std::vector<Complex> real_fft(std::span<const double> input) {
  const auto n = input.size();
  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  std::copy(input.begin(), input.end(), in.get());
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<Complex> bins(n / 2 + 1);
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = {out.get()[k][0], out.get()[k][1]};
  return bins;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double window_value(Window window, std::size_t i, std::size_t n) {
  if (n < 2) return 1.0;
  const double x = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1);
  switch (window) {
    case Window::Hann: return 0.5 - 0.5 * std::cos(x);
    case Window::Hamming: return 0.54 - 0.46 * std::cos(x);
    case Window::Rectangular: return 1.0;
  }
  return 1.0;
}

}  // namespace

BeatSpectrum beat_spectrum(const Spectrum& spectrum, const BeatOptions& options) {
  spectrum.validate();
  if (options.zero_padding < 1) throw InvalidArgument("beat_spectrum: zero padding factor must be >= 1");

  const std::size_t n = options.resample_points > 0 ? options.resample_points : next_pow2(spectrum.wavelengths.size());
  if (n < 4) throw InvalidArgument("beat_spectrum: need at least 4 resampled points");
  const double lo = spectrum.wavelengths.front();
  const double hi = spectrum.wavelengths.back();
  const double step = (hi - lo) / static_cast<double>(n - 1);

  auto xs = spectrum.wavelengths;
  auto ys = spectrum.linear_transmission();
  const auto interp = boost::math::interpolators::makima(std::move(xs), std::move(ys));
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) samples[i] = interp(i + 1 == n ? hi : lo + step * static_cast<double>(i));

  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);

  const std::size_t padded = n * options.zero_padding;
  std::vector<double> buffer(padded, 0.0);
  double coherent_gain = 0.0;
  BeatSpectrum out;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = window_value(options.window, i, n);
    coherent_gain += w;
    buffer[i] = w * (samples[i] - mean);
    out.signal_energy += buffer[i] * buffer[i];
  }

  const auto raw = real_fft(buffer);
  const std::size_t half = padded / 2;
  out.spectral_energy = std::norm(raw[0]) + std::norm(raw[half]);
  for (std::size_t k = 1; k < half; ++k) out.spectral_energy += 2.0 * std::norm(raw[k]);
  out.spectral_energy /= static_cast<double>(padded);

  out.samples = n;
  out.mean_level = mean;
  out.sample_spacing = step;
  out.bin_width = 1.0 / (static_cast<double>(padded) * step);
  const double centre_index = 0.5 * static_cast<double>(n - 1);
  out.centre_wavelength = lo + centre_index * step;
  out.frequencies.reserve(half);
  out.bins.reserve(half);
  for (std::size_t k = 1; k <= half; ++k) {
    const double turn = 2.0 * kPi * static_cast<double>(k) * centre_index / static_cast<double>(padded);
    out.frequencies.push_back(static_cast<double>(k) * out.bin_width);
    out.bins.push_back(raw[k] * std::polar(2.0 / coherent_gain, turn));
  }
  return out;
}

namespace {

std::pair<std::size_t, std::size_t> band_bins(const BeatSpectrum& s, const FrequencyBand& band) {
  if (!(band.max > band.min) || band.min < 0.0) throw InvalidArgument("beat band must be an ascending range");
  if (band.min >= s.nyquist()) throw InvalidArgument("beat band lies above the Nyquist frequency");
  const auto first = static_cast<std::size_t>(
      std::lower_bound(s.frequencies.begin(), s.frequencies.end(), band.min) - s.frequencies.begin());
  const auto last = static_cast<std::size_t>(
      std::upper_bound(s.frequencies.begin(), s.frequencies.end(), band.max) - s.frequencies.begin());
  return {first, last};
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::vector<BeatPeak> find_peaks(const BeatSpectrum& spectrum, const FrequencyBand& band, const PeakOptions& options) {
  const auto [first, last] = band_bins(spectrum, band);
  std::vector<BeatPeak> peaks;
  if (last <= first) return peaks;

  std::vector<double> amp(last - first);
  for (std::size_t i = first; i < last; ++i) amp[i - first] = spectrum.amplitude(i);
  const double threshold =
      std::max(options.threshold_factor * median(amp), kRoundingFloor * std::abs(spectrum.mean_level));

  for (std::size_t k = 0; k < amp.size(); ++k) {
    const double a = amp[k];
    if (!(a > threshold)) continue;
    const bool left_ok = k == 0 || a > amp[k - 1];
    const bool right_ok = k + 1 == amp.size() || a >= amp[k + 1];
    if (!left_ok || !right_ok) continue;

    BeatPeak p;
    p.bin = first + k;
    p.phase = spectrum.phase(p.bin);
    p.at_band_edge = (k == 0 || k + 1 == amp.size());
    p.beat_frequency = spectrum.frequencies[p.bin];
    p.amplitude = a;
    if (!p.at_band_edge) {
      const double l = amp[k - 1];
      const double r = amp[k + 1];
      const double denom = l - 2.0 * a + r;
      if (denom < 0.0) {
        const double delta = 0.5 * (l - r) / denom;
        p.beat_frequency += delta * spectrum.bin_width;
        p.amplitude = a - 0.25 * (l - r) * delta;
      }
    }
    peaks.push_back(p);
  }
  std::sort(peaks.begin(), peaks.end(), [](const BeatPeak& x, const BeatPeak& y) { return x.amplitude > y.amplitude; });
  return peaks;
}

BeatPeak find_beat_peak(const BeatSpectrum& spectrum, const FrequencyBand& band, const PeakOptions& options) {
  auto peaks = find_peaks(spectrum, band, options);
  if (peaks.empty()) throw NoPeak("no beat peak above threshold in the requested band");
  return peaks.front();
}

HomFit fit_hom(std::span<const HomPoint> points, double core_radius, double reference_u, double wavelength) {
  if (points.size() < 2) throw SingularFit("fit_hom: need at least two points");
  if (!(core_radius > 0.0) || !(wavelength > 0.0) || !(reference_u > 0.0))
    throw InvalidArgument("fit_hom: core radius, wavelength and U_a must be positive");

  double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double w = p.sigma > 0.0 ? 1.0 / (p.sigma * p.sigma) : 1.0;
    s += w;
    sx += w * p.hcf_length;
    sy += w * p.inv_beat_spacing;
    sxx += w * p.hcf_length * p.hcf_length;
    sxy += w * p.hcf_length * p.inv_beat_spacing;
  }
  const double det = s * sxx - sx * sx;
  if (!(det > 1e-12 * s * sxx)) throw SingularFit("fit_hom: HCF lengths must not all be equal");

  HomFit fit;
  fit.points.assign(points.begin(), points.end());
  fit.slope = (s * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;

  const std::size_t dof = points.size() - 2;
  if (dof > 0) {
    double chi2 = 0.0;
    for (const auto& p : points) {
      const double w = p.sigma > 0.0 ? 1.0 / (p.sigma * p.sigma) : 1.0;
      const double r = p.inv_beat_spacing - fit.intercept - fit.slope * p.hcf_length;
      chi2 += w * r * r;
    }
    const double scale = chi2 / static_cast<double>(dof);
    fit.slope_stderr = std::sqrt(s / det * scale);
    fit.intercept_stderr = std::sqrt(sxx / det * scale);
  } else {
    fit.slope_stderr = std::numeric_limits<double>::quiet_NaN();
    fit.intercept_stderr = std::numeric_limits<double>::quiet_NaN();
  }

  // A slope that is negative beyond rounding means U_b < U_a.
  const double scale_y = std::abs(sy / s) / std::max(std::abs(sx / s), 1e-300);
  if (fit.slope < 0.0) {
    if (-fit.slope > 1e-9 * scale_y) throw Error(ErrorKind::Data, "fit_hom: negative slope, beat length grows with L_H");
    fit.slope = 0.0;
  }

  const double k = 8.0 * kPi * kPi * core_radius * core_radius;
  fit.reference_u = reference_u;
  fit.core_radius = core_radius;
  fit.wavelength = wavelength;
  fit.hom_u = std::sqrt(reference_u * reference_u + k * fit.slope);
  fit.hom_u_stderr = k * fit.slope_stderr / (2.0 * fit.hom_u);
  fit.tau = group_delay(fit.slope, wavelength);
  fit.tau_stderr = std::isnan(fit.slope_stderr) ? fit.slope_stderr : group_delay(fit.slope_stderr, wavelength);
  return fit;
}

double group_delay(double slope, double wavelength) {
  if (!(slope >= 0.0)) throw InvalidArgument("group_delay: slope must be >= 0");
  return slope * wavelength * wavelength / (2.0 * kPi * kSpeedOfLight);
}

double beat_slope(double reference_u, double hom_u, double core_radius) {
  return (hom_u * hom_u - reference_u * reference_u) / (8.0 * kPi * kPi * core_radius * core_radius);
}

std::vector<DroopPoint> droop_phase(std::span<const DroopSample> samples, const FrequencyBand& band,
                                    const BeatOptions& options, const PeakOptions& peak_options) {
  if (samples.size() < 2) throw InvalidArgument("droop_phase: need at least two spectra");

  std::vector<BeatSpectrum> spectra;
  spectra.reserve(samples.size());
  double tracked = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    spectra.push_back(beat_spectrum(samples[i].spectrum, options));
    try {
      const auto peak = find_beat_peak(spectra.back(), band, peak_options);
      if (i == 0) tracked = spectra.back().frequencies[peak.bin];
    } catch (const NoPeak&) {
      throw NoPeak("droop_phase: no beat peak in spectrum at d = " + std::to_string(samples[i].distance) + " m");
    }
  }

  std::vector<DroopPoint> out;
  out.reserve(samples.size());
  double previous = 0.0;
  double accumulated = 0.0;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const auto& bs = spectra[i];
    const auto it = std::lower_bound(bs.frequencies.begin(), bs.frequencies.end(), tracked);
    std::size_t bin = static_cast<std::size_t>(it - bs.frequencies.begin());
    if (bin == bs.frequencies.size() || (bin > 0 && tracked - bs.frequencies[bin - 1] < bs.frequencies[bin] - tracked))
      bin = bin == 0 ? 0 : bin - 1;
    const double phase = bs.phase(bin);
    if (i > 0) accumulated += wrap_phase(phase - previous);
    previous = phase;
    out.push_back({samples[i].distance, accumulated});
  }
  return out;
}

}  // namespace fibermatch

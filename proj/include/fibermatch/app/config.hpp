#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fibermatch/beatlab.hpp"
#include "fibermatch/gif_expansion.hpp"
#include "fibermatch/interconnect.hpp"
#include "fibermatch/mode_solver.hpp"

namespace fibermatch::app {

enum class OutputFormat { Csv, Json, Svg };

// Effective settings of one run. Built from defaults, then an INI file, then
// `section.key=value` overrides; later sources win.
struct RunConfig {
  SmfSpec smf;
  GifSpec gif;
  HcfSpec hcf;
  int gif_modes = 60;
  std::size_t grid_points = kDefaultGridPoints;

  SweepRange map_lengths;
  SweepRange map_radii;
  std::vector<double> cut_lengths;

  std::optional<double> modes_gif_length;
  std::optional<double> modes_core_radius;

  double offset_max = 0.0;
  std::size_t offset_points = 0;
  std::size_t offset_azimuthal_nodes = 256;
  std::optional<double> offset_gif_length;
  std::optional<double> offset_core_radius;

  BeatOptions beat_options;
  PeakOptions peak_options;
  FrequencyBand beat_band;
  FrequencyBand droop_band;
  double fit_core_radius = 0.0;
  double reference_u = 0.0;
  double analysis_wavelength = 0.0;

  std::optional<double> budget_eta_in;
  std::optional<double> budget_eta_out;
  double budget_attenuation = 0.0;  // dB/m
  double budget_hcf_length = 0.0;

  std::filesystem::path output_dir;
  OutputFormat format = OutputFormat::Csv;
  int threads = 0;

  // Flattened `section.key -> value` after all overlays, sorted.
  std::map<std::string, std::string> entries;

  // FNV-1a 64 of the canonical entry list, 16 hex digits.
  std::string hash() const;
};

// Default `section.key -> value` table; also the set of accepted keys.
const std::map<std::string, std::string>& default_entries();

// Parses INI text into `section.key -> value`. Unknown keys are config errors.
std::map<std::string, std::string> parse_ini(const std::string& text, const std::string& origin);

// Loads the config file (if any) and applies overrides, then validates.
RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides);

RunConfig build_config(std::map<std::string, std::string> entries);

OutputFormat parse_format(const std::string& name);

}  // namespace fibermatch::app

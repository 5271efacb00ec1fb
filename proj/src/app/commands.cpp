#include "fibermatch/app/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "fibermatch/app/output.hpp"
#include "fibermatch/app/svg.hpp"
#include "fibermatch/error.hpp"
#include "fibermatch/units.hpp"

namespace fibermatch::app {

namespace fs = std::filesystem;

namespace {

// A plot-ready table written as CSV, or as JSON when that format is selected.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int digits = 9;

  fs::path write(const RunConfig& config, const std::string& stem) const {
    if (config.format == OutputFormat::Json) {
      nlohmann::json doc;
      doc["config_hash"] = config.hash();
      doc["columns"] = columns;
      auto& out = doc["rows"] = nlohmann::json::array();
      for (const auto& row : rows) {
        auto& line = out.emplace_back(nlohmann::json::array());
        for (double v : row) line.push_back(json_number(v));
      }
      const auto path = config.output_dir / (stem + ".json");
      write_json(path, doc);
      return path;
    }
    const auto path = config.output_dir / (stem + ".csv");
    CsvWriter csv(path, config.hash(), columns, digits);
    for (const auto& row : rows) csv.row(row);
    csv.close();
    return path;
  }

  std::vector<double> column(std::size_t k) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[k]);
    return out;
  }
};

MapOptions map_options(const RunConfig& config) {
  MapOptions options;
  options.expansion.m_max = config.gif_modes;
  options.grid_points = config.grid_points;
  return options;
}

ExpansionOptions expansion_options(const RunConfig& config) {
  ExpansionOptions options;
  options.m_max = config.gif_modes;
  return options;
}

struct DesignPoint {
  double gif_length;
  double core_radius;
  double eta;
};

// Fills unset coordinates from the map optimum.
DesignPoint design_point(const RunConfig& config, std::optional<double> gif_length, std::optional<double> core_radius,
                         std::ostream& log) {
  if (gif_length && core_radius) {
    const SmfMode source(config.smf);
    const auto expansion =
        expand_profile([&source](double r) { return source(r); }, config.gif, expansion_options(config));
    return {*gif_length, *core_radius,
            coupling_efficiency(expansion, *gif_length, HcfSpec{*core_radius, config.hcf.core_index})};
  }
  const auto grid = efficiency_map(config.smf, config.gif, config.map_lengths, config.map_radii, map_options(config));
  const auto best = grid.optimum();
  log << fmt::format("map optimum: L = {:.2f} um, 2r_H = {:.3f} um, eta = {:.6f}\n", best.gif_length / kMicrometre,
                     2.0 * best.core_radius / kMicrometre, best.eta_max);
  DesignPoint p{gif_length.value_or(best.gif_length), core_radius.value_or(best.core_radius), best.eta_max};
  if (gif_length || core_radius) {
    const SmfMode source(config.smf);
    const auto expansion =
        expand_profile([&source](double r) { return source(r); }, config.gif, expansion_options(config));
    p.eta = coupling_efficiency(expansion, p.gif_length, HcfSpec{p.core_radius, config.hcf.core_index});
  }
  return p;
}

Table profile_table(const RadialField& field) {
  Table t{{"radius_um", "amplitude_re", "amplitude_im"}, {}};
  t.rows.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i)
    t.rows.push_back({field.radii[i] / kMicrometre, field.amplitudes[i].real(), field.amplitudes[i].imag()});
  return t;
}

std::vector<double> magnitudes(const RadialField& f) {
  std::vector<double> out;
  for (const auto& a : f.amplitudes) out.push_back(std::abs(a));
  return out;
}

std::vector<double> scaled(const std::vector<double>& v, double s) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [s](double x) { return x * s; });
  return out;
}

std::string micron_tag(double metres) { return fmt::format("{:g}um", std::round(metres / kMicrometre * 1e3) / 1e3); }

std::string spectrum_stem(const fs::path& path, std::set<std::string>& used) {
  std::string stem = path.stem().string();
  if (stem.empty()) stem = "spectrum";
  std::string candidate = stem;
  for (int k = 2; used.contains(candidate); ++k) candidate = fmt::format("{}_{}", stem, k);
  used.insert(candidate);
  return candidate;
}

Spectrum load_input(const SpectrumInput& input) {
  if (!fs::exists(input.path)) throw Error(ErrorKind::Data, "spectrum file not found: " + input.path.string());
  try {
    return load_spectrum(input.path);
  } catch (const Error& e) {
    throw Error(e.kind(), input.path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<fs::path> cmd_modes(const RunConfig& config, std::ostream& log) {
  const auto point = design_point(config, config.modes_gif_length, config.modes_core_radius, log);
  const double extent = kGridExtentFactor * std::max({config.gif.core_radius, point.core_radius, config.smf.core_radius});
  const auto radii = uniform_radial_grid(extent, config.grid_points);

  const auto smf = smf_field(config.smf, radii);
  const auto expansion = expand_source(smf, config.gif, expansion_options(config));
  const auto gif = propagate(expansion, point.gif_length, radii);
  const auto hcf = hcf_mode(HcfSpec{point.core_radius, config.hcf.core_index}, 0, 1, radii);

  std::vector<fs::path> files;
  files.push_back(profile_table(smf).write(config, "profile_smf"));
  files.push_back(profile_table(gif).write(config, "profile_gif"));
  files.push_back(profile_table(hcf).write(config, "profile_hcf"));

  nlohmann::json doc;
  doc["config_hash"] = config.hash();
  doc["gif_length_um"] = json_number(point.gif_length / kMicrometre);
  doc["hcf_core_radius_um"] = json_number(point.core_radius / kMicrometre);
  doc["smf_U"] = json_number(config.smf.core_param);
  doc["smf_W"] = json_number(config.smf.cladding_param);
  doc["gif_core_radius_um"] = json_number(config.gif.core_radius / kMicrometre);
  doc["gif_quarter_pitch_um"] = json_number(config.gif.quarter_pitch() / kMicrometre);
  doc["captured_power"] = json_number(expansion.captured_power);
  doc["tail_power"] = json_number(expansion.tail_power);
  doc["reconstruction_eta"] = json_number(expansion.reconstruction_eta);
  doc["eta_gif_hcf"] = json_number(overlap_efficiency(gif, hcf));
  auto& modes = doc["modes"] = nlohmann::json::array();
  for (const auto& e : expansion.entries)
    modes.push_back({{"l", e.l}, {"m", e.m}, {"re", json_number(e.amplitude.real())},
                     {"im", json_number(e.amplitude.imag())}, {"beta_per_m", json_number(e.beta)}});
  files.push_back(config.output_dir / "modes.json");
  write_json(files.back(), doc);

  if (config.format == OutputFormat::Svg) {
    // Peak-normalized magnitudes so the three profiles share an axis.
    std::vector<Series> series;
    for (const auto& [name, field] : {std::pair{"SMF", &smf}, std::pair{"GIF exit", &gif}, std::pair{"HCF", &hcf}}) {
      auto y = magnitudes(*field);
      const double peak = *std::max_element(y.begin(), y.end());
      series.push_back({name, scaled(radii, 1.0 / kMicrometre), scaled(y, peak > 0.0 ? 1.0 / peak : 1.0)});
    }
    files.push_back(config.output_dir / "profiles.svg");
    write_line_plot(files.back(), {"Mode profiles", "radius (um)", "|psi| (normalized)", config.hash()}, series);
  }
  log << fmt::format("modes: reconstruction eta = {:.7f}, tail power = {:.3g}\n", expansion.reconstruction_eta,
                     expansion.tail_power);
  return files;
}

std::vector<fs::path> cmd_map(const RunConfig& config, std::ostream& log) {
  const auto options = map_options(config);
  const SmfMode source(config.smf);
  const auto expansion = expand_profile([&source](double r) { return source(r); }, config.gif, options.expansion);
  const auto grid = efficiency_map(expansion, config.map_lengths, config.map_radii, options);
  const auto best = grid.optimum();

  std::vector<fs::path> files;
  Table table{{"gif_length_um", "core_diameter_um", "eta"}, {}, 6};
  table.rows.reserve(grid.eta.size());
  for (std::size_t i = 0; i < grid.gif_lengths.size(); ++i)
    for (std::size_t j = 0; j < grid.core_radii.size(); ++j)
      table.rows.push_back({grid.gif_lengths[i] / kMicrometre, 2.0 * grid.core_radii[j] / kMicrometre, grid.at(i, j)});
  files.push_back(table.write(config, "efficiency_map"));

  nlohmann::json doc;
  doc["config_hash"] = config.hash();
  doc["optimum_L_um"] = json_number(best.gif_length / kMicrometre);
  doc["optimum_diameter_um"] = json_number(2.0 * best.core_radius / kMicrometre);
  doc["eta_max"] = json_number(best.eta_max);
  doc["tied_cells"] = best.tied_cells;
  files.push_back(config.output_dir / "optimum.json");
  write_json(files.back(), doc);

  const auto diameters = scaled(grid.core_radii, 2.0 / kMicrometre);
  std::vector<Series> cut_series;
  for (double length : config.cut_lengths) {
    const auto cut = efficiency_map(expansion, SweepRange{length, length, 1}, config.map_radii, options);
    Table t{{"core_diameter_um", "eta"}, {}, 6};
    for (std::size_t j = 0; j < cut.core_radii.size(); ++j) t.rows.push_back({diameters[j], cut.eta[j]});
    files.push_back(t.write(config, "cut_L" + micron_tag(length)));
    cut_series.push_back({"L = " + micron_tag(length), diameters, cut.eta});
  }

  if (config.format == OutputFormat::Svg) {
    // Heat map rows run along L.
    files.push_back(config.output_dir / "efficiency_map.svg");
    write_heatmap(files.back(), {"Coupling efficiency", "core diameter (um)", "GIF length (um)", config.hash()},
                  diameters, scaled(grid.gif_lengths, 1.0 / kMicrometre), grid.eta);
    if (!cut_series.empty()) {
      files.push_back(config.output_dir / "cuts.svg");
      write_line_plot(files.back(), {"Efficiency at fixed GIF length", "core diameter (um)", "eta", config.hash()},
                      cut_series);
    }
  }
  log << fmt::format("map: {}x{} cells, optimum L = {:.2f} um, 2r_H = {:.3f} um, eta = {:.6f} ({} tied)\n",
                     grid.gif_lengths.size(), grid.core_radii.size(), best.gif_length / kMicrometre,
                     2.0 * best.core_radius / kMicrometre, best.eta_max, best.tied_cells);
  return files;
}

std::vector<fs::path> cmd_offset(const RunConfig& config, std::ostream& log) {
  const auto point = design_point(config, config.offset_gif_length, config.offset_core_radius, log);
  const double extent = kGridExtentFactor * std::max(config.gif.core_radius, point.core_radius);
  const auto radii = uniform_radial_grid(extent, config.grid_points);
  const auto expansion = expand_source(smf_field(config.smf, radii), config.gif, expansion_options(config));
  const auto exit = propagate(expansion, point.gif_length, radii);
  const auto hcf = hcf_mode(HcfSpec{point.core_radius, config.hcf.core_index}, 0, 1, radii);

  OffsetQuadrature quadrature;
  quadrature.azimuthal_nodes = config.offset_azimuthal_nodes;
  const SweepRange offsets{0.0, config.offset_max, config.offset_points};
  const double aligned = offset_efficiency(exit, hcf, 0.0, quadrature);

  Table table{{"offset_um", "eta", "relative_decrease_percent"}, {}};
  for (std::size_t i = 0; i < offsets.points; ++i) {
    const double d = offsets.value(i);
    const double eta = i == 0 && d == 0.0 ? aligned : offset_efficiency(exit, hcf, d, quadrature);
    table.rows.push_back({d / kMicrometre, eta, 100.0 * (aligned - eta) / aligned});
  }
  std::vector<fs::path> files{table.write(config, "offset")};
  if (config.format == OutputFormat::Svg) {
    files.push_back(config.output_dir / "offset.svg");
    write_line_plot(files.back(), {"Lateral offset penalty", "offset (um)", "relative decrease (%)", config.hash()},
                    {{"GIF to HCF", table.column(0), table.column(2)}});
  }
  log << fmt::format("offset: aligned eta = {:.6f} at L = {:.2f} um, 2r_H = {:.3f} um\n", aligned,
                     point.gif_length / kMicrometre, 2.0 * point.core_radius / kMicrometre);
  return files;
}

std::vector<fs::path> cmd_beats(const RunConfig& config, const std::vector<SpectrumInput>& inputs, std::ostream& log) {
  if (inputs.empty()) throw InvalidArgument("beats: at least one --spectrum is required");
  std::vector<fs::path> files;
  std::vector<HomPoint> points;
  std::set<std::string> stems;
  std::set<TransmissionScale> scales;
  std::vector<std::string> lines;

  for (const auto& input : inputs) {
    const auto spectrum = load_input(input);
    scales.insert(spectrum.scale);
    BeatSpectrum beats;
    BeatPeak peak;
    try {
      beats = beat_spectrum(spectrum, config.beat_options);
      peak = find_beat_peak(beats, config.beat_band, config.peak_options);
    } catch (const Error& e) {
      throw Error(e.kind(), input.path.string() + ": " + e.what());
    }
    Table t{{"inv_dlambda_per_m", "amplitude", "phase_rad"}, {}};
    for (std::size_t i = 0; i < beats.frequencies.size(); ++i)
      t.rows.push_back({beats.frequencies[i], beats.amplitude(i), beats.phase(i)});
    const auto stem = "beats_" + spectrum_stem(input.path, stems);
    files.push_back(t.write(config, stem));
    if (config.format == OutputFormat::Svg) {
      files.push_back(config.output_dir / (stem + ".svg"));
      write_line_plot(files.back(), {"Beat spectrum " + input.path.filename().string(), "1/dlambda (1/nm)", "amplitude",
                                     config.hash()},
                      {{"|F|", scaled(beats.frequencies, kNanometre), t.column(1)}});
    }
    points.push_back({input.tag, peak.beat_frequency, 0.0});
    lines.push_back(fmt::format("  {}: L_H = {:.4g} m, dlambda = {:.4f} nm, amplitude = {:.4g}{}{}",
                                input.path.filename().string(), input.tag, 1.0 / peak.beat_frequency / kNanometre,
                                peak.amplitude, peak.at_band_edge ? " [band edge]" : "",
                                spectrum.reversed_on_load ? " [descending input reversed]" : ""));
  }

  std::string summary = fmt::format("config_hash={}\nbeat analysis of {} spectra (window {}, zero padding {}x)\n",
                                    config.hash(), inputs.size(), to_string(config.beat_options.window),
                                    config.beat_options.zero_padding);
  for (const auto& l : lines) summary += l + "\n";
  if (scales.size() > 1) summary += "note: inputs mixed dB and linear transmission; dB data were converted to linear\n";

  std::set<double> distinct;
  for (const auto& p : points) distinct.insert(p.hcf_length);
  if (points.size() < 2 || distinct.size() < 2) {
    summary += "fit skipped: at least two spectra with distinct HCF lengths are needed\n";
    log << "beats: fit skipped (fewer than two distinct HCF lengths)\n";
  } else {
    const auto fit = fit_hom(points, config.fit_core_radius, config.reference_u, config.analysis_wavelength);
    nlohmann::json doc;
    doc["config_hash"] = config.hash();
    doc["slope_per_m2"] = json_number(fit.slope);
    doc["slope_stderr"] = json_number(fit.slope_stderr);
    doc["intercept"] = json_number(fit.intercept);
    doc["U_b"] = json_number(fit.hom_u);
    doc["U_b_stderr"] = json_number(fit.hom_u_stderr);
    doc["tau_ps_per_m"] = json_number(fit.tau / kPicosecond);
    auto& pts = doc["points"] = nlohmann::json::array();
    for (const auto& p : fit.points)
      pts.push_back({{"L_H_m", json_number(p.hcf_length)}, {"inv_dlambda_per_m", json_number(p.inv_beat_spacing)}});
    files.push_back(config.output_dir / "hom_fit.json");
    write_json(files.back(), doc);

    const auto pm = [](double v) { return std::isfinite(v) ? fmt::format("{:.3g}", v) : std::string("n/a"); };
    summary += fmt::format("fit: 1/dlambda = ({:.6g} +/- {}) 1/m^2 * L_H + ({:.6g} +/- {}) 1/m\n", fit.slope,
                           pm(fit.slope_stderr), fit.intercept, pm(fit.intercept_stderr));
    summary += fmt::format("U_a = {:.5f}, r_H = {:.3f} um\n", fit.reference_u, fit.core_radius / kMicrometre);
    summary += fmt::format("U_b = {:.4f} +/- {}\n", fit.hom_u, pm(fit.hom_u_stderr));
    summary += fmt::format("tau = {:.4f} +/- {} ps/m at {:.1f} nm\n", fit.tau / kPicosecond,
                           pm(fit.tau_stderr / kPicosecond), fit.wavelength / kNanometre);
    log << fmt::format("beats: U_b = {:.4f}, tau = {:.4f} ps/m\n", fit.hom_u, fit.tau / kPicosecond);
  }
  files.push_back(config.output_dir / "summary.txt");
  fs::create_directories(config.output_dir);
  std::ofstream out(files.back());
  if (!out) throw Error(ErrorKind::Data, "cannot write " + files.back().string());
  out << summary;
  return files;
}

std::vector<fs::path> cmd_droop(const RunConfig& config, const std::vector<SpectrumInput>& inputs, std::ostream& log) {
  if (inputs.size() < 2) throw InvalidArgument("droop: at least two --spectrum inputs are required");
  std::vector<DroopSample> samples;
  for (const auto& input : inputs) samples.push_back({input.tag, load_input(input)});
  const auto track = droop_phase(samples, config.droop_band, config.beat_options, config.peak_options);

  Table table{{"distance_cm", "delta_phi_rad"}, {}};
  for (const auto& p : track) table.rows.push_back({p.distance / 1e-2, p.delta_phase});
  std::vector<fs::path> files{table.write(config, "droop")};
  if (config.format == OutputFormat::Svg) {
    files.push_back(config.output_dir / "droop.svg");
    write_line_plot(files.back(), {"Beat phase versus end separation", "distance (cm)", "phase shift (rad)",
                                   config.hash()},
                    {{"delta phi", table.column(0), table.column(1)}});
  }
  log << fmt::format("droop: {} samples, final phase shift {:.4f} rad\n", track.size(), track.back().delta_phase);
  return files;
}

std::vector<fs::path> cmd_budget(const RunConfig& config, std::ostream& log) {
  double eta_in = 0.0;
  double eta_out = 0.0;
  if (config.budget_eta_in && config.budget_eta_out) {
    eta_in = *config.budget_eta_in;
    eta_out = *config.budget_eta_out;
  } else {
    const auto point = design_point(config, std::nullopt, std::nullopt, log);
    eta_in = config.budget_eta_in.value_or(point.eta);
    eta_out = config.budget_eta_out.value_or(point.eta);
  }
  const auto budget = insertion_loss_budget(eta_in, eta_out, config.budget_attenuation, config.budget_hcf_length);

  nlohmann::json doc;
  doc["config_hash"] = config.hash();
  doc["eta_in"] = json_number(eta_in);
  doc["eta_out"] = json_number(eta_out);
  doc["interface_loss_db"] = {json_number(budget.interface_losses[0]), json_number(budget.interface_losses[1])};
  doc["attenuation_db_per_m"] = json_number(budget.attenuation);
  doc["hcf_length_m"] = json_number(budget.hcf_length);
  doc["fibre_loss_db"] = json_number(budget.fibre_loss());
  doc["total_db"] = json_number(budget.total);
  std::vector<fs::path> files{config.output_dir / "budget.json"};
  write_json(files.back(), doc);

  Table table{{"eta_in", "eta_out", "interface_in_db", "interface_out_db", "fibre_loss_db", "total_db"}, {}};
  table.rows.push_back({eta_in, eta_out, budget.interface_losses[0], budget.interface_losses[1], budget.fibre_loss(),
                        budget.total});
  if (config.format != OutputFormat::Json) files.push_back(table.write(config, "budget"));
  log << fmt::format("budget: {:.3f} dB total ({:.3f} + {:.3f} dB interfaces, {:.3f} dB fibre)\n", budget.total,
                     budget.interface_losses[0], budget.interface_losses[1], budget.fibre_loss());
  return files;
}

}  // namespace fibermatch::app

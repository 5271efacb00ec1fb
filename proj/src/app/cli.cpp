#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include <cstdlib>
#include <ostream>

#include "fibermatch/app/commands.hpp"
#include "fibermatch/error.hpp"
#include "fibermatch/units.hpp"

namespace fibermatch::app {

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 1;
    case ErrorKind::Data: return 2;
    case ErrorKind::Numerical: return 3;
  }
  return 3;
}

std::vector<SpectrumInput> pair_inputs(const std::vector<std::string>& paths, const std::vector<std::string>& tags,
                                       const char* tag_flag) {
  if (paths.size() != tags.size())
    throw InvalidArgument(fmt::format("each --spectrum needs a matching {} ({} spectra, {} values)", tag_flag,
                                      paths.size(), tags.size()));
  std::vector<SpectrumInput> inputs;
  for (std::size_t i = 0; i < paths.size(); ++i) inputs.push_back({paths[i], parse_length(tags[i], 1.0)});
  return inputs;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design and characterization of SMF to GIF to HCF interconnects", "fibermatch"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string format;
  int threads = -1;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "INI configuration file (fallback: $FIBERMATCH_CONFIG)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "svg"}));
  app.add_option("--set", sets, "Override a setting, section.key=value (repeatable)");

  auto* modes = app.add_subcommand("modes", "Sampled SMF, GIF exit and HCF mode profiles");
  auto* map = app.add_subcommand("map", "Coupling efficiency over GIF length and HCF core diameter");
  auto* offset = app.add_subcommand("offset", "Efficiency penalty of a lateral GIF/HCF offset");
  auto* beats = app.add_subcommand("beats", "Mode beating in transmission spectra and HOM fit");
  auto* droop = app.add_subcommand("droop", "Beat phase versus fibre end separation");
  auto* budget = app.add_subcommand("budget", "Insertion loss budget");

  std::vector<std::string> beat_paths, beat_lengths, droop_paths, droop_distances;
  beats->add_option("--spectrum", beat_paths, "Spectrum CSV (repeatable)")->required();
  beats->add_option("--length", beat_lengths, "HCF length of each spectrum, e.g. 0.5m or 50cm")->required();
  droop->add_option("--spectrum", droop_paths, "Spectrum CSV (repeatable)")->required();
  droop->add_option("--distance", droop_distances, "End separation of each spectrum, e.g. 1cm")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    std::optional<std::filesystem::path> path;
    if (!config_path.empty()) {
      path = config_path;
    } else if (const char* env = std::getenv("FIBERMATCH_CONFIG"); env && *env) {
      path = env;
    }
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw InvalidArgument("--set expects section.key=value, got '" + s + "'");
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!out_dir.empty()) overrides.emplace_back("output.dir", out_dir);
    if (!format.empty()) overrides.emplace_back("output.format", format);
    if (threads >= 0) overrides.emplace_back("run.threads", std::to_string(threads));
    const auto config = load_config(path, overrides);
    if (config.threads > 0) omp_set_num_threads(config.threads);

    std::vector<std::filesystem::path> files;
    if (modes->parsed()) files = cmd_modes(config, out);
    if (map->parsed()) files = cmd_map(config, out);
    if (offset->parsed()) files = cmd_offset(config, out);
    if (beats->parsed()) files = cmd_beats(config, pair_inputs(beat_paths, beat_lengths, "--length"), out);
    if (droop->parsed()) files = cmd_droop(config, pair_inputs(droop_paths, droop_distances, "--distance"), out);
    if (budget->parsed()) files = cmd_budget(config, out);
    for (const auto& f : files) out << "wrote " << f.string() << "\n";
    return 0;
  } catch (const Error& e) {
    err << "fibermatch: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "fibermatch: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "fibermatch: internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace fibermatch::app

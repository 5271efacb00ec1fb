#include "fibermatch/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <fmt/format.h>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fibermatch/error.hpp"
#include "fibermatch/units.hpp"

namespace fibermatch::app {

const std::map<std::string, std::string>& default_entries() {
  static const std::map<std::string, std::string> defaults{
      {"smf.core_radius", "2.2um"},
      {"smf.v_param", "2.362"},
      {"gif.fibre_param", "66.2"},
      {"gif.profile_height", "0.0178"},
      {"gif.numerical_aperture", "0.275"},
      {"gif.core_radius", ""},  // empty: V lambda / (2 pi NA)
      {"gif.wavelength", "780nm"},
      {"gif.modes", "60"},
      {"hcf.core_radius", "17.5um"},
      {"grid.points", "4096"},
      {"map.length_min", "100um"},
      {"map.length_max", "500um"},
      {"map.length_points", "201"},
      {"map.diameter_min", "10um"},
      {"map.diameter_max", "60um"},
      {"map.diameter_points", "201"},
      {"map.cut_lengths", "150um,250um,350um"},
      {"modes.gif_length", ""},  // empty: map optimum
      {"modes.core_radius", ""},
      {"offset.max", "5um"},
      {"offset.points", "51"},
      {"offset.azimuthal_nodes", "256"},
      {"offset.gif_length", ""},
      {"offset.core_radius", ""},
      {"beats.window", "hann"},
      {"beats.zero_padding", "4"},
      {"beats.resample_points", "0"},
      {"beats.band_min_per_nm", "0.02"},
      {"beats.band_max_per_nm", "2.0"},
      {"beats.threshold", "5"},
      {"beats.core_radius", "17.5um"},
      {"beats.reference_u", ""},  // empty: j01
      {"beats.wavelength", "780nm"},
      {"droop.band_min_per_nm", "0.02"},
      {"droop.band_max_per_nm", "2.0"},
      {"budget.eta_in", ""},  // empty: modelled optimum
      {"budget.eta_out", ""},
      {"budget.attenuation_db_per_m", "0.03"},
      {"budget.hcf_length", "50cm"},
      {"output.dir", "out"},
      {"output.format", "csv"},
      {"run.threads", "0"},
  };
  return defaults;
}

std::map<std::string, std::string> parse_ini(const std::string& text, const std::string& origin) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidArgument(fmt::format("{}:{}: {}", origin, e.line(), e.message()));
  }
  std::map<std::string, std::string> out;
  const auto& known = default_entries();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw InvalidArgument(fmt::format("{}: key '{}' outside a [section]", origin, section));
    for (const auto& [key, value] : body) {
      const auto name = section + "." + key;
      if (!known.contains(name)) throw InvalidArgument(fmt::format("{}: unknown setting '{}'", origin, name));
      out[name] = value.data();
    }
  }
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& entries) : entries_(entries) {}

  const std::string& raw(const std::string& key) const { return entries_.at(key); }
  bool empty(const std::string& key) const { return raw(key).empty(); }

  double number(const std::string& key) const {
    const auto& s = raw(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw InvalidArgument(fmt::format("setting {} = '{}' is not a number", key, s));
    return v;
  }

  std::size_t count(const std::string& key) const {
    const double v = number(key);
    if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw InvalidArgument(fmt::format("setting {} = '{}' must be a non-negative integer", key, raw(key)));
    return static_cast<std::size_t>(v);
  }

  double length(const std::string& key) const {
    try {
      return parse_length(raw(key));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(fmt::format("setting {}: {}", key, e.what()));
    }
  }

  std::optional<double> optional_length(const std::string& key) const {
    if (empty(key)) return std::nullopt;
    return length(key);
  }

  std::optional<double> optional_number(const std::string& key) const {
    if (empty(key)) return std::nullopt;
    return number(key);
  }

  std::vector<double> lengths(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        out.push_back(parse_length(item));
      } catch (const InvalidArgument& e) {
        throw InvalidArgument(fmt::format("setting {}: {}", key, e.what()));
      }
    }
    return out;
  }

 private:
  const std::map<std::string, std::string>& entries_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  if (name == "svg") return OutputFormat::Svg;
  throw InvalidArgument("output format must be csv, json or svg (got '" + name + "')");
}

RunConfig build_config(std::map<std::string, std::string> entries) {
  for (const auto& [key, value] : default_entries()) entries.try_emplace(key, value);
  for (const auto& [key, value] : entries)
    if (!default_entries().contains(key)) throw InvalidArgument("unknown setting '" + key + "'");

  const Reader r(entries);
  RunConfig c;
  c.entries = entries;

  c.smf = SmfSpec::from_v_param(r.length("smf.core_radius"), r.number("smf.v_param"));

  const double fibre_param = r.number("gif.fibre_param");
  const double profile_height = r.number("gif.profile_height");
  const double wavelength = r.length("gif.wavelength");
  require(fibre_param > 0.0, "gif.fibre_param must be positive");
  require(profile_height > 0.0 && profile_height < 1.0, "gif.profile_height must lie in (0, 1)");
  if (r.empty("gif.core_radius"))
    c.gif = GifSpec::from_numerical_aperture(fibre_param, profile_height, r.number("gif.numerical_aperture"), wavelength);
  else
    c.gif = GifSpec::from_core_radius(r.length("gif.core_radius"), fibre_param, profile_height, wavelength);
  c.gif_modes = static_cast<int>(r.count("gif.modes"));
  require(c.gif_modes >= 1, "gif.modes must be >= 1");

  c.hcf = HcfSpec{r.length("hcf.core_radius"), 1.0};
  c.hcf.validate();
  c.grid_points = r.count("grid.points");
  require(c.grid_points >= 16, "grid.points must be >= 16");

  c.map_lengths = {r.length("map.length_min"), r.length("map.length_max"), r.count("map.length_points")};
  c.map_radii = {0.5 * r.length("map.diameter_min"), 0.5 * r.length("map.diameter_max"), r.count("map.diameter_points")};
  for (const auto* range : {&c.map_lengths, &c.map_radii}) {
    require(range->points >= 1, "map ranges need at least one point");
    require(range->min >= 0.0 && range->max >= range->min, "map ranges must be non-negative and ordered");
    require(range->points == 1 || range->max > range->min, "map ranges with several points need max > min");
  }
  require(c.map_radii.min > 0.0, "map.diameter_min must be positive");
  c.cut_lengths = r.lengths("map.cut_lengths");

  c.modes_gif_length = r.optional_length("modes.gif_length");
  c.modes_core_radius = r.optional_length("modes.core_radius");

  c.offset_max = r.length("offset.max");
  c.offset_points = r.count("offset.points");
  c.offset_azimuthal_nodes = r.count("offset.azimuthal_nodes");
  require(c.offset_max >= 0.0 && c.offset_points >= 1, "offset sweep needs max >= 0 and >= 1 point");
  require(c.offset_azimuthal_nodes >= 8, "offset.azimuthal_nodes must be >= 8");
  c.offset_gif_length = r.optional_length("offset.gif_length");
  c.offset_core_radius = r.optional_length("offset.core_radius");

  c.beat_options.window = parse_window(r.raw("beats.window"));
  c.beat_options.zero_padding = r.count("beats.zero_padding");
  c.beat_options.resample_points = r.count("beats.resample_points");
  require(c.beat_options.zero_padding >= 1, "beats.zero_padding must be >= 1");
  c.peak_options.threshold_factor = r.number("beats.threshold");
  const double per_nm = 1.0 / kNanometre;
  c.beat_band = {r.number("beats.band_min_per_nm") * per_nm, r.number("beats.band_max_per_nm") * per_nm};
  c.droop_band = {r.number("droop.band_min_per_nm") * per_nm, r.number("droop.band_max_per_nm") * per_nm};
  require(c.beat_band.max > c.beat_band.min && c.beat_band.min >= 0.0, "beats band must be ascending");
  require(c.droop_band.max > c.droop_band.min && c.droop_band.min >= 0.0, "droop band must be ascending");
  c.fit_core_radius = r.length("beats.core_radius");
  require(c.fit_core_radius > 0.0, "beats.core_radius must be positive");
  c.reference_u = r.empty("beats.reference_u") ? bessel_zero(0, 1) : r.number("beats.reference_u");
  c.analysis_wavelength = r.length("beats.wavelength");

  c.budget_eta_in = r.optional_number("budget.eta_in");
  c.budget_eta_out = r.optional_number("budget.eta_out");
  c.budget_attenuation = r.number("budget.attenuation_db_per_m");
  c.budget_hcf_length = r.length("budget.hcf_length");

  c.output_dir = r.raw("output.dir");
  c.format = parse_format(r.raw("output.format"));
  const double threads = r.number("run.threads");
  require(threads >= 0.0, "run.threads must be >= 0");
  c.threads = static_cast<int>(threads);
  return c;
}

RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::map<std::string, std::string> entries;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw InvalidArgument("cannot read config file " + path->string());
    std::stringstream ss;
    ss << in.rdbuf();
    entries = parse_ini(ss.str(), path->string());
  }
  for (const auto& [key, value] : overrides) {
    if (!default_entries().contains(key)) throw InvalidArgument("unknown setting '" + key + "'");
    entries[key] = value;
  }
  return build_config(std::move(entries));
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : entries) {
    // Output location, format and thread count do not change results.
    if (key == "output.dir" || key == "output.format" || key == "run.threads") continue;
    mix(key);
    mix("=");
    mix(value);
    mix("\n");
  }
  return fmt::format("{:016x}", h);
}

}  // namespace fibermatch::app

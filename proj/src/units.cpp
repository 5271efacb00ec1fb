#include "fibermatch/units.hpp"

#include <array>
#include <charconv>
#include <string>
#include <utility>

#include "fibermatch/error.hpp"

namespace fibermatch {

double parse_length(std::string_view text, double default_unit) {
  const auto first = text.find_first_not_of(" \t");
  const auto last = text.find_last_not_of(" \t");
  if (first == std::string_view::npos) throw InvalidArgument("empty length literal");
  text = text.substr(first, last - first + 1);

  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc()) throw InvalidArgument("bad length literal '" + std::string(text) + "'");

  std::string_view suffix(ptr, static_cast<std::size_t>(end - ptr));
  while (!suffix.empty() && (suffix.front() == ' ' || suffix.front() == '\t')) suffix.remove_prefix(1);
  if (suffix.empty()) {
    if (default_unit == 0.0)
      throw InvalidArgument("length '" + std::string(text) + "' needs a unit suffix (nm, um, mm, cm, m)");
    return value * default_unit;
  }

  static constexpr std::array<std::pair<std::string_view, double>, 6> kUnits{{
      {"nm", 1e-9}, {"um", 1e-6}, {"µm", 1e-6}, {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0},
  }};
  for (const auto& [name, scale] : kUnits)
    if (suffix == name) return value * scale;
  throw InvalidArgument("unknown length unit '" + std::string(suffix) + "' in '" + std::string(text) + "'");
}

}  // namespace fibermatch

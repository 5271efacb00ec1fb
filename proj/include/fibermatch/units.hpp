#pragma once

#include <numbers>
#include <string_view>

namespace fibermatch {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

inline constexpr double kMicrometre = 1e-6;
inline constexpr double kNanometre = 1e-9;
inline constexpr double kPicosecond = 1e-12;

// Parses a length literal with a unit suffix ("250um", "780 nm", "0.5m",
// "50cm", "1.2mm", "17.5µm") and returns metres. A bare number is rejected
// unless `default_unit` (metres per unit) is non-zero.
double parse_length(std::string_view text, double default_unit = 0.0);

}  // namespace fibermatch

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fibermatch/app/config.hpp"

namespace fibermatch::app {

struct SpectrumInput {
  std::filesystem::path path;
  double tag = 0.0;  // HCF length for `beats`, end separation for `droop` (metres)
};

// Each command writes into config.output_dir and returns the files it wrote.
std::vector<std::filesystem::path> cmd_modes(const RunConfig& config, std::ostream& log);
std::vector<std::filesystem::path> cmd_map(const RunConfig& config, std::ostream& log);
std::vector<std::filesystem::path> cmd_offset(const RunConfig& config, std::ostream& log);
std::vector<std::filesystem::path> cmd_beats(const RunConfig& config, const std::vector<SpectrumInput>& inputs,
                                             std::ostream& log);
std::vector<std::filesystem::path> cmd_droop(const RunConfig& config, const std::vector<SpectrumInput>& inputs,
                                             std::ostream& log);
std::vector<std::filesystem::path> cmd_budget(const RunConfig& config, std::ostream& log);

// Full command line entry point; returns the process exit code
// (0 ok, 1 usage/config, 2 data, 3 numerical).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fibermatch::app

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace fibermatch::app {

// Fixed 9-significant-digit rendering so JSON output is byte-stable.
nlohmann::json json_number(double value);
std::string format_sig(double value, int digits = 9);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// CSV writer that stamps the config hash as a leading comment line.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash, const std::vector<std::string>& header,
            int digits = 9);
  void row(const std::vector<double>& values);
  void close();

 private:
  std::filesystem::path path_;
  std::string buffer_;
  int digits_;
};

}  // namespace fibermatch::app

#include "fibermatch/app/output.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

#include "fibermatch/error.hpp"

namespace fibermatch::app {

std::string format_sig(double value, int digits) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{:.{}g}", value, digits);
}

nlohmann::json json_number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return std::stod(format_sig(value, 9));
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Data, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Data, "write failed for " + path.string());
}

}  // namespace

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_file(path, doc.dump(2) + "\n"); }

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
                     const std::vector<std::string>& header, int digits)
    : path_(path), digits_(digits) {
  buffer_ = "# config_hash=" + config_hash + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) buffer_ += (i ? "," : "") + header[i];
  buffer_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ",";
    buffer_ += format_sig(values[i], digits_);
  }
  buffer_ += "\n";
}

void CsvWriter::close() { write_file(path_, buffer_); }

}  // namespace fibermatch::app

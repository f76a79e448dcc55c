#include "wdirac/report.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include "wdirac/linalg.hpp"

namespace wdirac {

Json report_envelope(const std::string& command, const Json& config) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = command;
  j["config"] = config;
  return j;
}

std::string render_json(const Json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  require(!header.empty(), "csv: header must not be empty");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    require(row.size() == header.size(), "csv: row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace wdirac

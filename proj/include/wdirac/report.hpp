#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace wdirac {

// Ordered JSON so report keys serialize in insertion order; combined with the
// library's shortest round-trip number formatter this makes reports
// byte-stable: identical content, identical bytes.
using Json = nlohmann::ordered_json;

// bumped whenever a report field is renamed, added or moved
inline constexpr const char* kReportSchemaVersion = "wdirac-report-1";

// every command report starts from this envelope: schema tag, command name,
// config echo
Json report_envelope(const std::string& command, const Json& config);

// two-space indent, trailing newline
std::string render_json(const Json& j);

// shortest decimal that parses back to the same double
std::string format_double(double v);

// CSV with a header row; numbers go through format_double
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace wdirac

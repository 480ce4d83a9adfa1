#pragma once

#include <string>

namespace percond {

/// Writes `content` to `path` atomically (temp file + rename).
void atomic_write_text(const std::string& path, const std::string& content);

/// Fixed shortest-roundtrip formatting used in every table and report so
/// reruns are byte-identical.
std::string format_double(double v);

/// First line of every CSV table.
inline const char* csv_schema_header() { return "# percond-schema v1"; }

} // namespace percond

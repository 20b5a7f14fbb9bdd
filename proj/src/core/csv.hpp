// csv.hpp — strict comma-separated reading and deterministic serialization.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace momlab {

/// Splits one CSV line on commas. No quoting: the file schemas in this
/// project never contain embedded commas.
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Reads a CSV file with a mandatory header. `header` must match exactly.
/// Calls `row` with (line_number, fields) for every non-empty data line.
/// Throws Error(FileNotFound / MalformedRow).
void read_csv(const std::filesystem::path& path, std::string_view header,
              const std::function<void(size_t, const std::vector<std::string_view>&)>& row);

/// Parsers that throw Error(MalformedRow) with line context on failure.
double parse_double_field(std::string_view s, size_t line, std::string_view what);
int64_t parse_int_field64(std::string_view s, size_t line, std::string_view what);

/// Shortest round-trip decimal representation (std::to_chars). This is the
/// single float-formatting policy for every file this project writes.
std::string format_double(double v);

/// Writes `content` to `path` atomically (temp file + rename).
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace momlab

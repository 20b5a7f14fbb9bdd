#include "core/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "core/errors.hpp"

namespace momlab {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void read_csv(const std::filesystem::path& path, std::string_view header,
              const std::function<void(size_t, const std::vector<std::string_view>&)>& row) {
  std::ifstream in(path);
  if (!in.is_open())
    throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::EmptyDataset, path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw Error(ErrorCode::MalformedRow,
                path.string() + " header mismatch: got '" + line + "', want '" +
                    std::string(header) + "'");

  const size_t n_cols = split_csv_line(header).size();
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != n_cols)
      throw Error(ErrorCode::MalformedRow,
                  path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(n_cols) + " fields, got " + std::to_string(fields.size()));
    row(line_no, fields);
  }
}

double parse_double_field(std::string_view s, size_t line, std::string_view what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorCode::MalformedRow,
                "line " + std::to_string(line) + ": bad " + std::string(what) + " '" +
                    std::string(s) + "'");
  return value;
}

int64_t parse_int_field64(std::string_view s, size_t line, std::string_view what) {
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorCode::MalformedRow,
                "line " + std::to_string(line) + ": bad " + std::string(what) + " '" +
                    std::string(s) + "'");
  return value;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out.is_open())
      throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    if (!out.good())
      throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw Error(ErrorCode::IoError, "rename " + tmp.string() + " -> " + path.string() +
                                        ": " + ec.message());
}

}  // namespace momlab

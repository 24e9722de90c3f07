#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tstat {

std::uint64_t fnv1a64(std::string_view s);
std::string hash_hex(std::uint64_t h);

// %.17g, enough digits to round-trip a double.
std::string format_double(double v);

std::string iso8601_utc_now();

// Tabular output: one "# {json}" metadata line, then a header row, then data.
// Everything below the metadata line is deterministic for fixed inputs;
// volatile fields (timestamps) belong in the metadata object only.
struct Csv {
  nlohmann::json metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  std::string to_string() const;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace tstat

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spareopt {

// Minimal comma-separated table. Fields are never quoted; identifiers that
// would need quoting are rejected on write.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or throws ConfigError naming the source.
  std::size_t column(std::string_view name, std::string_view source = "csv") const;
};

CsvTable parse_csv(std::string_view text, std::string_view source = "csv");
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

double parse_number(std::string_view field, std::string_view context);

/// Throws InvalidInput if the identifier contains ',', '"', or a line break.
void check_csv_identifier(std::string_view id);

/// RFC 4180 quoting: wraps in double quotes and doubles embedded quotes.
std::string csv_quote(std::string_view field);

/// Joins fields with commas and terminates with '\n'.
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace spareopt

#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdx {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCsvSchemaVersion = 1;

/// Shortest round-tripping decimal form; "inf" / "-inf" / "nan" for the
/// non-finite values. Locale independent, so output is byte-stable.
std::string format_number(double v);

/// CSV file whose first line is `# schema: <name> v<version>`. Further `#`
/// lines may follow before the header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view schema,
            const std::vector<std::string>& columns,
            const std::vector<std::string>& comments = {});

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::string_view s);
  /// Ends the row; throws IoError if the column count is off or a write failed.
  void end_row();
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

/// Parsed CSV: `#` lines are kept as comments, the first other line is the
/// header.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Parses a double, accepting inf/-inf; throws std::invalid_argument.
double parse_number(std::string_view s);

}  // namespace hdx

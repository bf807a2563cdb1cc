#include "hdx/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace hdx {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "inf" || s == "+inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view schema,
                     const std::vector<std::string>& columns,
                     const std::vector<std::string>& comments)
    : path_(path), columns_(columns.size()) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  out_ << "# schema: " << schema << " v" << kCsvSchemaVersion << '\n';
  for (const auto& c : comments) out_ << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_number(v))); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::string_view(std::to_string(v))); }

CsvWriter& CsvWriter::cell(std::string_view s) {
  if (in_row_++) out_ << ',';
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_)
    throw IoError(path_.string() + ": row has " + std::to_string(in_row_) + " cells, expected " +
                  std::to_string(columns_));
  out_ << '\n';
  in_row_ = 0;
  if (!out_) throw IoError("write failed: " + path_.string());
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw IoError("close failed: " + path_.string());
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::invalid_argument("missing column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  return parse_number(rows.at(row).at(column(name)));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!l.empty() && l.back() == ',') out.emplace_back();
    return out;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.comments.push_back(line);
    } else if (t.header.empty()) {
      t.header = split(line);
    } else {
      t.rows.push_back(split(line));
      if (t.rows.back().size() != t.header.size())
        throw IoError(path.string() + ": ragged row " + std::to_string(t.rows.size()));
    }
  }
  return t;
}

}  // namespace hdx

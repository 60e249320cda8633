#include "cli/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

namespace symflow::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);  // LF line endings everywhere
  if (!out) throw ConfigError("cannot write " + file.string());
  return out;
}

std::string csv_field(const Cell& c) {
  if (!c.quoted || c.text.find_first_of(",\"\n") == std::string::npos) return c.text;
  std::string s = "\"";
  for (char ch : c.text) s += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return s + "\"";
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num(int x) { return std::to_string(x); }

void Report::put(const std::string& key, const std::string& value) {
  if (sections_.empty()) section("run");
  std::string v = value;
  for (char& ch : v)
    if (ch == '\n') ch = ' ';
  sections_.back().second.emplace_back(key, v);
}

void Report::write(const std::filesystem::path& file) const {
  auto out = open_out(file);
  out << "# generated: " << utc_now() << "\n";
  for (const auto& [name, entries] : sections_) {
    out << "\n[" << name << "]\n";
    for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
  }
}

std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir,
                                  TableFormat format) {
  const bool csv = format == TableFormat::Csv;
  const auto file = dir / (t.name + (csv ? ".csv" : ".jsonl"));
  auto out = open_out(file);
  if (csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
  }
  for (const auto& row : t.rows) {
    if (csv) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    } else {
      out << "{";
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "") << nlohmann::json(t.columns[i]).dump() << ":";
        // %.17g can print inf or nan, which JSON has no literal for
        const bool finite_number = !row[i].quoted && row[i].text.find_first_of("in") == std::string::npos;
        out << (finite_number ? row[i].text
                              : row[i].quoted ? nlohmann::json(row[i].text).dump() : "null");
      }
      out << "}";
    }
    out << "\n";
  }
  return file;
}

}  // namespace symflow::cli

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "symflow/cli.hpp"

namespace symflow::cli {

/// %.17g, so a value read back is bit-identical.
std::string num(double x);
std::string num(int x);

/// Key-value report with [sections]; the first line is a timestamp comment.
class Report {
 public:
  void section(const std::string& name) { sections_.push_back({name, {}}); }
  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, double value) { put(key, num(value)); }
  void put(const std::string& key, int value) { put(key, num(value)); }
  void put(const std::string& key, bool value) { put(key, std::string(value ? "true" : "false")); }
  void put(const std::string& key, const char* value) { put(key, std::string(value)); }
  void write(const std::filesystem::path& file) const;

 private:
  using Section = std::pair<std::string, std::vector<std::pair<std::string, std::string>>>;
  std::vector<Section> sections_;
};

struct Cell {
  std::string text;
  bool quoted = false;  ///< a string rather than a number
};

inline Cell cell(double x) { return {num(x), false}; }
inline Cell cell(int x) { return {num(x), false}; }
inline Cell cell(std::string s) { return {std::move(s), true}; }

struct Table {
  std::string name;  ///< file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Writes name.csv or name.jsonl into dir and returns the path.
std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir,
                                  TableFormat format);

}  // namespace symflow::cli

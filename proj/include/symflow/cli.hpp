#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "symflow/catalog.hpp"
#include "symflow/errors.hpp"

namespace symflow::cli {

enum class Command { Index, Verify, Sweep, Catalog };
enum class TableFormat { Csv, JsonLines };

/// Values that replace the problem's defaults. Unset fields keep them.
struct Overrides {
  std::optional<int> grid_n;
  std::optional<double> horizon;  ///< operator truncation T of h-clinic problems
  std::optional<int> lambda_samples;
  std::optional<double> intersection_tol;
  std::optional<double> form_zero_tol;
  std::optional<double> step_tol;
  std::optional<double> horizon_tol;
};

struct RunConfig {
  Command command = Command::Verify;
  std::string problem;      ///< catalog id, or "all" for a catalog sweep
  std::string config_path;  ///< JSON file; its problem is used when no id is given
  Overrides overrides;
  std::filesystem::path out_dir = "symflow-out";
  TableFormat format = TableFormat::Csv;
  std::uint64_t seed = 1;
};

inline constexpr int kMaxGridN = 100000;
inline constexpr int kMinGridN = 16;

int exit_code(ErrorCategory c);

/// Contents of a JSON config file; every field is optional and command-line flags win.
struct ConfigFile {
  std::optional<std::string> problem_id;
  std::optional<CatalogEntry> problem;  ///< a problem written out in the file
  Overrides overrides;
  std::optional<std::string> out_dir;
  std::optional<TableFormat> format;
  std::optional<std::uint64_t> seed;
};

/// Parses the JSON text; throws ConfigError on syntax errors, unknown keys or bad values.
/// Random families without their own seed take seed_flag, else the file's "seed", else 1.
ConfigFile parse_config(const std::string& json_text,
                        std::optional<std::uint64_t> seed_flag = std::nullopt);
ConfigFile read_config(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_flag = std::nullopt);

/// Range checks on the overrides; throws ConfigError.
void validate_overrides(const Overrides& o, double decay_scale);

/// Applies the overrides to the entry's problem and returns notes about ignored values.
std::vector<std::string> apply_overrides(CatalogEntry& e, const Overrides& o);

/// Whole command line, without the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symflow::cli

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "symflow/cli.hpp"
#include "symflow/families.hpp"

namespace symflow::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + " needs '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "' in " + where);
  }
}

template <class T>
std::optional<T> maybe(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return get<T>(j, key, where);
}

Mat matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a nonempty array of rows");
  const auto rows = j.size(), cols = j[0].size();
  Mat B(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(where + " is not rectangular");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw ConfigError(where + " has a non-numeric entry");
      B(i, k) = j[i][k].get<double>();
    }
  }
  return B;
}

HamiltonianFamily family_from(const json& j, std::uint64_t seed) {
  const std::string where = "family";
  const auto name = get<std::string>(j, "name", where);
  if (name == "sech") {
    only_keys(j, where, {"name"});
    return sech_family();
  }
  if (name == "constant_hyperbolic") {
    only_keys(j, where, {"name"});
    return constant_hyperbolic_family();
  }
  if (name == "harmonic") {
    only_keys(j, where, {"name", "K"});
    return harmonic_family(get<double>(j, "K", where));
  }
  if (name == "zero") {
    only_keys(j, where, {"name", "n"});
    const int n = get<int>(j, "n", where);
    if (n < 1 || n > 8) throw ConfigError("family.n must lie in [1, 8]");
    return zero_family(n);
  }
  if (name == "random") {
    only_keys(j, where, {"name", "n", "seed"});
    const int n = get<int>(j, "n", where);
    if (n < 1 || n > 8) throw ConfigError("family.n must lie in [1, 8]");
    return random_bounded_family(n, maybe<std::uint64_t>(j, "seed", where).value_or(seed));
  }
  if (name == "constant") {
    // B for all lambda and t; its limits are B itself
    only_keys(j, where, {"name", "B"});
    const Mat B = matrix_from(j.at("B"), "family.B");
    if (B.rows() != B.cols() || B.rows() % 2) throw ConfigError("family.B must be 2n x 2n");
    HamiltonianFamily f;
    f.n = static_cast<int>(B.rows() / 2);
    f.b = [B](double, double) { return B; };
    f.b_plus = f.b_minus = [B](double) { return B; };
    return f;
  }
  throw ConfigError("unknown family '" + name + "'");
}

// Product of lines: column i spans cos(theta_i + rate_i lambda) e_i + sin(...) e_{n+i}.
FrameFn frame_from(const json& j, int n, const std::string& where) {
  only_keys(j, where, {"angles", "rates"});
  auto angles = get<std::vector<double>>(j, "angles", where);
  auto rates = maybe<std::vector<double>>(j, "rates", where).value_or(std::vector<double>(n, 0.0));
  if (static_cast<int>(angles.size()) != n || static_cast<int>(rates.size()) != n)
    throw ConfigError(where + ": angles and rates need one value per degree of freedom");
  return [n, angles, rates](double l) {
    Mat F = Mat::Zero(2 * n, n);
    for (int i = 0; i < n; ++i) {
      const double th = angles[i] + rates[i] * l;
      F(i, i) = std::cos(th);
      F(n + i, i) = std::sin(th);
    }
    return LagrangianFrame(F);
  };
}

CatalogEntry problem_from(const json& j, std::uint64_t seed) {
  if (j.is_string()) return find_entry(j.get<std::string>());
  const std::string where = "problem";
  const auto type = get<std::string>(j, "type", where);
  CatalogEntry e;
  e.oracle = "none (problem read from a config file)";
  if (type == "clinic") {
    only_keys(j, where, {"type", "id", "kind", "family", "boundary"});
    ClinicProblem p;
    p.kind = clinic_kind_from_string(get<std::string>(j, "kind", where));
    p.family = family_from(j.at("family"), seed);
    const bool half = p.kind == ClinicKind::FutureHalf || p.kind == ClinicKind::PastHalf;
    if (half != j.contains("boundary"))
      throw ConfigError("problem.boundary is required for half-clinic kinds and only for them");
    if (half) p.boundary = frame_from(j.at("boundary"), p.family.n, "problem.boundary");
    e.problem = std::move(p);
  } else if (type == "bounded") {
    only_keys(j, where, {"type", "id", "family", "a", "b", "c", "left", "right"});
    BoundedProblem p;
    p.family = family_from(j.at("family"), seed);
    p.a = get<double>(j, "a", where);
    p.b = get<double>(j, "b", where);
    p.c = maybe<double>(j, "c", where).value_or(0.5 * (p.a + p.b));
    p.left = frame_from(j.at("left"), p.family.n, "problem.left");
    p.right = frame_from(j.at("right"), p.family.n, "problem.right");
    e.problem = std::move(p);
  } else {
    throw ConfigError("problem.type must be 'clinic' or 'bounded'");
  }
  e.id = maybe<std::string>(j, "id", where).value_or("config-" + type);
  e.description = "read from a config file";
  return e;
}

}  // namespace

ConfigFile parse_config(const std::string& json_text, std::optional<std::uint64_t> seed_flag) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, "config", {"problem", "grid_n", "horizon", "lambda_samples", "tolerances", "out",
                          "format", "seed"});
  ConfigFile c;
  c.seed = maybe<std::uint64_t>(j, "seed", "config");
  const std::uint64_t seed = seed_flag.value_or(c.seed.value_or(1));
  if (j.contains("problem")) {
    if (j.at("problem").is_string())
      c.problem_id = j.at("problem").get<std::string>();
    else
      c.problem = problem_from(j.at("problem"), seed);
  }
  auto& o = c.overrides;
  o.grid_n = maybe<int>(j, "grid_n", "config");
  o.horizon = maybe<double>(j, "horizon", "config");
  o.lambda_samples = maybe<int>(j, "lambda_samples", "config");
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    only_keys(t, "tolerances", {"intersection", "form_zero", "step", "horizon"});
    o.intersection_tol = maybe<double>(t, "intersection", "tolerances");
    o.form_zero_tol = maybe<double>(t, "form_zero", "tolerances");
    o.step_tol = maybe<double>(t, "step", "tolerances");
    o.horizon_tol = maybe<double>(t, "horizon", "tolerances");
  }
  c.out_dir = maybe<std::string>(j, "out", "config");
  if (auto f = maybe<std::string>(j, "format", "config")) {
    if (*f == "csv")
      c.format = TableFormat::Csv;
    else if (*f == "json-lines")
      c.format = TableFormat::JsonLines;
    else
      throw ConfigError("format must be 'csv' or 'json-lines'");
  }
  return c;
}

ConfigFile read_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_flag) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), seed_flag);
}

void validate_overrides(const Overrides& o, double decay_scale) {
  if (o.grid_n && (*o.grid_n < kMinGridN || *o.grid_n > kMaxGridN))
    throw ConfigError("grid_n must lie in [" + std::to_string(kMinGridN) + ", " +
                      std::to_string(kMaxGridN) + "]");
  if (o.horizon && !(*o.horizon > 0 && *o.horizon <= 1e3 * decay_scale))
    throw ConfigError("horizon must lie in (0, 1000 decay_scale]");
  if (o.lambda_samples && (*o.lambda_samples < 2 || *o.lambda_samples > 10000))
    throw ConfigError("lambda_samples must lie in [2, 10000]");
  for (auto t : {o.intersection_tol, o.form_zero_tol, o.step_tol, o.horizon_tol})
    if (t && !(*t > 0 && *t < 1)) throw ConfigError("tolerances must lie in (0, 1)");
}

std::vector<std::string> apply_overrides(CatalogEntry& e, const Overrides& o) {
  std::vector<std::string> notes;
  if (auto* p = std::get_if<ClinicProblem>(&e.problem)) {
    validate_overrides(o, p->family.decay_scale);
    auto& opts = p->opts;
    if (o.grid_n) opts.grid_n = *o.grid_n;
    if (o.horizon) {
      opts.operator_horizon = *o.horizon;
      opts.horizon = std::max(opts.horizon, 2.0 * *o.horizon);
    }
    if (o.lambda_samples) opts.lambda_samples = *o.lambda_samples;
    if (o.intersection_tol) opts.maslov.intersection_tol = *o.intersection_tol;
    if (o.form_zero_tol) opts.maslov.form_zero_tol = *o.form_zero_tol;
    if (o.step_tol) opts.subspace.ctrl.tol = *o.step_tol;
    if (o.horizon_tol) opts.subspace.horizon_tol = *o.horizon_tol;
    return notes;
  }
  auto& p = std::get<BoundedProblem>(e.problem);
  validate_overrides(o, p.family.decay_scale);
  if (o.grid_n) p.opts.grid_n = *o.grid_n;
  if (o.lambda_samples) p.opts.lambda_samples = *o.lambda_samples;
  if (o.intersection_tol) p.opts.maslov.intersection_tol = *o.intersection_tol;
  if (o.form_zero_tol) p.opts.maslov.form_zero_tol = *o.form_zero_tol;
  if (o.step_tol) p.opts.ctrl.tol = *o.step_tol;
  if (o.horizon) notes.push_back("horizon ignored: bounded problems live on [a, b]");
  if (o.horizon_tol) notes.push_back("horizon tolerance ignored: bounded problems live on [a, b]");
  return notes;
}

}  // namespace symflow::cli

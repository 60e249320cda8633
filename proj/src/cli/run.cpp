#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "cli/output.hpp"
#include "symflow/cli.hpp"

namespace symflow::cli {

namespace {

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return "config error";
    case ErrorCategory::Hypothesis: return "hypothesis violation";
    case ErrorCategory::Numerical: return "numerical failure";
    case ErrorCategory::Mismatch: return "identity mismatch";
  }
  return "error";
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Index: return "index";
    case Command::Verify: return "verify";
    case Command::Sweep: return "sweep";
    case Command::Catalog: return "catalog";
  }
  return "?";
}

std::string summary(const IndexReport& r) {
  std::string s = num(r.lhs) + " =";
  for (std::size_t i = 0; i < r.rhs.size(); ++i) {
    const auto& t = r.rhs[i];
    if (i == 0)
      s += " " + std::string(t.sign < 0 ? "-" : "") + num(t.value);
    else
      s += std::string(t.sign < 0 ? " - " : " + ") + num(t.value);
  }
  return s;
}

void put_identity(Report& rep, const std::string& section, const IndexReport& r) {
  rep.section(section);
  rep.put("identity", r.identity);
  rep.put("lhs." + r.lhs_name, r.lhs);
  for (const auto& t : r.rhs) {
    rep.put("rhs." + t.name, t.value);
    rep.put("rhs." + t.name + ".sign", t.sign);
  }
  rep.put("rhs_total", r.rhs_total());
  rep.put("summary", summary(r));
  rep.put("equal", r.equal);
  for (const auto& [k, v] : r.parameters) rep.put("param." + k, v);
  for (std::size_t i = 0; i < r.notes.size(); ++i) rep.put("note." + num(int(i + 1)), r.notes[i]);
}

/// Compares the entry's pinned integers against the named values; false on any difference.
bool put_expected(Report& rep, const std::string& section, const CatalogEntry& e,
                  const std::vector<IndexReport>& reports,
                  const std::vector<std::pair<std::string, int>>& extra) {
  if (e.expected.empty()) return true;
  rep.section(section);
  rep.put("oracle", e.oracle);
  bool ok = true;
  for (const auto& x : e.expected) {
    std::optional<int> got;
    for (const auto& r : reports) {
      if (r.lhs_name == x.name) got = r.lhs;
      for (const auto& t : r.rhs)
        if (t.name == x.name) got = t.value;
    }
    for (const auto& [k, v] : extra)
      if (k == x.name) got = v;
    rep.put(x.name, x.value);
    rep.put(x.name + ".provenance", x.provenance);
    if (got) {
      rep.put(x.name + ".computed", *got);
      ok = ok && *got == x.value;
    } else {
      rep.put(x.name + ".computed", "not computed by this command");
    }
  }
  rep.put("all_match", ok);
  return ok;
}

std::vector<double> lambda_grid(int samples) {
  std::vector<double> g;
  for (int i = 0; i <= samples; ++i) g.push_back(double(i) / samples);
  return g;
}

int lambda_samples(const CatalogEntry& e) {
  return e.is_clinic() ? e.clinic().opts.lambda_samples : e.bounded().opts.lambda_samples;
}

OperatorPath operator_path(const CatalogEntry& e) {
  return e.is_clinic() ? clinic_operator_path(e.clinic()) : bounded_operator_path(e.bounded());
}

// ---- plot tables --------------------------------------------------------------------------------

Table eigenvalue_table(const OperatorPath& P, int samples) {
  constexpr int k = 6;
  Table t{"eigenvalues", {"lambda"}, {}};
  for (int i = 1; i <= k; ++i) t.columns.push_back("eig_" + num(i));
  for (double l : lambda_grid(samples)) {
    const SymBand A = P(l);
    const int below = A.count_below(0.0);
    const int lo = std::clamp(below - k / 2, 0, std::max(0, A.size() - k));
    Vec ev = A.eigenvalues_by_index(lo, lo + k - 1);
    std::vector<Cell> row{cell(l)};
    for (int i = 0; i < k; ++i) row.push_back(i < ev.size() ? cell(ev(i)) : cell(std::nan("")));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table crossing_table(const OperatorPath& P, Report& rep) {
  Table t{"crossings", {"instant", "dim", "signature"}, {}};
  try {
    SpectralCrossings sc = spectral_crossings(P);
    std::vector<CrossingOperatorData> all = sc.interior;
    all.insert(all.end(), sc.ends.begin(), sc.ends.end());
    std::sort(all.begin(), all.end(), [](auto& x, auto& y) { return x.instant < y.instant; });
    for (const auto& c : all)
      t.rows.push_back({cell(c.instant), cell(int(c.kernel.cols())), cell(c.sig.value())});
    rep.put("crossings.flow", sc.flow);
  } catch (const NumericalFailure& ex) {
    rep.put("crossings.status", std::string("not tabulated: ") + ex.what());
  }
  return t;
}

Table maslov_crossing_table(const ClinicProblem& p, Report& rep) {
  Table t{"maslov_crossings", {"instant", "dim", "signature"}, {}};
  try {
    for (const auto& c : find_crossings(geometrical_pair(p, 1.0, p.opts.geo_horizon), p.opts.maslov))
      t.rows.push_back({cell(c.instant), cell(c.dim), cell(c.sig.value())});
  } catch (const NumericalFailure& ex) {
    rep.put("maslov_crossings.status", std::string("not tabulated: ") + ex.what());
  }
  return t;
}

// gap between E^s(tau) and E^s(+inf) (E^u(-tau) and E^u(-inf) for past half lines) at lambda = 1
Table gap_table(const ClinicProblem& p) {
  Table t{"gap_decay", {"tau", "gap"}, {}};
  const double H = p.opts.horizon, end = 0.5 * H;
  const bool past = p.kind == ClinicKind::PastHalf;
  InvariantSubspacePath path =
      past ? unstable_subspace_path(p.family, 1.0, -end, 0.0, H, p.opts.subspace)
           : stable_subspace_path(p.family, 1.0, 0.0, end, H, p.opts.subspace);
  constexpr int pts = 30;
  for (int i = 0; i <= pts; ++i) {
    const double tau = end * i / pts;
    t.rows.push_back({cell(tau), cell(gap_distance(path.eval(past ? -tau : tau), path.asymptote()))});
  }
  return t;
}

struct Context {
  RunConfig cfg;
  std::ostream& out;
};

void write_tables(const CatalogEntry& e, Report& rep, const Context& cx) {
  rep.section("tables");
  const OperatorPath P = operator_path(e);
  std::vector<Table> tables{eigenvalue_table(P, lambda_samples(e)), crossing_table(P, rep)};
  if (e.is_clinic()) {
    tables.push_back(maslov_crossing_table(e.clinic(), rep));
    tables.push_back(gap_table(e.clinic()));
  }
  for (const auto& t : tables)
    rep.put("file." + t.name, write_table(t, cx.cfg.out_dir, cx.cfg.format).filename().string());
}

void put_run(Report& rep, const CatalogEntry& e, const Context& cx,
             const std::vector<std::string>& notes) {
  rep.section("run");
  rep.put("command", command_name(cx.cfg.command));
  rep.put("problem", e.id);
  rep.put("description", e.description);
  rep.put("problem_type", e.is_clinic() ? "clinic" : "bounded");
  if (e.is_clinic()) rep.put("kind", to_string(e.clinic().kind));
  rep.put("seed", std::to_string(cx.cfg.seed));
  rep.put("format", cx.cfg.format == TableFormat::Csv ? "csv" : "json-lines");
  for (std::size_t i = 0; i < notes.size(); ++i) rep.put("note." + num(int(i + 1)), notes[i]);
  rep.section("parameters");
  auto params = e.is_clinic() ? report_parameters(e.clinic()) : report_parameters(e.bounded());
  for (const auto& [k, v] : params) rep.put(k, v);
}

// ---- commands -----------------------------------------------------------------------------------

std::vector<IndexReport> verify_reports(const CatalogEntry& e, Report& rep) {
  std::vector<IndexReport> reports;
  if (e.is_clinic()) {
    const auto& p = e.clinic();
    reports.push_back(verify_theorem1(p));
    put_identity(rep, "theorem1", reports.back());
    if (p.kind != ClinicKind::Heteroclinic) {
      try {
        reports.push_back(verify_corollaries(p));
        put_identity(rep, "corollary", reports.back());
      } catch (const HypothesisViolation& ex) {
        rep.section("corollary");
        rep.put("status", std::string("not applicable: ") + ex.what());
      }
    }
  } else {
    const auto& p = e.bounded();
    reports.push_back(verify_theorem2(p));
    put_identity(rep, "theorem2", reports.back());
    for (double l : {0.0, 1.0}) {
      reports.push_back(verify_classical_comparison(p, l));
      put_identity(rep, "classical_comparison.lambda" + num(l), reports.back());
    }
  }
  return reports;
}

int cmd_verify(const CatalogEntry& e, const std::vector<std::string>& notes, const Context& cx) {
  Report rep;
  put_run(rep, e, cx, notes);
  auto reports = verify_reports(e, rep);
  bool ok = put_expected(rep, "expected", e, reports, {});
  for (const auto& r : reports) {
    ok = ok && r.equal;
    cx.out << e.id << " " << r.identity << ": " << summary(r) << (r.equal ? " [holds]" : " [FAILS]")
           << "\n";
  }
  write_tables(e, rep, cx);
  rep.section("result");
  rep.put("all_identities_hold", ok);
  rep.write(cx.cfg.out_dir / "report.ini");
  cx.out << "report: " << (cx.cfg.out_dir / "report.ini").string() << "\n";
  return ok ? 0 : exit_code(ErrorCategory::Mismatch);
}

int cmd_index(const CatalogEntry& e, const std::vector<std::string>& notes, const Context& cx) {
  Report rep;
  put_run(rep, e, cx, notes);
  std::vector<std::pair<std::string, int>> values;
  if (e.is_clinic()) {
    const auto& p = e.clinic();
    values = {{"ispec", spectral_index(p)},
              {"igeo_w1", geometrical_index(p, 1.0)},
              {"igeo_w0", geometrical_index(p, 0.0)},
              {"asymptotic_clm", asymptotic_term(p)}};
  } else {
    const auto& p = e.bounded();
    values = {{"ispec", bounded_spectral_index(p)},
              {"igeob_w1", bounded_geometrical_index(p, 1.0)},
              {"igeob_w0", bounded_geometrical_index(p, 0.0)},
              {"boundary_clm", boundary_term(p)},
              {"classical_w1", classical_bounded_index(p, 1.0)},
              {"classical_w0", classical_bounded_index(p, 0.0)}};
  }
  rep.section("indices");
  for (const auto& [k, v] : values) {
    rep.put(k, v);
    cx.out << e.id << " " << k << " = " << v << "\n";
  }
  put_expected(rep, "expected", e, {}, values);
  write_tables(e, rep, cx);
  rep.write(cx.cfg.out_dir / "report.ini");
  cx.out << "report: " << (cx.cfg.out_dir / "report.ini").string() << "\n";
  return 0;
}

int cmd_sweep_lambda(const CatalogEntry& e, const std::vector<std::string>& notes,
                     const Context& cx) {
  Report rep;
  put_run(rep, e, cx, notes);
  const OperatorPath P = operator_path(e);
  Table t{"sweep", {"lambda", "kernel_dim"}, {}};
  if (e.is_clinic())
    t.columns.push_back("igeo");
  else
    t.columns.insert(t.columns.end(), {"igeob", "classical"});
  for (double l : lambda_grid(lambda_samples(e))) {
    std::vector<Cell> row{cell(l), cell(kernel_dim(P(l), P.kernel_tol))};
    if (e.is_clinic()) {
      row.push_back(cell(geometrical_index(e.clinic(), l)));
    } else {
      row.push_back(cell(bounded_geometrical_index(e.bounded(), l)));
      row.push_back(cell(classical_bounded_index(e.bounded(), l)));
    }
    t.rows.push_back(std::move(row));
  }
  rep.section("sweep");
  rep.put("kernel_tol", P.kernel_tol);
  rep.put("rows", int(t.rows.size()));
  rep.put("file.sweep", write_table(t, cx.cfg.out_dir, cx.cfg.format).filename().string());
  rep.write(cx.cfg.out_dir / "report.ini");
  cx.out << "report: " << (cx.cfg.out_dir / "report.ini").string() << "\n";
  return 0;
}

int cmd_sweep_catalog(std::vector<CatalogEntry> entries, const Overrides& o, const Context& cx) {
  Report rep;
  rep.section("run");
  rep.put("command", "sweep");
  rep.put("problem", "all");
  rep.put("seed", std::to_string(cx.cfg.seed));
  Table t{"sweep", {"id", "identity", "lhs", "rhs_total", "equal"}, {}};
  int code = 0;
  for (auto& e : entries) {
    try {
      auto notes = apply_overrides(e, o);
      validate_entry(e);
      const IndexReport r =
          e.is_clinic() ? verify_theorem1(e.clinic()) : verify_theorem2(e.bounded());
      put_identity(rep, e.id + "." + r.identity, r);
      for (std::size_t i = 0; i < notes.size(); ++i) rep.put("note." + num(int(i + 1)), notes[i]);
      t.rows.push_back({cell(e.id), cell(r.identity), cell(r.lhs), cell(r.rhs_total()),
                        cell(std::string(r.equal ? "true" : "false"))});
      cx.out << e.id << " " << r.identity << ": " << summary(r)
             << (r.equal ? " [holds]" : " [FAILS]") << "\n";
      const bool ok = put_expected(rep, e.id + ".expected", e, {r}, {}) && r.equal;
      if (!ok && code == 0) code = exit_code(ErrorCategory::Mismatch);
    } catch (const Error& ex) {
      rep.section(e.id + ".error");
      rep.put("category", category_name(ex.category()));
      rep.put("message", ex.what());
      t.rows.push_back({cell(e.id), cell(std::string("error")), cell(std::string("")),
                        cell(std::string("")), cell(std::string(category_name(ex.category())))});
      cx.out << e.id << ": " << category_name(ex.category()) << ": " << ex.what() << "\n";
      if (code == 0) code = exit_code(ex.category());
    }
  }
  rep.section("result");
  rep.put("file.sweep", write_table(t, cx.cfg.out_dir, cx.cfg.format).filename().string());
  rep.put("all_identities_hold", code == 0);
  rep.write(cx.cfg.out_dir / "report.ini");
  cx.out << "report: " << (cx.cfg.out_dir / "report.ini").string() << "\n";
  return code;
}

void print_catalog(std::ostream& out, std::uint64_t seed) {
  for (const auto& e : catalog(seed)) {
    out << "[" << e.id << "]\n";
    out << "type = " << (e.is_clinic() ? "clinic" : "bounded") << "\n";
    if (e.is_clinic()) out << "kind = " << to_string(e.clinic().kind) << "\n";
    out << "description = " << e.description << "\n";
    out << "oracle = " << e.oracle << "\n";
    for (const auto& x : e.expected)
      out << "expected." << x.name << " = " << x.value << "  # " << x.provenance << "\n";
    out << "\n";
  }
}

}  // namespace

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Hypothesis: return 3;
    case ErrorCategory::Numerical: return 4;
    case ErrorCategory::Mismatch: return 5;
  }
  return 4;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maslov indices, spectral flows and index-theorem checks"};
  app.require_subcommand(1);
  std::string problem, config_path, out_dir, format;
  std::optional<int> grid_n, lambda_samples_flag;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed_flag;
  app.add_option("--problem", problem, "catalog id, or 'all' for a catalog sweep");
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--grid-n", grid_n, "grid intervals of the discretized operator");
  app.add_option("--horizon", horizon, "truncation time T of h-clinic operators");
  app.add_option("--lambda-samples", lambda_samples_flag, "lambda sample intervals");
  app.add_option("--out", out_dir, "output directory (default symflow-out)");
  app.add_option("--seed", seed_flag, "seed of random families");
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json-lines"}));
  std::vector<std::pair<CLI::App*, Command>> subs;
  subs.emplace_back(app.add_subcommand("index", "compute every index of one problem"), Command::Index);
  subs.emplace_back(app.add_subcommand("verify", "check the index identities of one problem"),
                    Command::Verify);
  subs.emplace_back(app.add_subcommand("sweep", "lambda sweep of one problem, or all catalog entries"),
                    Command::Sweep);
  subs.emplace_back(app.add_subcommand("catalog", "list the built-in problems"), Command::Catalog);
  for (auto& [s, c] : subs) s->fallthrough();

  std::vector<std::string> argv_store{"symflow"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_code(ErrorCategory::Config);
  }

  try {
    RunConfig cfg;
    for (auto& [s, c] : subs)
      if (s->parsed()) cfg.command = c;
    ConfigFile file;
    if (!config_path.empty()) file = read_config(config_path, seed_flag);
    cfg.seed = seed_flag.value_or(file.seed.value_or(1));
    cfg.format = file.format.value_or(TableFormat::Csv);
    if (!format.empty()) cfg.format = format == "csv" ? TableFormat::Csv : TableFormat::JsonLines;
    if (file.out_dir) cfg.out_dir = *file.out_dir;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    Overrides o = file.overrides;
    if (grid_n) o.grid_n = grid_n;
    if (horizon) o.horizon = horizon;
    if (lambda_samples_flag) o.lambda_samples = lambda_samples_flag;
    validate_overrides(o, 1.0);
    cfg.overrides = o;
    Context cx{cfg, out};

    if (cfg.command == Command::Catalog) {
      print_catalog(out, cfg.seed);
      return 0;
    }

    std::string id = !problem.empty() ? problem : file.problem_id.value_or("");
    if (id == "random-bounded") id += "-" + std::to_string(cfg.seed);
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir.string());

    if (id == "all") {
      if (cfg.command != Command::Sweep) throw ConfigError("--problem all needs the sweep command");
      return cmd_sweep_catalog(catalog(cfg.seed), o, cx);
    }
    CatalogEntry e;
    if (!id.empty())
      e = find_entry(id);
    else if (file.problem)
      e = *file.problem;
    else
      throw ConfigError("no problem given (use --problem or a config file)");
    auto notes = apply_overrides(e, o);
    validate_entry(e);
    switch (cfg.command) {
      case Command::Index: return cmd_index(e, notes, cx);
      case Command::Verify: return cmd_verify(e, notes, cx);
      case Command::Sweep: return cmd_sweep_lambda(e, notes, cx);
      case Command::Catalog: break;
    }
    return 0;
  } catch (const Error& e) {
    err << category_name(e.category()) << ": " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_code(ErrorCategory::Numerical);
  }
}

}  // namespace symflow::cli

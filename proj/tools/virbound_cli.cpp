// virbound: command-line front end.
//
//   virbound [options] rep | field | smear | bounds | check-all
//
// Exit status: 0 success, 1 check failure, 2 usage or configuration error.

#include "virbound/acceptance.hpp"
#include "virbound/cache.hpp"
#include "virbound/virbound.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace virbound;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string c = "1/2";
  std::string h = "0";
  int N = 12;
  std::string mode = "exact";
  std::string out;
  std::uint64_t seed = 0;
  std::string cache;
  std::string eps_grid = "1e-4:20:200";
  int cutoff = -1;
  std::string field = "piecewise-mobius";
  bool complex_field = false;
  int central_denominator = 12;
  double tolerance = 1e-9;
};

/// All file output goes through here. Files land in the output directory when
/// one is configured; the JSON report also goes to stdout.
class Writer {
 public:
  explicit Writer(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  bool enabled() const { return !dir_.empty(); }

  void file(const std::string& name, const std::string& content) {
    if (!enabled()) return;
    const fs::path path = fs::path(dir_) / name;
    const std::string tmp = path.string() + ".tmp";
    {
      std::ofstream os(tmp, std::ios::binary);
      os << content;
      if (!os) throw std::runtime_error("cannot write " + tmp);
    }
    fs::rename(tmp, path);
  }

  void report(const std::string& command, const json& body) {
    json doc;
    json header;
    header["tool"] = "virbound";
    header["schema"] = schema_version;
    header["command"] = command;
    header["timestamp"] = timestamp();
    doc["header"] = header;
    doc["precision"] = report_precision;
    for (const auto& [k, v] : body.items()) doc[k] = v;
    const std::string text = doc.dump(2) + "\n";
    std::cout << text;
    file(command + ".json", text);
  }

 private:
  static std::string timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
  }

  std::string dir_;
};

Rational parse_exact(const std::string& name, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(name + ": " + e.what());
  }
}

template <class R>
R parse_param(const std::string& name, const std::string& text) {
  const Rational q = parse_exact(name, text);
  if constexpr (is_exact_v<R>)
    return q;
  else
    return q.get_d();
}

std::vector<double> parse_eps_grid(const std::string& spec) {
  std::vector<double> grid;
  auto number = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("eps-grid: malformed number '" + s + "'");
    }
  };
  if (spec.find(':') != std::string::npos) {
    std::stringstream ss(spec);
    std::string lo, hi, pts;
    if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') || !std::getline(ss, pts))
      throw UsageError("eps-grid: expected lo:hi:points");
    const double a = number(lo), b = number(hi);
    const double p = number(pts);
    if (!(a > 0) || !(b >= a)) throw UsageError("eps-grid: need 0 < lo <= hi");
    if (p < 1) throw UsageError("eps-grid: empty grid");
    grid = p == 1 ? std::vector<double>{a} : log_grid(a, b, static_cast<int>(p));
  } else {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (tok.find_first_not_of(" \t") != std::string::npos) grid.push_back(number(tok));
  }
  if (grid.empty()) throw UsageError("eps-grid: empty grid");
  for (double e : grid)
    if (!(e > 0)) throw UsageError("eps-grid: values must be positive");
  return grid;
}

template <class R>
TruncatedRep<R> obtain_rep(const RunConfig& cfg, bool& from_cache) {
  if (cfg.N < 2) throw UsageError("N must be at least 2");
  const R c = parse_param<R>("c", cfg.c);
  const R h = parse_param<R>("h", cfg.h);
  from_cache = false;
  if (!cfg.cache.empty()) {
    if (auto hit = load_cached<R>(cfg.cache, c, h, cfg.N)) {
      from_cache = true;
      return std::move(*hit);
    }
  }
  std::optional<TruncatedRep<R>> rep;
  try {
    rep.emplace(build_rep<R>(CentralCharge<R>(c), LowestWeight<R>(h), cfg.N));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!cfg.cache.empty()) store_cached(cfg.cache, *rep);
  return std::move(*rep);
}

/// Float rep for the numerical commands; exact mode builds exactly, then normalizes.
TruncatedRep<double> float_rep(const RunConfig& cfg, bool& from_cache) {
  if (cfg.mode == "exact") return normalize(obtain_rep<Rational>(cfg, from_cache));
  return obtain_rep<double>(cfg, from_cache);
}

json dims_json(const std::vector<int>& dims) {
  json a = json::array();
  for (int d : dims) a.push_back(d);
  return a;
}

template <class R>
int run_rep(const RunConfig& cfg, Writer& out) {
  bool cached = false;
  const auto rep = obtain_rep<R>(cfg, cached);
  const int max_mode = std::min(3, cfg.N);
  const auto rel = check_virasoro_relations(rep, max_mode, cfg.central_denominator);
  const double herm = hermiticity_residual(rep);
  bool ok = is_exact_v<R> ? rel.all_exact_zero : rel.max_residual <= cfg.tolerance;
  if (!is_exact_v<R> && herm > cfg.tolerance) ok = false;

  json body;
  body["mode"] = mode_name<R>();
  body["c"] = format_scalar(rep.c());
  body["h"] = format_scalar(rep.h());
  body["N"] = cfg.N;
  body["from_cache"] = cached;
  body["level_dims"] = dims_json(rep.level_dims());
  body["total_dim"] = rep.total_dim();
  json r;
  r["max_mode"] = max_mode;
  r["windows"] = rel.windows_checked();
  r["max_residual"] = decimal(rel.max_residual);
  r["all_exact_zero"] = rel.all_exact_zero;
  r["hermiticity_residual"] = decimal(herm);
  r["tolerance"] = is_exact_v<R> ? "0" : decimal(cfg.tolerance);
  r["pass"] = ok;
  body["relations"] = r;
  if constexpr (is_exact_v<R>) {
    if (!admissible_central_charge(rep.c()))
      body["warning"] = "c is not in the unitary discrete series; positivity may fail above the truncation";
  }
  out.report("rep", body);

  std::ostringstream dims;
  dims << "k,dim,partitions\n";
  const auto p = partition_numbers(cfg.N);
  for (int k = 0; k <= cfg.N; ++k) dims << k << ',' << rep.dim(k) << ',' << p[k] << '\n';
  out.file("level_dims.csv", dims.str());
  std::ostringstream rels;
  rels << "m,n,level,residual,exact_zero\n";
  for (const auto& x : rel.checks)
    rels << x.m << ',' << x.n << ',' << x.level << ',' << decimal(x.residual) << ',' << (x.exact_zero ? 1 : 0) << '\n';
  out.file("relations.csv", rels.str());
  std::ostringstream ser;
  write_rep(ser, rep);
  out.file("rep.txt", ser.str());

  if (!ok) throw CheckFailure("relation residual above tolerance");
  return exit_ok;
}

struct FieldSpec {
  std::string kind;  // piecewise-mobius, mode, csv
  Field field;
  int mode = 0;
};

FieldSpec load_field(const RunConfig& cfg, int cutoff) {
  FieldSpec s;
  if (cfg.field == "piecewise-mobius") {
    s.kind = "piecewise-mobius";
    s.field = PiecewiseMobiusField::truncated(cutoff);
  } else if (cfg.field.rfind("mode:", 0) == 0) {
    s.kind = "mode";
    try {
      std::size_t pos = 0;
      s.mode = std::stoi(cfg.field.substr(5), &pos);
      if (pos != cfg.field.size() - 5) throw std::invalid_argument("mode");
    } catch (const std::exception&) {
      throw UsageError("field: malformed mode spec '" + cfg.field + "'");
    }
    s.field = Field::mode(s.mode);
  } else {
    s.kind = "csv";
    std::ifstream is(cfg.field);
    if (!is) throw UsageError("field: cannot open '" + cfg.field + "'");
    try {
      s.field = read_field_csv(is, !cfg.complex_field);
    } catch (const FieldParseError& e) {
      throw UsageError(cfg.field + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw UsageError(cfg.field + ": " + e.what());
    }
  }
  return s;
}

json coefficient_row(int n, std::complex<double> a) {
  json row;
  row["n"] = n;
  row["re"] = decimal(a.real());
  row["im"] = decimal(a.imag());
  return row;
}

int run_field(const RunConfig& cfg, Writer& out) {
  const int cutoff = cfg.cutoff > 0 ? cfg.cutoff : 64;
  const auto spec = load_field(cfg, cutoff);
  json body;
  body["field"] = cfg.field;
  body["kind"] = spec.kind;
  body["real"] = spec.field.is_real();
  body["cutoff"] = cutoff;

  json table = json::array();
  for (const auto& [n, a] : spec.field.coefficients())
    if (std::abs(n) <= cutoff) table.push_back(coefficient_row(n, a));
  body["coefficients"] = table;

  const auto norm = norm_three_halves(spec.field, cutoff, spec.kind);
  json nj;
  nj["partial"] = decimal(norm.partial());
  nj["tail_bound"] = decimal(norm.tail_bound);
  nj["upper"] = decimal(norm.upper());
  nj["finite"] = norm.finite;
  body["norm_three_halves"] = nj;

  if (spec.kind == "piecewise-mobius") {
    json corners = json::array();
    for (int j = 0; j < 4; ++j) {
      const Corner p{j};
      const auto d1 = PiecewiseMobiusField::one_sided_derivatives(p, 1);
      const auto d2 = PiecewiseMobiusField::one_sided_derivatives(p, 2);
      json row;
      row["corner"] = p.label();
      row["value"] = PiecewiseMobiusField::corner_value(p);
      row["first_left"] = d1.left;
      row["first_right"] = d1.right;
      row["first_continuous"] = d1.jump() == 0;
      row["second_left"] = d2.left;
      row["second_right"] = d2.right;
      row["second_jump"] = d2.jump();
      corners.push_back(row);
    }
    body["corners"] = corners;
    const auto decay = decay_report(PiecewiseMobiusField::coefficient, std::max(cutoff, 2), spec.kind);
    body["decay"] = to_json(decay);
    std::ostringstream samples;
    write_samples_csv(samples, PiecewiseMobiusField{}, 1024);
    out.file("field_samples.csv", samples.str());
  } else {
    const auto& f = spec.field;
    const auto decay = decay_report([&f](int n) { return f.coefficient(n); }, std::max(f.max_abs_mode(), 2), spec.kind);
    body["decay"] = to_json(decay);
  }
  out.report("field", body);
  std::ostringstream csv;
  write_field_csv(csv, spec.field);
  out.file("coefficients.csv", csv.str());
  return exit_ok;
}

int run_smear(const RunConfig& cfg, Writer& out) {
  bool cached = false;
  const auto rep = float_rep(cfg, cached);
  const int cutoff = cfg.cutoff > 0 ? std::min(cfg.cutoff, cfg.N) : cfg.N;
  const auto spec = load_field(cfg, cutoff);
  const auto t = smear(rep, spec.field, cutoff);
  const double closed = vacuum_norm(spec.field, rep.c(), cutoff);
  const double matrix = vacuum_norm_from_matrices(rep, spec.field, cutoff);
  const auto r = estimate_r(rep);
  const auto energy = energy_bound_check(rep, spec.field, std::sqrt(r.constant), 64, cfg.seed, cutoff);
  const bool ok = std::abs(closed - matrix) <= 1e-8 * std::max(1.0, closed) && energy.pass;

  json body;
  body["field"] = cfg.field;
  body["c"] = decimal(rep.c());
  body["h"] = decimal(rep.h());
  body["N"] = cfg.N;
  body["cutoff"] = cutoff;
  body["safe_levels"] = t.op.safe_levels().size();
  json bias;
  bias["discarded"] = decimal(t.bias.discarded);
  bias["tolerance"] = decimal(t.bias.tolerance);
  bias["warn"] = t.bias.warn;
  body["truncation_bias"] = bias;
  json vac;
  vac["closed_form"] = decimal(closed);
  vac["from_matrices"] = decimal(matrix);
  vac["nonzero"] = closed > 0;
  body["vacuum_norm_squared"] = vac;
  json eb;
  eb["r"] = decimal(std::sqrt(r.constant));
  eb["samples"] = energy.samples;
  eb["seed"] = std::to_string(cfg.seed);
  eb["worst_ratio"] = decimal(energy.worst_ratio);
  eb["pass"] = energy.pass;
  body["energy_bound"] = eb;
  body["pass"] = ok;
  out.report("smear", body);
  if (!ok) throw CheckFailure("smeared operator checks failed");
  return exit_ok;
}

int run_bounds(const RunConfig& cfg, Writer& out) {
  const auto grid = parse_eps_grid(cfg.eps_grid);
  bool cached = false;
  const auto rep = float_rep(cfg, cached);
  const auto r = estimate_r(rep);
  const auto q = estimate_q(rep, grid, r);

  json fm = json::array();
  std::ostringstream fm_csv;
  fm_csv << "k,m,eps_max,sup_squared,grid_sup_squared,bound\n";
  bool fm_ok = true;
  for (int k = 0; k <= 10; ++k)
    for (int m = 1; m <= 10; ++m) {
      const auto closed = fm_sup(k, m);
      const auto search = fm_grid_search(k, m);
      const double bound = (double(m) / (k + m)) * (double(m) / (k + m));
      if (std::abs(closed.sup_squared - search.sup_squared) > 1e-6 * closed.sup_squared) fm_ok = false;
      json row;
      row["k"] = k;
      row["m"] = m;
      row["eps_max"] = decimal(closed.eps_max);
      row["sup_squared"] = decimal(closed.sup_squared);
      row["grid_sup_squared"] = decimal(search.sup_squared);
      fm.push_back(row);
      fm_csv << k << ',' << m << ',' << decimal(closed.eps_max) << ',' << decimal(closed.sup_squared) << ','
             << decimal(search.sup_squared) << ',' << decimal(bound) << '\n';
    }

  json body;
  body["c"] = decimal(rep.c());
  body["h"] = decimal(rep.h());
  body["N"] = cfg.N;
  body["r"] = to_json(r);
  body["q"] = to_json(q);
  json chain;
  chain["r_squared"] = decimal(r.constant);
  chain["q"] = decimal(q.constant);
  chain["three_r_squared"] = decimal(3 * r.constant);
  chain["verdict"] = q.pass ? "pass" : "fail";
  body["chain"] = chain;
  body["fm_cross_check"] = fm;
  body["fm_cross_check_pass"] = fm_ok;
  out.report("bounds", body);

  std::ostringstream rc, qc;
  write_cells_csv(rc, r);
  write_cells_csv(qc, q);
  out.file("r_cells.csv", rc.str());
  out.file("q_cells.csv", qc.str());
  out.file("fm_table.csv", fm_csv.str());
  if (!q.pass) throw CheckFailure("q exceeds 3 r^2");
  if (!fm_ok) throw CheckFailure("f_m closed form disagrees with grid search");
  return exit_ok;
}

int run_check_all(const RunConfig& cfg, Writer& out) {
  AcceptanceOptions opt;
  opt.mode = cfg.mode == "exact" ? Arithmetic::Exact : Arithmetic::Float;
  opt.seed = cfg.seed;
  opt.central_denominator = cfg.central_denominator;
  json rows = json::array();
  bool all = true;
  const auto criteria = acceptance_criteria();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto res = run_criterion(criteria[i], static_cast<int>(i + 1), opt);
    all = all && res.pass;
    std::cerr << std::setw(2) << res.id << ' ' << (res.pass ? "PASS" : "FAIL") << "  " << res.title << " | "
              << res.detail << '\n';
    json row;
    row["id"] = res.id;
    row["title"] = res.title;
    row["pass"] = res.pass;
    row["detail"] = res.detail;
    rows.push_back(row);
  }
  json body;
  body["mode"] = cfg.mode;
  body["seed"] = std::to_string(cfg.seed);
  body["criteria"] = rows;
  body["all_pass"] = all;
  out.report("check-all", body);
  if (!all) throw CheckFailure("acceptance failures");
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated Virasoro representations, smeared fields and energy bounds"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Flat key = value configuration file; command-line flags take precedence");

  RunConfig cfg;
  app.add_option("--c", cfg.c, "Central charge, p/q")->capture_default_str();
  app.add_option("--h", cfg.h, "Lowest weight, p/q")->capture_default_str();
  app.add_option("--N", cfg.N, "Truncation level")->capture_default_str();
  app.add_option("--mode", cfg.mode, "Arithmetic")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  app.add_option("--out", cfg.out, "Output directory for JSON and CSV artifacts");
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--cache", cfg.cache, "Cache directory for built representations");
  app.add_option("--eps-grid", cfg.eps_grid, "lo:hi:points (log spaced) or a comma-separated list")->capture_default_str();
  app.add_option("--cutoff", cfg.cutoff, "Mode cutoff for fields and smearing");
  app.add_option("--field", cfg.field, "piecewise-mobius, mode:<n>, or a CSV file of n,re,im")->capture_default_str();
  app.add_flag("--complex", cfg.complex_field, "Do not require a CSV field to be real");
  app.add_option("--tolerance", cfg.tolerance, "Float-mode residual tolerance")->capture_default_str();
  app.add_option("--fault-central-denominator", cfg.central_denominator)->group("");

  std::function<int(const RunConfig&, Writer&)> command;
  app.add_subcommand("rep", "Build or load the truncated representation and check relations")
      ->fallthrough()
      ->callback([&] {
        command = [](const RunConfig& c, Writer& w) { return c.mode == "exact" ? run_rep<Rational>(c, w) : run_rep<double>(c, w); };
      });
  app.add_subcommand("field", "Coefficient, norm, corner and decay reports for a field")->fallthrough()->callback([&] {
    command = run_field;
  });
  app.add_subcommand("smear", "Smeared operator diagnostics")->fallthrough()->callback([&] { command = run_smear; });
  app.add_subcommand("bounds", "r and q estimates, chain check, f_m table")->fallthrough()->callback([&] {
    command = run_bounds;
  });
  app.add_subcommand("check-all", "Run every acceptance criterion")->fallthrough()->callback([&] {
    command = run_check_all;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (cfg.N < 2) throw UsageError("N must be at least 2");
    Writer out(cfg.out);
    return command(cfg, out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return exit_check;
  } catch (const NonUnitary& e) {
    std::cerr << "non-unitary: " << e.what() << '\n';
    return exit_check;
  } catch (const CacheError& e) {
    std::cerr << "cache error: " << e.what() << '\n';
    return exit_check;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_check;
  }
}

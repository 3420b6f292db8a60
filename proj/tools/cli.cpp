#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "friable/acceptance.hpp"
#include "friable/bias.hpp"
#include "friable/dickman.hpp"
#include "friable/errors.hpp"
#include "friable/primes.hpp"
#include "friable/saddle.hpp"
#include "friable/sampler.hpp"

namespace friable::cli {

Row& Row::set(std::string key, Value v) {
  cells.emplace_back(std::move(key), std::move(v));
  return *this;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

namespace {

std::string csv_cell(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(std::uint64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_real(d); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string quoted = "\"";
      for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      return quoted + '"';
    }
  };
  return std::visit(Visitor{}, v);
}

void check_keys(const std::vector<Row>& rows) {
  for (const Row& r : rows) {
    bool same = r.cells.size() == rows.front().cells.size();
    for (std::size_t i = 0; same && i < r.cells.size(); ++i) same = r.cells[i].first == rows.front().cells[i].first;
    if (!same) throw std::logic_error("rows with different columns");
  }
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<Row>& rows) {
  if (rows.empty()) return;
  check_keys(rows);
  std::string line;
  for (const auto& [key, _] : rows.front().cells) line += (line.empty() ? "" : ",") + key;
  out << line << '\n';
  for (const Row& r : rows) {
    line.clear();
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
      if (i) line += ',';
      line += csv_cell(r.cells[i].second);
    }
    out << line << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<Row>& rows) {
  check_keys(rows);
  for (const Row& r : rows) {
    // keys kept in column order
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    std::vector<std::string> nonfinite;
    for (const auto& [key, v] : r.cells) {
      if (const double* d = std::get_if<double>(&v); d && !std::isfinite(*d)) {
        obj[key] = nullptr;
        nonfinite.push_back(key);
        continue;
      }
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
              obj[key] = nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
              // 17 significant digits, same text as the CSV cell
              obj[key] = nlohmann::ordered_json::parse(format_real(x));
            } else {
              obj[key] = x;
            }
          },
          v);
    }
    if (!nonfinite.empty()) obj["nonfinite"] = nonfinite;
    out << obj.dump() << '\n';
  }
}

Magnitude parse_magnitude(const std::string& text) {
  const char* first = text.data();
  const char* last = first + text.size();
  std::uint64_t n = 0;
  if (auto [p, ec] = std::from_chars(first, last, n); ec == std::errc() && p == last) {
    if (n == 0) throw std::invalid_argument("value must be positive: " + text);
    return Magnitude::from_integer(n);
  }
  double v = 0.0;
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || !(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument("not a positive number: " + text);
  }
  if (v < 9.2e18 && v == std::floor(v)) return Magnitude::from_integer(static_cast<std::uint64_t>(v));
  return Magnitude::from_log(std::log(v));
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  auto number = [](const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      throw std::invalid_argument("bad number '" + s + "'");
    }
    return v;
  };
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty item in '" + text + "'");
    std::vector<std::string> parts;
    std::stringstream fields(item);
    std::string f;
    while (std::getline(fields, f, ':')) parts.push_back(f);
    if (parts.size() == 1) {
      values.push_back(number(parts[0]));
    } else if (parts.size() == 3) {
      const double a = number(parts[0]);
      const double b = number(parts[1]);
      const double mult = number(parts[2]);
      if (!(a > 0.0) || !(mult > 1.0) || b < a) throw std::invalid_argument("range a:b:mult needs 0 < a <= b, mult > 1");
      for (double v = a; v <= b * (1.0 + 1e-12); v *= mult) {
        const double r = std::round(v);
        values.push_back(std::abs(v - r) <= 1e-9 * v ? r : v);
        if (values.size() > 100000) throw std::invalid_argument("range too long");
      }
    } else {
      throw std::invalid_argument("bad range '" + item + "'");
    }
  }
  if (values.empty()) throw std::invalid_argument("empty value list");
  return values;
}

namespace {

std::uint64_t to_integer(double v, const char* what) {
  if (!(v >= 1.0) || v >= 9.2e18 || v != std::floor(v)) {
    throw std::invalid_argument(fmt::format("{} must be a positive integer", what));
  }
  return static_cast<std::uint64_t>(v);
}

Magnitude magnitude_of(double v) {
  if (v < 9.2e18 && v == std::floor(v) && v >= 1.0) return Magnitude::from_integer(static_cast<std::uint64_t>(v));
  if (!(v > 0.0)) throw std::invalid_argument("x must be positive");
  return Magnitude::from_log(std::log(v));
}

}  // namespace

std::vector<GridPoint> parse_grid(const std::string& spec) {
  std::vector<Magnitude> xs;
  std::vector<std::uint64_t> ys;
  std::vector<double> hs{0.0};
  std::stringstream axes(spec);
  std::string axis;
  while (std::getline(axes, axis, ';')) {
    const auto eq = axis.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("grid axis '" + axis + "' needs name=values");
    const std::string name = axis.substr(0, eq);
    const std::vector<double> values = parse_values(axis.substr(eq + 1));
    if (name == "x") {
      for (double v : values) xs.push_back(magnitude_of(v));
    } else if (name == "logx") {
      for (double v : values) xs.push_back(Magnitude::from_log(v));
    } else if (name == "y") {
      ys.clear();
      for (double v : values) ys.push_back(to_integer(v, "y"));
    } else if (name == "h") {
      hs = values;
    } else {
      throw std::invalid_argument("unknown grid axis '" + name + "'");
    }
  }
  if (xs.empty() || ys.empty()) throw std::invalid_argument("grid needs an x (or logx) axis and a y axis");
  std::vector<GridPoint> points;
  for (const Magnitude& x : xs) {
    for (std::uint64_t y : ys) {
      for (double h : hs) points.push_back({x, y, h});
    }
  }
  return points;
}

namespace {

struct Options {
  std::string format = "csv";
  std::string out_path;
  std::uint64_t budget = 0;

  std::string x;
  double logx = 0.0;
  std::string y;
  std::string z;
  double h = 0.0;
  std::string method;
  std::string t;
  bool rho2 = false;
  double u = 0.0;
  double w = 0.0;
  std::uint64_t n = 10000;
  std::uint64_t seed = 1;
  std::string grid;
  bool no_exact = false;
  std::string suite = "all";
  std::string tol_file;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class Command {
 public:
  Command(const Options& o, const CLI::App& app) : o_(o), app_(app) {
    budget_ = default_budget();
    if (o.budget) budget_.max_terms = o.budget;
    options_.budget = budget_;
  }

  bool given(const char* name) const { return app_.count(name) > 0; }

  Magnitude x() const {
    if (given("--logx")) return Magnitude::from_log(o_.logx);
    if (!given("--x")) throw UsageError("--x or --logx is required");
    return parse_magnitude(o_.x);
  }

  std::uint64_t exact_x() const {
    const Magnitude m = x();
    if (!m.is_exact_integer()) throw UsageError("this method needs an integer --x");
    return *m.floor();
  }

  std::uint64_t y() const {
    const Magnitude m = parse_magnitude(o_.y);
    if (!m.is_exact_integer()) throw UsageError("--y must be an integer");
    return *m.floor();
  }

  SaddlePoint saddle() const {
    const Magnitude xm = x();
    const std::uint64_t yv = y();
    if (yv < 2) throw UsageError("--y must be >= 2");
    if (xm.log() < std::log(static_cast<double>(yv)) * (1.0 - 1e-15)) throw UsageError("need x >= y");
    return solve_alpha(xm.log(), EulerProduct(yv, budget_));
  }

  const Options& o_;
  const CLI::App& app_;
  Budget budget_;
  BiasOptions options_;
};

Row saddle_row(const SaddlePoint& sp) {
  Row r;
  r.set("log_x", sp.log_x).set("y", sp.y).set("u", sp.u).set("ubar", sp.ubar).set("alpha", sp.alpha);
  r.set("log_zeta", sp.log_zeta).set("sigma2", sp.sigma[2]).set("sigma3", sp.sigma[3]).set("sigma4", sp.sigma[4]);
  r.set("theta", sp.theta).set("residual", sp.sigma[1]).set("iterations", static_cast<std::int64_t>(sp.iterations));
  return r;
}

Row bias_row(const BiasReport& b) {
  Row r;
  r.set("log_x", b.log_x).set("y", b.y).set("log_z", b.log_z).set("u", b.u).set("w", b.w).set("h", b.h);
  r.set("theta", b.theta).set("alpha", b.alpha).set("p_exact", b.p_exact).set("p_gaussian", b.p_gaussian);
  r.set("p_kappa", b.p_kappa).set("gaussian_residual", b.gaussian_residual).set("kappa_residual", b.kappa_residual);
  r.set("in_h_epsilon", b.in_h_epsilon).set("no_oracle", b.no_oracle);
  return r;
}

Row delta_row(const DeltaReport& d, const std::string& method) {
  std::optional<double> value;
  if (method == "exact") value = d.delta_exact;
  if (method == "nu") value = d.nu_u;
  if (method == "theta") value = d.delta_theta;
  Row r;
  r.set("log_x", d.log_x).set("y", d.y).set("u", d.u).set("ubar", d.ubar).set("alpha", d.alpha);
  r.set("method", method).set("delta", value);
  r.set("delta_exact", d.delta_exact).set("nu_u", d.nu_u).set("theta", d.theta).set("delta_theta", d.delta_theta);
  r.set("theta0", d.thetas.theta0).set("theta1", d.thetas.theta1).set("theta2", d.thetas.theta2);
  r.set("log_band", d.log_band).set("delta_drappeau", d.delta_drappeau);
  r.set("psi", d.psi).set("psi_tau", d.psi_tau).set("d", d.d);
  r.set("identity_lhs", d.identity_lhs).set("identity_rhs", d.identity_rhs);
  r.set("in_h_epsilon", d.thetas.in_h_epsilon).set("no_oracle", d.no_oracle);
  return r;
}

std::vector<Row> cmd_alpha(const Command& c) {
  const SaddlePoint sp = c.saddle();
  Row r = saddle_row(sp);
  r.set("alpha_v_derivative", alpha_v_derivative(sp.u, EulerProduct(sp.y, c.budget_)));
  return {r};
}

std::vector<Row> cmd_psi(const Command& c) {
  const std::string method = c.o_.method.empty() ? "exact" : c.o_.method;
  Row r;
  if (method == "exact") {
    const std::uint64_t xv = c.exact_x();
    const std::uint64_t v = psi_exact(xv, c.y(), c.budget_);
    r.set("x", xv).set("y", c.y()).set("method", method).set("psi", static_cast<double>(v));
    r.set("log_psi", std::log(static_cast<double>(v))).set("psi_exact", v);
  } else {
    const SaddlePoint sp = c.saddle();
    const PsiApprox a = psi_saddle(sp);
    r.set("log_x", sp.log_x).set("y", sp.y).set("method", method);
    r.set("psi", a.overflow ? Value() : Value(a.value)).set("log_psi", a.log_value).set("overflow", a.overflow);
  }
  return {r};
}

std::vector<Row> cmd_bias(const Command& c) {
  const SaddlePoint sp = c.saddle();
  Magnitude z = c.x();
  if (c.given("--h")) z = Magnitude::from_log(log_z_of(sp, c.o_.h));
  if (c.given("--z")) z = parse_magnitude(c.o_.z);
  return {bias_row(bias_report(sp, z, c.options_))};
}

std::vector<Row> cmd_delta(const Command& c) {
  const std::string method = c.o_.method.empty() ? "exact" : c.o_.method;
  if (method == "exact") return {delta_row(delta_exact(c.exact_x(), c.y(), c.options_), method)};
  DeltaReport d = delta_report(c.x().log(), c.y(), c.options_);
  return {delta_row(d, method)};
}

std::vector<Row> cmd_dickman(const Command& c) {
  std::vector<Row> rows;
  for (double t : parse_values(c.o_.t)) {
    Row r;
    r.set("t", t).set("rho", rho(t));
    if (c.o_.rho2) r.set("rho2", rho2(t));
    if (t >= 1.0) {
      r.set("xi", xi(t).xi).set("xi_prime", xi_prime(t));
    } else {
      r.set("xi", Value()).set("xi_prime", Value());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<Row> cmd_kappa(const Command& c) {
  Row r;
  r.set("u", c.o_.u).set("w", c.o_.w).set("kappa", kappa(c.o_.u, c.o_.w));
  return {r};
}

std::vector<Row> cmd_sample(const Command& c) {
  const SaddlePoint sp = c.saddle();
  Magnitude z = c.x();
  if (c.given("--z")) z = parse_magnitude(c.o_.z);
  const SampleStats s = estimate_p(sp, z.log(), c.o_.n, c.o_.seed);
  std::optional<double> exact;
  try {
    exact = p_exact(sp, z, c.budget_);
  } catch (const ResourceError&) {
  }
  Row r;
  r.set("log_x", sp.log_x).set("y", sp.y).set("log_z", z.log()).set("alpha", sp.alpha).set("seed", c.o_.seed);
  r.set("n_draws", s.n_draws).set("mean_log_n", s.mean_log_n).set("var_log_n", s.var_log_n);
  r.set("sigma2", sp.sigma[2]).set("frac_le_z", s.frac_le_z).set("ci_halfwidth", s.ci_halfwidth);
  r.set("p_exact", exact);
  return {r};
}

std::vector<Row> cmd_table(const Command& c) {
  if (c.o_.grid.empty()) throw UsageError("--grid must be non-empty");
  std::vector<Row> rows;
  for (const GridPoint& pt : parse_grid(c.o_.grid)) {
    if (pt.y < 2 || pt.x.log() < std::log(static_cast<double>(pt.y)) * (1.0 - 1e-15)) {
      throw UsageError(fmt::format("grid point needs x >= y >= 2 (y = {})", pt.y));
    }
    const EulerProduct euler(pt.y, c.budget_);
    const SaddlePoint sp = solve_alpha(pt.x.log(), euler);
    const Magnitude z = pt.h == 0.0 ? pt.x : Magnitude::from_log(log_z_of(sp, pt.h));
    BiasOptions opts = c.options_;
    BiasReport b;
    if (c.o_.no_exact) {
      opts.budget.max_terms = 0;
      opts.budget.max_sieve = 0;
    }
    b = bias_report(sp, z, opts);
    std::optional<std::uint64_t> psi;
    std::optional<double> delta;
    if (!c.o_.no_exact && pt.x.is_exact_integer()) {
      try {
        psi = psi_exact(*pt.x.floor(), pt.y, c.budget_);
        if (pt.h == 0.0) delta = delta_exact(*pt.x.floor(), pt.y, c.options_).delta_exact;
      } catch (const ResourceError&) {
      }
    }
    const DeltaReport d = delta_report(pt.x.log(), pt.y, c.options_);
    const PsiApprox a = psi_saddle(sp);
    Row r;
    r.set("log_x", sp.log_x).set("y", sp.y).set("h", pt.h).set("u", sp.u).set("ubar", sp.ubar);
    r.set("alpha", sp.alpha).set("theta", sp.theta);
    r.set("psi_exact", psi).set("log_psi_saddle", a.log_value);
    r.set("p_exact", b.p_exact).set("p_gaussian", b.p_gaussian).set("p_kappa", b.p_kappa);
    r.set("delta_exact", delta).set("nu_u", d.nu_u).set("delta_theta", d.delta_theta);
    r.set("in_h_epsilon", b.in_h_epsilon);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Saddle-point law on friable integers: exact counts, bias P(x,y,z), defect Delta(x,y)."};
  app.set_help_flag("--help", "print help (-h is the bias offset)");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", o.out_path, "write results to this file instead of stdout");
  app.add_option("--budget", o.budget, "term budget for exact computations (default 1e8 or $FRIABLE_BUDGET)");

  auto add_xy = [&](CLI::App* sub) {
    auto* x = sub->add_option("--x", o.x, "x as an integer or decimal (1e6)");
    auto* lx = sub->add_option("--logx", o.logx, "natural log of x, for x beyond 64 bits");
    x->excludes(lx);
    sub->add_option("--y", o.y, "smoothness bound y")->required();
  };

  auto* alpha = app.add_subcommand("alpha", "saddle point alpha(x, y) and its moments");
  add_xy(alpha);
  auto* psi = app.add_subcommand("psi", "Psi(x, y)");
  add_xy(psi);
  psi->add_option("--method", o.method, "exact or saddle")->check(CLI::IsMember({"exact", "saddle"}));
  auto* bias = app.add_subcommand("bias", "P(x, y, z): exact, Gaussian and kappa (z defaults to x)");
  add_xy(bias);
  auto* zo = bias->add_option("--z", o.z, "threshold z");
  auto* ho = bias->add_option("--h", o.h, "z = x y^(Theta h)");
  zo->excludes(ho);
  auto* delta = app.add_subcommand("delta", "defect Delta(x, y)");
  add_xy(delta);
  delta->add_option("--method", o.method, "exact, nu or theta")->check(CLI::IsMember({"exact", "nu", "theta"}));
  auto* dick = app.add_subcommand("dickman", "rows (t, rho, [rho2,] xi, xi')");
  dick->add_option("--t", o.t, "t values: comma list and a:b:mult ranges")->required();
  dick->add_flag("--rho2", o.rho2, "include rho2");
  auto* kap = app.add_subcommand("kappa", "kappa(u, w)");
  kap->add_option("--u", o.u)->required();
  kap->add_option("--w", o.w)->required();
  auto* sample = app.add_subcommand("sample", "draw from P_{x,y} and estimate P(x, y, z)");
  add_xy(sample);
  sample->add_option("-n,--n", o.n, "number of draws")->check(CLI::Range(std::uint64_t{100}, std::uint64_t{1} << 40));
  sample->add_option("--seed", o.seed, "RNG seed");
  sample->add_option("--z", o.z, "threshold z (default x)");
  auto* table = app.add_subcommand("table", "evaluate a grid of (x, y, h) points");
  table->add_option("--grid", o.grid,
                    "axes 'x=...;y=...[;h=...]' (or logx=...). Values are comma lists of numbers and "
                    "a:b:mult geometric ranges, e.g. 'x=1e4:1e6:10;y=30,100;h=-1,0,1'")
      ->required();
  table->add_flag("--no-exact", o.no_exact, "skip the exact oracles");
  auto* verify = app.add_subcommand("verify", "run acceptance suites; exit 0 iff all pass");
  std::string suites;
  for (const auto& s : acceptance::suite_names()) suites += (suites.empty() ? "" : ", ") + s;
  verify->add_option("--suite", o.suite, "one of: " + suites);
  verify->add_option("--tol-file", o.tol_file, "JSON object overriding calibrated constants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (sub == verify) {
      acceptance::Tolerances tol;
      if (!o.tol_file.empty()) tol = acceptance::load_tolerances(o.tol_file);
      const auto names = acceptance::suite_names();
      if (std::find(names.begin(), names.end(), o.suite) == names.end()) {
        throw UsageError("unknown suite '" + o.suite + "'");
      }
      bool all = true;
      acceptance::run_suite(o.suite, tol, [&](const acceptance::CriterionResult& r) {
        out << acceptance::format_result(r) << '\n' << std::flush;
        all = all && r.passed;
      });
      return all ? kOk : kVerifyFailed;
    }

    const Command c(o, *sub);
    std::vector<Row> rows;
    if (sub == alpha) rows = cmd_alpha(c);
    else if (sub == psi) rows = cmd_psi(c);
    else if (sub == bias) rows = cmd_bias(c);
    else if (sub == delta) rows = cmd_delta(c);
    else if (sub == dick) rows = cmd_dickman(c);
    else if (sub == kap) rows = cmd_kappa(c);
    else if (sub == sample) rows = cmd_sample(c);
    else if (sub == table) rows = cmd_table(c);

    std::ofstream file;
    if (!o.out_path.empty()) {
      file.open(o.out_path, std::ios::binary);
      if (!file) throw UsageError("cannot open " + o.out_path);
    }
    std::ostream& dest = o.out_path.empty() ? out : file;
    if (o.format == "json") write_json(dest, rows); else write_csv(dest, rows);
    return kOk;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kResource;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace friable::cli

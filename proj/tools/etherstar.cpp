// etherstar: invariant suites, kernel and symbol tables, quantization check.
//
// Exit codes: 0 pass, 1 check failure, 2 usage or config error, 3 numerical
// failure.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "etherstar/checks.hpp"
#include "etherstar/evolution.hpp"
#include "etherstar/fit.hpp"
#include "etherstar/kernel.hpp"
#include "etherstar/quantization.hpp"
#include "etherstar/report.hpp"
#include "etherstar/starprod.hpp"

using namespace etherstar;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kNumerical = 3 };

struct RunConfig {
  std::string manifold = "flat:1";
  double hbar = 0.2;
  std::uint64_t seed = 7;
  std::string format = "json";
  std::string output;
  bool timings = false;
  // check
  int samples = 20;
  std::string only;
  // kernel
  std::string x, y, z;
  // star
  std::string f, g, points, method = "series";
  int order = 2;
  // evolve
  std::string hamiltonian, times = "0.5,1,2", xs = "0,0";
  bool oracle = false;
  int dim = 128;
  std::string hbar_sweep;
};

// An option bound to a RunConfig field that can also come from the config file.
struct Binding {
  std::string key;
  CLI::Option* opt;
  std::function<void(const json&)> assign;
};

template <class T>
Binding bind_option(CLI::App* app, const std::string& key, T& field, const std::string& help) {
  CLI::Option* opt;
  if constexpr (std::is_same_v<T, bool>)
    opt = app->add_flag("--" + key, field, help);
  else
    opt = app->add_option("--" + key, field, help);
  return {key, opt, [&field, key](const json& j) {
            try {
              field = j.get<T>();
            } catch (const json::exception&) {
              throw DomainError("config: bad value for \"" + key + "\"");
            }
          }};
}

void merge_config(const std::string& path, const std::vector<Binding>& bindings) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("config: top level must be an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const Binding& b : bindings)
      if (b.key == k) {
        known = true;
        if (b.opt->count() == 0) b.assign(v);  // flags win
      }
    if (!known) throw DomainError("config: unknown key \"" + k + "\"");
  }
}

json config_json(const RunConfig& c) {
  return {{"manifold", c.manifold}, {"hbar", c.hbar},   {"seed", c.seed},     {"samples", c.samples},
          {"only", c.only},         {"x", c.x},         {"y", c.y},           {"z", c.z},
          {"f", c.f},               {"g", c.g},         {"points", c.points}, {"method", c.method},
          {"order", c.order},       {"hamiltonian", c.hamiltonian},           {"times", c.times},
          {"xs", c.xs},             {"oracle", c.oracle}, {"dim", c.dim},     {"hbar_sweep", c.hbar_sweep}};
}

// ---- parsing helpers ----

std::vector<double> parse_numbers(const std::string& s, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("cannot parse number \"" + item + "\"");
    }
  }
  return out;
}

/// "lo:hi:count" -> evenly spaced values, or "a,b,c" -> explicit values.
std::vector<double> parse_range(const std::string& s) {
  if (s.find(':') == std::string::npos) return parse_numbers(s);
  const std::vector<double> v = parse_numbers(s, ':');
  if (v.size() != 3 || v[2] < 1 || v[2] != std::floor(v[2])) throw DomainError("range must be lo:hi:count");
  const int n = static_cast<int>(v[2]);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? v[0] : v[0] + (v[1] - v[0]) * i / (n - 1));
  return out;
}

Point make_point(const ManifoldModel& m, const std::vector<double>& c) {
  if (static_cast<int>(c.size()) != m.ambient_dim())
    throw DomainError("point needs " + std::to_string(m.ambient_dim()) + " coordinates");
  Vec v = Eigen::Map<const Vec>(c.data(), static_cast<Eigen::Index>(c.size()));
  if (m.kind() == ModelKind::sphere) {
    if (v.norm() == 0.0) throw DomainError("sphere point must be nonzero");
    v.normalize();
  }
  return Point{v};
}

/// Points as "a,b;c,d" (ambient coordinates) or a grid "r1|r2|..." of ranges,
/// one per ambient coordinate (flat) or (polar, azimuth) angles (sphere).
std::vector<Point> parse_points(const ManifoldModel& m, const std::string& s) {
  if (s.empty()) throw DomainError("empty point specification");
  std::vector<Point> out;
  if (s.find('|') != std::string::npos || s.find(':') != std::string::npos) {
    std::vector<std::vector<double>> axes;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, '|')) axes.push_back(parse_range(item));
    const int want = m.kind() == ModelKind::sphere ? 2 : m.ambient_dim();
    if (static_cast<int>(axes.size()) != want) throw DomainError("grid needs " + std::to_string(want) + " ranges");
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
      std::vector<double> c;
      for (std::size_t k = 0; k < axes.size(); ++k) c.push_back(axes[k][idx[k]]);
      if (m.kind() == ModelKind::sphere)
        c = {std::sin(c[0]) * std::cos(c[1]), std::sin(c[0]) * std::sin(c[1]), std::cos(c[0])};
      out.push_back(make_point(m, c));
      std::size_t k = axes.size();
      while (k-- > 0) {
        if (++idx[k] < axes[k].size()) break;
        idx[k] = 0;
      }
      if (k == static_cast<std::size_t>(-1)) break;
    }
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(make_point(m, parse_numbers(item)));
  return out;
}

json read_json_arg(const std::string& s) {
  try {
    if (!s.empty() && (s.front() == '{' || s.front() == '[')) return json::parse(s);
    std::ifstream in(s);
    if (!in) throw DomainError("cannot open " + s);
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("symbol JSON: " + std::string(e.what()));
  }
}

/// {"terms": [...], "envelope": {"center": [..], "sigma": s}} (envelope optional).
FieldSymbol read_symbol(const std::string& s, int vars, PolySymbol* poly = nullptr) {
  const json j = read_json_arg(s);
  const PolySymbol p = PolySymbol::from_json(j, vars);
  if (poly) *poly = p;
  if (!j.contains("envelope")) return FieldSymbol::from_poly(p);
  try {
    const auto c = j["envelope"].at("center").get<std::vector<double>>();
    const double sigma = j["envelope"].at("sigma").get<double>();
    if (static_cast<int>(c.size()) != vars || !(sigma > 0)) throw DomainError("symbol JSON: bad envelope");
    return FieldSymbol::poly_gaussian(p, Eigen::Map<const Vec>(c.data(), vars), sigma);
  } catch (const json::exception& e) {
    throw DomainError("symbol JSON: " + std::string(e.what()));
  }
}

void emit(const RunConfig& c, const std::string& command, const std::string& status, json header,
          const Table& t) {
  header["manifold"] = c.manifold;
  header["hbar"] = c.hbar;
  header["seed"] = c.seed;
  header["config"] = config_json(c);
  std::ofstream file;
  if (!c.output.empty()) {
    file.open(c.output, std::ios::binary);
    if (!file) throw DomainError("cannot write " + c.output);
  }
  std::ostream& os = c.output.empty() ? std::cout : file;
  if (c.format == "csv")
    write_csv(os, t);
  else
    os << report_json(command, status, header, t).dump(2) << "\n";
}

std::vector<Cell> coords_cells(const Point& p) {
  std::vector<Cell> out;
  for (int i = 0; i < p.coords.size(); ++i) out.emplace_back(p.coords(i));
  return out;
}

std::vector<std::string> coord_names(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// ---- commands ----

int cmd_check(const RunConfig& c) {
  const ModelPtr m = make_model(c.manifold);
  CheckConfig cc;
  cc.seed = c.seed;
  cc.samples = c.samples;
  cc.hbar = c.hbar;
  cc.only = c.only;
  const SuiteReport r = run_checks(*m, cc);
  if (r.checks.empty()) throw DomainError("check: no check matches --only " + c.only);
  const bool ok = r.passed();
  emit(c, "check", ok ? "pass" : "fail", json::object(), suite_table(r, c.timings));
  return ok ? kPass : kFail;
}

int cmd_kernel(const RunConfig& c) {
  const ModelPtr m = make_model(c.manifold);
  if (c.x.empty() || c.y.empty() || c.z.empty()) throw DomainError("kernel: --x, --y and --z are required");
  const Point x = make_point(*m, parse_numbers(c.x));
  const Point y = make_point(*m, parse_numbers(c.y));
  const std::vector<Point> zs = parse_points(*m, c.z);
  Table t;
  t.columns = {"index"};
  for (const char* p : {"x", "y", "z"})
    for (const auto& n : coord_names(p, m->ambient_dim())) t.columns.push_back(n);
  for (const char* n : {"branch", "phase", "amplitude", "hbar", "re", "im", "focal"}) t.columns.push_back(n);
  int focal = 0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    std::vector<Cell> head{static_cast<long long>(i)};
    for (const Point* p : {&x, &y, &zs[i]})
      for (const Cell& v : coords_cells(*p)) head.push_back(v);
    try {
      for (const TriangleSolution& tri : enumerate_branches(*m, x, y, zs[i])) {
        const double ph = phase(*m, tri), am = amplitude(*m, tri);
        const Complex v = std::polar(am, ph / c.hbar);
        std::vector<Cell> row = head;
        for (Cell cell : {Cell(static_cast<long long>(tri.branch_id)), Cell(ph), Cell(am), Cell(c.hbar), Cell(v.real()),
                          Cell(v.imag()), Cell(false)})
          row.push_back(cell);
        t.add(std::move(row));
      }
    } catch (const FocalTriple&) {
      ++focal;
      const double nan = std::nan("");
      std::vector<Cell> row = head;
      for (Cell cell : {Cell(-1LL), Cell(nan), Cell(nan), Cell(c.hbar), Cell(nan), Cell(nan), Cell(true)}) row.push_back(cell);
      t.add(std::move(row));
    }
  }
  const bool all_focal = focal == static_cast<int>(zs.size());
  if (all_focal) std::cerr << "warning: every grid point is focal\n";
  emit(c, "kernel", all_focal ? "warning" : "pass", {{"focal_rows", focal}}, t);
  return all_focal ? kFail : kPass;
}

int cmd_star(const RunConfig& c) {
  const ModelPtr m = make_model(c.manifold);
  if (c.f.empty() || c.g.empty() || c.points.empty()) throw DomainError("star: --f, --g and --points are required");
  const int vars = m->ambient_dim();
  PolySymbol pf(vars), pg(vars);
  const FieldSymbol f = read_symbol(c.f, vars, &pf), g = read_symbol(c.g, vars, &pg);
  const std::vector<Point> pts = parse_points(*m, c.points);
  std::function<Complex(const Point&)> eval;
  if (c.method == "moyal") {
    if (m->kind() != ModelKind::flat) throw DomainError("star: moyal needs a flat manifold");
    const PolySymbol prod = moyal_poly(pf, pg, c.hbar);
    eval = [prod](const Point& z) { return prod.eval(z.coords); };
  } else if (c.method == "series") {
    const SeriesConfig sc{c.hbar, c.order};
    sc.validate();
    eval = [&, sc](const Point& z) { return series_product(*m, f, g, z, sc); };
  } else if (c.method == "quad") {
    if (m->kind() != ModelKind::flat || m->n() != 1) throw DomainError("star: quad needs flat:1");
    eval = [&](const Point& z) { return quad_product(f, g, z, c.hbar); };
  } else {
    throw DomainError("star: --method must be moyal, series or quad");
  }
  Table t;
  t.columns = {"index"};
  for (const auto& n : coord_names("z", vars)) t.columns.push_back(n);
  for (const char* n : {"re", "im", "method"}) t.columns.push_back(n);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Complex v = eval(pts[i]);
    std::vector<Cell> row{static_cast<long long>(i)};
    for (const Cell& cell : coords_cells(pts[i])) row.push_back(cell);
    row.insert(row.end(), {v.real(), v.imag(), c.method});
    t.add(std::move(row));
  }
  emit(c, "star", "pass", {{"method", c.method}, {"order", c.order}}, t);
  return kPass;
}

int cmd_evolve(const RunConfig& c) {
  const ModelPtr m = make_model(c.manifold);
  if (m->kind() != ModelKind::flat || m->n() != 1) throw DomainError("evolve: needs flat:1");
  PolySymbol hp(2);
  if (c.hamiltonian.empty()) {
    hp.add({2, 0}, 0.5);
    hp.add({0, 2}, 0.5);
  }
  const FieldSymbol h = c.hamiltonian.empty() ? FieldSymbol::from_poly(hp) : read_symbol(c.hamiltonian, 2, &hp);
  if ((c.oracle || !c.hbar_sweep.empty()) && !c.hamiltonian.empty() && read_json_arg(c.hamiltonian).contains("envelope"))
    throw DomainError("evolve: the oracle needs a polynomial Hamiltonian");
  const std::vector<double> ts = parse_range(c.times);
  const std::vector<Point> xs = parse_points(*m, c.xs);
  OracleConfig oc;
  oc.dim = c.dim;

  if (!c.hbar_sweep.empty()) {
    // semiclassical error against the oracle over hbar at the first (t, x)
    const std::vector<double> hs = parse_numbers(c.hbar_sweep);
    const double tv = ts.front();
    const Point& x = xs.front();
    std::vector<double> err;
    for (double hb : hs)
      err.push_back(std::abs(evolution_symbol(h, x, tv, hb).value - oracle_symbol(hp, x.coords, tv, hb, oc)));
    const double slope = order_slope(hs, err, 1e-13);
    Table t;
    t.columns = {"t", "x0", "x1", "hbar", "error", "order_slope"};
    for (std::size_t i = 0; i < hs.size(); ++i) t.add({tv, x.coords(0), x.coords(1), hs[i], err[i], slope});
    emit(c, "evolve", "pass", {{"dim", c.dim}, {"order_slope", format_number(slope)}}, t);
    return kPass;
  }

  Table t;
  t.columns = {"t", "x0", "x1", "re", "im", "phase", "amplitude", "oracle_re", "oracle_im", "rel_error", "method", "status"};
  double worst = 0.0;
  int unconverged = 0;
  for (double tv : ts) {
    for (const Point& x : xs) {
      const double nan = std::nan("");
      std::vector<Cell> row{tv, x.coords(0), x.coords(1)};
      try {
        const SymbolSample s = evolution_symbol(h, x, tv, c.hbar);
        row.insert(row.end(), {s.value.real(), s.value.imag(), s.phase, s.amplitude});
        std::string status = "ok";
        if (c.oracle) {
          try {
            const Complex o = oracle_symbol(hp, x.coords, tv, c.hbar, oc);
            const double rel = std::abs(s.value - o) / std::abs(o);
            worst = std::max(worst, rel);
            row.insert(row.end(), {o.real(), o.imag(), rel});
          } catch (const NumericalError&) {
            // the truncated basis cannot resolve this symbol; flag the row
            row.insert(row.end(), {nan, nan, nan});
            status = "oracle_unconverged";
            ++unconverged;
          }
        } else {
          row.insert(row.end(), {nan, nan, nan});
        }
        row.insert(row.end(), {std::string("semiclassical"), status});
      } catch (const FocalTime&) {
        row.insert(row.end(), {nan, nan, nan, nan, nan, nan, nan, std::string("semiclassical"), std::string("focal")});
      }
      t.add(std::move(row));
    }
  }
  json header = {{"oracle", c.oracle}, {"dim", c.dim}};
  if (c.oracle) header["max_rel_error"] = format_number(worst);
  header["oracle_unconverged_rows"] = unconverged;
  emit(c, "evolve", unconverged ? "partial" : "pass", header, t);
  return unconverged ? kNumerical : kPass;
}

int cmd_quantize(const RunConfig& c) {
  const ModelPtr m = make_model(c.manifold);
  const QuantizationReport q = quantization_check(*m, c.hbar);
  const std::string status = q.vacuous ? "vacuous" : (q.passed ? "pass" : "fail");
  Table t;
  t.columns = {"manifold", "hbar", "omega_integral", "chern", "value", "distance", "status"};
  t.add({m->id(), c.hbar, q.omega_integral, static_cast<long long>(q.chern), q.value, q.distance, status});
  emit(c, "quantize-check", status, {{"quadrature_change", format_number(q.quadrature_change)}}, t);
  return q.passed ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ether star-product toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;
  std::vector<Binding> b;

  const auto common = [&](CLI::App* sub) {
    b.push_back(bind_option(sub, "manifold", cfg.manifold, "flat:<n> or sphere"));
    b.push_back(bind_option(sub, "hbar", cfg.hbar, "Planck constant"));
    b.push_back(bind_option(sub, "seed", cfg.seed, "seed of the random generator"));
    b.push_back(bind_option(sub, "format", cfg.format, "json or csv"));
    b.push_back(bind_option(sub, "output", cfg.output, "output file (default stdout)"));
    sub->add_option("--config", config_path, "JSON config merged under the flags");
  };
  CLI::App* check = app.add_subcommand("check", "run the invariant suites");
  common(check);
  b.push_back(bind_option(check, "samples", cfg.samples, "samples per cheap check"));
  b.push_back(bind_option(check, "only", cfg.only, "run checks with this name prefix"));
  b.push_back(bind_option(check, "timings", cfg.timings, "add wall time per check"));

  CLI::App* kernel = app.add_subcommand("kernel", "tabulate kernel branches over z");
  common(kernel);
  b.push_back(bind_option(kernel, "x", cfg.x, "point x, comma separated"));
  b.push_back(bind_option(kernel, "y", cfg.y, "point y, comma separated"));
  b.push_back(bind_option(kernel, "z", cfg.z, "z points 'a,b;c,d' or grid 'lo:hi:n|lo:hi:n'"));

  CLI::App* star = app.add_subcommand("star", "evaluate f * g");
  common(star);
  b.push_back(bind_option(star, "f", cfg.f, "symbol JSON (inline or file)"));
  b.push_back(bind_option(star, "g", cfg.g, "symbol JSON (inline or file)"));
  b.push_back(bind_option(star, "points", cfg.points, "evaluation points or grid"));
  b.push_back(bind_option(star, "method", cfg.method, "moyal, series or quad"));
  b.push_back(bind_option(star, "order", cfg.order, "series order (0, 1, 2)"));

  CLI::App* evolve = app.add_subcommand("evolve", "semiclassical evolution symbol");
  common(evolve);
  b.push_back(bind_option(evolve, "hamiltonian", cfg.hamiltonian, "polynomial JSON (default oscillator)"));
  b.push_back(bind_option(evolve, "times", cfg.times, "times 'a,b,c' or 'lo:hi:n'"));
  b.push_back(bind_option(evolve, "xs", cfg.xs, "x points or grid"));
  b.push_back(bind_option(evolve, "oracle", cfg.oracle, "compare with the operator oracle"));
  b.push_back(bind_option(evolve, "dim", cfg.dim, "oracle basis dimension"));
  b.push_back(bind_option(evolve, "hbar-sweep", cfg.hbar_sweep, "hbar values for the error order fit"));

  CLI::App* quant = app.add_subcommand("quantize-check", "integrality of the quantization class");
  common(quant);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (!config_path.empty()) {
      // merge only the keys whose options exist on the chosen subcommand
      std::vector<Binding> active;
      CLI::App* chosen = app.get_subcommands().front();
      for (const Binding& x : b)
        if (chosen->get_option_no_throw("--" + x.key) == x.opt) active.push_back(x);
      merge_config(config_path, active);
    }
    if (cfg.format != "json" && cfg.format != "csv") throw DomainError("--format must be json or csv");
    if (!(cfg.hbar > 0.0)) throw DomainError("--hbar must be positive");
    if (check->parsed()) return cmd_check(cfg);
    if (kernel->parsed()) return cmd_kernel(cfg);
    if (star->parsed()) return cmd_star(cfg);
    if (evolve->parsed()) return cmd_evolve(cfg);
    return cmd_quantize(cfg);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "jetgeo/error.hpp"
#include "jetgeo/geodesy.hpp"
#include "jetgeo/io.hpp"
#include "jetgeo/selftest.hpp"
#include "jetgeo/symmetry.hpp"
#include "table.hpp"

using namespace jetgeo;
using cli::Cell;
using cli::Table;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

// Bad arguments or input files; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  std::optional<std::uint64_t> seed;
  int samples = 200;
  std::optional<double> tol;
  std::string format = "csv";
  std::string out;

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("JETGEO_SEED")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0') throw UsageError(std::string("JETGEO_SEED is not an unsigned integer: ") + env);
      return v;
    }
    return 0;
  }
  double tolerance() const { return tol.value_or(1e-10); }
  cli::Format table_format() const { return format == "json" ? cli::Format::Json : cli::Format::Csv; }

  SamplingOptions sampling(const ConnectionSpec& spec) const {
    SamplingOptions o;
    o.points = samples;
    o.tol = tolerance();
    o.seed = resolved_seed();
    return spec.sampling(o);
  }

  void emit(const Table& table) const {
    if (out.empty()) {
      table.write(std::cout, table_format());
      return;
    }
    std::ofstream f(out);
    if (!f) throw UsageError("cannot write " + out);
    table.write(f, table_format());
  }
};

std::string index_label(std::initializer_list<int> zero_based) {
  std::string s;
  for (int i : zero_based) s += (s.empty() ? "" : ".") + std::to_string(i + 1);
  return s;
}

int resolve_n(const ConnectionSpec& spec, const std::optional<int>& n) {
  if (n) {
    if (*n < 1 || *n >= spec.frame().dimension())
      throw UsageError("--n must lie between 1 and " + std::to_string(spec.frame().dimension() - 1));
    return *n;
  }
  if (auto declared = spec.n()) return *declared;
  throw UsageError("the split n is neither in the spec nor given with --n");
}

Connection resolve_theta(const std::string& path, int n) {
  if (path.empty()) return Connection(parameter_frame(n));
  const auto spec = load_connection_spec(path);
  if (spec.frame().dimension() != n)
    throw UsageError("parameter connection has dimension " + std::to_string(spec.frame().dimension()) + ", expected " +
                     std::to_string(n));
  return spec.connection;
}

std::vector<std::string> jet_columns(const SubJet& p, const CoordinateFrame& e) {
  std::vector<std::string> cols(e.names().begin(), e.names().end());
  for (int order = 1; order <= p.order(); ++order)
    for (int k = p.n; k < p.dimension(); ++k)
      for (const auto& s : multi_indices(p.n, order)) {
        std::string name = e.name(k) + "_";
        for (std::size_t i = 0; i < s.indices().size(); ++i) name += (i ? "." : "") + e.name(s.indices()[i]);
        cols.push_back(name);
      }
  return cols;
}

std::vector<std::string> jet_columns(const SecJet& t, const CoordinateFrame& params, const CoordinateFrame& e) {
  std::vector<std::string> cols(params.names().begin(), params.names().end());
  cols.insert(cols.end(), e.names().begin(), e.names().end());
  for (int order = 1; order <= t.order(); ++order)
    for (int a = 0; a < t.l; ++a)
      for (const auto& s : multi_indices(t.n, order)) {
        std::string name = e.name(a) + "_";
        for (std::size_t i = 0; i < s.indices().size(); ++i) name += (i ? "." : "") + params.name(s.indices()[i]);
        cols.push_back(name);
      }
  return cols;
}

std::vector<double> jet_values(const SubJet& p) {
  std::vector<double> v = p.base;
  for (int order = 1; order <= p.order(); ++order)
    for (int k = p.n; k < p.dimension(); ++k)
      for (const auto& s : multi_indices(p.n, order)) v.push_back(p.d(k, s));
  return v;
}

std::vector<double> jet_values(const SecJet& t) {
  std::vector<double> v = t.x;
  v.insert(v.end(), t.u.begin(), t.u.end());
  for (int order = 1; order <= t.order(); ++order)
    for (int a = 0; a < t.l; ++a)
      for (const auto& s : multi_indices(t.n, order)) v.push_back(t.d(a, s));
  return v;
}

void append(std::vector<Cell>& row, std::span<const double> values) {
  for (double v : values) row.emplace_back(v);
}

// ---------------------------------------------------------------------------
// invariants

struct InvariantRow {
  std::string family;
  std::string index;
  Expression expr;
};

std::vector<InvariantRow> invariant_rows(const Connection& g, std::optional<int> n) {
  std::vector<InvariantRow> rows;
  const int l = g.dimension();
  const auto pi = thomas_pi(g);
  for (int a = 0; a < l; ++a)
    for (int c = 0; c < l; ++c)
      for (int b = 0; b < l; ++b) rows.push_back({"pi", index_label({a, c, b}), simplify(pi(a, c, b))});
  if (!n) return rows;
  const auto inv = grass_invariants(g, *n);
  for (int lam = 0; lam < *n; ++lam)
    for (int k = *n; k < l; ++k)
      for (int xi = 0; xi < *n; ++xi) rows.push_back({"g0", index_label({lam, k, xi}), simplify(inv.g0(lam, k, xi))});
  for (int lam = 0; lam < *n; ++lam)
    for (int k = *n; k < l; ++k)
      for (int i = *n; i < l; ++i)
        for (int beta = 0; beta < *n; ++beta)
          for (int xi = 0; xi < *n; ++xi)
            rows.push_back({"g1", index_label({lam, k, i, beta, xi}), simplify(inv.g1(lam, k, i, beta, xi))});
  for (int j = *n; j < l; ++j)
    for (int k = *n; k < l; ++k)
      for (int i = *n; i < l; ++i)
        for (int alpha = 0; alpha < *n; ++alpha)
          for (int beta = 0; beta < *n; ++beta)
            for (int lam = 0; lam < *n; ++lam)
              for (int xi = 0; xi < *n; ++xi)
                rows.push_back({"g2", index_label({j, k, i, alpha, beta, lam, xi}),
                                simplify(inv.g2(j, k, i, alpha, beta, lam, xi))});
  for (int j = *n; j < l; ++j)
    for (int beta = 0; beta < *n; ++beta)
      for (int i = *n; i < l; ++i) rows.push_back({"g3", index_label({j, beta, i}), simplify(inv.g3(j, beta, i))});
  return rows;
}

int cmd_invariants(const Global& global, const std::string& path, std::optional<int> n_flag,
                   const std::string& compare) {
  const auto spec = load_connection_spec(path);
  std::optional<int> n;
  if (n_flag || spec.n()) n = resolve_n(spec, n_flag);
  if (!n) std::cerr << "no split n given: printing the projective invariants only\n";
  const auto rows = invariant_rows(spec.connection, n);

  if (compare.empty()) {
    Table table({"family", "index", "expression"});
    for (const auto& r : rows) table.add({r.family, r.index, to_string(r.expr)});
    global.emit(table);
    return kExitOk;
  }

  const auto other = load_connection_spec(compare);
  if (!other.frame().same_coordinates(spec.frame())) throw UsageError("the two specs use different coordinates");
  const auto other_rows = invariant_rows(other.connection, n);
  SamplingOptions opts = global.sampling(spec);
  opts.singular_points.insert(opts.singular_points.end(), other.singular_points.begin(), other.singular_points.end());
  std::vector<double> dev(rows.size(), 0.0);
  int used = 0;
  for (int i = 0; used < opts.points && i < 20 * opts.points; ++i) {
    const auto p = sample_point(spec.frame(), opts, 0, static_cast<std::uint64_t>(i));
    const Assignment at(spec.frame(), p);
    try {
      std::vector<double> d(rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) d[k] = std::abs(evaluate(rows[k].expr, at) - evaluate(other_rows[k].expr, at));
      for (std::size_t k = 0; k < rows.size(); ++k) dev[k] = std::max(dev[k], d[k]);
      ++used;
    } catch (const DomainError&) {
    }
  }
  if (used == 0) throw Error("no sample point where both specs can be evaluated");
  Table table({"family", "index", "deviation", "status"});
  double worst = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    worst = std::max(worst, dev[k]);
    table.add({rows[k].family, rows[k].index, dev[k], std::string(dev[k] <= opts.tol ? "equal" : "differ")});
  }
  global.emit(table);
  const bool same = worst <= opts.tol;
  std::cerr << (same ? "IDENTICAL" : "DIFFERENT") << " max_deviation=" << Table::number(worst) << " points=" << used
            << " tol=" << opts.tol << "\n";
  return same ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------------------
// equivalent

int cmd_equivalent(const Global& global, const std::string& path1, const std::string& path2, std::optional<int> n_flag) {
  const auto a = load_connection_spec(path1);
  const auto b = load_connection_spec(path2);
  if (a.frame().dimension() != b.frame().dimension())
    throw UsageError("dimension mismatch: " + std::to_string(a.frame().dimension()) + " vs " +
                     std::to_string(b.frame().dimension()));
  if (!a.frame().same_coordinates(b.frame())) throw UsageError("the two specs use different coordinates");
  const int n = resolve_n(a, n_flag);
  SamplingOptions opts = global.sampling(a);
  opts.singular_points.insert(opts.singular_points.end(), b.singular_points.begin(), b.singular_points.end());
  const auto r = grass_equivalent(a.connection, b.connection, n, opts);
  const std::string verdict = r.equivalent ? "EQUIVALENT" : "NOT";
  Table table({"verdict", "max_deviation", "invariants", "invariant_deviation", "samples"});
  table.add({verdict, r.max_deviation, std::string(r.invariants_equal ? "equal" : "different"), r.invariant_deviation,
             static_cast<double>(r.samples_used)});
  global.emit(table);
  std::cerr << verdict << " max_deviation=" << Table::number(r.max_deviation)
            << " invariants=" << (r.invariants_equal ? "equal" : "different") << " tol=" << opts.tol << "\n";
  return r.equivalent ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------------------
// residual

int cmd_residual(const Global& global, const std::string& path, const std::string& jets_path, const std::string& mode,
                 const std::string& theta_path, std::optional<int> n_flag) {
  const auto spec = load_connection_spec(path);
  const auto jets = load_jets(jets_path);
  if (jets.empty()) throw UsageError("the jet file is empty");
  const auto& g = spec.connection;
  const int l = g.dimension();
  const bool param = mode == "param";

  // all jets must share kind, n and order so that the table has one header
  const bool sec = std::holds_alternative<SecJet>(jets.front());
  auto shape = [](const Jet& j) {
    if (const auto* t = std::get_if<SecJet>(&j)) return std::tuple(true, t->n, t->l, t->order());
    const auto& p = std::get<SubJet>(j);
    return std::tuple(false, p.n, p.dimension(), p.order());
  };
  const auto first = shape(jets.front());
  for (const auto& j : jets)
    if (shape(j) != first) throw UsageError("all jets in one file must have the same kind, n, l and r");
  const auto [_, n, jl, r] = first;
  if (jl != l) throw UsageError("jets have l=" + std::to_string(jl) + " but the connection has dimension " + std::to_string(l));
  if (r < 2) throw UsageError("residuals need jets of order r >= 2");
  if (n_flag && *n_flag != n) throw UsageError("--n does not match the jets");
  if (spec.n() && *spec.n() != n) throw UsageError("the jets' n does not match the spec's n");
  if (param && !sec) throw UsageError("mode param needs secjet entries, the file has subjets");
  if (!param && mode != "unparam") throw UsageError("--mode must be param or unparam");
  if (!theta_path.empty() && !param) throw UsageError("--theta only applies to mode param");

  const CoordinateFrame e = g.frame();
  const CoordinateFrame params = parameter_frame(n);
  const Connection theta = resolve_theta(theta_path, n);
  std::vector<std::string> cols = sec ? jet_columns(std::get<SecJet>(jets.front()), params, e)
                                      : jet_columns(std::get<SubJet>(jets.front()), e.with_split(n));
  const std::size_t coordinate_columns = cols.size();
  if (param) {
    for (int c = 0; c < l; ++c)
      for (int xi = 0; xi < n; ++xi)
        for (int lam = 0; lam < n; ++lam) cols.push_back("res_" + e.name(c) + "_" + params.name(xi) + "." + params.name(lam));
  } else {
    for (int k = n; k < l; ++k)
      for (int lam = 0; lam < n; ++lam)
        for (int xi = 0; xi < n; ++xi) cols.push_back("res_" + e.name(k) + "_" + e.name(lam) + "." + e.name(xi));
  }
  cols.push_back("max_abs");
  cols.push_back("status");
  const std::size_t residual_columns = cols.size() - coordinate_columns - 2;

  Table table(cols);
  int errors = 0;
  double worst = 0;
  for (const auto& jet : jets) {
    std::vector<Cell> row;
    if (sec) {
      append(row, jet_values(std::get<SecJet>(jet)));
    } else {
      append(row, jet_values(std::get<SubJet>(jet)));
    }
    try {
      std::vector<double> values;
      double max_abs = 0;
      if (param) {
        const auto res = param_residual2(g, theta, std::get<SecJet>(jet));
        values.assign(res.values().begin(), res.values().end());
        max_abs = res.max_abs();
      } else {
        const SubJet q = sec ? cover2(std::get<SecJet>(jet)) : std::get<SubJet>(jet);
        const auto res = residual2(g, q);
        values.assign(res.values().begin(), res.values().end());
        max_abs = res.max_abs();
      }
      append(row, values);
      row.emplace_back(max_abs);
      row.emplace_back(std::string("ok"));
      worst = std::max(worst, max_abs);
    } catch (const SingularJacobian& ex) {
      ++errors;
      row.resize(coordinate_columns + residual_columns + 1);
      row.emplace_back(std::string("error: ") + ex.what());
    } catch (const DomainError& ex) {
      ++errors;
      row.resize(coordinate_columns + residual_columns + 1);
      row.emplace_back(std::string("error: ") + ex.what());
    }
    table.add(std::move(row));
  }
  global.emit(table);
  std::cerr << jets.size() << " jets, " << errors << " error rows, max residual " << Table::number(worst) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// geodesic

int cmd_geodesic(const Global& global, const std::string& path, const std::vector<double>& start,
                 const std::vector<double>& velocity, double h, int steps, double t0, const std::string& theta_path) {
  const auto spec = load_connection_spec(path);
  if (spec.n() && *spec.n() != 1) throw UsageError("geodesics need a spec with n = 1");
  if (!(h > 0)) throw UsageError("--h must be positive");
  if (steps < 0) throw UsageError("--steps must be non-negative");
  const int l = spec.frame().dimension();
  if (static_cast<int>(start.size()) != l || static_cast<int>(velocity.size()) != l)
    throw UsageError("--start and --velocity need " + std::to_string(l) + " values each");
  const Connection theta = resolve_theta(theta_path, 1);
  const auto& e = spec.frame();
  const Trajectory tr = integrate_geodesic(spec.connection, theta, start, velocity, h, steps, t0);

  std::vector<std::string> cols{"t"};
  for (const auto& name : e.names()) cols.push_back(name);
  for (const auto& name : e.names()) cols.push_back("d_" + name);
  cols.push_back("residual");
  cols.push_back("cover_residual");
  const bool metric = !spec.metric.empty();
  if (metric) {
    cols.push_back("speed");
    cols.push_back("speed_drift");
  }
  cols.push_back("status");

  std::vector<Expression> metric_entries;
  for (const auto& row : spec.metric) metric_entries.insert(metric_entries.end(), row.begin(), row.end());
  auto speed = [&](const SecJet& p) {
    const auto gm = evaluate_all(metric_entries, e, p.u);
    double s = 0;
    for (int a = 0; a < l; ++a)
      for (int b = 0; b < l; ++b) s += gm[static_cast<std::size_t>(a * l + b)] * p.first(a, 0) * p.first(b, 0);
    return s;
  };

  Table table(cols);
  std::optional<double> s0;
  double drift = 0;
  std::optional<std::string> failure = tr.failure;
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    const SecJet& p = tr.points[i];
    std::vector<Cell> row{p.x[0]};
    append(row, p.u);
    for (int a = 0; a < l; ++a) row.emplace_back(p.first(a, 0));
    try {
      row.emplace_back(param_residual2(spec.connection, theta, p).max_abs());
      try {
        row.emplace_back(residual2(spec.connection, cover2(p)).max_abs());
      } catch (const SingularJacobian&) {
        row.emplace_back(std::monostate{});
      }
      if (metric) {
        const double s = speed(p);
        if (!s0) s0 = s;
        drift = std::max(drift, std::abs(s - *s0));
        row.emplace_back(s);
        row.emplace_back(std::abs(s - *s0));
      }
    } catch (const DomainError& ex) {
      failure = std::string("evaluation failed at t=") + Table::number(p.x[0]) + ": " + ex.what();
      break;
    }
    row.resize(cols.size() - 1);
    row.emplace_back(std::string("ok"));
    table.add(std::move(row));
  }
  if (failure) {
    std::vector<Cell> row(cols.size() - 1);
    row.emplace_back("error: " + *failure);
    table.add(std::move(row));
  }
  global.emit(table);
  std::cerr << tr.points.size() << " points";
  if (metric) std::cerr << ", max speed drift " << Table::number(drift);
  if (failure) std::cerr << ", stopped: " << *failure;
  std::cerr << "\n";
  return failure ? kExitDomain : kExitOk;
}

// ---------------------------------------------------------------------------
// cover-check

int cmd_cover_check(const Global& global, const std::string& path, const std::string& theta_path,
                    std::optional<int> n_flag) {
  const auto spec = load_connection_spec(path);
  const int n = resolve_n(spec, n_flag);
  const Connection theta = resolve_theta(theta_path, n);
  const auto& g = spec.connection;
  const int l = g.dimension();
  const SamplingOptions opts = global.sampling(spec);
  const CoordinateFrame frame = j1pro_frame(theta.frame(), g.frame());

  std::vector<std::string> cols{"index"};
  cols.insert(cols.end(), frame.names().begin(), frame.names().end());
  for (const char* c : {"commutation", "diagram", "status", "note"}) cols.emplace_back(c);
  Table table(cols);
  CheckReport report;
  report.tol = opts.tol;
  for (int i = 0; i < opts.points; ++i) {
    CheckRow row;
    row.index = static_cast<std::uint64_t>(i);
    double commutation = 0;
    double diagram = 0;
    try {
      const SecJet t = sample_secjet(g.frame(), theta.frame(), opts, 10, row.index);
      row.point = coordinates(t);
      const SubJet lhs = cover2(ddot_gamma_pro(g, theta, t));
      const SubJet rhs = ddot_gamma(g, cover1(t));
      for (int k = n; k < l; ++k)
        for (const auto& s : multi_indices(n, 2)) commutation = std::max(commutation, std::abs(lhs.d(k, s) - rhs.d(k, s)));
      Rng rng = make_rng(opts.seed, 11, row.index);
      std::vector<double> v(static_cast<std::size_t>(frame.dimension()));
      for (auto& c : v) c = uniform(rng, -1, 1);
      const auto a = cover1_pushforward(t, vertical_part(dot_gamma_pro(g, theta, t), t, v));
      const SubJet p = cover1(t);
      const auto b = vertical_part(dot_gamma(g, p), p, cover1_pushforward(t, v));
      for (std::size_t k = 0; k < a.size(); ++k) diagram = std::max(diagram, std::abs(a[k] - b[k]));
      row.residual = std::max(commutation, diagram);
      row.passed = row.residual <= opts.tol;
    } catch (const DomainError& ex) {
      row.skipped = true;
      row.note = ex.what();
    } catch (const SingularJacobian& ex) {
      row.skipped = true;
      row.note = ex.what();
    }
    std::vector<Cell> cells{static_cast<double>(i)};
    if (row.point.empty()) {
      cells.resize(1 + static_cast<std::size_t>(frame.dimension()) + 2);
    } else {
      append(cells, row.point);
      cells.emplace_back(commutation);
      cells.emplace_back(diagram);
    }
    cells.emplace_back(std::string(row.skipped ? "skipped" : row.passed ? "pass" : "fail"));
    cells.emplace_back(row.note);
    table.add(std::move(cells));
    report.worst = std::max(report.worst, row.residual);
    report.rows.push_back(std::move(row));
  }
  global.emit(table);
  std::cerr << report.summary() << " worst=" << Table::number(report.worst) << "\n";
  return report.passed() ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------------------
// symmetry-check

std::vector<std::string> report_columns(const CoordinateFrame& frame) {
  std::vector<std::string> cols{"index"};
  cols.insert(cols.end(), frame.names().begin(), frame.names().end());
  for (const char* c : {"residual", "status", "note"}) cols.emplace_back(c);
  return cols;
}

Table report_table(const CheckReport& report, const CoordinateFrame& frame) {
  Table table(report_columns(frame));
  for (const auto& row : report.rows) {
    std::vector<Cell> cells{static_cast<double>(row.index)};
    if (row.point.empty()) {
      cells.resize(1 + static_cast<std::size_t>(frame.dimension()));
    } else {
      append(cells, row.point);
    }
    if (row.skipped) {
      cells.emplace_back(std::monostate{});
    } else {
      cells.emplace_back(row.residual);
    }
    cells.emplace_back(std::string(row.skipped ? "skipped" : row.passed ? "pass" : "fail"));
    cells.emplace_back(row.note);
    table.add(std::move(cells));
  }
  return table;
}

int cmd_symmetry_check(const Global& global, const std::string& path, const std::string& map_path, bool orbit,
                       const std::string& theta_path, std::optional<int> n_flag) {
  const auto spec = load_connection_spec(path);
  const int n = resolve_n(spec, n_flag);
  const auto& g = spec.connection;
  const SamplingOptions opts = global.sampling(spec);
  if (orbit == !map_path.empty()) throw UsageError("give exactly one of --map and --orbit");

  if (orbit) {
    const auto r = orbit_quotient_check(g, n, opts);
    const bool ok = r.samples > 0 && std::max({r.constancy, r.preimage, r.factoring}) <= opts.tol;
    Table table({"constancy", "preimage", "factoring", "samples", "maps_per_sample", "status"});
    table.add({r.constancy, r.preimage, r.factoring, static_cast<double>(r.samples), static_cast<double>(r.maps_per_sample),
               std::string(ok ? "pass" : "fail")});
    global.emit(table);
    std::cerr << (ok ? "PASS " : "FAIL ") << r.samples << "/" << opts.points << " tol=" << opts.tol << "\n";
    return ok ? kExitOk : kExitNegative;
  }

  const auto sym = load_symmetry_spec(map_path, g.frame(), n);
  const Connection theta = resolve_theta(theta_path, n);
  CheckReport report;
  CoordinateFrame frame;
  if (sym.map) {
    if (!theta_path.empty() && sym.map->kind() != JetKind::Section) throw UsageError("--theta only applies to section maps");
    report = preserves_distribution(*sym.map, g, n, opts, &theta);
    frame = sym.map->frame();
  } else if (sym.field) {
    if (!theta_path.empty() && sym.field->kind() != JetKind::Section) throw UsageError("--theta only applies to section fields");
    report = field_preserves_distribution(*sym.field, g, n, opts, &theta);
    frame = sym.field->frame();
  } else if (sym.affine) {
    report = affine_symmetry_check(g, theta, *sym.affine, opts);
    frame = j1pro_frame(theta.frame(), g.frame());
  } else {
    report = reparametrization_check(g, theta, *sym.reparametrization, opts);
    frame = j1pro_frame(theta.frame(), g.frame());
  }
  global.emit(report_table(report, frame));
  std::cerr << report.summary() << " worst=" << Table::number(report.worst);
  if (report.skipped_count()) std::cerr << " skipped=" << report.skipped_count();
  std::cerr << "\n";
  return report.passed() ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------------------
// selftest

int cmd_selftest(const Global& global) {
  SelftestConfig config;
  config.seed = global.resolved_seed();
  config.tol = global.tol;
  Table table({"id", "criterion", "measurement", "value", "relation", "bound", "status", "note"});
  int passed = 0;
  for (int id = 1; id <= kCriterionCount; ++id) {
    const auto r = run_criterion(id, config);
    std::cerr << r.line() << "\n";
    if (r.passed()) ++passed;
    for (const auto& m : r.measurements)
      table.add({static_cast<double>(id), r.name, m.label, m.value, std::string(m.exceed ? ">" : "<="), m.bound,
                 std::string(m.ok() ? "PASS" : "FAIL"), std::string()});
    if (!r.failure.empty())
      table.add({static_cast<double>(id), r.name, std::string("error"), std::monostate{}, std::monostate{}, std::monostate{},
                 std::string("FAIL"), r.failure});
  }
  global.emit(table);
  std::cerr << passed << " of " << kCriterionCount << " criteria passed\n";
  return passed == kCriterionCount ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Totally geodesic submanifolds and n-Grassmannian structures of linear connections"};
  app.require_subcommand(1);
  app.fallthrough();

  Global global;
  app.add_option("--seed", global.seed, "Random seed (falls back to JETGEO_SEED, then 0)");
  app.add_option("--samples", global.samples, "Number of sample points")->check(CLI::PositiveNumber);
  app.add_option("--tol", global.tol, "Tolerance (default 1e-10; for selftest it replaces the stated tolerances)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", global.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", global.out, "Write the report to this file instead of standard output");

  std::optional<int> n;
  std::string spec_path;
  std::string spec2_path;
  std::string theta_path;

  auto* invariants = app.add_subcommand("invariants", "Print projective and Grassmannian invariants");
  invariants->add_option("spec", spec_path, "Connection spec")->required();
  invariants->add_option("--n", n, "Split n (defaults to the spec's n)");
  invariants->add_option("--compare", spec2_path, "Compare the tables with a second spec");

  auto* equivalent = app.add_subcommand("equivalent", "Decide n-Grassmannian equivalence of two connections");
  equivalent->add_option("spec1", spec_path, "First connection spec")->required();
  equivalent->add_option("spec2", spec2_path, "Second connection spec")->required();
  equivalent->add_option("--n", n, "Split n (defaults to the first spec's n)");

  std::string jets_path;
  std::string mode = "unparam";
  auto* residual = app.add_subcommand("residual", "Evaluate the totally-geodesic residuals at jets from a file");
  residual->add_option("spec", spec_path, "Connection spec")->required();
  residual->add_option("--jets", jets_path, "Jet file")->required();
  residual->add_option("--mode", mode, "param or unparam")->check(CLI::IsMember({"param", "unparam"}));
  residual->add_option("--theta", theta_path, "Connection on the parameter space (flat if omitted)");
  residual->add_option("--n", n, "Split n");

  std::vector<double> start;
  std::vector<double> velocity;
  double h = 0;
  int steps = 0;
  double t0 = 0;
  auto* geodesic = app.add_subcommand("geodesic", "Integrate a parametrized geodesic with RK4");
  geodesic->set_help_flag("--help", "Print this help message and exit");
  geodesic->add_option("spec", spec_path, "Connection spec")->required();
  geodesic->add_option("--start", start, "Initial point, comma separated")->required()->delimiter(',');
  geodesic->add_option("--velocity", velocity, "Initial velocity, comma separated")->required()->delimiter(',');
  geodesic->add_option("--h", h, "Step size")->required();
  geodesic->add_option("--steps", steps, "Number of steps")->required();
  geodesic->add_option("--t0", t0, "Initial parameter value");
  geodesic->add_option("--theta", theta_path, "Connection on the parameter line (flat if omitted)");

  auto* cover = app.add_subcommand("cover-check", "Check that the parametrized equation covers the unparametrized one");
  cover->add_option("spec", spec_path, "Connection spec")->required();
  cover->add_option("--theta", theta_path, "Connection on the parameter space (flat if omitted)");
  cover->add_option("--n", n, "Split n");

  std::string map_path;
  bool orbit = false;
  auto* symmetry = app.add_subcommand("symmetry-check", "Check a candidate symmetry or the affine orbit structure");
  symmetry->add_option("spec", spec_path, "Connection spec")->required();
  symmetry->add_option("--map", map_path, "Symmetry spec file");
  symmetry->add_flag("--orbit", orbit, "Check the affine orbits of section jets instead");
  symmetry->add_option("--theta", theta_path, "Connection on the parameter space (flat if omitted)");
  symmetry->add_option("--n", n, "Split n");

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*invariants) return cmd_invariants(global, spec_path, n, spec2_path);
    if (*equivalent) return cmd_equivalent(global, spec_path, spec2_path, n);
    if (*residual) return cmd_residual(global, spec_path, jets_path, mode, theta_path, n);
    if (*geodesic) return cmd_geodesic(global, spec_path, start, velocity, h, steps, t0, theta_path);
    if (*cover) return cmd_cover_check(global, spec_path, theta_path, n);
    if (*symmetry) return cmd_symmetry_check(global, spec_path, map_path, orbit, theta_path, n);
    if (*selftest) return cmd_selftest(global);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

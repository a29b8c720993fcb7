#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jetgeo/connection.hpp"
#include "jetgeo/error.hpp"
#include "jetgeo/expr.hpp"
#include "jetgeo/geodesy.hpp"
#include "jetgeo/io.hpp"
#include "jetgeo/jets.hpp"
#include "jetgeo/selftest.hpp"
#include "jetgeo/symmetry.hpp"

namespace py = pybind11;
using namespace jetgeo;

namespace {

CoordinateFrame make_frame(const std::vector<std::string>& coords, std::optional<int> split) {
  return CoordinateFrame(coords, split);
}

std::vector<Expression> parse_all(const std::vector<std::string>& texts, const CoordinateFrame& frame) {
  std::vector<Expression> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(parse(t, frame));
  return out;
}

std::vector<std::string> print_all(std::span<const Expression> values) {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (const auto& e : values) out.push_back(to_string(e));
  return out;
}

Connection flat_theta(int n) { return Connection(parameter_frame(n)); }

int resolve_n(const Connection& g, std::optional<int> n) {
  if (n) return *n;
  const int split = g.frame().split();
  if (split >= g.dimension()) throw BadSplit("no split given and the connection frame has none");
  return split;
}

py::dict report_dict(const CheckReport& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict d;
    d["index"] = row.index;
    d["point"] = row.point;
    d["residual"] = row.residual;
    d["passed"] = row.passed;
    d["skipped"] = row.skipped;
    d["note"] = row.note;
    rows.append(d);
  }
  py::dict out;
  out["passed"] = r.passed();
  out["worst"] = r.worst;
  out["tol"] = r.tol;
  out["checked"] = r.checked();
  out["skipped"] = r.skipped_count();
  out["summary"] = r.summary();
  out["rows"] = rows;
  return out;
}

CheckReport check_symmetry(const Connection& g, const std::string& spec_text, std::optional<int> n_arg,
                           const SamplingOptions& opts, const Connection* theta_arg) {
  const int n = resolve_n(g, n_arg);
  const Connection theta = theta_arg ? *theta_arg : flat_theta(n);
  const auto sym = parse_symmetry_spec(spec_text, g.frame(), n);
  if (sym.map) return preserves_distribution(*sym.map, g, n, opts, &theta);
  if (sym.field) return field_preserves_distribution(*sym.field, g, n, opts, &theta);
  if (sym.affine) return affine_symmetry_check(g, theta, *sym.affine, opts);
  return reparametrization_check(g, theta, *sym.reparametrization, opts);
}

// Derivative lists use the same 1-based convention as the jet file format.
template <class J>
py::list derivs_list(const J& jet, int first_component) {
  py::list out;
  for (int order = 1; order <= jet.order(); ++order) {
    for (const auto& sigma : multi_indices(jet.n, order)) {
      for (int c = 0; c < jet.derivs.components(); ++c) {
        std::vector<int> s;
        for (int i : sigma.indices()) s.push_back(i);
        out.append(py::make_tuple(c + first_component, s, jet.derivs.get(c, sigma)));
      }
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_jetgeo, m) {
  m.doc() = "Jet-space geometry of totally geodesic submanifolds";

  static py::exception<Error> base_error(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base_error.ptr());
  py::register_exception<SyntaxError>(m, "ExpressionSyntaxError", base_error.ptr());
  py::register_exception<UnknownSymbol>(m, "UnknownSymbol", base_error.ptr());
  py::register_exception<MissingSymbol>(m, "MissingSymbol", base_error.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base_error.ptr());
  py::register_exception<FrameMismatch>(m, "FrameMismatch", base_error.ptr());
  py::register_exception<BadSplit>(m, "BadSplit", base_error.ptr());
  py::register_exception<InconsistentPerturbation>(m, "InconsistentPerturbation", base_error.ptr());
  py::register_exception<SingularJacobian>(m, "SingularJacobian", base_error.ptr());
  py::register_exception<LoadError>(m, "LoadError", base_error.ptr());

  // expressions

  py::class_<Expression>(m, "Expression")
      .def(py::init<long long>())
      .def_static("symbol", &Expression::symbol)
      .def("is_zero", &Expression::is_zero)
      .def("__str__", [](const Expression& e) { return to_string(e); })
      .def("__repr__", [](const Expression& e) { return "Expression('" + to_string(e) + "')"; })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self / py::self)
      .def(-py::self)
      .def("__pow__", [](const Expression& e, int k) { return pow(e, k); })
      .def("__eq__", [](const Expression& a, const Expression& b) { return structurally_equal(a, b); })
      .def("__hash__", [](const Expression& e) { return py::hash(py::str(to_string(e))); });

  m.def("parse", [](const std::string& text, const std::vector<std::string>& coords) {
    return parse(text, make_frame(coords, std::nullopt));
  }, py::arg("text"), py::arg("coords"), "Parse infix text in the given coordinates.");
  m.def("simplify", &simplify);
  m.def("differentiate", [](const Expression& e, const std::string& coord) { return differentiate(e, coord); },
        py::arg("expr"), py::arg("coord"));
  m.def("evaluate", [](const Expression& e, const std::map<std::string, double>& values) {
    Assignment a;
    for (const auto& [name, v] : values) a.set(name, v);
    return evaluate(e, a);
  }, py::arg("expr"), py::arg("values"));
  m.def("symbols", &symbols);
  m.def("expression_grammar", [] { return std::string(expression_grammar()); });

  // connections

  py::class_<Connection>(m, "Connection")
      .def(py::init([](const std::vector<std::string>& coords, std::optional<int> n) {
             return Connection(make_frame(coords, n));
           }),
           py::arg("coords"), py::arg("n") = py::none(), "The flat connection.")
      .def_static(
          "from_entries",
          [](const std::vector<std::string>& coords, const std::vector<std::tuple<int, int, int, std::string>>& entries,
             std::optional<int> n) {
            const CoordinateFrame frame = make_frame(coords, n);
            std::vector<ChristoffelEntry> list;
            for (const auto& [a, b, c, text] : entries) list.push_back({a, b, c, parse(text, frame)});
            return Connection::from_entries(frame, list);
          },
          py::arg("coords"), py::arg("entries"), py::arg("n") = py::none(),
          "entries are (A, B, C, expr) with 0-based indices for Γ_A^C_B.")
      .def_property_readonly("coords", [](const Connection& g) { return g.frame().names(); })
      .def_property_readonly("dimension", &Connection::dimension)
      .def_property_readonly("n", [](const Connection& g) -> std::optional<int> {
        const int s = g.frame().split();
        return s < g.dimension() ? std::optional<int>(s) : std::nullopt;
      })
      .def("with_split", [](const Connection& g, int n) {
        return Connection::generate(g.frame().with_split(n), [&](int a, int c, int b) { return g.symbol(a, c, b); });
      })
      .def("symbol", &Connection::symbol, py::arg("a"), py::arg("c"), py::arg("b"), "Γ_a^c_b, 0-based.")
      .def("evaluate", [](const Connection& g, const std::vector<double>& point) {
        const auto t = g.evaluate(point);
        const int l = g.dimension();
        std::vector<std::vector<std::vector<double>>> out(l, std::vector<std::vector<double>>(l, std::vector<double>(l)));
        for (int a = 0; a < l; ++a)
          for (int c = 0; c < l; ++c)
            for (int b = 0; b < l; ++b) out[a][c][b] = t(a, c, b);
        return out;
      }, "Nested list indexed [a][c][b].")
      .def("components", [](const Connection& g) { return print_all(components(g)); });

  py::class_<ConnectionSpec>(m, "ConnectionSpec")
      .def_readonly("connection", &ConnectionSpec::connection)
      .def_readonly("singular_points", &ConnectionSpec::singular_points)
      .def_property_readonly("n", &ConnectionSpec::n)
      .def_property_readonly("metric", [](const ConnectionSpec& s) {
        std::vector<std::vector<std::string>> out;
        for (const auto& row : s.metric) out.push_back(print_all(row));
        return out;
      })
      .def("to_json", &connection_spec_json);

  m.def("parse_connection_spec", [](const std::string& text) { return parse_connection_spec(text); });
  m.def("load_connection_spec", [](const std::string& path) { return load_connection_spec(path); });

  py::class_<SamplingOptions>(m, "SamplingOptions")
      .def(py::init([](int points, double tol, std::uint64_t seed, double radius,
                       std::vector<std::vector<double>> singular_points) {
             SamplingOptions o;
             o.points = points;
             o.tol = tol;
             o.seed = seed;
             o.radius = radius;
             o.singular_points = std::move(singular_points);
             return o;
           }),
           py::arg("points") = 12, py::arg("tol") = 1e-10, py::arg("seed") = 0, py::arg("radius") = 1.0,
           py::arg("singular_points") = std::vector<std::vector<double>>{})
      .def_readwrite("points", &SamplingOptions::points)
      .def_readwrite("tol", &SamplingOptions::tol)
      .def_readwrite("seed", &SamplingOptions::seed)
      .def_readwrite("radius", &SamplingOptions::radius)
      .def_readwrite("singular_points", &SamplingOptions::singular_points);

  m.def("thomas_pi", [](const Connection& g) {
    const auto pi = thomas_pi(g);
    return print_all(pi.values());
  }, "Thomas invariants flattened in (a, c, b) order.");
  m.def("grass_invariants", [](const Connection& g, int n) {
    const auto inv = grass_invariants(g, n);
    return print_all(inv.flatten());
  }, py::arg("g"), py::arg("n"));
  m.def("projective_shift", [](const Connection& g, const std::vector<std::string>& phi) {
    return projective_shift(g, parse_all(phi, g.frame()));
  }, py::arg("g"), py::arg("phi"));
  m.def("grass_shift", [](const Connection& g, int n, const std::vector<std::string>& psi,
                          const std::vector<std::string>& phi) {
    return grass_shift(g, n, GrassShift{parse_all(psi, g.frame()), parse_all(phi, g.frame())});
  }, py::arg("g"), py::arg("n"), py::arg("psi"), py::arg("phi"));

  py::class_<EquivalenceResult>(m, "EquivalenceResult")
      .def_readonly("equivalent", &EquivalenceResult::equivalent)
      .def_readonly("max_deviation", &EquivalenceResult::max_deviation)
      .def_readonly("invariants_equal", &EquivalenceResult::invariants_equal)
      .def_readonly("invariant_deviation", &EquivalenceResult::invariant_deviation)
      .def_readonly("samples_used", &EquivalenceResult::samples_used)
      .def("__bool__", [](const EquivalenceResult& r) { return r.equivalent; });

  m.def("grass_equivalent", &grass_equivalent, py::arg("g1"), py::arg("g2"), py::arg("n"),
        py::arg("opts") = SamplingOptions{});

  // jets

  py::class_<SubJet>(m, "SubJet")
      .def(py::init<int, int, int>(), py::arg("n"), py::arg("m"), py::arg("r"))
      .def_readonly("n", &SubJet::n)
      .def_readonly("m", &SubJet::m)
      .def_readwrite("base", &SubJet::base)
      .def_property_readonly("order", &SubJet::order)
      .def("d", [](const SubJet& p, int k, std::vector<int> sigma) { return p.d(k, MultiIndex(std::move(sigma))); },
           py::arg("k"), py::arg("sigma"), "u^k_σ, k absolute Latin (n..l-1), σ 0-based.")
      .def("set", [](SubJet& p, int k, std::vector<int> sigma, double v) { p.d(k, MultiIndex(std::move(sigma))) = v; },
           py::arg("k"), py::arg("sigma"), py::arg("value"))
      .def("coordinates", [](const SubJet& p) { return coordinates(p); })
      .def("derivs", [](const SubJet& p) { return derivs_list(p, p.n + 1); },
           "(A, sigma, value) triples, 1-based as in jet files.")
      .def("to_json", [](const SubJet& p) { return jet_json(Jet(p)); });

  py::class_<SecJet>(m, "SecJet")
      .def(py::init<int, int, int>(), py::arg("n"), py::arg("l"), py::arg("r"))
      .def_readonly("n", &SecJet::n)
      .def_readonly("l", &SecJet::l)
      .def_readwrite("x", &SecJet::x)
      .def_readwrite("u", &SecJet::u)
      .def_property_readonly("order", &SecJet::order)
      .def("d", [](const SecJet& t, int a, std::vector<int> sigma) { return t.d(a, MultiIndex(std::move(sigma))); },
           py::arg("a"), py::arg("sigma"), "u^A_{xσ}, 0-based.")
      .def("set", [](SecJet& t, int a, std::vector<int> sigma, double v) { t.d(a, MultiIndex(std::move(sigma))) = v; },
           py::arg("a"), py::arg("sigma"), py::arg("value"))
      .def("coordinates", [](const SecJet& t) { return coordinates(t); })
      .def("derivs", [](const SecJet& t) { return derivs_list(t, 1); },
           "(A, sigma, value) triples, 1-based as in jet files.")
      .def("greek_block_determinant", &SecJet::greek_block_determinant)
      .def("to_json", [](const SecJet& t) { return jet_json(Jet(t)); });

  m.def("parse_jets", [](const std::string& text) { return parse_jets(text); });
  m.def("load_jets", [](const std::string& path) { return load_jets(path); });
  m.def("subjet_from_coordinates", &subjet_from_coordinates, py::arg("n"), py::arg("m"), py::arg("coords"));
  m.def("secjet_from_coordinates", &secjet_from_coordinates, py::arg("n"), py::arg("l"), py::arg("coords"));
  m.def("random_subjet", [](int n, int mm, int r, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    return random_subjet(n, mm, r, rng);
  }, py::arg("n"), py::arg("m"), py::arg("r"), py::arg("seed") = 0);
  m.def("random_secjet", [](int n, int l, int r, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    return random_secjet(n, l, r, rng);
  }, py::arg("n"), py::arg("l"), py::arg("r"), py::arg("seed") = 0);
  m.def("random_polynomial_connection", [](const std::vector<std::string>& coords, int degree, std::uint64_t seed,
                                           std::optional<int> n) {
    Rng rng = make_rng(seed, 0);
    return random_polynomial_connection(make_frame(coords, n), degree, rng);
  }, py::arg("coords"), py::arg("degree"), py::arg("seed") = 0, py::arg("n") = py::none());

  m.def("cover1", [](const SecJet& t) { return cover1(t); });
  m.def("cover2", [](const SecJet& t) { return cover2(t); });
  m.def("prolong", [](const std::vector<std::string>& params, const std::vector<std::string>& components,
                      const std::vector<double>& x, int r) {
    const CoordinateFrame frame = make_frame(params, std::nullopt);
    return prolong(ParamMap(frame, parse_all(components, frame)), x, r);
  }, py::arg("params"), py::arg("components"), py::arg("x"), py::arg("r"),
     "Jet of the map x ↦ s(x) given by expressions in params.");
  m.def("affine_act", [](const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const SecJet& t) {
    return affine_act(AffineMap(a, b), t);
  }, py::arg("a"), py::arg("b"), py::arg("jet"));
  m.def("reparametrize", [](const std::vector<std::string>& components, const SecJet& t) {
    const CoordinateFrame frame = parameter_frame(t.n);
    return reparametrize(ParamMap(frame, parse_all(components, frame)), t);
  }, py::arg("components"), py::arg("jet"), "x̃ = φ(x) with components in x1..xn.");

  // geodesy

  m.def("dot_gamma", [](const Connection& g, const SubJet& p) {
    const auto d = dot_gamma(g, p);
    return std::vector<double>(d.values().begin(), d.values().end());
  }, "dotΓ flattened in (A, k - n, ξ) order.");
  m.def("ddot_gamma", &ddot_gamma, py::arg("g"), py::arg("p"));
  m.def("residual2", [](const Connection& g, const SubJet& q) {
    const auto r = residual2(g, q);
    py::dict out;
    out["values"] = std::vector<double>(r.values().begin(), r.values().end());
    out["max_abs"] = r.max_abs();
    return out;
  }, py::arg("g"), py::arg("q"));
  m.def("ddot_gamma_pro", [](const Connection& g, const SecJet& p, const Connection* theta) {
    return ddot_gamma_pro(g, theta ? *theta : flat_theta(p.n), p);
  }, py::arg("g"), py::arg("p"), py::arg("theta") = nullptr);
  m.def("param_residual2", [](const Connection& g, const SecJet& q, const Connection* theta) {
    const auto r = param_residual2(g, theta ? *theta : flat_theta(q.n), q);
    py::dict out;
    out["values"] = std::vector<double>(r.values().begin(), r.values().end());
    out["max_abs"] = r.max_abs();
    return out;
  }, py::arg("g"), py::arg("q"), py::arg("theta") = nullptr);
  m.def("integrate_geodesic", [](const Connection& g, const std::vector<double>& start,
                                 const std::vector<double>& velocity, double h, int steps, double t0,
                                 const Connection* theta) {
    const auto tr = integrate_geodesic(g, theta ? *theta : flat_theta(1), start, velocity, h, steps, t0);
    py::dict out;
    out["points"] = tr.points;
    out["failure"] = tr.failure;
    return out;
  }, py::arg("g"), py::arg("start"), py::arg("velocity"), py::arg("h"), py::arg("steps"), py::arg("t0") = 0.0,
     py::arg("theta") = nullptr);

  // symmetries

  m.def("check_symmetry", [](const Connection& g, const std::string& spec_text, std::optional<int> n,
                             const SamplingOptions& opts, const Connection* theta) {
    return report_dict(check_symmetry(g, spec_text, n, opts, theta));
  }, py::arg("g"), py::arg("spec"), py::arg("n") = py::none(), py::arg("opts") = SamplingOptions{},
     py::arg("theta") = nullptr, "Check a symmetry candidate given as JSON text.");
  m.def("orbit_check", [](const Connection& g, std::optional<int> n, const SamplingOptions& opts) {
    const auto r = orbit_quotient_check(g, resolve_n(g, n), opts);
    py::dict out;
    out["constancy"] = r.constancy;
    out["preimage"] = r.preimage;
    out["factoring"] = r.factoring;
    out["samples"] = r.samples;
    return out;
  }, py::arg("g"), py::arg("n") = py::none(), py::arg("opts") = SamplingOptions{});

  // acceptance

  m.def("run_acceptance", [](std::uint64_t seed, std::optional<double> tol) {
    py::list out;
    for (const auto& c : run_acceptance(SelftestConfig{seed, tol})) {
      py::dict d;
      d["id"] = c.id;
      d["name"] = c.name;
      d["passed"] = c.passed();
      d["line"] = c.line();
      d["failure"] = c.failure;
      py::list ms;
      for (const auto& meas : c.measurements)
        ms.append(py::make_tuple(meas.label, meas.value, meas.bound, meas.exceed));
      d["measurements"] = ms;
      out.append(d);
    }
    return out;
  }, py::arg("seed") = 0, py::arg("tol") = py::none());

  m.attr("__all__") = std::vector<std::string>{
      "Error", "DomainError", "ExpressionSyntaxError", "UnknownSymbol", "MissingSymbol", "DimensionMismatch",
      "FrameMismatch", "BadSplit", "InconsistentPerturbation", "SingularJacobian", "LoadError",
      "Expression", "parse", "simplify", "differentiate", "evaluate", "symbols", "expression_grammar",
      "Connection", "ConnectionSpec", "parse_connection_spec", "load_connection_spec", "SamplingOptions",
      "thomas_pi", "grass_invariants", "projective_shift", "grass_shift", "EquivalenceResult", "grass_equivalent",
      "SubJet", "SecJet", "parse_jets", "load_jets", "subjet_from_coordinates", "secjet_from_coordinates",
      "random_subjet", "random_secjet", "random_polynomial_connection", "cover1", "cover2", "prolong",
      "affine_act", "reparametrize", "dot_gamma", "ddot_gamma", "residual2", "ddot_gamma_pro",
      "param_residual2", "integrate_geodesic", "check_symmetry", "orbit_check", "run_acceptance"};
}

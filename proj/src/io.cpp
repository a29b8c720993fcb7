#include "jetgeo/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "jetgeo/error.hpp"

namespace jetgeo {

using nlohmann::json;

namespace {

// Turns problems in a parsed document into LoadErrors that point back into
// the source text.
class Source {
 public:
  Source(std::string_view text, std::string_view name) : text_(text), name_(name) {}

  json parse() const {
    try {
      return json::parse(text_);
    } catch (const json::parse_error& e) {
      const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
      throw LoadError(location(byte) + ": " + strip_prefix(e.what()));
    }
  }

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    throw LoadError(name_ + ": " + (path.empty() ? "" : path + ": ") + message);
  }

  // Expression errors point at the offending character inside the JSON string.
  [[noreturn]] void fail_expression(const std::string& path, const std::string& text, std::size_t pos,
                                    const std::string& message) const {
    const std::string quoted = json(text).dump();
    const std::size_t at = text_.find(quoted);
    const std::string where = at == std::string_view::npos ? name_ : location(at + 1 + pos);
    throw LoadError(where + ": " + path + ": " + message + "\nexpression grammar: " +
                    std::string(expression_grammar()));
  }

  Expression expression(const json& value, const std::string& path, const CoordinateFrame& frame) const {
    const std::string text = string(value, path);
    try {
      return jetgeo::parse(text, frame);
    } catch (const SyntaxError& e) {
      fail_expression(path, text, e.position(), e.what());
    } catch (const UnknownSymbol& e) {
      fail_expression(path, text, e.position(), e.what());
    }
  }

  std::string string(const json& value, const std::string& path) const {
    if (!value.is_string()) fail(path, "expected a string");
    return value.get<std::string>();
  }

  long long integer(const json& value, const std::string& path) const {
    if (!value.is_number_integer()) fail(path, "expected an integer");
    return value.get<long long>();
  }

  int index(const json& value, const std::string& path, int lo, int hi) const {
    const long long v = integer(value, path);
    if (v < lo || v > hi) fail(path, "index " + std::to_string(v) + " outside " + std::to_string(lo) + ".." + std::to_string(hi));
    return static_cast<int>(v);
  }

  double number(const json& value, const std::string& path) const {
    if (!value.is_number()) fail(path, "expected a number");
    return value.get<double>();
  }

  const json& array(const json& value, const std::string& path) const {
    if (!value.is_array()) fail(path, "expected an array");
    return value;
  }

  std::vector<double> numbers(const json& value, const std::string& path, std::size_t expected) const {
    array(value, path);
    if (value.size() != expected)
      fail(path, "expected " + std::to_string(expected) + " numbers, got " + std::to_string(value.size()));
    std::vector<double> out;
    for (std::size_t i = 0; i < value.size(); ++i) out.push_back(number(value[i], path + "/" + std::to_string(i)));
    return out;
  }

  const json& object(const json& value, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!value.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : value.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(path, "unknown key \"" + key + "\"");
    }
    return value;
  }

  const json& required(const json& obj, const std::string& path, const char* key) const {
    if (!obj.contains(key)) fail(path, std::string("missing \"") + key + "\"");
    return obj.at(key);
  }

 private:
  std::string location(std::size_t offset) const {
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    return name_ + ":" + std::to_string(line) + ":" + std::to_string(column);
  }

  static std::string strip_prefix(const std::string& what) {
    // "[json.exception.parse_error.101] parse error at line 1, column 2: ..."
    const auto colon = what.find(": ");
    return colon == std::string::npos ? what : what.substr(colon + 2);
  }

  std::string_view text_;
  std::string name_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string slot(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

}  // namespace

std::optional<int> ConnectionSpec::n() const {
  const auto& f = connection.frame();
  if (f.split() < f.dimension()) return f.split();
  return std::nullopt;
}

SamplingOptions ConnectionSpec::sampling(SamplingOptions base) const {
  base.singular_points.insert(base.singular_points.end(), singular_points.begin(), singular_points.end());
  return base;
}

ConnectionSpec parse_connection_spec(std::string_view text, std::string_view source) {
  const Source src(text, source);
  const json doc = src.parse();
  src.object(doc, "", {"coords", "n", "christoffel", "singular_points", "metric"});

  const json& coords = src.array(src.required(doc, "", "coords"), "/coords");
  if (coords.empty()) src.fail("/coords", "at least one coordinate is required");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < coords.size(); ++i) names.push_back(src.string(coords[i], slot("/coords", i)));
  const int l = static_cast<int>(names.size());

  std::optional<int> n;
  if (doc.contains("n")) n = src.index(doc.at("n"), "/n", 1, l - 1);
  CoordinateFrame frame;
  try {
    frame = CoordinateFrame(names, n);
  } catch (const Error& e) {
    src.fail("/coords", e.what());
  }

  ConnectionSpec spec;
  std::vector<ChristoffelEntry> entries;
  if (doc.contains("christoffel")) {
    const json& list = src.array(doc.at("christoffel"), "/christoffel");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = slot("/christoffel", i);
      const json& e = src.object(list[i], path, {"lower", "upper", "expr"});
      const json& lower = src.array(src.required(e, path, "lower"), path + "/lower");
      if (lower.size() != 2) src.fail(path + "/lower", "expected two indices");
      ChristoffelEntry entry;
      entry.lower_a = src.index(lower[0], path + "/lower/0", 1, l) - 1;
      entry.lower_b = src.index(lower[1], path + "/lower/1", 1, l) - 1;
      entry.upper = src.index(src.required(e, path, "upper"), path + "/upper", 1, l) - 1;
      entry.expr = src.expression(src.required(e, path, "expr"), path + "/expr", frame);
      entries.push_back(std::move(entry));
    }
  }
  try {
    spec.connection = Connection::from_entries(frame, entries);
  } catch (const Error& e) {
    src.fail("/christoffel", e.what());
  }

  if (doc.contains("singular_points")) {
    const json& list = src.array(doc.at("singular_points"), "/singular_points");
    for (std::size_t i = 0; i < list.size(); ++i)
      spec.singular_points.push_back(src.numbers(list[i], slot("/singular_points", i), static_cast<std::size_t>(l)));
  }

  if (doc.contains("metric")) {
    const json& list = src.array(doc.at("metric"), "/metric");
    spec.metric.assign(static_cast<std::size_t>(l), std::vector<Expression>(static_cast<std::size_t>(l)));
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = slot("/metric", i);
      const json& e = src.object(list[i], path, {"lower", "expr"});
      const json& lower = src.array(src.required(e, path, "lower"), path + "/lower");
      if (lower.size() != 2) src.fail(path + "/lower", "expected two indices");
      const int a = src.index(lower[0], path + "/lower/0", 1, l) - 1;
      const int b = src.index(lower[1], path + "/lower/1", 1, l) - 1;
      const Expression value = src.expression(src.required(e, path, "expr"), path + "/expr", frame);
      const auto key = std::minmax(a, b);
      if (!seen.insert(key).second &&
          !structurally_equal(spec.metric[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)], value))
        src.fail(path, "conflicting metric entries for (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");
      spec.metric[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = value;
      spec.metric[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = value;
    }
  }
  return spec;
}

ConnectionSpec load_connection_spec(const std::filesystem::path& path) {
  return parse_connection_spec(read_file(path), path.string());
}

std::string connection_spec_json(const ConnectionSpec& spec) {
  const auto& frame = spec.frame();
  const int l = frame.dimension();
  json doc;
  doc["coords"] = frame.names();
  if (auto n = spec.n()) doc["n"] = *n;
  json entries = json::array();
  for (int a = 0; a < l; ++a)
    for (int b = a; b < l; ++b)
      for (int c = 0; c < l; ++c) {
        const Expression& e = spec.connection.symbol(a, c, b);
        if (e.is_zero()) continue;
        entries.push_back({{"lower", {a + 1, b + 1}}, {"upper", c + 1}, {"expr", to_string(e)}});
      }
  doc["christoffel"] = entries;
  if (!spec.singular_points.empty()) doc["singular_points"] = spec.singular_points;
  if (!spec.metric.empty()) {
    json metric = json::array();
    for (int a = 0; a < l; ++a)
      for (int b = a; b < l; ++b) {
        const Expression& e = spec.metric[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        if (!e.is_zero()) metric.push_back({{"lower", {a + 1, b + 1}}, {"expr", to_string(e)}});
      }
    doc["metric"] = metric;
  }
  return doc.dump(2);
}

namespace {

Jet parse_jet(const Source& src, const json& obj, const std::string& path) {
  src.object(obj, path, {"kind", "n", "l", "r", "x", "u", "derivs"});
  const std::string kind = src.string(src.required(obj, path, "kind"), path + "/kind");
  if (kind != "secjet" && kind != "subjet") src.fail(path + "/kind", "expected \"secjet\" or \"subjet\"");
  const bool sec = kind == "secjet";
  const int l = src.index(src.required(obj, path, "l"), path + "/l", sec ? 1 : 2, 1 << 16);
  const int n = src.index(src.required(obj, path, "n"), path + "/n", 1, sec ? l : l - 1);
  const int r = src.index(src.required(obj, path, "r"), path + "/r", 0, 64);
  const std::vector<double> u = src.numbers(src.required(obj, path, "u"), path + "/u", static_cast<std::size_t>(l));
  if (!sec && obj.contains("x")) src.fail(path + "/x", "subjets have no parameters");

  const int first_component = sec ? 0 : n;
  DerivativeTable table(l - first_component, n, r);
  std::set<std::pair<int, MultiIndex>> seen;
  const json empty = json::array();
  const json& derivs = src.array(r > 0 ? src.required(obj, path, "derivs") : (obj.contains("derivs") ? obj.at("derivs") : empty),
                                 path + "/derivs");
  for (std::size_t i = 0; i < derivs.size(); ++i) {
    const std::string dpath = slot(path + "/derivs", i);
    const json& d = src.object(derivs[i], dpath, {"A", "sigma", "value"});
    const int a = src.index(src.required(d, dpath, "A"), dpath + "/A", first_component + 1, l) - 1;
    const json& sigma = src.array(src.required(d, dpath, "sigma"), dpath + "/sigma");
    if (sigma.empty() || static_cast<int>(sigma.size()) > r)
      src.fail(dpath + "/sigma", "order must be between 1 and r = " + std::to_string(r));
    std::vector<int> idx;
    for (std::size_t k = 0; k < sigma.size(); ++k) idx.push_back(src.index(sigma[k], slot(dpath + "/sigma", k), 1, n) - 1);
    const MultiIndex mi(idx);
    if (!seen.insert({a, mi}).second) src.fail(dpath, "derivative listed twice");
    table.at(a - first_component, mi) = src.number(src.required(d, dpath, "value"), dpath + "/value");
  }
  for (int a = first_component; a < l; ++a)
    for (int order = 1; order <= r; ++order)
      for (const auto& mi : multi_indices(n, order))
        if (!seen.count({a, mi})) {
          std::string s;
          for (int k : mi.indices()) s += (s.empty() ? "" : ",") + std::to_string(k + 1);
          src.fail(path + "/derivs", "missing derivative A=" + std::to_string(a + 1) + " sigma=[" + s + "]");
        }

  if (sec) {
    SecJet t(n, l, r);
    t.x = src.numbers(src.required(obj, path, "x"), path + "/x", static_cast<std::size_t>(n));
    t.u = u;
    t.derivs = std::move(table);
    return t;
  }
  SubJet p(n, l - n, r);
  p.base = u;
  p.derivs = std::move(table);
  return p;
}

}  // namespace

std::vector<Jet> parse_jets(std::string_view text, std::string_view source) {
  const Source src(text, source);
  const json doc = src.parse();
  std::vector<Jet> out;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) out.push_back(parse_jet(src, doc[i], slot("", i)));
  } else {
    out.push_back(parse_jet(src, doc, ""));
  }
  return out;
}

std::vector<Jet> load_jets(const std::filesystem::path& path) { return parse_jets(read_file(path), path.string()); }

std::string jet_json(const Jet& jet) {
  json doc;
  auto derivs = [](const DerivativeTable& table, int first_component) {
    json list = json::array();
    for (int c = 0; c < table.components(); ++c)
      for (int order = 1; order <= table.order(); ++order)
        for (const auto& mi : multi_indices(table.n(), order)) {
          json sigma = json::array();
          for (int k : mi.indices()) sigma.push_back(k + 1);
          list.push_back({{"A", c + first_component + 1}, {"sigma", sigma}, {"value", table.get(c, mi)}});
        }
    return list;
  };
  if (const auto* t = std::get_if<SecJet>(&jet)) {
    doc = {{"kind", "secjet"}, {"n", t->n}, {"l", t->l}, {"r", t->order()}, {"x", t->x}, {"u", t->u}};
    doc["derivs"] = derivs(t->derivs, 0);
  } else {
    const auto& p = std::get<SubJet>(jet);
    doc = {{"kind", "subjet"}, {"n", p.n}, {"l", p.dimension()}, {"r", p.order()}, {"u", p.base}};
    doc["derivs"] = derivs(p.derivs, p.n);
  }
  return doc.dump();
}

CoordinateFrame parameter_frame(int n) { return CoordinateFrame::numbered("x", n); }

SymmetrySpec parse_symmetry_spec(std::string_view text, const CoordinateFrame& e, int n, std::string_view source) {
  const Source src(text, source);
  const json doc = src.parse();
  if (!doc.is_object()) src.fail("", "expected an object");
  SymmetrySpec spec;
  spec.kind = src.string(src.required(doc, "", "kind"), "/kind");
  const CoordinateFrame params = parameter_frame(n);
  const CoordinateFrame split = e.with_split(n);

  auto expressions = [&](const CoordinateFrame& frame, std::size_t expected) {
    const json& list = src.array(src.required(doc, "", "components"), "/components");
    if (list.size() != expected)
      src.fail("/components", "expected " + std::to_string(expected) + " components, got " + std::to_string(list.size()));
    std::vector<Expression> out;
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(src.expression(list[i], slot("/components", i), frame));
    return out;
  };
  auto jet_space = [&]() {
    const std::string space = doc.contains("space") ? src.string(doc.at("space"), "/space") : "submanifold";
    if (space == "submanifold") return JetKind::Submanifold;
    if (space == "section") return JetKind::Section;
    src.fail("/space", "expected \"submanifold\" or \"section\"");
  };
  auto jet_frame = [&](JetKind k) { return k == JetKind::Submanifold ? j1_frame(split) : j1pro_frame(params, e); };

  try {
    if (spec.kind == "point_map") {
      src.object(doc, "", {"kind", "components"});
      spec.map = prolong_point_map(split, expressions(e, static_cast<std::size_t>(e.dimension())));
    } else if (spec.kind == "point_field") {
      src.object(doc, "", {"kind", "components"});
      spec.field = prolong_point_field(split, expressions(e, static_cast<std::size_t>(e.dimension())));
    } else if (spec.kind == "jet_map" || spec.kind == "jet_field") {
      src.object(doc, "", {"kind", "space", "components"});
      const JetKind k = jet_space();
      const CoordinateFrame frame = jet_frame(k);
      auto comps = expressions(frame, static_cast<std::size_t>(frame.dimension()));
      if (spec.kind == "jet_map") {
        spec.map = JetMap(frame, std::move(comps), k);
      } else {
        spec.field = JetField(frame, std::move(comps), k);
      }
    } else if (spec.kind == "affine") {
      src.object(doc, "", {"kind", "a", "b"});
      const json& rows = src.array(src.required(doc, "", "a"), "/a");
      if (static_cast<int>(rows.size()) != n) src.fail("/a", "expected " + std::to_string(n) + " rows");
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i) {
        const auto row = src.numbers(rows[static_cast<std::size_t>(i)], slot("/a", static_cast<std::size_t>(i)), static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) a(i, j) = row[static_cast<std::size_t>(j)];
      }
      const auto bv = src.numbers(src.required(doc, "", "b"), "/b", static_cast<std::size_t>(n));
      spec.affine = AffineMap(a, Eigen::Map<const Eigen::VectorXd>(bv.data(), n));
    } else if (spec.kind == "reparametrization") {
      src.object(doc, "", {"kind", "components"});
      spec.reparametrization = ParamMap(params, expressions(params, static_cast<std::size_t>(n)));
    } else {
      src.fail("/kind", "unknown kind \"" + spec.kind + "\"");
    }
  } catch (const LoadError&) {
    throw;
  } catch (const Error& err) {
    src.fail("", err.what());
  }
  return spec;
}

SymmetrySpec load_symmetry_spec(const std::filesystem::path& path, const CoordinateFrame& e, int n) {
  return parse_symmetry_spec(read_file(path), e, n, path.string());
}

}  // namespace jetgeo

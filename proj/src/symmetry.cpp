#include "jetgeo/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "jetgeo/error.hpp"
#include "symbolic_matrix.hpp"

namespace jetgeo {

namespace {

std::vector<Expression> partials_of(const std::vector<Expression>& components, const CoordinateFrame& frame) {
  std::vector<Expression> out;
  out.reserve(components.size() * static_cast<std::size_t>(frame.dimension()));
  for (const auto& c : components)
    for (const auto& name : frame.names()) out.push_back(differentiate(c, name));
  return out;
}

void check_components(const std::vector<Expression>& components, const CoordinateFrame& frame, const char* what) {
  if (static_cast<int>(components.size()) != frame.dimension())
    throw DimensionMismatch(std::string(what) + " needs " + std::to_string(frame.dimension()) + " components, got " +
                            std::to_string(components.size()));
  for (const auto& c : components)
    for (const auto& name : symbols(c))
      if (!frame.contains(name)) throw Error(std::string(what) + " uses unknown coordinate '" + name + "'");
}

Eigen::MatrixXd evaluate_matrix(const std::vector<Expression>& entries, int rows, const CoordinateFrame& frame,
                                std::span<const double> point) {
  const auto values = evaluate_all(entries, frame, point);
  const int cols = frame.dimension();
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return m;
}

Eigen::MatrixXd as_columns(const std::vector<std::vector<double>>& vectors) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vectors.at(0).size()), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j)
    for (std::size_t i = 0; i < vectors[j].size(); ++i)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vectors[j][i];
  return m;
}

Eigen::VectorXd as_vector(std::span<const double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

// Least-squares distance of y from the column span of a.
double distance_to_span(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  return (a * c - y).norm();
}

struct Sampled {
  std::vector<double> coords;
  int n;
  int l;
};

// Order-1 coordinates of the index-th sample of the relevant jet space.
Sampled sample_coordinates(JetKind kind, const Connection& g, int n, const Connection& theta,
                           const SamplingOptions& opts, std::uint64_t stream, std::uint64_t index) {
  if (kind == JetKind::Submanifold)
    return {coordinates(sample_subjet(g.frame(), n, opts, stream, index)), n, g.dimension()};
  return {coordinates(sample_secjet(g.frame(), theta.frame(), opts, stream, index)), n, g.dimension()};
}

std::vector<std::vector<double>> generators_at(JetKind kind, const Connection& g, int n, const Connection& theta,
                                               std::span<const double> coords) {
  if (kind == JetKind::Submanifold) return distribution_fields(g, subjet_from_coordinates(n, g.dimension() - n, coords));
  return pro_distribution_fields(g, theta, secjet_from_coordinates(n, g.dimension(), coords));
}

// Largest violation of the contact condition by the pushforwards of the
// Cartan generators at `coords` under the Jacobian j.
double contact_residual(JetKind kind, int n, int l, std::span<const double> coords, std::span<const double> image,
                        const Eigen::MatrixXd& j) {
  const int dim = static_cast<int>(coords.size());
  std::vector<Eigen::VectorXd> cartan;
  if (kind == JetKind::Submanifold) {
    for (int lam = 0; lam < n; ++lam) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
      d(lam) = 1;
      for (int k = n; k < l; ++k) d(k) = coords[static_cast<std::size_t>(l + (k - n) * n + lam)];
      cartan.push_back(d);
    }
    for (int i = l; i < dim; ++i) cartan.push_back(Eigen::VectorXd::Unit(dim, i));
  } else {
    for (int lam = 0; lam < n; ++lam) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
      d(lam) = 1;
      for (int a = 0; a < l; ++a) d(n + a) = coords[static_cast<std::size_t>(n + l + a * n + lam)];
      cartan.push_back(d);
    }
    for (int i = n + l; i < dim; ++i) cartan.push_back(Eigen::VectorXd::Unit(dim, i));
  }
  double worst = 0;
  for (const auto& v : cartan) {
    const Eigen::VectorXd w = j * v;
    const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
    if (kind == JetKind::Submanifold) {
      // θ^k = du^k − u^k_ξ du^ξ at the image
      for (int k = n; k < l; ++k) {
        double s = w(k);
        for (int xi = 0; xi < n; ++xi) s -= image[static_cast<std::size_t>(l + (k - n) * n + xi)] * w(xi);
        worst = std::max(worst, std::abs(s) / scale);
      }
    } else {
      // θ^A = du^A − u^A_{xλ} dx^λ at the image
      for (int a = 0; a < l; ++a) {
        double s = w(n + a);
        for (int lam = 0; lam < n; ++lam) s -= image[static_cast<std::size_t>(n + l + a * n + lam)] * w(lam);
        worst = std::max(worst, std::abs(s) / scale);
      }
    }
  }
  return worst;
}

void check_jet_frame(const CoordinateFrame& frame, JetKind kind, const Connection& g, int n, const Connection& theta) {
  const CoordinateFrame expected =
      kind == JetKind::Submanifold ? j1_frame(g.frame().with_split(n)) : j1pro_frame(theta.frame(), g.frame());
  if (frame.dimension() != expected.dimension())
    throw DimensionMismatch("jet coordinates: expected " + std::to_string(expected.dimension()) + ", got " +
                            std::to_string(frame.dimension()));
}

template <class Check>
CheckReport run_samples(const SamplingOptions& opts, std::uint64_t stream, const Check& check) {
  CheckReport report;
  report.tol = opts.tol;
  for (int i = 0; i < opts.points; ++i) {
    CheckRow row;
    row.index = static_cast<std::uint64_t>(i);
    try {
      check(row);
      row.passed = row.residual <= opts.tol;
      report.worst = std::max(report.worst, row.residual);
    } catch (const DomainError& e) {
      row.skipped = true;
      row.note = e.what();
    } catch (const SingularJacobian& e) {
      row.skipped = true;
      row.note = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  (void)stream;
  return report;
}

}  // namespace

JetMap::JetMap(CoordinateFrame frame, std::vector<Expression> components, JetKind kind, bool prolonged)
    : frame_(std::move(frame)), components_(std::move(components)), kind_(kind), prolonged_(prolonged) {
  check_components(components_, frame_, "jet map");
  partials_ = partials_of(components_, frame_);
}

std::vector<double> JetMap::apply(std::span<const double> point) const { return evaluate_all(components_, frame_, point); }

Eigen::MatrixXd JetMap::jacobian(std::span<const double> point) const {
  return evaluate_matrix(partials_, static_cast<int>(components_.size()), frame_, point);
}

JetField::JetField(CoordinateFrame frame, std::vector<Expression> components, JetKind kind)
    : frame_(std::move(frame)), components_(std::move(components)), kind_(kind) {
  check_components(components_, frame_, "jet field");
  partials_ = partials_of(components_, frame_);
}

std::vector<double> JetField::value(std::span<const double> point) const {
  return evaluate_all(components_, frame_, point);
}

Eigen::MatrixXd JetField::jacobian(std::span<const double> point) const {
  return evaluate_matrix(partials_, static_cast<int>(components_.size()), frame_, point);
}

JetMap prolong_point_map(const CoordinateFrame& e, const std::vector<Expression>& f) {
  const int n = e.split();
  const int l = e.dimension();
  if (static_cast<int>(f.size()) != l) throw DimensionMismatch("point map needs one component per coordinate");
  const CoordinateFrame j1 = j1_frame(e);
  auto u1 = [&](int j, int lam) { return Expression::symbol(j1.name(l + (j - n) * n + lam)); };
  // T^A_λ = ∂_λ F^A + u^j_λ ∂_j F^A
  std::vector<std::vector<Expression>> t(static_cast<std::size_t>(l), std::vector<Expression>(static_cast<std::size_t>(n)));
  for (int a = 0; a < l; ++a)
    for (int lam = 0; lam < n; ++lam) {
      Expression s = differentiate(f[static_cast<std::size_t>(a)], e.name(lam));
      for (int j = n; j < l; ++j) s += u1(j, lam) * differentiate(f[static_cast<std::size_t>(a)], e.name(j));
      t[static_cast<std::size_t>(a)][static_cast<std::size_t>(lam)] = s;
    }
  detail::SymMatrix greek(t.begin(), t.begin() + n);
  const detail::SymMatrix inv = detail::inverse(greek);
  std::vector<Expression> components(f.begin(), f.end());
  for (int k = n; k < l; ++k)
    for (int xi = 0; xi < n; ++xi) {
      Expression s;
      for (int lam = 0; lam < n; ++lam)
        s += t[static_cast<std::size_t>(k)][static_cast<std::size_t>(lam)] * inv[static_cast<std::size_t>(lam)][static_cast<std::size_t>(xi)];
      components.push_back(s);
    }
  return JetMap(j1, std::move(components), JetKind::Submanifold, true);
}

JetField prolong_point_field(const CoordinateFrame& e, const std::vector<Expression>& xi) {
  const int n = e.split();
  const int l = e.dimension();
  if (static_cast<int>(xi.size()) != l) throw DimensionMismatch("point field needs one component per coordinate");
  const CoordinateFrame j1 = j1_frame(e);
  auto u1 = [&](int j, int lam) { return Expression::symbol(j1.name(l + (j - n) * n + lam)); };
  auto total = [&](const Expression& h, int lam) {
    Expression s = differentiate(h, e.name(lam));
    for (int j = n; j < l; ++j) s += u1(j, lam) * differentiate(h, e.name(j));
    return s;
  };
  std::vector<Expression> components(xi.begin(), xi.end());
  for (int k = n; k < l; ++k)
    for (int x = 0; x < n; ++x) {
      Expression s = total(xi[static_cast<std::size_t>(k)], x);
      for (int beta = 0; beta < n; ++beta) s -= u1(k, beta) * total(xi[static_cast<std::size_t>(beta)], x);
      components.push_back(s);
    }
  return JetField(j1, std::move(components), JetKind::Submanifold);
}

std::vector<std::vector<Expression>> pro_distribution_field_expressions(const Connection& g, const Connection& theta) {
  const int n = theta.dimension();
  const int l = g.dimension();
  const CoordinateFrame frame = j1pro_frame(theta.frame(), g.frame());
  auto ux = [&](int a, int lam) { return Expression::symbol(frame.name(n + l + a * n + lam)); };
  std::vector<std::vector<Expression>> fields;
  for (int lam = 0; lam < n; ++lam) {
    std::vector<Expression> x(static_cast<std::size_t>(frame.dimension()));
    x[static_cast<std::size_t>(lam)] = Expression(1LL);
    for (int a = 0; a < l; ++a) x[static_cast<std::size_t>(n + a)] = ux(a, lam);
    for (int c = 0; c < l; ++c)
      for (int eta = 0; eta < n; ++eta) {
        Expression s;
        for (int a = 0; a < l; ++a)
          for (int b = 0; b < l; ++b) s -= g.symbol(a, c, b) * ux(a, lam) * ux(b, eta);
        for (int xi = 0; xi < n; ++xi) s += theta.symbol(lam, xi, eta) * ux(c, xi);
        x[static_cast<std::size_t>(n + l + c * n + eta)] = s;
      }
    fields.push_back(std::move(x));
  }
  return fields;
}

int CheckReport::checked() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.skipped; }));
}

int CheckReport::passed_count() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.skipped && r.passed; }));
}

int CheckReport::skipped_count() const { return static_cast<int>(rows.size()) - checked(); }

bool CheckReport::passed() const { return checked() > 0 && passed_count() == checked(); }

std::string CheckReport::summary() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s %d/%d tol=%g", passed() ? "PASS" : "FAIL", passed_count(), checked(), tol);
  return buf;
}

CheckReport preserves_distribution(const JetMap& map, const Connection& g, int n, const SamplingOptions& opts,
                                   const Connection* theta) {
  const Connection flat(CoordinateFrame::numbered("x", n));
  const Connection& th = theta ? *theta : flat;
  if (n < 1 || n >= g.dimension()) throw BadSplit("split n=" + std::to_string(n) + " is not admissible");
  check_jet_frame(map.frame(), map.kind(), g, n, th);
  if (map.kind() == JetKind::Section && th.dimension() != n)
    throw DimensionMismatch("parameter connection must have dimension n");
  const int l = g.dimension();
  return run_samples(opts, 3, [&](CheckRow& row) {
    row.point = sample_coordinates(map.kind(), g, n, th, opts, 3, row.index).coords;
    const auto image = map.apply(row.point);
    const Eigen::MatrixXd jac = map.jacobian(row.point);
    const auto here = generators_at(map.kind(), g, n, th, row.point);
    const Eigen::MatrixXd there = as_columns(generators_at(map.kind(), g, n, th, image));
    const double scale = std::max(1.0, there.norm());
    double worst = 0;
    for (const auto& x : here) worst = std::max(worst, distance_to_span(there, jac * as_vector(x)) / scale);
    if (!map.prolonged()) worst = std::max(worst, contact_residual(map.kind(), n, l, row.point, image, jac));
    row.residual = worst;
  });
}

CheckReport field_preserves_distribution(const JetField& f, const Connection& g, int n, const SamplingOptions& opts,
                                         const Connection* theta) {
  const Connection flat(CoordinateFrame::numbered("x", n));
  const Connection& th = theta ? *theta : flat;
  if (n < 1 || n >= g.dimension()) throw BadSplit("split n=" + std::to_string(n) + " is not admissible");
  check_jet_frame(f.frame(), f.kind(), g, n, th);
  const bool sub = f.kind() == JetKind::Submanifold;
  const CoordinateFrame frame = sub ? j1_frame(g.frame().with_split(n)) : j1pro_frame(th.frame(), g.frame());
  const auto generators = sub ? distribution_field_expressions(g, n) : pro_distribution_field_expressions(g, th);
  std::vector<std::vector<Expression>> generator_partials;
  for (const auto& x : generators) generator_partials.push_back(partials_of(x, frame));
  const int dim = frame.dimension();
  return run_samples(opts, 4, [&](CheckRow& row) {
    row.point = sample_coordinates(f.kind(), g, n, th, opts, 4, row.index).coords;
    const Eigen::VectorXd fv = as_vector(f.value(row.point));
    const Eigen::MatrixXd jf = f.jacobian(row.point);
    std::vector<std::vector<double>> values;
    for (const auto& x : generators) values.push_back(evaluate_all(x, frame, row.point));
    const Eigen::MatrixXd span = as_columns(values);
    const double scale = std::max(1.0, span.norm());
    double worst = 0;
    for (std::size_t i = 0; i < generators.size(); ++i) {
      const Eigen::MatrixXd jx = evaluate_matrix(generator_partials[i], dim, frame, row.point);
      const Eigen::VectorXd bracket = jx * fv - jf * as_vector(values[i]);
      worst = std::max(worst, distance_to_span(span, bracket) / scale);
    }
    row.residual = worst;
  });
}

CheckReport affine_symmetry_check(const Connection& g, const Connection& theta, const AffineMap& aff,
                                  const SamplingOptions& opts) {
  if (aff.n() != theta.dimension()) throw DimensionMismatch("affine map and parameter space differ in dimension");
  return run_samples(opts, 5, [&](CheckRow& row) {
    const SecJet t = sample_secjet(g.frame(), theta.frame(), opts, 5, row.index);
    row.point = coordinates(t);
    row.residual = param_residual2(g, theta, affine_act(aff, ddot_gamma_pro(g, theta, t))).max_abs();
  });
}

CheckReport reparametrization_check(const Connection& g, const Connection& theta, const ParamMap& phi,
                                    const SamplingOptions& opts) {
  if (phi.n() != theta.dimension() || phi.l() != theta.dimension())
    throw DimensionMismatch("reparametrization must map the parameter space to itself");
  return run_samples(opts, 5, [&](CheckRow& row) {
    const SecJet t = sample_secjet(g.frame(), theta.frame(), opts, 5, row.index);
    row.point = coordinates(t);
    const SecJet moved = reparametrize(phi, ddot_gamma_pro(g, theta, t));
    // the action moves the base point; Θ is taken at the new parameter value
    row.residual = param_residual2(g, theta, moved).max_abs();
  });
}

SecJet identity_preimage(const SubJet& p) {
  const int n = p.n;
  const int l = p.dimension();
  SecJet t(n, l, 1);
  std::copy(p.base.begin(), p.base.begin() + n, t.x.begin());
  t.u = p.base;
  for (int xi = 0; xi < n; ++xi)
    for (int lam = 0; lam < n; ++lam) t.first(xi, lam) = xi == lam ? 1.0 : 0.0;
  for (int j = n; j < l; ++j)
    for (int lam = 0; lam < n; ++lam) t.first(j, lam) = p.first(j, lam);
  return t;
}

SecJet sample_secjet(const CoordinateFrame& e, const CoordinateFrame& params, const SamplingOptions& opts,
                     std::uint64_t stream, std::uint64_t index) {
  const int n = params.dimension();
  const int l = e.dimension();
  SecJet t(n, l, 1);
  SamplingOptions param_opts = opts;
  param_opts.singular_points.clear();
  t.x = sample_point(params, param_opts, stream + (2ULL << 32), index);
  t.u = sample_point(e, opts, stream, index);
  Rng rng = make_rng(opts.seed, stream + (3ULL << 32), index);
  do {
    for (int xi = 0; xi < n; ++xi)
      for (int lam = 0; lam < n; ++lam) t.first(xi, lam) = (xi == lam ? 1.0 : 0.0) + 0.3 * uniform(rng, -1, 1);
  } while (std::abs(t.greek_block_determinant()) < 0.25);
  for (int a = n; a < l; ++a)
    for (int lam = 0; lam < n; ++lam) t.first(a, lam) = uniform(rng, -1, 1);
  return t;
}

OrbitReport orbit_quotient_check(const Connection& g, int n, const SamplingOptions& opts, int maps_per_sample) {
  const int l = g.dimension();
  if (n < 1 || n >= l) throw BadSplit("split n=" + std::to_string(n) + " is not admissible");
  const CoordinateFrame params = CoordinateFrame::numbered("x", n);
  const Connection flat(params);
  OrbitReport r;
  r.maps_per_sample = maps_per_sample;
  auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  };
  for (int i = 0; i < opts.points; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    try {
      const SecJet t = sample_secjet(g.frame(), params, opts, 6, index);
      const auto base = coordinates(cover1(t));
      for (int k = 0; k < maps_per_sample; ++k) {
        Rng rng = make_rng(opts.seed, 7, index * static_cast<std::uint64_t>(maps_per_sample) + static_cast<std::uint64_t>(k));
        r.constancy = std::max(r.constancy, diff(coordinates(cover1(affine_act(random_affine_map(n, rng), t))), base));
      }
      const SubJet p = sample_subjet(g.frame(), n, opts, 8, index);
      r.preimage = std::max(r.preimage, diff(coordinates(cover1(identity_preimage(p))), coordinates(p)));
      r.factoring = std::max(r.factoring, residual2(g, cover2(ddot_gamma_pro(g, flat, t))).max_abs());
      ++r.samples;
    } catch (const DomainError&) {
    }
  }
  return r;
}

}  // namespace jetgeo

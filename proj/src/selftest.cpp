#include "jetgeo/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "fixtures.hpp"
#include "jetgeo/error.hpp"
#include "jetgeo/geodesy.hpp"
#include "jetgeo/symmetry.hpp"

namespace jetgeo {

namespace {

class Runner {
 public:
  explicit Runner(const SelftestConfig& config) : config_(config) {}

  double tol(double stated) const { return config_.tol.value_or(stated); }
  Rng rng(int id, std::uint64_t index) const { return make_rng(config_.seed, 1000 + static_cast<std::uint64_t>(id), index); }
  SamplingOptions sampling(int id, int points, double stated) const {
    SamplingOptions o;
    o.points = points;
    o.tol = tol(stated);
    o.seed = config_.seed ^ (0x5eed0000ULL + static_cast<std::uint64_t>(id));
    return o;
  }

 private:
  SelftestConfig config_;
};

CoordinateFrame frame_of(int n, int m) { return CoordinateFrame::numbered("u", n + m, n); }

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double second_diff(const SubJet& a, const SubJet& b) {
  double m = 0;
  for (int k = a.n; k < a.dimension(); ++k)
    for (const auto& s : multi_indices(a.n, 2)) m = std::max(m, std::abs(a.d(k, s) - b.d(k, s)));
  return m;
}

std::vector<Expression> random_forms(const CoordinateFrame& frame, int count, Rng& rng) {
  std::vector<Expression> out;
  for (int i = 0; i < count; ++i) out.push_back(random_polynomial(frame, 2, rng));
  return out;
}

Measurement at_most(std::string label, double value, double bound) { return {std::move(label), value, bound, false}; }
Measurement above(std::string label, double value, double bound) { return {std::move(label), value, bound, true}; }

void defining_identity(const Runner& run, CriterionResult& r) {
  const auto start = std::chrono::steady_clock::now();
  double dev = 0;
  for (int i = 0; i < 200; ++i) {
    Rng rng = run.rng(1, static_cast<std::uint64_t>(i));
    const int n = 1 + i % 2;
    const int m = 1 + (i / 2) % 2;
    const auto g = random_polynomial_connection(frame_of(n, m), 2, rng);
    const SubJet p = random_subjet(n, m, 1, rng);
    dev = std::max(dev, residual2(g, ddot_gamma(g, p)).max_abs());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.measurements.push_back(at_most("residual", dev, run.tol(1e-10)));
  if (seconds >= 5.0) r.failure = "runtime " + std::to_string(seconds) + " s exceeds 5 s";
}

void xi_independence(const Runner& run, CriterionResult& r) {
  double agree = 0;
  double spread = 0;
  int index = 0;
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m)
      for (int jet = 0; jet < 5; ++jet) {
        Rng rng = run.rng(2, static_cast<std::uint64_t>(index++));
        const auto g = random_polynomial_connection(frame_of(n, m), 2, rng);
        const SubJet p = random_subjet(n, m, 1, rng);
        const DotGamma closed = dot_gamma(g, p);
        std::optional<DotGamma> first;
        for (int k = 0; k < 50; ++k) {
          const DotGamma via = dot_gamma_via_xi(g, XiTable::random(n, m, rng), p);
          agree = std::max(agree, max_diff(via.values(), closed.values()));
          if (first) {
            spread = std::max(spread, max_diff(via.values(), first->values()));
          } else {
            first = via;
          }
        }
      }
  r.measurements.push_back(at_most("agreement", agree, run.tol(1e-12)));
  r.measurements.push_back(at_most("spread", spread, run.tol(1e-12)));
}

void projective_invariance(const Runner& run, CriterionResult& r) {
  double dev = 0;
  int not_equivalent = 0;
  for (int i = 0; i < 50; ++i) {
    Rng rng = run.rng(3, static_cast<std::uint64_t>(i));
    const CoordinateFrame frame = frame_of(1, 2 + i % 2);
    const auto g = random_polynomial_connection(frame, 2, rng);
    const auto shifted = projective_shift(g, random_forms(frame, frame.dimension(), rng));
    const auto opts = run.sampling(3, 12, 1e-10);
    const auto pi = thomas_pi(g);
    const auto pi2 = thomas_pi(shifted);
    dev = std::max(dev, max_deviation(pi.values(), pi2.values(), frame, opts, static_cast<std::uint64_t>(i)).max_abs);
    if (!grass_equivalent(g, shifted, 1, opts).equivalent) ++not_equivalent;
  }
  r.measurements.push_back(at_most("pi", dev, run.tol(1e-10)));
  r.measurements.push_back(at_most("not_equivalent", not_equivalent, 0));
}

void grassmannian_invariance(const Runner& run, CriterionResult& r) {
  double dev = 0;
  int not_equivalent = 0;
  int wrongly_equivalent = 0;
  double smallest_gap = INFINITY;
  for (int i = 0; i < 20; ++i) {
    Rng rng = run.rng(4, static_cast<std::uint64_t>(i));
    const int l = 3 + i % 2;
    const int n = 1 + (i / 2) % (l - 1);
    const CoordinateFrame frame = frame_of(n, l - n);
    const auto g = random_polynomial_connection(frame, 2, rng);
    GrassShift s{random_forms(frame, n, rng), random_forms(frame, l - n, rng)};
    const auto shifted = grass_shift(g, n, s);
    const auto opts = run.sampling(4, 12, 1e-10);
    dev = std::max(dev, max_deviation(grass_invariants(g, n).flatten(), grass_invariants(shifted, n).flatten(), frame,
                                      opts, static_cast<std::uint64_t>(i))
                            .max_abs);
    if (!grass_equivalent(g, shifted, n, opts).equivalent) ++not_equivalent;

    const auto perturbation = random_polynomial_connection(frame, 2, rng);
    const auto bent = Connection::generate(frame, [&](int a, int c, int b) { return g.symbol(a, c, b) + perturbation.symbol(a, c, b); });
    const auto verdict = grass_equivalent(g, bent, n, opts);
    if (verdict.equivalent) ++wrongly_equivalent;
    smallest_gap = std::min(smallest_gap, verdict.max_deviation);
  }
  r.measurements.push_back(at_most("invariants", dev, run.tol(1e-10)));
  r.measurements.push_back(at_most("not_equivalent", not_equivalent, 0));
  r.measurements.push_back(at_most("perturbed_equivalent", wrongly_equivalent, 0));
  r.measurements.push_back(above("perturbed_deviation", smallest_gap, 1e-3));
}

void covering_commutation(const Runner& run, CriterionResult& r) {
  double dev = 0;
  for (int i = 0; i < 200; ++i) {
    Rng rng = run.rng(5, static_cast<std::uint64_t>(i));
    const int n = 1 + i % 2;
    const int l = n + 1 + (i / 2) % 2;
    const auto g = random_polynomial_connection(frame_of(n, l - n), 2, rng);
    const auto theta = random_polynomial_connection(CoordinateFrame::numbered("x", n), 2, rng);
    const SecJet t = random_secjet(n, l, 1, rng);
    dev = std::max(dev, second_diff(cover2(ddot_gamma_pro(g, theta, t)), ddot_gamma(g, cover1(t))));
  }
  r.measurements.push_back(at_most("commutation", dev, run.tol(1e-10)));
}

void quotient_connection(const Runner& run, CriterionResult& r) {
  double dev = 0;
  for (int i = 0; i < 100; ++i) {
    Rng rng = run.rng(6, static_cast<std::uint64_t>(i));
    const int n = 1 + i % 2;
    const int l = n + 1 + (i / 2) % 2;
    const auto g = random_polynomial_connection(frame_of(n, l - n), 2, rng);
    const auto theta = random_polynomial_connection(CoordinateFrame::numbered("x", n), 2, rng);
    const SecJet t = random_secjet(n, l, 1, rng);
    std::vector<double> v(static_cast<std::size_t>(j1pro_dimension(n, l)));
    for (auto& c : v) c = uniform(rng, -1, 1);
    const auto lhs = cover1_pushforward(t, vertical_part(dot_gamma_pro(g, theta, t), t, v));
    const SubJet p = cover1(t);
    const auto rhs = vertical_part(dot_gamma(g, p), p, cover1_pushforward(t, v));
    dev = std::max(dev, max_diff(lhs, rhs));
  }
  r.measurements.push_back(at_most("diagram", dev, run.tol(1e-10)));
}

void affine_symmetry(const Runner& run, CriterionResult& r) {
  double worst = 0;
  int failed_maps = 0;
  double constancy = 0;
  for (int n = 1; n <= 2; ++n) {
    Rng rng = run.rng(7, static_cast<std::uint64_t>(n));
    const auto g = random_polynomial_connection(frame_of(n, 3 - n), 2, rng);
    const Connection theta(CoordinateFrame::numbered("x", n));
    for (int k = 0; k < 10; ++k) {
      const auto report = affine_symmetry_check(g, theta, random_affine_map(n, rng), run.sampling(7, 50, 1e-10));
      worst = std::max(worst, report.worst);
      if (!report.passed()) ++failed_maps;
    }
    constancy = std::max(constancy, orbit_quotient_check(g, n, run.sampling(7, 50, 1e-12), 10).constancy);
  }
  Rng rng = run.rng(7, 0);
  const auto g = random_polynomial_connection(frame_of(1, 2), 2, rng);
  const Connection theta(CoordinateFrame({"x1"}));
  const ParamMap cubic(theta.frame(), {parse("x1^3 + x1", theta.frame())});
  const auto counter = reparametrization_check(g, theta, cubic, run.sampling(7, 50, 1e-10));
  r.measurements.push_back(at_most("affine", worst, run.tol(1e-10)));
  r.measurements.push_back(at_most("failed_maps", failed_maps, 0));
  r.measurements.push_back(at_most("orbit", constancy, run.tol(1e-12)));
  r.measurements.push_back(above("cubic", counter.worst, 1e-3));
}

void flat_space(const Runner& run, CriterionResult& r) {
  double plane = 0;
  double second = 0;
  for (int n = 1; n <= 2; ++n) {
    const CoordinateFrame e = frame_of(n, 3 - n);
    const Connection flat(e);
    const CoordinateFrame x = CoordinateFrame::numbered("x", n);
    for (int i = 0; i < 20; ++i) {
      Rng rng = run.rng(8, static_cast<std::uint64_t>(n * 100 + i));
      std::vector<Expression> comps;
      for (int a = 0; a < 3; ++a) {
        Expression s(Rational(static_cast<long long>(std::lround(uniform(rng, -1000, 1000))), 1000));
        for (int lam = 0; lam < n; ++lam) {
          double c = uniform(rng, -1, 1) * (a < n ? 0.3 : 1.0) + (a == lam ? 1.0 : 0.0);
          s += Expression(Rational(static_cast<long long>(std::lround(c * 1000)), 1000)) * Expression::symbol(x.name(lam));
        }
        comps.push_back(s);
      }
      std::vector<double> at(static_cast<std::size_t>(n));
      for (auto& c : at) c = uniform(rng, -1, 1);
      plane = std::max(plane, residual2(flat, cover2(prolong(ParamMap(x, comps), at, 2))).max_abs());
      const SubJet q = ddot_gamma(flat, random_subjet(n, 3 - n, 1, rng));
      for (int k = n; k < 3; ++k)
        for (const auto& s : multi_indices(n, 2)) second = std::max(second, std::abs(q.d(k, s)));
    }
  }
  r.measurements.push_back(at_most("plane", plane, run.tol(1e-12)));
  r.measurements.push_back(at_most("second_derivatives", second, run.tol(1e-12)));
}

void sphere_geodesics(const Runner& run, CriterionResult& r) {
  const CoordinateFrame e = fixtures::sphere_frame();
  const auto metric = fixtures::sphere_metric(e);
  const auto sphere = fixtures::levi_civita(e, metric);
  const Connection theta(CoordinateFrame({"t"}));
  double drift = 0;
  double residual = 0;
  for (int i = 0; i < 3; ++i) {
    Rng rng = run.rng(9, static_cast<std::uint64_t>(i));
    const std::vector<double> start = i == 0 ? std::vector<double>{0, 0} : std::vector<double>{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const double angle = uniform(rng, 0, 2 * M_PI);
    const std::vector<double> dir{std::cos(angle), std::sin(angle)};
    const double scale = 1.0 / std::sqrt(fixtures::metric_speed(e, metric, start, dir));
    const std::vector<double> vel{dir[0] * scale, dir[1] * scale};
    const Trajectory tr = integrate_geodesic(sphere, theta, start, vel, 1e-3, 1000);
    if (tr.failure) {
      r.failure = "integration failed: " + *tr.failure;
      return;
    }
    for (const auto& p : tr.points) {
      const double s = fixtures::metric_speed(e, metric, p.u, std::vector<double>{p.first(0, 0), p.first(1, 0)});
      drift = std::max(drift, std::abs(s - 1.0));
      residual = std::max(residual, residual2(sphere, cover2(p)).max_abs());
    }
  }
  r.measurements.push_back(at_most("speed_drift", drift, run.tol(1e-8)));
  r.measurements.push_back(at_most("residual", residual, run.tol(1e-8)));
}

void polynomial_degree(const Runner& run, CriterionResult& r) {
  double dev = 0;
  for (int i = 0; i < 30; ++i) {
    Rng rng = run.rng(10, static_cast<std::uint64_t>(i));
    const int n = 1 + i % 2;
    const int m = 1 + (i / 2) % 2;
    const auto g = random_polynomial_connection(frame_of(n, m), 2, rng);
    const SubJet p = random_subjet(n, m, 1, rng);
    for (int k = n; k < n + m; ++k)
      for (int xi = 0; xi < n; ++xi) {
        auto at = [&](double s) {
          SubJet q = p;
          q.first(k, xi) = s;
          return dot_gamma(g, q);
        };
        const DotGamma a = at(-1), b = at(0), d = at(1);
        const double s = uniform(rng, -2, 2);
        const DotGamma e = at(s);
        for (std::size_t j = 0; j < e.values().size(); ++j) {
          const double interp = a.values()[j] * s * (s - 1) / 2 - b.values()[j] * (s + 1) * (s - 1) +
                                d.values()[j] * s * (s + 1) / 2;
          dev = std::max(dev, std::abs(interp - e.values()[j]));
        }
      }
  }
  r.measurements.push_back(at_most("interpolation", dev, run.tol(1e-12)));
}

void symmetry_checks(const Runner& run, CriterionResult& r) {
  const CoordinateFrame plane({"u", "v"}, 1);
  const Connection flat(plane);
  double linear = 0;
  int failed = 0;
  for (int i = 0; i < 5; ++i) {
    Rng rng = run.rng(11, static_cast<std::uint64_t>(i));
    const AffineMap a = random_affine_map(2, rng);
    std::vector<Expression> f;
    for (int row = 0; row < 2; ++row) {
      Expression s(Rational(static_cast<long long>(std::lround(a.b(row) * 1000)), 1000));
      for (int col = 0; col < 2; ++col)
        s += Expression(Rational(static_cast<long long>(std::lround(a.a(row, col) * 1000)), 1000)) *
             Expression::symbol(plane.name(col));
      f.push_back(s);
    }
    const auto report = preserves_distribution(prolong_point_map(plane, f), flat, 1, run.sampling(11, 20, 1e-10));
    linear = std::max(linear, report.worst);
    if (!report.passed()) ++failed;
  }
  const auto bend = prolong_point_map(plane, {parse("u + v^2", plane), parse("v", plane)});
  const auto bent = preserves_distribution(bend, flat, 1, run.sampling(11, 20, 1e-10));
  const auto euler = prolong_point_field(plane, {parse("u", plane), parse("v", plane)});
  const auto field = field_preserves_distribution(euler, flat, 1, run.sampling(11, 20, 1e-10));
  r.measurements.push_back(at_most("linear", linear, run.tol(1e-10)));
  r.measurements.push_back(at_most("linear_failed", failed, 0));
  r.measurements.push_back(above("quadratic", bent.worst, 1e-3));
  r.measurements.push_back(at_most("euler", field.worst, run.tol(1e-10)));
  if (!field.passed() && r.failure.empty()) r.failure = "euler field " + field.summary();
}

struct Criterion {
  const char* name;
  void (*run)(const Runner&, CriterionResult&);
};

const Criterion kCriteria[kCriterionCount] = {
    {"defining identity", defining_identity},
    {"xi independence", xi_independence},
    {"projective invariance", projective_invariance},
    {"grassmannian invariance", grassmannian_invariance},
    {"covering commutation", covering_commutation},
    {"quotient connection", quotient_connection},
    {"affine symmetry and quotient", affine_symmetry},
    {"flat space", flat_space},
    {"sphere geodesics", sphere_geodesics},
    {"polynomial degree", polynomial_degree},
    {"symmetry checks", symmetry_checks},
};

}  // namespace

bool CriterionResult::passed() const {
  if (!failure.empty() || measurements.empty()) return false;
  for (const auto& m : measurements)
    if (!m.ok()) return false;
  return true;
}

std::string CriterionResult::line() const {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d %s:", passed() ? "PASS" : "FAIL", id, name.c_str());
  std::string s = head;
  for (const auto& m : measurements) {
    char buf[128];
    std::snprintf(buf, sizeof buf, " %s=%.6g%s%.6g", m.label.c_str(), m.value, m.exceed ? ">" : "<=", m.bound);
    s += buf;
    if (!m.ok()) s += "(!)";
  }
  if (!failure.empty()) s += " error: " + failure;
  return s;
}

CriterionResult run_criterion(int id, const SelftestConfig& config) {
  if (id < 1 || id > kCriterionCount) throw Error("no criterion " + std::to_string(id));
  const Criterion& c = kCriteria[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = c.name;
  try {
    c.run(Runner(config), r);
  } catch (const Error& e) {
    r.failure = e.what();
  }
  return r;
}

std::vector<CriterionResult> run_acceptance(const SelftestConfig& config) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, config));
  return out;
}

}  // namespace jetgeo

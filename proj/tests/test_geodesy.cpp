#include <Eigen/Dense>

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "jetgeo/error.hpp"
#include "jetgeo/geodesy.hpp"

using namespace jetgeo;

namespace {

CoordinateFrame frame_of(int n, int m) { return CoordinateFrame::numbered("u", n + m, n); }

// Γ_1^2_1 = 1 on R^2, everything else zero.
Connection single_symbol() {
  return Connection::from_entries(frame_of(1, 1), {{0, 0, 1, Expression(1LL)}});
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  REQUIRE(a.size() == b.size());
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

int rank_of(const std::vector<std::vector<double>>& rows, double tol = 1e-9) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

struct Case {
  Connection g;
  SubJet p;
};

Case random_case(int n, int m, std::uint64_t seed, std::uint64_t index) {
  Rng rng = make_rng(seed, 0, index);
  return {random_polynomial_connection(frame_of(n, m), 2, rng), random_subjet(n, m, 1, rng)};
}

}  // namespace

TEST_CASE("dot_gamma: zero connection and a single symbol") {
  Rng rng = make_rng(30, 0);
  const SubJet p = random_subjet(2, 2, 1, rng);
  const DotGamma zero = dot_gamma(Connection(frame_of(2, 2)), p);
  for (double v : zero.values()) CHECK(v == 0.0);

  for (int i = 0; i < 10; ++i) {
    const SubJet q = random_subjet(1, 1, 1, rng);
    const DotGamma d = dot_gamma(single_symbol(), q);
    CHECK(d(0, 1, 0) == 1.0);
    CHECK(d(1, 1, 0) == 0.0);
  }
  CHECK_THROWS_AS(dot_gamma(single_symbol(), p), FrameMismatch);
}

TEST_CASE("dot_gamma_via_xi: agrees with the closed form for any auxiliary table") {
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m)
      for (int trial = 0; trial < 25; ++trial) {
        const auto c = random_case(n, m, 31, static_cast<std::uint64_t>(trial * 10 + n * 3 + m));
        const DotGamma closed = dot_gamma(c.g, c.p);
        const DotGamma zero_xi = dot_gamma_via_xi(c.g, XiTable(n, m), c.p);
        CHECK(max_diff(zero_xi.values(), closed.values()) <= 1e-12);
        Rng rng = make_rng(32, 0, static_cast<std::uint64_t>(trial));
        const auto a = project_omega(c.g, XiTable::random(n, m, rng), c.p);
        const auto b = project_omega(c.g, XiTable::random(n, m, rng), c.p);
        CHECK(max_diff(a.dot.values(), b.dot.values()) <= 1e-12);
        CHECK(max_diff(a.dot.values(), closed.values()) <= 1e-10);
        for (int r = 0; r < m * n; ++r)
          for (int col = 0; col < m * n; ++col)
            CHECK(std::abs(a.jet_block[static_cast<std::size_t>(r * m * n + col)] - (r == col ? 1.0 : 0.0)) <= 1e-12);
      }
  Rng rng = make_rng(33, 0);
  const SubJet p = random_subjet(2, 1, 1, rng);
  const DotGamma flat = dot_gamma_via_xi(Connection(frame_of(2, 1)), XiTable::random(2, 1, rng), p);
  for (double v : flat.values()) CHECK(std::abs(v) <= 1e-15);
}

TEST_CASE("ddot_gamma: examples") {
  Rng rng = make_rng(34, 0);
  const SubJet p = random_subjet(2, 2, 1, rng);
  const SubJet q = ddot_gamma(Connection(frame_of(2, 2)), p);
  for (int k = 2; k < 4; ++k)
    for (const auto& s : multi_indices(2, 2)) CHECK(q.d(k, s) == 0.0);
  CHECK(q.first(3, 1) == p.first(3, 1));

  SubJet flat_slope(1, 1, 1);
  flat_slope.base = {0.3, -0.4};
  const SubJet r = ddot_gamma(single_symbol(), flat_slope);
  CHECK(r.second(1, 0, 0) == -1.0);
  CHECK(std::abs(residual2(single_symbol(), r).max_abs()) == 0.0);
}

TEST_CASE("property: residual2 vanishes on the image of ddot_gamma") {
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 2;
    const int m = 1 + (trial / 2) % 2;
    const auto c = random_case(n, m, 35, static_cast<std::uint64_t>(trial));
    CHECK(residual2(c.g, ddot_gamma(c.g, c.p)).max_abs() <= 1e-10);
  }
}

TEST_CASE("residual2: flat examples, symmetry, invariant polynomial") {
  const Connection flat(frame_of(2, 2));
  Rng rng = make_rng(36, 0);
  SubJet plane = random_subjet(2, 2, 2, rng);
  for (int k = 2; k < 4; ++k)
    for (const auto& s : multi_indices(2, 2)) plane.d(k, s) = 0.0;
  CHECK(residual2(flat, plane).max_abs() == 0.0);
  for (int k = 2; k < 4; ++k)
    for (const auto& s : multi_indices(2, 2)) plane.d(k, s) = 2.5;
  const Residual2 constant = residual2(flat, plane);
  for (double v : constant.values()) CHECK(v == 2.5);

  // With zero second derivatives the residual is the polynomial in u^i_α whose
  // coefficients are the four invariant families.
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2, m = 1 + (trial / 2) % 2, l = n + m;
    auto c = random_case(n, m, 37, static_cast<std::uint64_t>(trial));
    SubJet q(n, m, 2);
    q.base = c.p.base;
    for (int k = n; k < l; ++k)
      for (int xi = 0; xi < n; ++xi) q.first(k, xi) = c.p.first(k, xi);
    const Residual2 r = residual2(c.g, q);
    const GrassInvariants inv = grass_invariants(c.g, n);
    const Assignment at(c.g.frame(), q.base);
    auto u = [&](int i, int a) { return q.first(i, a); };
    for (int k = n; k < l; ++k)
      for (int lam = 0; lam < n; ++lam)
        for (int xi = 0; xi < n; ++xi) {
          auto poly = [&](int la, int x) {
            double s = evaluate(inv.g0(la, k, x), at);
            for (int i = n; i < l; ++i)
              for (int b = 0; b < n; ++b) s += evaluate(inv.g1(la, k, i, b, x), at) * u(i, b);
            for (int j = n; j < l; ++j)
              for (int i = n; i < l; ++i)
                for (int a = 0; a < n; ++a)
                  for (int b = 0; b < n; ++b) s += evaluate(inv.g2(j, k, i, a, b, la, x), at) * u(j, a) * u(i, b);
            for (int j = n; j < l; ++j)
              for (int i = n; i < l; ++i)
                for (int b = 0; b < n; ++b) s -= evaluate(inv.g3(j, b, i), at) * u(k, b) * u(j, la) * u(i, x);
            return s;
          };
          CHECK(std::abs(r(k, lam, xi) - 0.5 * (poly(lam, xi) + poly(xi, lam))) <= 1e-10);
          CHECK(r(k, lam, xi) == r(k, xi, lam));
        }
  }
}

TEST_CASE("residual2: lines through the chart origin are great circles") {
  const auto sphere = fixtures::levi_civita(fixtures::sphere_frame(), fixtures::sphere_metric(fixtures::sphere_frame()));
  for (int i = 0; i < 20; ++i) {
    Rng rng = make_rng(38, 0, static_cast<std::uint64_t>(i));
    const double slope = uniform(rng, -3, 3);
    const double t = uniform(rng, -2, 2);
    SubJet q(1, 1, 2);
    q.base = {t, slope * t};
    q.first(1, 0) = slope;
    q.second(1, 0, 0) = 0.0;
    CHECK(residual2(sphere, q).max_abs() <= 1e-12);
  }
  // an off-centre line is not a great circle
  SubJet off(1, 1, 2);
  off.base = {0.0, 0.5};
  CHECK(residual2(sphere, off).max_abs() > 1e-3);
}

TEST_CASE("param_residual2: flat examples and the exponential solution") {
  const CoordinateFrame x({"x"});
  const Connection flat_g(frame_of(1, 2));
  const Connection flat_theta(x);
  const ParamMap line(x, {parse("2*x + 1", x), parse("-x", x), parse("3", x)});
  const double x0[] = {0.7};
  CHECK(param_residual2(flat_g, flat_theta, prolong(line, x0, 2)).max_abs() == 0.0);

  const Connection theta = Connection::from_entries(x, {{0, 0, 0, Expression(Rational(3, 2))}});
  const ParamMap expo(x, {parse("exp(3*x/2)", x), parse("2*exp(3*x/2)", x), parse("5", x)});
  const auto r = param_residual2(flat_g, theta, prolong(expo, x0, 2));
  CHECK(r.max_abs() <= 1e-12);
  CHECK_THROWS_AS(param_residual2(flat_g, Connection(frame_of(1, 1)), prolong(expo, x0, 2)), DimensionMismatch);
}

TEST_CASE("ddot_gamma_pro: defining property, flat and n = 1 specializations") {
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng = make_rng(39, 0, static_cast<std::uint64_t>(trial));
    const int n = 1 + trial % 2;
    const int l = n + 1 + (trial / 2) % 2;
    const auto g = random_polynomial_connection(frame_of(n, l - n), 2, rng);
    const auto theta = random_polynomial_connection(CoordinateFrame::numbered("x", n), 2, rng);
    const SecJet p = random_secjet(n, l, 1, rng);
    CHECK(param_residual2(g, theta, ddot_gamma_pro(g, theta, p)).max_abs() <= 1e-12);
    const SecJet flat = ddot_gamma_pro(Connection(g.frame()), Connection(theta.frame()), p);
    for (const auto& s : multi_indices(n, 2))
      for (int c = 0; c < l; ++c) CHECK(flat.d(c, s) == 0.0);
  }
  Rng rng = make_rng(40, 0);
  const auto g = random_polynomial_connection(frame_of(1, 2), 2, rng);
  const SecJet p = random_secjet(1, 3, 1, rng);
  const SecJet q = ddot_gamma_pro(g, Connection(CoordinateFrame({"x"})), p);
  const auto gm = g.evaluate(p.u);
  for (int c = 0; c < 3; ++c) {
    double acc = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) acc -= gm(a, c, b) * p.first(a, 0) * p.first(b, 0);
    CHECK(q.second(c, 0, 0) == doctest::Approx(acc).epsilon(1e-14));
  }
}

TEST_CASE("property: covering commutation cover2 ∘ ddot_gamma_pro = ddot_gamma ∘ cover1") {
  for (int trial = 0; trial < 200; ++trial) {
    Rng rng = make_rng(41, 0, static_cast<std::uint64_t>(trial));
    const int n = 1 + trial % 2;
    const int l = n + 1 + (trial / 2) % 2;
    const auto g = random_polynomial_connection(frame_of(n, l - n), 2, rng);
    const auto theta = random_polynomial_connection(CoordinateFrame::numbered("x", n), 2, rng);
    const SecJet p = random_secjet(n, l, 1, rng);
    CHECK(second_diff(cover2(ddot_gamma_pro(g, theta, p)), ddot_gamma(g, cover1(p))) <= 1e-10);
  }
}

TEST_CASE("dot_gamma_pro: flat, single symbol, quotient diagram") {
  const CoordinateFrame x({"x"});
  Rng rng = make_rng(42, 0);
  const SecJet p = random_secjet(1, 2, 1, rng);
  const auto flat = dot_gamma_pro(Connection(frame_of(1, 1)), Connection(x), p);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) CHECK(flat.vertical(a, c, 0) == 0.0);
  const auto single = dot_gamma_pro(single_symbol(), Connection(x), p);
  CHECK(single.vertical(0, 1, 0) == -p.first(0, 0));

  for (int trial = 0; trial < 100; ++trial) {
    Rng r = make_rng(43, 0, static_cast<std::uint64_t>(trial));
    const int n = 1 + trial % 2;
    const int l = n + 1 + (trial / 2) % 2;
    const auto g = random_polynomial_connection(frame_of(n, l - n), 2, r);
    const auto theta = random_polynomial_connection(CoordinateFrame::numbered("x", n), 2, r);
    const SecJet t = random_secjet(n, l, 1, r);
    std::vector<double> v(static_cast<std::size_t>(j1pro_dimension(n, l)));
    for (auto& c : v) c = uniform(r, -1, 1);
    const auto lhs = cover1_pushforward(t, vertical_part(dot_gamma_pro(g, theta, t), t, v));
    const SubJet p1 = cover1(t);
    const auto rhs = vertical_part(dot_gamma(g, p1), p1, cover1_pushforward(t, v));
    CHECK(max_diff(lhs, rhs) <= 1e-10);
  }
}

TEST_CASE("distribution fields: structure, symbolic form, R-plane rank") {
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2, m = 1 + (trial / 2) % 2, l = n + m;
    const auto c = random_case(n, m, 44, static_cast<std::uint64_t>(trial));
    const auto fields = distribution_fields(c.g, c.p);
    REQUIRE(fields.size() == static_cast<std::size_t>(n));
    for (int lam = 0; lam < n; ++lam)
      for (int mu = 0; mu < n; ++mu) CHECK(fields[static_cast<std::size_t>(lam)][static_cast<std::size_t>(mu)] == (lam == mu ? 1.0 : 0.0));

    const auto exprs = distribution_field_expressions(c.g, n);
    const CoordinateFrame j1 = j1_frame(c.g.frame().with_split(n));
    const auto coords = coordinates(c.p);
    for (int lam = 0; lam < n; ++lam)
      CHECK(max_diff(evaluate_all(exprs[static_cast<std::size_t>(lam)], j1, coords), fields[static_cast<std::size_t>(lam)]) <= 1e-12);

    // total derivatives of the 2-jet ddot_gamma(p) span the same plane
    const SubJet q = ddot_gamma(c.g, c.p);
    auto stacked = fields;
    for (int lam = 0; lam < n; ++lam) {
      std::vector<double> d(static_cast<std::size_t>(j1_dimension(n, m)), 0.0);
      d[static_cast<std::size_t>(lam)] = 1.0;
      for (int j = n; j < l; ++j) d[static_cast<std::size_t>(j)] = q.first(j, lam);
      for (int k = n; k < l; ++k)
        for (int xi = 0; xi < n; ++xi) d[static_cast<std::size_t>(l + (k - n) * n + xi)] = q.second(k, lam, xi);
      stacked.push_back(d);
    }
    CHECK(rank_of(stacked) == n);
  }
  Rng rng = make_rng(45, 0);
  const SubJet p = random_subjet(2, 1, 1, rng);
  for (const auto& f : distribution_fields(Connection(frame_of(2, 1)), p))
    for (std::size_t i = 3; i < f.size(); ++i) CHECK(f[i] == 0.0);
}

TEST_CASE("property: covered parametrized distribution lies in the distribution") {
  for (int trial = 0; trial < 40; ++trial) {
    Rng rng = make_rng(46, 0, static_cast<std::uint64_t>(trial));
    const int n = 1 + trial % 2;
    const int l = n + 1 + (trial / 2) % 2;
    const auto g = random_polynomial_connection(frame_of(n, l - n), 2, rng);
    const auto theta = random_polynomial_connection(CoordinateFrame::numbered("x", n), 2, rng);
    const SecJet t = random_secjet(n, l, 1, rng);
    auto stacked = distribution_fields(g, cover1(t));
    for (const auto& v : pro_distribution_fields(g, theta, t)) stacked.push_back(cover1_pushforward(t, v));
    CHECK(rank_of(stacked) == n);
  }
}

TEST_CASE("property: dotΓ is quadratic in each first-derivative slot") {
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 2, m = 1 + (trial / 2) % 2, l = n + m;
    auto c = random_case(n, m, 47, static_cast<std::uint64_t>(trial));
    for (int k = n; k < l; ++k)
      for (int xi = 0; xi < n; ++xi) {
        auto at = [&](double s) {
          SubJet q = c.p;
          q.first(k, xi) = s;
          return dot_gamma(c.g, q);
        };
        const DotGamma a = at(-1), b = at(0), d = at(1);
        const double s = 0.37;
        const DotGamma e = at(s);
        for (std::size_t i = 0; i < e.values().size(); ++i) {
          const double interp = a.values()[i] * s * (s - 1) / 2 - b.values()[i] * (s + 1) * (s - 1) +
                                d.values()[i] * s * (s + 1) / 2;
          CHECK(std::abs(interp - e.values()[i]) <= 1e-12);
        }
      }
  }
}

TEST_CASE("flat space: ddot_gamma of any jet and prolonged planes") {
  const CoordinateFrame e = frame_of(1, 2);
  const Connection flat(e);
  Rng rng = make_rng(48, 0);
  for (int i = 0; i < 20; ++i) {
    const SubJet p = random_subjet(1, 2, 1, rng);
    const SubJet q = ddot_gamma(flat, p);
    for (int k = 1; k < 3; ++k) CHECK(q.second(k, 0, 0) == 0.0);
    const ParamMap line(CoordinateFrame({"x"}),
                        {parse("x", CoordinateFrame({"x"})), parse("2*x - 1/3", CoordinateFrame({"x"})),
                         parse("-x/7 + 4", CoordinateFrame({"x"}))});
    const double x[] = {uniform(rng, -1, 1)};
    CHECK(residual2(flat, cover2(prolong(line, x, 2))).max_abs() == 0.0);
  }
}

TEST_CASE("integrate_geodesic: flat line, argument errors, domain failure") {
  const CoordinateFrame x({"t"});
  const Connection flat(frame_of(1, 2));
  const double start[] = {1, 2, 3}, vel[] = {0.5, -1, 0.25};
  const Trajectory tr = integrate_geodesic(flat, Connection(x), start, vel, 0.1, 50);
  REQUIRE(tr.points.size() == 51);
  CHECK(!tr.failure);
  double err = 0;
  for (std::size_t i = 0; i < tr.points.size(); ++i)
    for (int a = 0; a < 3; ++a) err = std::max(err, std::abs(tr.points[i].u[static_cast<std::size_t>(a)] - (start[a] + 0.1 * static_cast<double>(i) * vel[a])));
  CHECK(err <= 1e-12);
  CHECK_THROWS_AS(integrate_geodesic(flat, Connection(x), start, vel, 0.0, 10), Error);
  CHECK_THROWS_AS(integrate_geodesic(flat, Connection(x), start, vel, -1.0, 10), Error);
  CHECK_THROWS_AS(integrate_geodesic(flat, Connection(frame_of(1, 1)), start, vel, 0.1, 10), DimensionMismatch);

  const CoordinateFrame e2 = frame_of(1, 1);
  const Connection pole = Connection::from_entries(e2, {{0, 0, 0, parse("1/u1", e2)}});
  // the midpoint stage of the first step lands exactly on u1 = 0
  const double s2[] = {-0.5, 0}, v2[] = {4, 0};
  const Trajectory bad = integrate_geodesic(pole, Connection(x), s2, v2, 0.25, 10);
  CHECK(bad.failure.has_value());
  CHECK(bad.points.size() == 1);
}

TEST_CASE("integrate_geodesic on the sphere: speed conservation and covered residual") {
  const CoordinateFrame e = fixtures::sphere_frame();
  const auto metric = fixtures::sphere_metric(e);
  const auto sphere = fixtures::levi_civita(e, metric);
  const Connection theta(CoordinateFrame({"t"}));
  const double start[] = {0, 0};
  const double vel[] = {0.5 * std::cos(0.7), 0.5 * std::sin(0.7)};  // unit metric speed at the origin
  const Trajectory tr = integrate_geodesic(sphere, theta, start, vel, 1e-3, 1000);
  REQUIRE(tr.points.size() == 1001);
  const double s0 = fixtures::metric_speed(e, metric, tr.points[0].u, std::vector<double>{tr.points[0].first(0, 0), tr.points[0].first(1, 0)});
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-14));
  double drift = 0, residual = 0, off_line = 0;
  for (const auto& p : tr.points) {
    const double s = fixtures::metric_speed(e, metric, p.u, std::vector<double>{p.first(0, 0), p.first(1, 0)});
    drift = std::max(drift, std::abs(s - s0));
    residual = std::max(residual, residual2(sphere, cover2(p)).max_abs());
    off_line = std::max(off_line, std::abs(p.u[1] - std::tan(0.7) * p.u[0]));
    CHECK(param_residual2(sphere, theta, p).max_abs() <= 1e-12);
  }
  CHECK(drift <= 1e-8);
  CHECK(residual <= 1e-8);
  CHECK(off_line <= 1e-8);
}

TEST_CASE("integrate_geodesic: affine reparametrization gives the same unparametrized jets") {
  const CoordinateFrame e = frame_of(1, 2);
  Rng rng = make_rng(49, 0);
  const auto g = random_polynomial_connection(e, 1, rng);
  const double start[] = {0.1, -0.2, 0.3}, vel[] = {1.0, 0.2, -0.3};
  const Trajectory tr = integrate_geodesic(g, Connection(CoordinateFrame({"t"})), start, vel, 1e-2, 50);
  REQUIRE(!tr.failure);
  Eigen::MatrixXd a(1, 1);
  a << -2.5;
  Eigen::VectorXd b(1);
  b << 0.75;
  const AffineMap aff(a, b);
  for (const auto& p : tr.points) {
    const SubJet direct = cover2(p);
    const SubJet moved = cover2(affine_act(aff, p));
    CHECK(max_diff(coordinates(direct), coordinates(moved)) <= 1e-12);
    CHECK(second_diff(direct, moved) <= 1e-10);
    CHECK(residual2(g, direct).max_abs() <= 1e-10);
  }
}

TEST_CASE("grass_equivalent") {
  SamplingOptions opts;
  Rng rng = make_rng(50, 0);
  const CoordinateFrame e = frame_of(1, 2);
  const auto g = random_polynomial_connection(e, 2, rng);
  const auto same = grass_equivalent(g, g, 1, opts);
  CHECK(same.equivalent);
  CHECK(same.max_deviation == 0.0);
  CHECK(same.invariants_equal);
  CHECK(same.samples_used == 12);

  std::vector<Expression> phi;
  for (int i = 0; i < 3; ++i) phi.push_back(random_polynomial(e, 2, rng));
  const auto shifted = grass_equivalent(g, projective_shift(g, phi), 1, opts);
  CHECK(shifted.equivalent);
  CHECK(shifted.max_deviation <= 1e-10);
  CHECK(shifted.invariants_equal);

  const auto differ = grass_equivalent(Connection(frame_of(1, 1)), single_symbol(), 1, opts);
  CHECK(!differ.equivalent);
  CHECK(differ.max_deviation == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(!differ.invariants_equal);

  const CoordinateFrame e4 = frame_of(2, 2);
  const auto g4 = random_polynomial_connection(e4, 2, rng);
  GrassShift s{{random_polynomial(e4, 2, rng), random_polynomial(e4, 2, rng)},
               {random_polynomial(e4, 2, rng), random_polynomial(e4, 2, rng)}};
  const auto admissible = grass_equivalent(g4, grass_shift(g4, 2, s), 2, opts);
  CHECK(admissible.equivalent);
  CHECK(admissible.invariants_equal);
  const auto bent = Connection::generate(e4, [&](int a, int c, int b) {
    return g4.symbol(a, c, b) + (a == 0 && b == 2 && c == 3 ? Expression(1LL) : Expression());
  });
  const auto not_admissible = grass_equivalent(g4, bent, 2, opts);
  CHECK(!not_admissible.equivalent);
  CHECK(not_admissible.max_deviation > 1e-3);
  CHECK(!not_admissible.invariants_equal);
  CHECK_THROWS_AS(grass_equivalent(g, g4, 1, opts), FrameMismatch);
}

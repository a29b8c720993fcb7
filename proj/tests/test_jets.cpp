#include <cmath>

#include "doctest.h"
#include "jetgeo/error.hpp"
#include "jetgeo/jets.hpp"

using namespace jetgeo;

namespace {

const CoordinateFrame kX = CoordinateFrame({"x"});
const CoordinateFrame kX2 = CoordinateFrame({"x1", "x2"});

double max_diff(std::span<const double> a, std::span<const double> b) {
  REQUIRE(a.size() == b.size());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_diff(const SubJet& a, const SubJet& b) {
  double m = max_diff(a.base, b.base);
  for (int k = 1; k <= std::min(a.order(), b.order()); ++k)
    for (const auto& s : multi_indices(a.n, k))
      for (int j = a.n; j < a.dimension(); ++j) m = std::max(m, std::abs(a.d(j, s) - b.d(j, s)));
  return m;
}

double max_diff(const SecJet& a, const SecJet& b) {
  double m = std::max(max_diff(a.x, b.x), max_diff(a.u, b.u));
  for (int k = 1; k <= std::min(a.order(), b.order()); ++k)
    for (const auto& s : multi_indices(a.n, k))
      for (int c = 0; c < a.l; ++c) m = std::max(m, std::abs(a.d(c, s) - b.d(c, s)));
  return m;
}

Expression sym(const char* name) { return Expression::symbol(name); }

}  // namespace

TEST_CASE("multi-indices: sorting, concatenation, lexicographic rank") {
  CHECK(MultiIndex{2, 0, 1}.indices()[0] == 0);
  CHECK(MultiIndex{1}.with(0) == MultiIndex{0, 1});
  const auto two = multi_indices(2, 2);
  REQUIRE(two.size() == 3);
  CHECK(two[0] == MultiIndex{0, 0});
  CHECK(two[1] == MultiIndex{0, 1});
  CHECK(two[2] == MultiIndex{1, 1});
  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k <= 4; ++k) {
      const auto all = multi_indices(n, k);
      for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(multi_index_rank(all[i], n) == i);
        if (i) CHECK(all[i - 1] < all[i]);
      }
    }
}

TEST_CASE("prolong: polynomial, affine and finite-difference oracles") {
  const ParamMap s(kX, {sym("x"), pow(sym("x"), 2)});
  const double x[] = {1.0};
  const SecJet t = prolong(s, x, 2);
  CHECK(t.x[0] == 1.0);
  CHECK(t.u == std::vector<double>{1, 1});
  CHECK(t.first(0, 0) == 1.0);
  CHECK(t.first(1, 0) == 2.0);
  CHECK(t.second(0, 0, 0) == 0.0);
  CHECK(t.second(1, 0, 0) == 2.0);

  const ParamMap affine(kX2, {parse("2*x1 - x2 + 1", kX2), parse("x1 + 3*x2", kX2), parse("7", kX2)});
  const double x2[] = {0.4, -1.2};
  const SecJet ta = prolong(affine, x2, 2);
  for (const auto& sg : multi_indices(2, 2))
    for (int a = 0; a < 3; ++a) CHECK(ta.d(a, sg) == 0.0);

  const ParamMap wave(kX, {sym("x"), sin(sym("x"))});
  const double h = 1e-4;
  const double x0[] = {0.3}, xp[] = {0.3 + h}, xm[] = {0.3 - h};
  const SecJet w0 = prolong(wave, x0, 2), wp = prolong(wave, xp, 0), wm = prolong(wave, xm, 0);
  CHECK(std::abs(w0.first(1, 0) - (wp.u[1] - wm.u[1]) / (2 * h)) <= 1e-6);
  CHECK(std::abs(w0.second(1, 0, 0) - (wp.u[1] - 2 * w0.u[1] + wm.u[1]) / (h * h)) <= 1e-6);
}

TEST_CASE("property: prolong respects truncation") {
  const ParamMap s(kX2, {parse("x1*x2^2 + sin(x1)", kX2), parse("exp(x2)*x1", kX2), parse("x1^3", kX2)});
  for (int i = 0; i < 10; ++i) {
    Rng rng = make_rng(20, 0, static_cast<std::uint64_t>(i));
    const double x[] = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const SecJet t3 = prolong(s, x, 3);
    const SecJet t2 = prolong(s, x, 2);
    SecJet cut = t3;
    cut.derivs = t3.derivs.truncated(2);
    CHECK(cut.order() == 2);
    CHECK(max_diff(cut, t2) == 0.0);
  }
}

TEST_CASE("cover1: chain rule examples and linear-solve oracle") {
  SecJet t(1, 2, 1);
  t.first(0, 0) = 2;
  t.first(1, 0) = 6;
  CHECK(cover1(t).first(1, 0) == doctest::Approx(3.0).epsilon(1e-15));

  Rng rng = make_rng(21, 0);
  SecJet id = random_secjet(2, 4, 1, rng);
  id.first(0, 0) = 1, id.first(0, 1) = 0, id.first(1, 0) = 0, id.first(1, 1) = 1;
  const SubJet p = cover1(id);
  for (int j = 2; j < 4; ++j)
    for (int xi = 0; xi < 2; ++xi) CHECK(p.first(j, xi) == id.first(j, xi));
  CHECK(p.base == id.u);

  for (int trial = 0; trial < 50; ++trial) {
    Rng r = make_rng(22, 0, static_cast<std::uint64_t>(trial));
    const SecJet q = random_secjet(2, 4, 1, r);
    const SubJet c = cover1(q);
    // solve u^j_{xλ} = u^j_ξ u^ξ_{xλ}: M^T y = b
    const Eigen::MatrixXd m = q.greek_block();
    for (int j = 2; j < 4; ++j) {
      Eigen::Vector2d b(q.first(j, 0), q.first(j, 1));
      const Eigen::Vector2d y = m.transpose().colPivHouseholderQr().solve(b);
      CHECK(std::abs(c.first(j, 0) - y(0)) <= 1e-12);
      CHECK(std::abs(c.first(j, 1) - y(1)) <= 1e-12);
    }
  }

  SecJet singular(2, 3, 1);
  singular.first(0, 0) = 1, singular.first(0, 1) = 2, singular.first(1, 0) = 2, singular.first(1, 1) = 4;
  singular.first(2, 0) = 1;
  CHECK_THROWS_AS(cover1(singular), SingularJacobian);
  CHECK(singular.is_immersion());
  CHECK_THROWS_AS(cover1(SecJet(1, 2, 1)), SingularJacobian);
  CHECK_THROWS_AS(cover2(t), DimensionMismatch);
}

TEST_CASE("cover2: examples and the n = 1 chain-rule oracle") {
  SecJet t(1, 2, 2);
  t.first(0, 0) = 1, t.second(0, 0, 0) = 0, t.first(1, 0) = 3, t.second(1, 0, 0) = 8;
  CHECK(cover2(t).second(1, 0, 0) == 8.0);
  t.first(0, 0) = 2, t.first(1, 0) = 6;
  CHECK(cover2(t).second(1, 0, 0) == doctest::Approx(2.0).epsilon(1e-15));

  for (int trial = 0; trial < 50; ++trial) {
    Rng rng = make_rng(23, 0, static_cast<std::uint64_t>(trial));
    const SecJet q = random_secjet(1, 3, 2, rng);
    const SubJet c = cover2(q);
    const double a1 = q.first(0, 0), a2 = q.second(0, 0, 0);
    for (int j = 1; j < 3; ++j) {
      const double expected = (q.second(j, 0, 0) * a1 - q.first(j, 0) * a2) / (a1 * a1 * a1);
      CHECK(std::abs(c.second(j, 0, 0) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("property: cover2 of a reparametrized graph equals the graph's derivatives") {
  // s(x) = (ψ(x), f(ψ(x))) with f explicit; the unparametrized jet at u = ψ(x)
  // is the 2-jet of the graph of f.
  const CoordinateFrame uframe({"x1", "x2"});
  const Expression f1 = parse("x1^2*x2 + sin(x2)", uframe);
  const Expression f2 = parse("exp(x1)*x2^2 - x1", uframe);
  const std::vector<Expression> psi{parse("x1 + x2^2/4 + x1*x2/5", kX2), parse("x2 - x1^3/3 + x1/6", kX2)};
  const std::map<std::string, Expression, std::less<>> compose{{"x1", psi[0]}, {"x2", psi[1]}};
  const ParamMap s(kX2, {psi[0], psi[1], substitute(f1, compose), substitute(f2, compose)});
  const ParamMap graph(uframe, {Expression::symbol("x1"), Expression::symbol("x2"), f1, f2});
  for (int i = 0; i < 30; ++i) {
    Rng rng = make_rng(24, 0, static_cast<std::uint64_t>(i));
    const double x[] = {uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
    const SecJet t = prolong(s, x, 2);
    const SubJet c = cover2(t);
    const SecJet gj = prolong(graph, std::span<const double>(t.u.data(), 2), 2);
    for (int j = 2; j < 4; ++j) {
      for (int xi = 0; xi < 2; ++xi) CHECK(std::abs(c.first(j, xi) - gj.first(j, xi)) <= 1e-10);
      for (const auto& sg : multi_indices(2, 2)) CHECK(std::abs(c.d(j, sg) - gj.d(j, sg)) <= 1e-10);
    }
    // dropping second derivatives commutes with covering
    SecJet t1 = t;
    t1.derivs = t.derivs.truncated(1);
    CHECK(max_diff(cover1(t1), c) == 0.0);
  }
}

TEST_CASE("property: cover2 is invariant under affine reparametrization") {
  const ParamMap s(kX2, {parse("x1 + x2^2/3", kX2), parse("x2 + x1*x2/4", kX2), parse("sin(x1)*x2", kX2)});
  for (int i = 0; i < 30; ++i) {
    Rng rng = make_rng(25, 0, static_cast<std::uint64_t>(i));
    Eigen::Matrix2d a;
    a << 1 + 0.2 * uniform(rng, -1, 1), 0.2 * uniform(rng, -1, 1), 0.2 * uniform(rng, -1, 1),
        1 + 0.2 * uniform(rng, -1, 1);
    const Eigen::Vector2d b(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2));
    const std::map<std::string, Expression, std::less<>> g{
        {"x1", Expression(Rational(static_cast<long long>(std::llround(a(0, 0) * 1e6)), 1000000)) * sym("x1") +
                   Expression(Rational(static_cast<long long>(std::llround(a(0, 1) * 1e6)), 1000000)) * sym("x2") +
                   Expression(Rational(static_cast<long long>(std::llround(b(0) * 1e6)), 1000000))},
        {"x2", Expression(Rational(static_cast<long long>(std::llround(a(1, 0) * 1e6)), 1000000)) * sym("x1") +
                   Expression(Rational(static_cast<long long>(std::llround(a(1, 1) * 1e6)), 1000000)) * sym("x2") +
                   Expression(Rational(static_cast<long long>(std::llround(b(1) * 1e6)), 1000000))}};
    std::vector<Expression> composed;
    for (const auto& c : s.components()) composed.push_back(substitute(c, g));
    const ParamMap sg(kX2, composed);
    const double x[] = {uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
    Assignment at(kX2, x);
    const double gx[] = {evaluate(g.at("x1"), at), evaluate(g.at("x2"), at)};
    CHECK(max_diff(cover2(prolong(sg, x, 2)), cover2(prolong(s, gx, 2))) <= 1e-10);
  }
}

TEST_CASE("affine_act: examples, group law, orbit invariance of cover1") {
  SecJet t(1, 2, 2);
  t.x[0] = 0.5;
  t.first(0, 0) = 3, t.first(1, 0) = -1, t.second(0, 0, 0) = 2, t.second(1, 0, 0) = 5;
  Eigen::MatrixXd a(1, 1);
  a << 2;
  Eigen::VectorXd b(1);
  b << 1;
  const SecJet g = affine_act(AffineMap(a, b), t);
  CHECK(g.x[0] == 2.0);
  CHECK(g.first(0, 0) == 1.5);
  CHECK(g.first(1, 0) == -0.5);
  CHECK(g.second(0, 0, 0) == 0.5);
  CHECK(g.second(1, 0, 0) == 1.25);
  CHECK(max_diff(affine_act(AffineMap::identity(1), t), t) == 0.0);

  for (int trial = 0; trial < 50; ++trial) {
    Rng rng = make_rng(26, 0, static_cast<std::uint64_t>(trial));
    const int n = 1 + trial % 2;
    const SecJet q = random_secjet(n, 3, 3, rng);
    const AffineMap g1 = random_affine_map(n, rng);
    const AffineMap g2 = random_affine_map(n, rng);
    CHECK(max_diff(affine_act(g2, affine_act(g1, q)), affine_act(g2.after(g1), q)) <= 1e-10);
    CHECK(max_diff(cover1(affine_act(g1, q)), cover1(q)) <= 1e-10);
    CHECK(max_diff(cover2(affine_act(g1, q)), cover2(q)) <= 1e-9);

    // the general reparametrization formula agrees on affine maps
    std::vector<Expression> phi;
    for (int i = 0; i < n; ++i) {
      Expression e = Expression(Rational(static_cast<long long>(std::llround(g1.b(i) * 1e9)), 1000000000));
      for (int j = 0; j < n; ++j)
        e += Expression(Rational(static_cast<long long>(std::llround(g1.a(i, j) * 1e9)), 1000000000)) *
             Expression::symbol(kX2.name(j));
      phi.push_back(e);
    }
    const CoordinateFrame params = n == 1 ? CoordinateFrame({"x1"}) : kX2;
    SecJet q2 = q;
    q2.derivs = q.derivs.truncated(2);
    CHECK(max_diff(reparametrize(ParamMap(params, phi), q2), affine_act(g1, q2)) <= 1e-6);
  }
}

TEST_CASE("cover1_pushforward matches central differences of cover1") {
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng = make_rng(27, 0, static_cast<std::uint64_t>(trial));
    const int n = 1 + trial % 2;
    const SecJet t = random_secjet(n, 4, 1, rng);
    std::vector<double> v(static_cast<std::size_t>(j1pro_dimension(n, 4)));
    for (auto& c : v) c = uniform(rng, -1, 1);
    const auto base = coordinates(t);
    const double h = 1e-6;
    std::vector<double> plus = base, minus = base;
    for (std::size_t i = 0; i < v.size(); ++i) plus[i] += h * v[i], minus[i] -= h * v[i];
    const auto cp = coordinates(cover1(secjet_from_coordinates(n, 4, plus)));
    const auto cm = coordinates(cover1(secjet_from_coordinates(n, 4, minus)));
    std::vector<double> fd(cp.size());
    for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (cp[i] - cm[i]) / (2 * h);
    CHECK(max_diff(cover1_pushforward(t, v), fd) <= 1e-6);
  }
}

TEST_CASE("J^1 coordinates and frames") {
  Rng rng = make_rng(28, 0);
  const SubJet p = random_subjet(2, 2, 1, rng);
  CHECK(max_diff(subjet_from_coordinates(2, 2, coordinates(p)), p) == 0.0);
  const SecJet t = random_secjet(1, 3, 1, rng);
  CHECK(max_diff(secjet_from_coordinates(1, 3, coordinates(t)), t) == 0.0);
  const auto f = j1_frame(CoordinateFrame({"u", "v", "w"}, 1));
  CHECK(f.names() == std::vector<std::string>{"u", "v", "w", "v_u", "w_u"});
  const auto fp = j1pro_frame(CoordinateFrame({"t"}), CoordinateFrame({"u", "v"}, 1));
  CHECK(fp.names() == std::vector<std::string>{"t", "u", "v", "u_t", "v_t"});
  CHECK_THROWS_AS(j1_frame(CoordinateFrame({"a", "b", "b_a"}, 1)), Error);
  CHECK_THROWS_AS(AffineMap(Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2)), Error);
}

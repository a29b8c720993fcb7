#include <cmath>

#include "doctest.h"
#include "jetgeo/connection.hpp"
#include "jetgeo/error.hpp"

using namespace jetgeo;

namespace {

const CoordinateFrame kE3 = CoordinateFrame::numbered("u", 3);
const CoordinateFrame kE4 = CoordinateFrame::numbered("u", 4);

std::vector<Expression> random_one_form(const CoordinateFrame& frame, Rng& rng) {
  std::vector<Expression> phi;
  for (int a = 0; a < frame.dimension(); ++a) phi.push_back(random_polynomial(frame, 2, rng));
  return phi;
}

// Thomas invariants evaluated from numbers only, without going through thomas_pi.
std::vector<double> numeric_pi(const ChristoffelTable& t) {
  const int l = t.dimension();
  std::vector<double> trace(static_cast<std::size_t>(l), 0.0);
  for (int a = 0; a < l; ++a)
    for (int f = 0; f < l; ++f) trace[static_cast<std::size_t>(a)] += t(a, f, f);
  std::vector<double> pi;
  for (int a = 0; a < l; ++a)
    for (int c = 0; c < l; ++c)
      for (int b = 0; b < l; ++b)
        pi.push_back(t(a, c, b) - ((b == c ? trace[static_cast<std::size_t>(a)] : 0.0) +
                                   (a == c ? trace[static_cast<std::size_t>(b)] : 0.0)) /
                                      (l + 1));
  return pi;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("connection storage is symmetric and validates entries") {
  const auto g = Connection::from_entries(kE3, {{0, 2, 1, parse("u1*u3", kE3)}});
  CHECK(structurally_equal(g.symbol(2, 1, 0), g.symbol(0, 1, 2)));
  CHECK(g.symbol(1, 1, 1).is_zero());
  CHECK_NOTHROW(Connection::from_entries(kE3, {{0, 1, 2, parse("u1", kE3)}, {1, 0, 2, parse("u1", kE3)}}));
  CHECK_THROWS_AS(Connection::from_entries(kE3, {{0, 1, 2, parse("u1", kE3)}, {1, 0, 2, parse("u2", kE3)}}),
                  Error);
  CHECK_THROWS_AS(Connection::from_entries(kE3, {{0, 3, 2, Expression(1LL)}}), Error);
  CHECK_THROWS_AS(Connection::from_entries(kE3, {{0, 0, 0, Expression::symbol("w")}}), Error);
  const double p[] = {2, 5, 3};
  const auto t = g.evaluate(p);
  CHECK(t(0, 1, 2) == 6.0);
  CHECK(t(2, 1, 0) == 6.0);
}

TEST_CASE("projective_shift of the zero connection by (1, 0, 0)") {
  const std::vector<Expression> phi{Expression(1LL), Expression(), Expression()};
  const auto g = projective_shift(Connection(kE3), phi);
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c)
      for (int b = 0; b < 3; ++b) {
        Rational expected = 0;
        if (a == 0 && b == 0 && c == 0) expected = -2;
        else if ((a == 0 && b == c) || (b == 0 && a == c)) expected = -1;
        REQUIRE(g.symbol(a, c, b).is_constant());
        CHECK(g.symbol(a, c, b).constant() == expected);
      }
  CHECK_THROWS_AS(projective_shift(g, std::vector<Expression>{Expression(1LL)}), DimensionMismatch);
}

TEST_CASE("projective_shift identity and inverse") {
  Rng rng = make_rng(1, 0);
  const auto g = random_polynomial_connection(kE3, 2, rng);
  const std::vector<Expression> zero(3);
  const auto same = projective_shift(g, zero);
  const auto a = components(g);
  const auto b = components(same);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(structurally_equal(a[i], b[i]));

  const auto phi = random_one_form(kE3, rng);
  std::vector<Expression> minus;
  for (const auto& e : phi) minus.push_back(-e);
  const auto back = projective_shift(projective_shift(g, phi), minus);
  SamplingOptions opts;
  opts.points = 10;
  CHECK(connection_deviation(g, back, opts).max_abs <= 1e-12);
}

TEST_CASE("thomas_pi: zero connection, shifted zero connection, numeric oracle") {
  const auto flat = thomas_pi(Connection(kE3));
  for (const auto& e : flat.values()) CHECK(e.is_zero());

  Rng rng = make_rng(2, 0);
  const auto shifted = projective_shift(Connection(kE4), random_one_form(kE4, rng));
  const auto pi = thomas_pi(shifted);
  SamplingOptions opts;
  const std::vector<Expression> zeros(pi.values().size());
  CHECK(max_deviation(pi.values(), zeros, kE4, opts).max_abs <= 1e-12);

  const auto g = random_polynomial_connection(kE3, 2, rng);
  const auto sym = thomas_pi(g);
  for (int i = 0; i < 5; ++i) {
    const auto p = sample_point(kE3, opts, 9, static_cast<std::uint64_t>(i));
    CHECK(max_abs_diff(evaluate_all(sym.values(), kE3, p), numeric_pi(g.evaluate(p))) <= 1e-12);
  }
}

TEST_CASE("property: thomas_pi is traceless and invariant under projective shifts") {
  SamplingOptions opts;
  opts.points = 20;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng = make_rng(3, 0, static_cast<std::uint64_t>(trial));
    const auto& frame = trial % 2 ? kE3 : kE4;
    const int l = frame.dimension();
    const auto g = random_polynomial_connection(frame, 2, rng);
    const auto shifted = projective_shift(g, random_one_form(frame, rng));
    const auto pi = thomas_pi(g);
    const auto pi2 = thomas_pi(shifted);
    CHECK(max_deviation(pi.values(), pi2.values(), frame, opts).max_abs <= 1e-10);

    std::vector<Expression> traces;
    for (int a = 0; a < l; ++a) {
      Expression t;
      for (int f = 0; f < l; ++f) t += pi(a, f, f);
      traces.push_back(t);
    }
    CHECK(max_deviation(traces, std::vector<Expression>(traces.size()), frame, opts).max_abs <= 1e-10);
  }
}

TEST_CASE("grass_invariants: zero connection, pass-through, split checks") {
  for (const auto& e : grass_invariants(Connection(kE4), 2).flatten()) CHECK(e.is_zero());

  // only Γ_j^β_i nonzero (n = 2: Greek 0,1; Latin 2,3)
  const auto g = Connection::from_entries(
      kE4, {{2, 3, 0, parse("u1*u4", kE4)}, {2, 2, 1, parse("u3^2", kE4)}, {3, 3, 1, Expression(7LL)}});
  const auto inv = grass_invariants(g, 2);
  CHECK(structurally_equal(inv.g3(2, 0, 3), parse("u1*u4", kE4)));
  CHECK(structurally_equal(inv.g3(3, 0, 2), parse("u1*u4", kE4)));
  CHECK(structurally_equal(inv.g3(2, 1, 2), parse("u3^2", kE4)));
  CHECK(structurally_equal(inv.g3(3, 1, 3), Expression(7LL)));
  CHECK(inv.g3(2, 1, 3).is_zero());
  for (int lam = 0; lam < 2; ++lam)
    for (int k = 2; k < 4; ++k)
      for (int xi = 0; xi < 2; ++xi) CHECK(inv.g0(lam, k, xi).is_zero());

  CHECK_THROWS_AS(grass_invariants(g, 0), BadSplit);
  CHECK_THROWS_AS(grass_invariants(g, 4), BadSplit);
}

TEST_CASE("grass_invariants: order-1 family formula at a point") {
  Rng rng = make_rng(4, 0);
  const auto g = random_polynomial_connection(kE3, 2, rng);
  const auto inv = grass_invariants(g, 1);
  const double p[] = {0.3, -0.2, 0.7};
  const auto t = g.evaluate(p);
  const Assignment at(kE3, p);
  // n = 1: G1[0,k,i,0,0] = 2 Γ_0^k_i − δ_i^k Γ_0^0_0
  for (int k = 1; k < 3; ++k)
    for (int i = 1; i < 3; ++i) {
      const double expected = 2 * t(0, k, i) - (i == k ? t(0, 0, 0) : 0.0);
      CHECK(evaluate(inv.g1(0, k, i, 0, 0), at) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("grass_shift: zero perturbation, n = 1 agrees with projective_shift") {
  Rng rng = make_rng(5, 0);
  const auto g = random_polynomial_connection(kE3, 2, rng);
  const auto same = grass_shift(g, 2, GrassShift{{Expression(), Expression()}, {Expression()}});
  const auto a = components(g);
  const auto b = components(same);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(structurally_equal(a[i], b[i]));

  const auto phi = random_one_form(kE3, rng);
  const auto via_grass = grass_shift(g, 1, GrassShift{{phi[0]}, {phi[1], phi[2]}});
  SamplingOptions opts;
  opts.points = 10;
  CHECK(connection_deviation(via_grass, projective_shift(g, phi), opts).max_abs <= 1e-12);
  CHECK_THROWS_AS(grass_shift(g, 1, GrassShift{{phi[0]}, {phi[1]}}), DimensionMismatch);
  CHECK_THROWS_AS(grass_shift(g, 3, GrassShift{}), BadSplit);
}

TEST_CASE("property: admissible perturbations leave the invariants unchanged") {
  SamplingOptions opts;
  for (int trial = 0; trial < 12; ++trial) {
    Rng rng = make_rng(6, 0, static_cast<std::uint64_t>(trial));
    const auto& frame = trial % 3 == 0 ? kE3 : kE4;
    const int l = frame.dimension();
    const int n = 1 + trial % (l - 1);
    const auto g = random_polynomial_connection(frame, 2, rng);
    GrassShift s;
    for (int i = 0; i < n; ++i) s.psi.push_back(random_polynomial(frame, 2, rng));
    for (int i = n; i < l; ++i) s.phi.push_back(random_polynomial(frame, 2, rng));
    const auto shifted = grass_shift(g, n, s);
    CAPTURE(n);
    CAPTURE(l);
    CHECK(max_deviation(grass_invariants(g, n).flatten(), grass_invariants(shifted, n).flatten(), frame, opts)
              .max_abs <= 1e-10);
  }
}

TEST_CASE("the order-2 family is only invariant after pair symmetrization") {
  // Unsymmetrized coefficient δ_λ^α δ_ξ^β Γ_j^k_i − δ_ξ^α δ_i^k Γ_λ^β_j − δ_λ^α δ_i^k Γ_j^β_ξ
  // changes under a shift by φ_i when n = 2; the stored family does not.
  const auto g = Connection(kE4);
  const auto shifted = grass_shift(g, 2, GrassShift{{Expression(), Expression()}, {Expression(1LL), Expression()}});
  auto raw = [](const Connection& c, int j, int k, int i, int alpha, int beta, int lam, int xi) {
    const double p[] = {0, 0, 0, 0};
    const auto t = c.evaluate(p);
    auto d = [](int x, int y) { return x == y ? 1.0 : 0.0; };
    return d(lam, alpha) * d(xi, beta) * t(j, k, i) - d(xi, alpha) * d(i, k) * t(lam, beta, j) -
           d(lam, alpha) * d(i, k) * t(j, beta, xi);
  };
  // j = 3, k = 3, i = 2, α = 1, β = 0, λ = 1, ξ = 0
  CHECK(std::abs(raw(g, 3, 3, 2, 1, 0, 1, 0) - raw(shifted, 3, 3, 2, 1, 0, 1, 0)) > 0.5);
  const auto a = grass_invariants(g, 2);
  const auto b = grass_invariants(shifted, 2);
  CHECK(b.g2(3, 3, 2, 1, 0, 1, 0).is_zero());
  CHECK(a.g2(3, 3, 2, 1, 0, 1, 0).is_zero());
}

TEST_CASE("grass_shift from a difference table") {
  Rng rng = make_rng(7, 0);
  const auto g = random_polynomial_connection(kE4, 2, rng);
  GrassShift s{{random_polynomial(kE4, 1, rng), random_polynomial(kE4, 1, rng)},
               {random_polynomial(kE4, 1, rng), random_polynomial(kE4, 1, rng)}};
  const auto expected = grass_shift(g, 2, s);
  const auto difference = Connection::generate(kE4, [&](int a, int c, int b) {
    return g.symbol(a, c, b) - expected.symbol(a, c, b);
  });
  SamplingOptions opts;
  CHECK(connection_deviation(grass_shift(g, 2, difference, opts), expected, opts).max_abs <= 1e-12);

  // a difference in the frozen block Γ_λ^k_ξ is not admissible
  const auto bad = Connection::from_entries(kE4, {{0, 1, 2, parse("u1 + 1", kE4)}});
  CHECK_THROWS_AS(grass_shift(g, 2, bad, opts), InconsistentPerturbation);
  // a trace-free mixed difference is not admissible either
  const auto bad2 = Connection::from_entries(kE4, {{0, 2, 3, Expression(1LL)}});
  CHECK_THROWS_AS(grass_shift(g, 2, bad2, opts), InconsistentPerturbation);
}

TEST_CASE("property: n = 1 projective equivalence implies equal invariants") {
  SamplingOptions opts;
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng = make_rng(8, 0, static_cast<std::uint64_t>(trial));
    const auto g = random_polynomial_connection(kE3, 2, rng);
    const auto h = projective_shift(g, random_one_form(kE3, rng));
    CHECK(max_deviation(grass_invariants(g, 1).flatten(), grass_invariants(h, 1).flatten(), kE3, opts).max_abs <=
          1e-10);
  }
}

#include "jetgeo/connection.hpp"

#include <string>

#include "jetgeo/error.hpp"

namespace jetgeo {

namespace {

Expression delta(int a, int b) { return Expression(a == b ? 1LL : 0LL); }

void check_symbols(const Expression& e, const CoordinateFrame& frame) {
  for (const auto& name : symbols(e))
    if (!frame.contains(name)) throw Error("Christoffel expression uses '" + name + "', which is not a coordinate");
}

}  // namespace

Connection::Connection(CoordinateFrame frame) : frame_(std::move(frame)) {
  const int l = frame_.dimension();
  table_.assign(static_cast<std::size_t>(l * (l + 1) / 2 * l), Expression());
}

std::size_t Connection::slot(int a, int c, int b) const {
  const int l = frame_.dimension();
  if (a < 0 || b < 0 || c < 0 || a >= l || b >= l || c >= l)
    throw DimensionMismatch("Christoffel index out of range");
  if (a > b) std::swap(a, b);
  // row-major over the upper triangle a <= b
  const int pair = a * l - a * (a - 1) / 2 + (b - a);
  return static_cast<std::size_t>(pair * l + c);
}

Connection Connection::generate(CoordinateFrame frame, const std::function<Expression(int, int, int)>& symbol) {
  Connection g(std::move(frame));
  const int l = g.dimension();
  for (int a = 0; a < l; ++a)
    for (int b = a; b < l; ++b)
      for (int c = 0; c < l; ++c) g.table_[g.slot(a, c, b)] = symbol(a, c, b);
  return g;
}

Connection Connection::from_entries(CoordinateFrame frame, const std::vector<ChristoffelEntry>& entries) {
  Connection g(std::move(frame));
  const int l = g.dimension();
  std::vector<const ChristoffelEntry*> seen(g.table_.size(), nullptr);
  for (const auto& e : entries) {
    if (e.lower_a < 0 || e.lower_b < 0 || e.upper < 0 || e.lower_a >= l || e.lower_b >= l || e.upper >= l)
      throw Error("Christoffel index out of range 1.." + std::to_string(l));
    check_symbols(e.expr, g.frame_);
    const std::size_t s = g.slot(e.lower_a, e.upper, e.lower_b);
    if (seen[s] && !structurally_equal(seen[s]->expr, e.expr))
      throw Error("conflicting entries for Gamma_" + std::to_string(e.lower_a + 1) + "^" +
                  std::to_string(e.upper + 1) + "_" + std::to_string(e.lower_b + 1));
    seen[s] = &e;
    g.table_[s] = e.expr;
  }
  return g;
}

const Expression& Connection::symbol(int a, int c, int b) const { return table_[slot(a, c, b)]; }

ChristoffelTable Connection::evaluate(std::span<const double> point) const {
  const int l = dimension();
  const Assignment at(frame_, point);
  ChristoffelTable t(l);
  for (int a = 0; a < l; ++a)
    for (int b = a; b < l; ++b)
      for (int c = 0; c < l; ++c) {
        const Expression& e = table_[slot(a, c, b)];
        const double v = e.is_constant() ? e.constant_double() : jetgeo::evaluate(e, at);
        t(a, c, b) = v;
        t(b, c, a) = v;
      }
  return t;
}

bool Connection::is_structurally_zero() const {
  for (const auto& e : table_)
    if (!e.is_zero()) return false;
  return true;
}

Connection projective_shift(const Connection& g, std::span<const Expression> phi) {
  const int l = g.dimension();
  if (static_cast<int>(phi.size()) != l)
    throw DimensionMismatch("projective shift needs " + std::to_string(l) + " functions, got " +
                            std::to_string(phi.size()));
  return Connection::generate(g.frame(), [&](int a, int c, int b) {
    Expression e = g.symbol(a, c, b);
    if (a == c) e -= phi[static_cast<std::size_t>(b)];
    if (b == c) e -= phi[static_cast<std::size_t>(a)];
    return e;
  });
}

ProjInvariants thomas_pi(const Connection& g) {
  const int l = g.dimension();
  std::vector<Expression> trace(static_cast<std::size_t>(l));
  for (int a = 0; a < l; ++a)
    for (int f = 0; f < l; ++f) trace[static_cast<std::size_t>(a)] += g.symbol(a, f, f);
  const Expression k(Rational(1, l + 1));
  std::vector<Expression> pi;
  pi.reserve(static_cast<std::size_t>(l * l * l));
  for (int a = 0; a < l; ++a)
    for (int c = 0; c < l; ++c)
      for (int b = 0; b < l; ++b) {
        Expression e = g.symbol(a, c, b);
        if (b == c) e -= k * trace[static_cast<std::size_t>(a)];
        if (a == c) e -= k * trace[static_cast<std::size_t>(b)];
        pi.push_back(e);
      }
  return ProjInvariants(l, std::move(pi));
}

GrassInvariants::GrassInvariants(int n, int m)
    : n_(n),
      m_(m),
      g0_(static_cast<std::size_t>(n * m * n)),
      g1_(static_cast<std::size_t>(n * m * m * n * n)),
      g2_(static_cast<std::size_t>(m * m * m * n * n * n * n)),
      g3_(static_cast<std::size_t>(m * n * m)) {}

Expression& GrassInvariants::g0_ref(int lambda, int k, int xi) {
  return g0_[static_cast<std::size_t>((lambda * m_ + (k - n_)) * n_ + xi)];
}
Expression& GrassInvariants::g1_ref(int lambda, int k, int i, int beta, int xi) {
  return g1_[static_cast<std::size_t>((((lambda * m_ + (k - n_)) * m_ + (i - n_)) * n_ + beta) * n_ + xi)];
}
Expression& GrassInvariants::g2_ref(int j, int k, int i, int alpha, int beta, int lambda, int xi) {
  const int idx = (((((j - n_) * m_ + (k - n_)) * m_ + (i - n_)) * n_ + alpha) * n_ + beta) * n_ + lambda;
  return g2_[static_cast<std::size_t>(idx * n_ + xi)];
}
Expression& GrassInvariants::g3_ref(int j, int beta, int i) {
  return g3_[static_cast<std::size_t>(((j - n_) * n_ + beta) * m_ + (i - n_))];
}

const Expression& GrassInvariants::g0(int lambda, int k, int xi) const {
  return const_cast<GrassInvariants*>(this)->g0_ref(lambda, k, xi);
}
const Expression& GrassInvariants::g1(int lambda, int k, int i, int beta, int xi) const {
  return const_cast<GrassInvariants*>(this)->g1_ref(lambda, k, i, beta, xi);
}
const Expression& GrassInvariants::g2(int j, int k, int i, int alpha, int beta, int lambda, int xi) const {
  return const_cast<GrassInvariants*>(this)->g2_ref(j, k, i, alpha, beta, lambda, xi);
}
const Expression& GrassInvariants::g3(int j, int beta, int i) const {
  return const_cast<GrassInvariants*>(this)->g3_ref(j, beta, i);
}

std::vector<Expression> GrassInvariants::flatten() const {
  std::vector<Expression> all;
  all.reserve(g0_.size() + g1_.size() + g2_.size() + g3_.size());
  for (const auto* family : {&g0_, &g1_, &g2_, &g3_}) all.insert(all.end(), family->begin(), family->end());
  return all;
}

GrassInvariants grass_invariants(const Connection& g, int n) {
  const int l = g.dimension();
  if (n < 1 || n >= l)
    throw BadSplit("split n=" + std::to_string(n) + " outside 1.." + std::to_string(l - 1));
  GrassInvariants inv(n, l - n);
  for (int lam = 0; lam < n; ++lam)
    for (int k = n; k < l; ++k)
      for (int xi = 0; xi < n; ++xi) inv.g0_ref(lam, k, xi) = g.symbol(lam, k, xi);

  for (int lam = 0; lam < n; ++lam)
    for (int k = n; k < l; ++k)
      for (int i = n; i < l; ++i)
        for (int beta = 0; beta < n; ++beta)
          for (int xi = 0; xi < n; ++xi)
            inv.g1_ref(lam, k, i, beta, xi) = delta(xi, beta) * g.symbol(lam, k, i) +
                                              delta(lam, beta) * g.symbol(i, k, xi) -
                                              delta(i, k) * g.symbol(lam, beta, xi);

  auto raw_g2 = [&](int j, int k, int i, int alpha, int beta, int lam, int xi) {
    return delta(lam, alpha) * delta(xi, beta) * g.symbol(j, k, i) -
           delta(xi, alpha) * delta(i, k) * g.symbol(lam, beta, j) -
           delta(lam, alpha) * delta(i, k) * g.symbol(j, beta, xi);
  };
  const Expression half(Rational(1, 2));
  for (int j = n; j < l; ++j)
    for (int k = n; k < l; ++k)
      for (int i = n; i < l; ++i)
        for (int alpha = 0; alpha < n; ++alpha)
          for (int beta = 0; beta < n; ++beta)
            for (int lam = 0; lam < n; ++lam)
              for (int xi = 0; xi < n; ++xi)
                inv.g2_ref(j, k, i, alpha, beta, lam, xi) =
                    half * (raw_g2(j, k, i, alpha, beta, lam, xi) + raw_g2(i, k, j, beta, alpha, lam, xi));

  for (int j = n; j < l; ++j)
    for (int beta = 0; beta < n; ++beta)
      for (int i = n; i < l; ++i) inv.g3_ref(j, beta, i) = g.symbol(j, beta, i);
  return inv;
}

Connection grass_shift(const Connection& g, int n, const GrassShift& shift) {
  const int l = g.dimension();
  if (n < 1 || n >= l)
    throw BadSplit("split n=" + std::to_string(n) + " outside 1.." + std::to_string(l - 1));
  if (static_cast<int>(shift.psi.size()) != n || static_cast<int>(shift.phi.size()) != l - n)
    throw DimensionMismatch("perturbation needs " + std::to_string(n) + " Greek and " + std::to_string(l - n) +
                            " Latin functions");
  // Φ = (ψ_λ, φ_i); the general admissible difference is a projective one.
  std::vector<Expression> phi(shift.psi);
  phi.insert(phi.end(), shift.phi.begin(), shift.phi.end());
  return projective_shift(g, phi);
}

Connection grass_shift(const Connection& g, int n, const Connection& difference, const SamplingOptions& opts) {
  const int l = g.dimension();
  if (!difference.frame().same_coordinates(g.frame())) throw FrameMismatch("difference table uses a different frame");
  if (n < 1 || n >= l)
    throw BadSplit("split n=" + std::to_string(n) + " outside 1.." + std::to_string(l - 1));
  GrassShift traces;
  for (int lam = 0; lam < n; ++lam) traces.psi.push_back(difference.symbol(lam, n, n));
  for (int i = n; i < l; ++i) traces.phi.push_back(difference.symbol(0, 0, i));
  const Connection zero(g.frame());
  const Connection admissible = grass_shift(zero, n, traces);  // = −D for admissible D
  for (int a = 0; a < l; ++a)
    for (int b = a; b < l; ++b)
      for (int c = 0; c < l; ++c) {
        const Expression lhs[] = {difference.symbol(a, c, b)};
        const Expression rhs[] = {-admissible.symbol(a, c, b)};
        const Deviation d = max_deviation(lhs, rhs, g.frame(), opts);
        if (d.max_abs > opts.tol)
          throw InconsistentPerturbation("difference component (" + std::to_string(a + 1) + "," +
                                         std::to_string(c + 1) + "," + std::to_string(b + 1) +
                                         ") violates the equivalence relations by " + std::to_string(d.max_abs));
      }
  return Connection::generate(g.frame(), [&](int a, int c, int b) {
    return g.symbol(a, c, b) - difference.symbol(a, c, b);
  });
}

std::vector<Expression> components(const Connection& g) {
  std::vector<Expression> out;
  const int l = g.dimension();
  for (int a = 0; a < l; ++a)
    for (int b = a; b < l; ++b)
      for (int c = 0; c < l; ++c) out.push_back(g.symbol(a, c, b));
  return out;
}

Deviation connection_deviation(const Connection& a, const Connection& b, const SamplingOptions& opts,
                               std::uint64_t stream) {
  if (!a.frame().same_coordinates(b.frame())) throw FrameMismatch("connections use different frames");
  return max_deviation(components(a), components(b), a.frame(), opts, stream);
}

Connection random_polynomial_connection(const CoordinateFrame& frame, int degree, Rng& rng) {
  return Connection::generate(frame, [&](int, int, int) { return random_polynomial(frame, degree, rng); });
}

}  // namespace jetgeo

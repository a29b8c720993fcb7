#include "jetgeo/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jetgeo/error.hpp"

namespace jetgeo {

namespace {

void check_subjet(int dim, const SubJet& p, int order, const char* op) {
  if (p.dimension() != dim)
    throw FrameMismatch(std::string(op) + ": jet has " + std::to_string(p.dimension()) +
                        " coordinates, connection has " + std::to_string(dim));
  if (p.order() < order) throw DimensionMismatch(std::string(op) + " needs a jet of order >= " + std::to_string(order));
}

void check_secjet(const Connection& g, const Connection& theta, const SecJet& t, int order, const char* op) {
  if (g.dimension() != t.l || theta.dimension() != t.n)
    throw DimensionMismatch(std::string(op) + ": jet over R^" + std::to_string(t.n) + " -> " + std::to_string(t.l) +
                            " coordinates does not match connections of dimension " +
                            std::to_string(g.dimension()) + " and " + std::to_string(theta.dimension()));
  if (t.order() < order) throw DimensionMismatch(std::string(op) + " needs a jet of order >= " + std::to_string(order));
}

double max_abs_of(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

DotGamma dot_gamma(const ChristoffelTable& gamma, const SubJet& p) {
  check_subjet(gamma.dimension(), p, 1, "dot_gamma");
  const int n = p.n;
  const int l = p.dimension();
  DotGamma dot(n, p.m);
  for (int a = 0; a < l; ++a)
    for (int xi = 0; xi < n; ++xi) {
      // Y^C = Γ_A^C_ξ + Γ_A^C_i u^i_ξ for every C
      std::vector<double> y(static_cast<std::size_t>(l));
      for (int c = 0; c < l; ++c) {
        double s = gamma(a, c, xi);
        for (int i = n; i < l; ++i) s += gamma(a, c, i) * p.first(i, xi);
        y[static_cast<std::size_t>(c)] = s;
      }
      for (int k = n; k < l; ++k) {
        double s = y[static_cast<std::size_t>(k)];
        for (int beta = 0; beta < n; ++beta) s -= p.first(k, beta) * y[static_cast<std::size_t>(beta)];
        dot(a, k, xi) = s;
      }
    }
  return dot;
}

DotGamma dot_gamma(const Connection& g, const SubJet& p) {
  check_subjet(g.dimension(), p, 1, "dot_gamma");
  return dot_gamma(g.evaluate(p.base), p);
}

XiTable::XiTable(int n, int m)
    : n_(n), m_(m), base_(static_cast<std::size_t>((n + m) * n * n), 0.0), jet_(static_cast<std::size_t>(n * m * n * n), 0.0) {}

XiTable XiTable::random(int n, int m, Rng& rng) {
  XiTable t(n, m);
  for (auto& v : t.base_) v = uniform(rng, -1, 1);
  for (auto& v : t.jet_) v = uniform(rng, -1, 1);
  return t;
}

OmegaProjection project_omega(const Connection& g, const XiTable& xi_table, const SubJet& p) {
  check_subjet(g.dimension(), p, 1, "dot_gamma_via_xi");
  const int n = p.n;
  const int m = p.m;
  const int l = n + m;
  if (xi_table.n() != n || xi_table.m() != m) throw DimensionMismatch("auxiliary table has the wrong shape");
  const ChristoffelTable gamma = g.evaluate(p.base);

  // Ω at the point.
  //   Ω_A^C_ξ^λ_B    = δ_B^C Ξ_A_ξ^λ + δ_ξ^λ Γ_A^C_B
  //   Ω^α_h^C_ξ^λ_B  = δ_B^C Ξ^α_h_ξ^λ
  auto ob = [&](int a, int c, int xi, int lam, int b) {
    return (b == c ? xi_table.base(a, xi, lam) : 0.0) + (xi == lam ? gamma(a, c, b) : 0.0);
  };
  auto oj = [&](int alpha, int h, int c, int xi, int lam, int b) {
    return b == c ? xi_table.jet(alpha, h, xi, lam) : 0.0;
  };
  std::vector<double> omega_base(static_cast<std::size_t>(l * l * n * n * l));
  std::vector<double> omega_jet(static_cast<std::size_t>(n * m * l * n * n * l));
  {
    std::size_t i = 0;
    for (int a = 0; a < l; ++a)
      for (int c = 0; c < l; ++c)
        for (int xi = 0; xi < n; ++xi)
          for (int lam = 0; lam < n; ++lam)
            for (int b = 0; b < l; ++b) omega_base[i++] = ob(a, c, xi, lam, b);
    i = 0;
    for (int alpha = 0; alpha < n; ++alpha)
      for (int h = n; h < l; ++h)
        for (int c = 0; c < l; ++c)
          for (int xi = 0; xi < n; ++xi)
            for (int lam = 0; lam < n; ++lam)
              for (int b = 0; b < l; ++b) omega_jet[i++] = oj(alpha, h, c, xi, lam, b);
  }
  // D^1 = du^λ ⊗ (∂_λ + u^i_λ ∂_i): D^B_λ
  auto d1 = [&](int b, int lam) { return b < n ? (b == lam ? 1.0 : 0.0) : p.first(b, lam); };

  OmegaProjection out{DotGamma(n, m), std::vector<double>(static_cast<std::size_t>(m * n * m * n), 0.0)};
  std::vector<double> y(static_cast<std::size_t>(l));
  for (int a = 0; a < l; ++a)
    for (int xi = 0; xi < n; ++xi) {
      for (int c = 0; c < l; ++c) {
        double s = 0;
        for (int lam = 0; lam < n; ++lam)
          for (int b = 0; b < l; ++b)
            s += omega_base[static_cast<std::size_t>((((a * l + c) * n + xi) * n + lam) * l + b)] * d1(b, lam);
        y[static_cast<std::size_t>(c)] = s;
      }
      for (int k = n; k < l; ++k) {
        double s = y[static_cast<std::size_t>(k)];
        for (int beta = 0; beta < n; ++beta) s -= p.first(k, beta) * y[static_cast<std::size_t>(beta)];
        out.dot(a, k, xi) = s;
      }
    }
  for (int alpha = 0; alpha < n; ++alpha)
    for (int h = n; h < l; ++h)
      for (int xi = 0; xi < n; ++xi) {
        for (int c = 0; c < l; ++c) {
          double s = 0;
          for (int lam = 0; lam < n; ++lam)
            for (int b = 0; b < l; ++b)
              s += omega_jet[static_cast<std::size_t>(((((alpha * m + (h - n)) * l + c) * n + xi) * n + lam) * l + b)] *
                   d1(b, lam);
          // vertical derivative of D^1 itself: ∂(D^C_ξ)/∂u^h_α
          if (c == h && xi == alpha) s += 1.0;
          y[static_cast<std::size_t>(c)] = s;
        }
        for (int k = n; k < l; ++k) {
          double s = y[static_cast<std::size_t>(k)];
          for (int beta = 0; beta < n; ++beta) s -= p.first(k, beta) * y[static_cast<std::size_t>(beta)];
          const int row = (k - n) * n + xi;
          const int col = (h - n) * n + alpha;
          out.jet_block[static_cast<std::size_t>(row * m * n + col)] = s;
        }
      }
  return out;
}

DotGamma dot_gamma_via_xi(const Connection& g, const XiTable& xi, const SubJet& p) {
  return project_omega(g, xi, p).dot;
}

SubJet ddot_gamma(const Connection& g, const SubJet& p) {
  const DotGamma dot = dot_gamma(g, p);
  const int n = p.n;
  const int l = p.dimension();
  SubJet q(n, p.m, 2);
  q.base = p.base;
  for (int k = n; k < l; ++k)
    for (int xi = 0; xi < n; ++xi) q.first(k, xi) = p.first(k, xi);
  auto rhs = [&](int k, int lam, int xi) {
    double s = dot(lam, k, xi);
    for (int j = n; j < l; ++j) s += p.first(j, lam) * dot(j, k, xi);
    return -s;
  };
  for (int k = n; k < l; ++k)
    for (const auto& sigma : multi_indices(n, 2)) {
      const int lam = sigma.indices()[0];
      const int xi = sigma.indices()[1];
      q.d(k, sigma) = 0.5 * (rhs(k, lam, xi) + rhs(k, xi, lam));
    }
  return q;
}

double Residual2::max_abs() const { return max_abs_of(values_); }
double ParamResidual2::max_abs() const { return max_abs_of(values_); }

Residual2 residual2(const Connection& g, const SubJet& q) {
  check_subjet(g.dimension(), q, 2, "residual2");
  const int n = q.n;
  const int l = q.dimension();
  const ChristoffelTable gm = g.evaluate(q.base);
  auto u = [&](int i, int xi) { return q.first(i, xi); };
  // Γ_λ^C_ξ + Γ_λ^C_i u^i_ξ + Γ_j^C_ξ u^j_λ + Γ_j^C_i u^j_λ u^i_ξ
  auto bracket = [&](int c, int lam, int xi) {
    double s = gm(lam, c, xi);
    for (int i = n; i < l; ++i) s += gm(lam, c, i) * u(i, xi);
    for (int j = n; j < l; ++j) s += gm(j, c, xi) * u(j, lam);
    for (int j = n; j < l; ++j)
      for (int i = n; i < l; ++i) s += gm(j, c, i) * u(j, lam) * u(i, xi);
    return s;
  };
  auto verbatim = [&](int k, int lam, int xi) {
    double s = q.second(k, lam, xi) + bracket(k, lam, xi);
    for (int beta = 0; beta < n; ++beta) s -= u(k, beta) * bracket(beta, lam, xi);
    return s;
  };
  Residual2 r(n, q.m);
  for (int k = n; k < l; ++k)
    for (int lam = 0; lam < n; ++lam)
      for (int xi = 0; xi < n; ++xi) r(k, lam, xi) = 0.5 * (verbatim(k, lam, xi) + verbatim(k, xi, lam));
  return r;
}

ParamResidual2 param_residual2(const Connection& g, const Connection& theta, const SecJet& q) {
  check_secjet(g, theta, q, 2, "param_residual2");
  const int n = q.n;
  const int l = q.l;
  const ChristoffelTable gm = g.evaluate(q.u);
  const ChristoffelTable th = theta.evaluate(q.x);
  ParamResidual2 r(n, l);
  for (int c = 0; c < l; ++c)
    for (int xi = 0; xi < n; ++xi)
      for (int lam = 0; lam < n; ++lam) {
        double s = q.second(c, xi, lam);
        for (int a = 0; a < l; ++a)
          for (int b = 0; b < l; ++b) s += gm(a, c, b) * q.first(a, xi) * q.first(b, lam);
        for (int eta = 0; eta < n; ++eta) s -= th(xi, eta, lam) * q.first(c, eta);
        r(c, xi, lam) = s;
      }
  return r;
}

DotGammaPro dot_gamma_pro(const Connection& g, const Connection& theta, const SecJet& p) {
  check_secjet(g, theta, p, 1, "dot_gamma_pro");
  const int n = p.n;
  const int l = p.l;
  const ChristoffelTable gm = g.evaluate(p.u);
  const ChristoffelTable th = theta.evaluate(p.x);
  DotGammaPro d(n, l);
  for (int lam = 0; lam < n; ++lam)
    for (int a = 0; a < l; ++a)
      for (int eta = 0; eta < n; ++eta) {
        double s = 0;
        for (int xi = 0; xi < n; ++xi) s += th(lam, xi, eta) * p.first(a, xi);
        d.horizontal(lam, a, eta) = s;
      }
  for (int a = 0; a < l; ++a)
    for (int c = 0; c < l; ++c)
      for (int xi = 0; xi < n; ++xi) {
        double s = 0;
        for (int b = 0; b < l; ++b) s -= gm(a, c, b) * p.first(b, xi);
        d.vertical(a, c, xi) = s;
      }
  return d;
}

SecJet ddot_gamma_pro(const Connection& g, const Connection& theta, const SecJet& p) {
  check_secjet(g, theta, p, 1, "ddot_gamma_pro");
  const int n = p.n;
  const int l = p.l;
  const ChristoffelTable gm = g.evaluate(p.u);
  const ChristoffelTable th = theta.evaluate(p.x);
  SecJet q(n, l, 2);
  q.x = p.x;
  q.u = p.u;
  for (int a = 0; a < l; ++a)
    for (int lam = 0; lam < n; ++lam) q.first(a, lam) = p.first(a, lam);
  for (int c = 0; c < l; ++c)
    for (const auto& sigma : multi_indices(n, 2)) {
      const int xi = sigma.indices()[0];
      const int lam = sigma.indices()[1];
      double s = 0;
      for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b) s -= gm(a, c, b) * p.first(a, xi) * p.first(b, lam);
      for (int eta = 0; eta < n; ++eta) s += th(xi, eta, lam) * p.first(c, eta);
      q.d(c, sigma) = s;
    }
  return q;
}

std::vector<double> vertical_part(const DotGamma& dot, const SubJet& p, std::span<const double> w) {
  const int n = p.n;
  const int l = p.dimension();
  if (static_cast<int>(w.size()) != j1_dimension(n, p.m)) throw DimensionMismatch("tangent vector has wrong size");
  std::vector<double> out(w.size(), 0.0);
  for (int k = n; k < l; ++k)
    for (int xi = 0; xi < n; ++xi) {
      const std::size_t slot = static_cast<std::size_t>(l + (k - n) * n + xi);
      double s = w[slot];
      for (int a = 0; a < l; ++a) s += dot(a, k, xi) * w[static_cast<std::size_t>(a)];
      out[slot] = s;
    }
  return out;
}

std::vector<double> vertical_part(const DotGammaPro& dot, const SecJet& t, std::span<const double> v) {
  const int n = t.n;
  const int l = t.l;
  if (static_cast<int>(v.size()) != j1pro_dimension(n, l)) throw DimensionMismatch("tangent vector has wrong size");
  std::vector<double> out(v.size(), 0.0);
  for (int c = 0; c < l; ++c)
    for (int eta = 0; eta < n; ++eta) {
      const std::size_t slot = static_cast<std::size_t>(n + l + c * n + eta);
      double s = v[slot];
      for (int lam = 0; lam < n; ++lam) s -= v[static_cast<std::size_t>(lam)] * dot.horizontal(lam, c, eta);
      for (int b = 0; b < l; ++b) s -= v[static_cast<std::size_t>(n + b)] * dot.vertical(b, c, eta);
      out[slot] = s;
    }
  return out;
}

std::vector<std::vector<double>> distribution_fields(const Connection& g, const SubJet& p) {
  const DotGamma dot = dot_gamma(g, p);
  const int n = p.n;
  const int l = p.dimension();
  std::vector<std::vector<double>> fields;
  for (int lam = 0; lam < n; ++lam) {
    std::vector<double> x(static_cast<std::size_t>(j1_dimension(n, p.m)), 0.0);
    x[static_cast<std::size_t>(lam)] = 1.0;
    for (int j = n; j < l; ++j) x[static_cast<std::size_t>(j)] = p.first(j, lam);
    for (int k = n; k < l; ++k)
      for (int xi = 0; xi < n; ++xi) {
        double s = dot(lam, k, xi);
        for (int j = n; j < l; ++j) s += p.first(j, lam) * dot(j, k, xi);
        x[static_cast<std::size_t>(l + (k - n) * n + xi)] = -s;
      }
    fields.push_back(std::move(x));
  }
  return fields;
}

std::vector<std::vector<Expression>> distribution_field_expressions(const Connection& g, int n) {
  const int l = g.dimension();
  if (n < 1 || n >= l) throw BadSplit("split n=" + std::to_string(n) + " outside 1.." + std::to_string(l - 1));
  const CoordinateFrame j1 = j1_frame(g.frame().with_split(n));
  auto u1 = [&](int k, int xi) { return Expression::symbol(j1.name(l + (k - n) * n + xi)); };
  // symbolic dotΓ_A^k_ξ
  auto dot = [&](int a, int k, int xi) {
    auto y = [&](int c) {
      Expression s = g.symbol(a, c, xi);
      for (int i = n; i < l; ++i) s += g.symbol(a, c, i) * u1(i, xi);
      return s;
    };
    Expression s = y(k);
    for (int beta = 0; beta < n; ++beta) s -= u1(k, beta) * y(beta);
    return s;
  };
  std::vector<std::vector<Expression>> fields;
  for (int lam = 0; lam < n; ++lam) {
    std::vector<Expression> x(static_cast<std::size_t>(j1.dimension()));
    x[static_cast<std::size_t>(lam)] = Expression(1LL);
    for (int j = n; j < l; ++j) x[static_cast<std::size_t>(j)] = u1(j, lam);
    for (int k = n; k < l; ++k)
      for (int xi = 0; xi < n; ++xi) {
        Expression s = dot(lam, k, xi);
        for (int j = n; j < l; ++j) s += u1(j, lam) * dot(j, k, xi);
        x[static_cast<std::size_t>(l + (k - n) * n + xi)] = -s;
      }
    fields.push_back(std::move(x));
  }
  return fields;
}

std::vector<std::vector<double>> pro_distribution_fields(const Connection& g, const Connection& theta,
                                                         const SecJet& t) {
  const SecJet q = ddot_gamma_pro(g, theta, t);
  const int n = t.n;
  const int l = t.l;
  std::vector<std::vector<double>> fields;
  for (int lam = 0; lam < n; ++lam) {
    std::vector<double> x(static_cast<std::size_t>(j1pro_dimension(n, l)), 0.0);
    x[static_cast<std::size_t>(lam)] = 1.0;
    for (int a = 0; a < l; ++a) x[static_cast<std::size_t>(n + a)] = t.first(a, lam);
    for (int c = 0; c < l; ++c)
      for (int eta = 0; eta < n; ++eta) x[static_cast<std::size_t>(n + l + c * n + eta)] = q.second(c, lam, eta);
    fields.push_back(std::move(x));
  }
  return fields;
}

Trajectory integrate_geodesic(const Connection& g, const Connection& theta, std::span<const double> start,
                              std::span<const double> velocity, double h, int steps, double t0) {
  const int l = g.dimension();
  if (theta.dimension() != 1) throw DimensionMismatch("geodesic integration needs a one-dimensional parameter space");
  if (static_cast<int>(start.size()) != l || static_cast<int>(velocity.size()) != l)
    throw DimensionMismatch("start point and velocity need " + std::to_string(l) + " components");
  if (!(h > 0) || !std::isfinite(h)) throw Error("step size must be positive");
  if (steps < 0) throw Error("step count must be non-negative");

  using State = std::vector<double>;  // u (l) then u' (l)
  auto acceleration = [&](double t, std::span<const double> u, std::span<const double> v) {
    const ChristoffelTable gm = g.evaluate(u);
    const double x[] = {t};
    const double th = theta.evaluate(x)(0, 0, 0);
    State acc(static_cast<std::size_t>(l));
    for (int c = 0; c < l; ++c) {
      double s = th * v[static_cast<std::size_t>(c)];
      for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b) s -= gm(a, c, b) * v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)];
      acc[static_cast<std::size_t>(c)] = s;
    }
    return acc;
  };
  auto rhs = [&](double t, const State& y) {
    const std::span<const double> u(y.data(), static_cast<std::size_t>(l));
    const std::span<const double> v(y.data() + l, static_cast<std::size_t>(l));
    const State acc = acceleration(t, u, v);
    State dy(y.size());
    std::copy(v.begin(), v.end(), dy.begin());
    std::copy(acc.begin(), acc.end(), dy.begin() + l);
    return dy;
  };
  auto emit = [&](double t, const State& y) {
    SecJet jet(1, l, 2);
    jet.x[0] = t;
    const State dy = rhs(t, y);
    for (int a = 0; a < l; ++a) {
      jet.u[static_cast<std::size_t>(a)] = y[static_cast<std::size_t>(a)];
      jet.first(a, 0) = y[static_cast<std::size_t>(l + a)];
      jet.second(a, 0, 0) = dy[static_cast<std::size_t>(l + a)];
    }
    return jet;
  };
  auto axpy = [](const State& y, double s, const State& k) {
    State r(y);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * k[i];
    return r;
  };

  Trajectory out;
  State y(start.begin(), start.end());
  y.insert(y.end(), velocity.begin(), velocity.end());
  double t = t0;
  try {
    out.points.push_back(emit(t, y));
    for (int step = 0; step < steps; ++step) {
      const State k1 = rhs(t, y);
      const State k2 = rhs(t + h / 2, axpy(y, h / 2, k1));
      const State k3 = rhs(t + h / 2, axpy(y, h / 2, k2));
      const State k4 = rhs(t + h, axpy(y, h, k3));
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      t = t0 + (step + 1) * h;
      if (!std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
        out.failure = "non-finite state at t=" + std::to_string(t);
        break;
      }
      out.points.push_back(emit(t, y));
    }
  } catch (const DomainError& e) {
    out.failure = "domain error at t=" + std::to_string(t) + ": " + e.what();
  }
  return out;
}

SubJet sample_subjet(const CoordinateFrame& frame, int n, const SamplingOptions& opts, std::uint64_t stream,
                     std::uint64_t index) {
  const int l = frame.dimension();
  SubJet p(n, l - n, 1);
  p.base = sample_point(frame, opts, stream, index);
  Rng rng = make_rng(opts.seed, stream + (1ULL << 32), index);
  for (int k = n; k < l; ++k)
    for (int xi = 0; xi < n; ++xi) p.first(k, xi) = uniform(rng, -1, 1);
  return p;
}

EquivalenceResult grass_equivalent(const Connection& g1, const Connection& g2, int n, const SamplingOptions& opts) {
  if (!g1.frame().same_coordinates(g2.frame())) throw FrameMismatch("connections use different coordinates");
  const int l = g1.dimension();
  if (n < 1 || n >= l) throw BadSplit("split n=" + std::to_string(n) + " outside 1.." + std::to_string(l - 1));
  EquivalenceResult r;
  const int budget = 20 * std::max(opts.points, 1);
  for (int i = 0; i < budget && r.samples_used < opts.points; ++i) {
    const SubJet p = sample_subjet(g1.frame(), n, opts, 1, static_cast<std::uint64_t>(i));
    try {
      const SubJet a = ddot_gamma(g1, p);
      const SubJet b = ddot_gamma(g2, p);
      for (int k = n; k < l; ++k)
        for (const auto& sigma : multi_indices(n, 2))
          r.max_deviation = std::max(r.max_deviation, std::abs(a.d(k, sigma) - b.d(k, sigma)));
      ++r.samples_used;
    } catch (const DomainError&) {
    }
  }
  r.equivalent = r.samples_used > 0 && r.max_deviation <= opts.tol;
  const Deviation inv =
      max_deviation(grass_invariants(g1, n).flatten(), grass_invariants(g2, n).flatten(), g1.frame(), opts, 2);
  r.invariant_deviation = inv.max_abs;
  r.invariants_equal = inv.points_used > 0 && inv.max_abs <= opts.tol;
  return r;
}

}  // namespace jetgeo

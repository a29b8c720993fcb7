#include "jetgeo/jets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jetgeo/error.hpp"

namespace jetgeo {

MultiIndex::MultiIndex(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
}

MultiIndex MultiIndex::with(int index) const {
  std::vector<int> v = indices_;
  v.push_back(index);
  return MultiIndex(std::move(v));
}

MultiIndex MultiIndex::without_last() const {
  if (indices_.empty()) throw Error("empty multi-index has no last entry");
  return MultiIndex(std::vector<int>(indices_.begin(), indices_.end() - 1));
}

namespace {

void enumerate(int n, int order, int first, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  if (static_cast<int>(prefix.size()) == order) {
    out.emplace_back(prefix);
    return;
  }
  for (int i = first; i < n; ++i) {
    prefix.push_back(i);
    enumerate(n, order, i, prefix, out);
    prefix.pop_back();
  }
}

long long binomial(int a, int b) {
  if (b < 0 || b > a) return 0;
  long long r = 1;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// Number of sorted tuples of length k over n values.
std::size_t count_of_order(int n, int k) { return static_cast<std::size_t>(binomial(n + k - 1, k)); }

Eigen::MatrixXd inverse_checked(const Eigen::MatrixXd& m, double threshold, const char* what) {
  const double det = m.determinant();
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(std::abs(det) > threshold * std::pow(scale, static_cast<double>(m.rows()))))
    throw SingularJacobian(std::string(what) + " is singular (det = " + std::to_string(det) + ")");
  return m.partialPivLu().inverse();
}

void check_order(const SecJet& t, int r, const char* op) {
  if (t.order() < r) throw DimensionMismatch(std::string(op) + " needs a jet of order >= " + std::to_string(r));
}

}  // namespace

std::vector<MultiIndex> multi_indices(int n, int order) {
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  enumerate(n, order, 0, prefix, out);
  return out;
}

std::size_t multi_index_rank(const MultiIndex& sigma, int n) {
  // count tuples that precede sigma lexicographically
  const auto idx = sigma.indices();
  const int k = sigma.order();
  std::size_t rank = 0;
  int lo = 0;
  for (int pos = 0; pos < k; ++pos) {
    for (int v = lo; v < idx[static_cast<std::size_t>(pos)]; ++v) rank += count_of_order(n - v, k - pos - 1);
    lo = idx[static_cast<std::size_t>(pos)];
  }
  return rank;
}

DerivativeTable::DerivativeTable(int components, int n, int r) : components_(components), n_(n) {
  if (components < 0 || n < 1 || r < 0) throw DimensionMismatch("invalid jet dimensions");
  for (int k = 1; k <= r; ++k)
    by_order_.emplace_back(static_cast<std::size_t>(components) * count_of_order(n, k), 0.0);
}

std::size_t DerivativeTable::offset(int component, const MultiIndex& sigma) const {
  const int k = sigma.order();
  if (k < 1 || k > order()) throw DimensionMismatch("derivative order " + std::to_string(k) + " not stored");
  if (component < 0 || component >= components_) throw DimensionMismatch("jet component out of range");
  for (int i : sigma.indices())
    if (i < 0 || i >= n_) throw DimensionMismatch("multi-index entry out of range");
  return static_cast<std::size_t>(component) * count_of_order(n_, k) + multi_index_rank(sigma, n_);
}

double DerivativeTable::get(int component, const MultiIndex& sigma) const {
  return by_order_[static_cast<std::size_t>(sigma.order() - 1)][offset(component, sigma)];
}

double& DerivativeTable::at(int component, const MultiIndex& sigma) {
  const std::size_t o = offset(component, sigma);
  return by_order_[static_cast<std::size_t>(sigma.order() - 1)][o];
}

DerivativeTable DerivativeTable::truncated(int r) const {
  DerivativeTable t = *this;
  if (r < order()) t.by_order_.resize(static_cast<std::size_t>(std::max(r, 0)));
  return t;
}

SubJet::SubJet(int n_, int m_, int r)
    : n(n_), m(m_), base(static_cast<std::size_t>(n_ + m_), 0.0), derivs(m_, n_, r) {
  if (n_ < 1 || m_ < 1) throw DimensionMismatch("subjet needs n >= 1 and m >= 1");
}

SecJet::SecJet(int n_, int l_, int r)
    : n(n_), l(l_), x(static_cast<std::size_t>(n_), 0.0), u(static_cast<std::size_t>(l_), 0.0), derivs(l_, n_, r) {
  if (n_ < 1 || l_ < n_) throw DimensionMismatch("secjet needs 1 <= n <= l");
}

Eigen::MatrixXd SecJet::greek_block() const {
  Eigen::MatrixXd m(n, n);
  for (int xi = 0; xi < n; ++xi)
    for (int lam = 0; lam < n; ++lam) m(xi, lam) = first(xi, lam);
  return m;
}

double SecJet::greek_block_determinant() const { return greek_block().determinant(); }

bool SecJet::is_immersion() const {
  Eigen::MatrixXd jac(l, n);
  for (int a = 0; a < l; ++a)
    for (int lam = 0; lam < n; ++lam) jac(a, lam) = first(a, lam);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
  lu.setThreshold(1e-12);
  return lu.rank() == n;
}

ParamMap::ParamMap(CoordinateFrame params, std::vector<Expression> components)
    : params_(std::move(params)), components_(std::move(components)) {
  for (const auto& c : components_)
    for (const auto& name : symbols(c))
      if (!params_.contains(name)) throw Error("parametrization uses '" + name + "', which is not a parameter");
}

AffineMap::AffineMap(Eigen::MatrixXd a_, Eigen::VectorXd b_) : a(std::move(a_)), b(std::move(b_)) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() < 1)
    throw DimensionMismatch("affine map needs a square matrix matching its translation");
  if (a.determinant() == 0.0) throw Error("affine map with det(a) = 0");
}

AffineMap AffineMap::identity(int n) { return AffineMap(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)); }

AffineMap AffineMap::after(const AffineMap& first) const { return AffineMap(a * first.a, a * first.b + b); }

SecJet prolong(const ParamMap& s, std::span<const double> x, int r) {
  const int n = s.n();
  if (static_cast<int>(x.size()) != n) throw DimensionMismatch("point has wrong number of parameters");
  if (r < 0) throw DimensionMismatch("negative jet order");
  SecJet t(n, s.l(), r);
  const Assignment at(s.params(), x);
  std::copy(x.begin(), x.end(), t.x.begin());
  for (int a = 0; a < s.l(); ++a) t.u[static_cast<std::size_t>(a)] = evaluate(s.components()[static_cast<std::size_t>(a)], at);

  // exprs[c][rank] for the current order, built from the previous order
  std::vector<std::vector<Expression>> previous;
  for (const auto& c : s.components()) previous.push_back({c});
  std::vector<MultiIndex> previous_indices{MultiIndex{}};
  for (int k = 1; k <= r; ++k) {
    const auto sigmas = multi_indices(n, k);
    std::vector<std::vector<Expression>> current(static_cast<std::size_t>(s.l()));
    for (const auto& sigma : sigmas) {
      const MultiIndex parent = sigma.without_last();
      const std::size_t pr = k == 1 ? 0 : multi_index_rank(parent, n);
      const std::string& coord = s.params().name(sigma.indices().back());
      for (int a = 0; a < s.l(); ++a) {
        Expression d = differentiate(previous[static_cast<std::size_t>(a)][pr], coord);
        t.d(a, sigma) = evaluate(d, at);
        current[static_cast<std::size_t>(a)].push_back(std::move(d));
      }
    }
    previous = std::move(current);
  }
  return t;
}

SubJet cover1(const SecJet& t, double threshold) {
  check_order(t, 1, "cover1");
  const int n = t.n;
  const Eigen::MatrixXd inv = inverse_checked(t.greek_block(), threshold, "Greek block of the jet");
  SubJet p(n, t.l - n, 1);
  p.base = t.u;
  for (int j = n; j < t.l; ++j)
    for (int xi = 0; xi < n; ++xi) {
      double s = 0;
      for (int lam = 0; lam < n; ++lam) s += t.first(j, lam) * inv(lam, xi);
      p.first(j, xi) = s;
    }
  return p;
}

SubJet cover2(const SecJet& t, double threshold) {
  check_order(t, 2, "cover2");
  const int n = t.n;
  const Eigen::MatrixXd inv = inverse_checked(t.greek_block(), threshold, "Greek block of the jet");
  const SubJet p1 = cover1(t, threshold);
  SubJet p(n, t.l - n, 2);
  p.base = p1.base;
  for (int j = n; j < t.l; ++j)
    for (int xi = 0; xi < n; ++xi) p.first(j, xi) = p1.first(j, xi);
  for (int j = n; j < t.l; ++j)
    for (const auto& sigma : multi_indices(n, 2)) {
      const int xi = sigma.indices()[0];
      const int eta = sigma.indices()[1];
      // u^j_{ξη} = X^λ_ξ X^μ_η (u^j_{xλxμ} − u^j_α u^α_{xλxμ})
      double s = 0;
      for (int lam = 0; lam < n; ++lam)
        for (int mu = 0; mu < n; ++mu) {
          double inner = t.second(j, lam, mu);
          for (int alpha = 0; alpha < n; ++alpha) inner -= p1.first(j, alpha) * t.second(alpha, lam, mu);
          s += inv(lam, xi) * inv(mu, eta) * inner;
        }
      p.d(j, sigma) = s;
    }
  return p;
}

SecJet affine_act(const AffineMap& g, const SecJet& t) {
  const int n = t.n;
  if (g.n() != n) throw DimensionMismatch("affine map acts on R^" + std::to_string(g.n()));
  const Eigen::MatrixXd ainv = g.a.inverse();
  SecJet out(n, t.l, t.order());
  out.u = t.u;
  const Eigen::VectorXd x = g.a * Eigen::Map<const Eigen::VectorXd>(t.x.data(), n) + g.b;
  for (int i = 0; i < n; ++i) out.x[static_cast<std::size_t>(i)] = x(i);
  for (int k = 1; k <= t.order(); ++k) {
    const auto sigmas = multi_indices(n, k);
    // iterate over all ordered tuples τ in {0..n-1}^k
    std::vector<int> tau(static_cast<std::size_t>(k), 0);
    for (const auto& sigma : sigmas) {
      std::fill(tau.begin(), tau.end(), 0);
      for (;;) {
        double w = 1;
        for (int i = 0; i < k; ++i) w *= ainv(tau[static_cast<std::size_t>(i)], sigma.indices()[static_cast<std::size_t>(i)]);
        if (w != 0.0) {
          const MultiIndex tsorted(tau);
          for (int a = 0; a < t.l; ++a) out.d(a, sigma) += w * t.d(a, tsorted);
        }
        int pos = k - 1;
        while (pos >= 0 && ++tau[static_cast<std::size_t>(pos)] == n) tau[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
      }
    }
  }
  return out;
}

SecJet reparametrize(const ParamMap& phi, const SecJet& t) {
  const int n = t.n;
  if (phi.n() != n || phi.l() != n) throw DimensionMismatch("reparametrization must map R^n to R^n");
  if (t.order() > 2) throw DimensionMismatch("reparametrize supports jets of order <= 2");
  const SecJet jet_phi = prolong(phi, t.x, 2);
  Eigen::MatrixXd jac(n, n);
  for (int mu = 0; mu < n; ++mu)
    for (int a = 0; a < n; ++a) jac(mu, a) = jet_phi.first(mu, a);
  const Eigen::MatrixXd jinv = inverse_checked(jac, kSingularThreshold, "reparametrization Jacobian");
  SecJet out(n, t.l, t.order());
  out.x = jet_phi.u;
  out.u = t.u;
  if (t.order() >= 1)
    for (int a = 0; a < t.l; ++a)
      for (int lam = 0; lam < n; ++lam) {
        double s = 0;
        for (int al = 0; al < n; ++al) s += t.first(a, al) * jinv(al, lam);
        out.first(a, lam) = s;
      }
  if (t.order() >= 2)
    for (int a = 0; a < t.l; ++a)
      for (const auto& sigma : multi_indices(n, 2)) {
        const int lam = sigma.indices()[0];
        const int beta = sigma.indices()[1];
        double s = 0;
        for (int al = 0; al < n; ++al)
          for (int xi = 0; xi < n; ++xi) {
            double inner = t.second(a, al, xi);
            for (int mu = 0; mu < n; ++mu) inner -= out.first(a, mu) * jet_phi.second(mu, al, xi);
            s += inner * jinv(al, lam) * jinv(xi, beta);
          }
        out.d(a, sigma) = s;
      }
  return out;
}

int j1_dimension(int n, int m) { return n + m + m * n; }
int j1pro_dimension(int n, int l) { return n + l + l * n; }

std::vector<double> coordinates(const SubJet& p) {
  std::vector<double> c = p.base;
  for (int k = p.n; k < p.dimension(); ++k)
    for (int xi = 0; xi < p.n; ++xi) c.push_back(p.order() >= 1 ? p.first(k, xi) : 0.0);
  return c;
}

std::vector<double> coordinates(const SecJet& t) {
  std::vector<double> c = t.x;
  c.insert(c.end(), t.u.begin(), t.u.end());
  for (int a = 0; a < t.l; ++a)
    for (int lam = 0; lam < t.n; ++lam) c.push_back(t.order() >= 1 ? t.first(a, lam) : 0.0);
  return c;
}

SubJet subjet_from_coordinates(int n, int m, std::span<const double> c) {
  if (static_cast<int>(c.size()) != j1_dimension(n, m)) throw DimensionMismatch("wrong number of J^1 coordinates");
  SubJet p(n, m, 1);
  std::copy(c.begin(), c.begin() + n + m, p.base.begin());
  std::size_t i = static_cast<std::size_t>(n + m);
  for (int k = n; k < n + m; ++k)
    for (int xi = 0; xi < n; ++xi) p.first(k, xi) = c[i++];
  return p;
}

SecJet secjet_from_coordinates(int n, int l, std::span<const double> c) {
  if (static_cast<int>(c.size()) != j1pro_dimension(n, l))
    throw DimensionMismatch("wrong number of J^1 coordinates");
  SecJet t(n, l, 1);
  std::copy(c.begin(), c.begin() + n, t.x.begin());
  std::copy(c.begin() + n, c.begin() + n + l, t.u.begin());
  std::size_t i = static_cast<std::size_t>(n + l);
  for (int a = 0; a < l; ++a)
    for (int lam = 0; lam < n; ++lam) t.first(a, lam) = c[i++];
  return t;
}

CoordinateFrame j1_frame(const CoordinateFrame& e) {
  const int n = e.split();
  if (n >= e.dimension()) throw BadSplit("J^1 frame needs a split n < l");
  std::vector<std::string> names = e.names();
  for (int k = n; k < e.dimension(); ++k)
    for (int xi = 0; xi < n; ++xi) names.push_back(e.name(k) + "_" + e.name(xi));
  return CoordinateFrame(std::move(names), n);
}

CoordinateFrame j1pro_frame(const CoordinateFrame& params, const CoordinateFrame& e) {
  std::vector<std::string> names = params.names();
  names.insert(names.end(), e.names().begin(), e.names().end());
  for (int a = 0; a < e.dimension(); ++a)
    for (int lam = 0; lam < params.dimension(); ++lam) names.push_back(e.name(a) + "_" + params.name(lam));
  return CoordinateFrame(std::move(names), params.dimension());
}

std::vector<double> cover1_pushforward(const SecJet& t, std::span<const double> v, double threshold) {
  const int n = t.n;
  const int l = t.l;
  if (static_cast<int>(v.size()) != j1pro_dimension(n, l)) throw DimensionMismatch("tangent vector has wrong size");
  const Eigen::MatrixXd inv = inverse_checked(t.greek_block(), threshold, "Greek block of the jet");
  const SubJet p = cover1(t, threshold);
  auto du = [&](int a) { return v[static_cast<std::size_t>(n + a)]; };
  auto dux = [&](int a, int lam) { return v[static_cast<std::size_t>(n + l + a * n + lam)]; };
  std::vector<double> out(static_cast<std::size_t>(j1_dimension(n, l - n)), 0.0);
  for (int a = 0; a < l; ++a) out[static_cast<std::size_t>(a)] = du(a);
  // d(u^j_α) = X^λ_α du^j_{xλ} − u^j_ξ du^ξ_{xβ} X^β_α
  std::size_t i = static_cast<std::size_t>(l);
  for (int j = n; j < l; ++j)
    for (int alpha = 0; alpha < n; ++alpha) {
      double s = 0;
      for (int lam = 0; lam < n; ++lam) s += inv(lam, alpha) * dux(j, lam);
      for (int xi = 0; xi < n; ++xi)
        for (int beta = 0; beta < n; ++beta) s -= p.first(j, xi) * dux(xi, beta) * inv(beta, alpha);
      out[i++] = s;
    }
  return out;
}

namespace {

void fill_derivs(DerivativeTable& d, Rng& rng, double radius) {
  for (int k = 1; k <= d.order(); ++k)
    for (const auto& sigma : multi_indices(d.n(), k))
      for (int c = 0; c < d.components(); ++c) d.at(c, sigma) = uniform(rng, -radius, radius);
}

}  // namespace

SubJet random_subjet(int n, int m, int r, Rng& rng, double radius) {
  SubJet p(n, m, r);
  for (auto& b : p.base) b = uniform(rng, -radius, radius);
  fill_derivs(p.derivs, rng, radius);
  return p;
}

SecJet random_secjet(int n, int l, int r, Rng& rng, double radius) {
  SecJet t(n, l, r);
  for (auto& v : t.x) v = uniform(rng, -radius, radius);
  for (auto& v : t.u) v = uniform(rng, -radius, radius);
  fill_derivs(t.derivs, rng, radius);
  if (r >= 1) {
    do {
      for (int xi = 0; xi < n; ++xi)
        for (int lam = 0; lam < n; ++lam) t.first(xi, lam) = (xi == lam ? 1.0 : 0.0) + 0.3 * uniform(rng, -1, 1);
    } while (std::abs(t.greek_block_determinant()) < 0.25);
  }
  return t;
}

AffineMap random_affine_map(int n, Rng& rng) {
  for (;;) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      b(i) = uniform(rng, -1, 1);
      for (int j = 0; j < n; ++j) a(i, j) = uniform(rng, -2, 2);
    }
    if (std::abs(a.determinant()) >= 0.25) return AffineMap(a, b);
  }
}

}  // namespace jetgeo

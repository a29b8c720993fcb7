#include "jetgeo/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "jetgeo/error.hpp"

namespace jetgeo {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void monomials(const CoordinateFrame& frame, int first, int degree, const Expression& prefix,
               std::vector<Expression>& out) {
  out.push_back(prefix);
  if (degree == 0) return;
  for (int i = first; i < frame.dimension(); ++i)
    monomials(frame, i, degree - 1, prefix * Expression::symbol(frame.name(i)), out);
}

}  // namespace

std::vector<double> sample_point(const CoordinateFrame& frame, const SamplingOptions& opts, std::uint64_t stream,
                                 std::uint64_t index) {
  Rng rng = make_rng(opts.seed, stream, index);
  std::vector<double> p(static_cast<std::size_t>(frame.dimension()));
  for (int attempt = 0;; ++attempt) {
    for (auto& x : p) x = uniform(rng, -opts.radius, opts.radius);
    const bool clear = std::all_of(opts.singular_points.begin(), opts.singular_points.end(),
                                   [&](const std::vector<double>& s) { return distance(p, s) >= opts.clearance; });
    if (clear || attempt > 1000) return p;
  }
}

std::vector<double> evaluate_all(std::span<const Expression> values, const CoordinateFrame& frame,
                                 std::span<const double> point) {
  const Assignment at(frame, point);
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& e : values) out.push_back(e.is_constant() ? e.constant_double() : evaluate(e, at));
  return out;
}

Deviation max_deviation(std::span<const Expression> a, std::span<const Expression> b, const CoordinateFrame& frame,
                        const SamplingOptions& opts, std::uint64_t stream) {
  if (a.size() != b.size()) throw DimensionMismatch("compared tensors differ in size");
  Deviation d;
  const int budget = 20 * std::max(opts.points, 1);
  for (int i = 0; i < budget && d.points_used < opts.points; ++i) {
    const auto p = sample_point(frame, opts, stream, static_cast<std::uint64_t>(i));
    try {
      const auto va = evaluate_all(a, frame, p);
      const auto vb = evaluate_all(b, frame, p);
      for (std::size_t k = 0; k < va.size(); ++k) d.max_abs = std::max(d.max_abs, std::abs(va[k] - vb[k]));
      ++d.points_used;
    } catch (const DomainError&) {
    }
  }
  return d;
}

Expression random_polynomial(const CoordinateFrame& frame, int degree, Rng& rng) {
  std::vector<Expression> basis;
  monomials(frame, 0, degree, Expression(1LL), basis);
  std::uniform_int_distribution<int> coef(-1000, 1000);
  Expression p;
  for (const auto& m : basis) p += Expression(Rational(coef(rng), 1000)) * m;
  return p;
}

}  // namespace jetgeo

#include "fixtures.hpp"

#include "jetgeo/error.hpp"
#include "symbolic_matrix.hpp"

namespace jetgeo::fixtures {


Connection levi_civita(const CoordinateFrame& frame, const Metric& metric) {
  const int l = frame.dimension();
  if (static_cast<int>(metric.size()) != l) throw DimensionMismatch("metric has the wrong size");
  const Metric inv = detail::inverse(metric);
  auto dg = [&](int a, int d, int b) { return differentiate(metric[static_cast<std::size_t>(d)][static_cast<std::size_t>(b)], frame.name(a)); };
  return Connection::generate(frame, [&](int a, int c, int b) {
    Expression s;
    for (int d = 0; d < l; ++d) {
      const Expression& gi = inv[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)];
      if (gi.is_zero()) continue;
      s += gi * (dg(a, d, b) + dg(b, d, a) - dg(d, a, b));
    }
    return Expression(Rational(1, 2)) * s;
  });
}

Metric sphere_metric(const CoordinateFrame& frame) {
  const Expression f = parse("4/(1 + u^2 + v^2)^2", frame);
  return {{f, Expression()}, {Expression(), f}};
}

CoordinateFrame sphere_frame() { return CoordinateFrame({"u", "v"}, 1); }

double metric_speed(const CoordinateFrame& frame, const Metric& metric, std::span<const double> point,
                    std::span<const double> velocity) {
  const Assignment at(frame, point);
  double s = 0;
  for (std::size_t a = 0; a < metric.size(); ++a)
    for (std::size_t b = 0; b < metric.size(); ++b)
      if (!metric[a][b].is_zero()) s += evaluate(metric[a][b], at) * velocity[a] * velocity[b];
  return s;
}

}  // namespace jetgeo::fixtures

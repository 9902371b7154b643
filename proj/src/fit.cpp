#include "etherstar/fit.hpp"

#include <cmath>
#include <limits>

#include "etherstar/errors.hpp"

namespace etherstar {

LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_fit: need at least two matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_fit: data must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw DomainError("loglog_fit: abscissae coincide");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

double order_slope(const std::vector<double>& h, const std::vector<double>& err, double floor) {
  bool all_below = true;
  for (double e : err) all_below = all_below && e <= floor;
  if (all_below) return std::numeric_limits<double>::infinity();
  return loglog_fit(h, err).slope;
}

}  // namespace etherstar

#pragma once

#include <vector>

namespace etherstar {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (log x, log y). Requires positive data.
LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of err(h) on a log-log scale; a floor turns exact zeros into
/// a reportable "machine exact" value of +infinity.
double order_slope(const std::vector<double>& h, const std::vector<double>& err, double floor = 0.0);

}  // namespace etherstar

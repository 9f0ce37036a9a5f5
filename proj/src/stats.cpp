#include "qhit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qhit/error.hpp"

namespace qhit {

CurveReport ks_to_exponential(std::span<const double> observed, std::span<const double> t_grid,
                              std::optional<std::vector<double>> stderr_) {
  if (t_grid.empty()) throw InvalidArgument("ks_to_exponential: empty grid");
  if (observed.size() != t_grid.size()) throw InvalidArgument("ks_to_exponential: size mismatch");
  CurveReport r;
  r.grid.assign(t_grid.begin(), t_grid.end());
  r.observed.assign(observed.begin(), observed.end());
  r.stderr_ = std::move(stderr_);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    r.reference.push_back(std::exp(-t_grid[i]));
    r.sup_abs_err = std::max(r.sup_abs_err, std::abs(observed[i] - r.reference.back()));
  }
  return r;
}

std::vector<double> uniform_grid(double stop, double step) {
  if (!(step > 0.0) || !(stop >= 0.0)) throw InvalidArgument("uniform_grid: need step > 0 and stop >= 0");
  const auto count = static_cast<std::size_t>(std::floor(stop / step + 1e-9));
  std::vector<double> g;
  for (std::size_t i = 0; i <= count; ++i) g.push_back(static_cast<double>(i) * step);
  return g;
}

TrendReport trend_report(std::span<const double> abscissa, std::span<const double> values) {
  if (values.size() < 3) throw InvalidArgument("trend_report: needs at least 3 points");
  if (abscissa.size() != values.size()) throw InvalidArgument("trend_report: size mismatch");
  TrendReport r;
  r.nonincreasing = std::is_sorted(values.begin(), values.end(), std::greater<>());
  r.slope_valid = std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0 && std::isfinite(v); });
  if (!r.slope_valid) return r;
  const double m = static_cast<double>(values.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = abscissa[i], y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) {
    r.slope_valid = false;
    return r;
  }
  r.log_slope = (m * sxy - sx * sy) / denom;
  return r;
}

double dkw_epsilon(std::size_t n, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double uniform_ks_statistic(std::vector<double> samples) {
  if (samples.empty()) throw InvalidArgument("uniform_ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    d = std::max({d, (static_cast<double>(i) + 1) / n - x, x - static_cast<double>(i) / n});
  }
  return d;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace qhit

#pragma once

#include <optional>
#include <span>
#include <vector>

namespace qhit {

struct CurveReport {
  std::vector<double> grid;
  std::vector<double> observed;
  std::vector<double> reference;  // e^{-t}
  double sup_abs_err = 0.0;
  std::optional<std::vector<double>> stderr_;
};

/// sup over the grid of |observed(t) - e^{-t}|.
CurveReport ks_to_exponential(std::span<const double> observed, std::span<const double> t_grid,
                              std::optional<std::vector<double>> stderr_ = std::nullopt);

/// The grid {0, step, ..., stop}, built by multiplication to avoid drift.
std::vector<double> uniform_grid(double stop, double step);

struct TrendReport {
  bool nonincreasing = false;
  /// Least-squares slope of log(value) against the abscissa; 0 and invalid
  /// when some value is not positive.
  double log_slope = 0.0;
  bool slope_valid = false;
};

/// Monotonicity verdict and log-slope fit for values indexed by n or r.
/// Needs at least 3 points.
TrendReport trend_report(std::span<const double> abscissa, std::span<const double> values);

/// Dvoretzky-Kiefer-Wolfowitz band half-width sqrt(ln(2/alpha) / 2n).
double dkw_epsilon(std::size_t n, double alpha);

/// sup |F_n(x) - x| for samples in [0, 1).
double uniform_ks_statistic(std::vector<double> samples);

double median(std::vector<double> values);

}  // namespace qhit

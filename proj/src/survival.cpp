#include "qhit/survival.hpp"

#include <algorithm>
#include <string>

#include "qhit/parallel.hpp"

namespace qhit {

std::int64_t rescaled_step(double t, double mu_a) {
  return static_cast<std::int64_t>(std::floor(t / mu_a));
}

void check_t_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw InvalidArgument("t grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0) || !std::isfinite(t_grid[i])) throw InvalidArgument("t grid values must be finite and >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("t grid must be increasing");
  }
}

namespace {

std::int64_t checked_k_max(double mu_a, const std::vector<double>& t_grid, std::int64_t step_cap) {
  check_t_grid(t_grid);
  std::int64_t k_max = 0;
  for (double t : t_grid) {
    const double k = std::floor(t / mu_a);
    if (k > static_cast<double>(step_cap))
      throw ResourceLimit("k_{A,t} = " + std::to_string(k) + " exceeds the step cap " + std::to_string(step_cap) +
                          " at t = " + std::to_string(t));
    k_max = std::max(k_max, static_cast<std::int64_t>(k));
  }
  return k_max;
}

}  // namespace

std::size_t rescaled_window_length(const FiberMeasure& fm, const BaseProcess& proc, const Pattern& pat,
                                   const std::vector<double>& t_grid, std::int64_t step_cap) {
  const double mu_a = marginal_cylinder_measure(fm, proc, pat);
  return static_cast<std::size_t>(checked_k_max(mu_a, t_grid, step_cap)) + pat.size();
}

RescaledCurve rescaled_survival(const FiberMeasure& fm, const BaseProcess& proc, const BaseWindow& window,
                                const Pattern& pat, const std::vector<double>& t_grid, std::int64_t step_cap) {
  RescaledCurve out;
  out.mu_a = marginal_cylinder_measure(fm, proc, pat);
  const std::int64_t k_max = checked_k_max(out.mu_a, t_grid, step_cap);
  const auto curve = quenched_survival<long double>(fm, window, pat, 0, static_cast<std::size_t>(k_max));
  for (double t : t_grid) {
    const std::int64_t k = rescaled_step(t, out.mu_a);
    out.t.push_back(t);
    out.k.push_back(k);
    out.survival.push_back(static_cast<double>(curve(static_cast<std::size_t>(k))));
  }
  return out;
}

HittingTime sample_hitting_time(const PatternAutomaton& aut, const FiberMeasure& fm, const BaseWindow& window,
                                Rng& rng, std::uint64_t cap) {
  check_pattern_against(fm, aut.pattern());
  if (cap < 1) throw InvalidArgument("sample_hitting_time: cap must be >= 1");
  const std::uint64_t n = aut.pattern().size();
  require_window(window, static_cast<std::size_t>(cap + n), "sample_hitting_time");
  rng.categorical(fm.matrix().row(window[0]));  // x_0 is drawn but cannot start a hit
  int state = 0;
  for (std::uint64_t c = 1; c < cap + n; ++c) {
    state = aut.next(state, rng.categorical(fm.matrix().row(window[c])));
    if (state == aut.accepting()) return {c + 1 - n, false};
  }
  return {cap, true};
}

AnnealedCurve annealed_survival(const FiberMeasure& fm, const BaseProcess& proc, const Pattern& pat,
                                const std::vector<double>& t_grid, std::size_t n_windows, std::uint64_t seed,
                                unsigned threads, std::int64_t step_cap) {
  if (n_windows < 1) throw InvalidArgument("annealed_survival: n_windows must be >= 1");
  const std::size_t length = rescaled_window_length(fm, proc, pat, t_grid, step_cap) + 1;
  std::vector<RescaledCurve> curves(n_windows);
  parallel_for(n_windows, threads, [&](std::size_t i) {
    const BaseWindow window = sample_window(proc, seed, length, i);
    curves[i] = rescaled_survival(fm, proc, window, pat, t_grid, step_cap);
  });

  AnnealedCurve out;
  out.mu_a = curves.front().mu_a;
  out.t = curves.front().t;
  out.k = curves.front().k;
  const double m = static_cast<double>(n_windows);
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    long double sum = 0, sum_sq = 0;
    for (const auto& c : curves) {
      sum += c.survival[j];
      sum_sq += static_cast<long double>(c.survival[j]) * c.survival[j];
    }
    const double mean = static_cast<double>(sum / m);
    double se = 0.0;
    if (n_windows > 1) {
      const long double var = std::max<long double>(0, (sum_sq - sum * sum / m) / (m - 1));
      se = static_cast<double>(std::sqrt(var / m));
    }
    out.mean.push_back(mean);
    out.stderr_.push_back(se);
  }
  return out;
}

}  // namespace qhit

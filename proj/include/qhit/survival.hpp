#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qhit/base_process.hpp"
#include "qhit/fiber_measure.hpp"
#include "qhit/pattern_automaton.hpp"

namespace qhit {

/// Survival values on the dense grid k = 0 .. k_max.
template <typename Scalar = long double>
struct SurvivalCurve {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector values;
  std::string pattern;
  std::int64_t window_start = 0;
  std::size_t offset = 0;

  std::size_t k_max() const { return static_cast<std::size_t>(values.size()) - 1; }
  Scalar operator()(std::size_t k) const { return values(static_cast<Eigen::Index>(k)); }
};

namespace detail {

// Masses of the non-accepting automaton states, pushed forward one fiber
// coordinate at a time with the accepting state absorbed.
// out(0) is the initial mass; out(j) the surviving mass after warmup + j reads
// starting at coordinate `first`.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> masked_scan(const PatternAutomaton& aut, const FiberMeasure& fm,
                                                     const BaseWindow& window, int init_state, Scalar init_mass,
                                                     std::size_t first, std::size_t warmup, std::size_t count) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  require_window(window, first + warmup + count, "survival recursion");
  const int n = aut.length();
  const int b = aut.alphabet_size();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> w = fm.matrix().cast<Scalar>();

  Vector v = Vector::Zero(n);
  Vector next(n);
  v(init_state) = init_mass;
  Vector out(static_cast<Eigen::Index>(count) + 1);
  out(0) = init_mass;
  for (std::size_t r = 0; r < warmup + count; ++r) {
    const int base = window[first + r];
    next.setZero();
    for (int s = 0; s < n; ++s) {
      const Scalar mass = v(s);
      if (mass == Scalar(0)) continue;
      for (int a = 0; a < b; ++a) {
        const int t = aut.next(s, a);
        if (t < n) next(t) += mass * w(base, a);
      }
    }
    v.swap(next);
    if (r >= warmup) out(static_cast<Eigen::Index>(r - warmup + 1)) = v.sum();
  }
  return out;
}

}  // namespace detail

/// mu_{theta^offset omega}(C^n(y) ∩ sigma^{-gap}{no occurrence at 1..j}), j = 0..j_max,
/// i.e. the pattern sits at 0 and has no occurrence starting at gap+1 .. gap+j.
template <typename Scalar = long double>
SurvivalCurve<Scalar> joint_gap_survival(const PatternAutomaton& aut, const FiberMeasure& fm,
                                         const BaseWindow& window, std::size_t offset, std::size_t gap,
                                         std::size_t j_max) {
  const Pattern& pat = aut.pattern();
  const std::size_t n = pat.size();
  const auto mass = fiber_cylinder_measure<Scalar>(fm, window, pat, offset);
  const std::size_t start = gap + 1;
  SurvivalCurve<Scalar> c{.values = {}, .pattern = pat.str(), .window_start = window.start_index(), .offset = offset};
  if (start < n) {
    const int state = aut.run(pat.symbols().subspan(start));
    c.values = detail::masked_scan<Scalar>(aut, fm, window, state, mass, offset + n, gap, j_max);
  } else {
    c.values = detail::masked_scan<Scalar>(aut, fm, window, 0, mass, offset + start, n - 1, j_max);
  }
  return c;
}

/// mu_{theta^offset omega}(tau_A > k), k = 0..k_max, where tau_A is the first
/// k >= 1 with an occurrence of the pattern starting at k.
template <typename Scalar = long double>
SurvivalCurve<Scalar> quenched_survival(const PatternAutomaton& aut, const FiberMeasure& fm,
                                        const BaseWindow& window, std::size_t offset, std::size_t k_max) {
  check_pattern_against(fm, aut.pattern());
  const std::size_t n = aut.pattern().size();
  SurvivalCurve<Scalar> c{.values = {}, .pattern = aut.pattern().str(), .window_start = window.start_index(), .offset = offset};
  c.values = detail::masked_scan<Scalar>(aut, fm, window, 0, Scalar(1), offset + 1, n - 1, k_max);
  return c;
}

template <typename Scalar = long double>
SurvivalCurve<Scalar> quenched_survival(const FiberMeasure& fm, const BaseWindow& window, const Pattern& pat,
                                        std::size_t offset, std::size_t k_max) {
  return quenched_survival<Scalar>(PatternAutomaton(pat), fm, window, offset, k_max);
}

/// mu_{theta^offset omega}(A ∩ {tau_A <= g}) accumulated from the mass absorbed
/// at the accepting state, so it is exactly zero when no return within g is
/// possible.
template <typename Scalar = long double>
Scalar short_return_mass(const PatternAutomaton& aut, const FiberMeasure& fm, const BaseWindow& window,
                         std::size_t offset, std::size_t g) {
  const Pattern& pat = aut.pattern();
  const int n = aut.length();
  const int b = aut.alphabet_size();
  const auto first = offset + pat.size();
  require_window(window, first + g, "short_return_mass");
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector v = Vector::Zero(n);
  Vector next(n);
  v(aut.border()) = fiber_cylinder_measure<Scalar>(fm, window, pat, offset);
  Scalar absorbed = 0;
  for (std::size_t r = 0; r < g; ++r) {
    const int base = window[first + r];
    next.setZero();
    for (int s = 0; s < n; ++s) {
      if (v(s) == Scalar(0)) continue;
      for (int a = 0; a < b; ++a) {
        const int t = aut.next(s, a);
        const Scalar m = v(s) * static_cast<Scalar>(fm.prob(base, a));
        if (t < n)
          next(t) += m;
        else
          absorbed += m;
      }
    }
    v.swap(next);
  }
  return absorbed;
}

/// mu_{theta^offset omega}(A ∩ {tau_A > j}), j = 0..j_max; value(0) = mu(A).
template <typename Scalar = long double>
SurvivalCurve<Scalar> conditional_return_survival(const PatternAutomaton& aut, const FiberMeasure& fm,
                                                  const BaseWindow& window, std::size_t offset, std::size_t j_max) {
  return joint_gap_survival<Scalar>(aut, fm, window, offset, 0, j_max);
}

template <typename Scalar = long double>
SurvivalCurve<Scalar> conditional_return_survival(const FiberMeasure& fm, const BaseWindow& window,
                                                  const Pattern& pat, std::size_t offset, std::size_t j_max) {
  return conditional_return_survival<Scalar>(PatternAutomaton(pat), fm, window, offset, j_max);
}

/// k_{A,t} = floor(t / mu(A)).
std::int64_t rescaled_step(double t, double mu_a);

struct RescaledCurve {
  std::vector<double> t;
  std::vector<std::int64_t> k;
  std::vector<double> survival;
  double mu_a = 0.0;
};

inline constexpr std::int64_t kDefaultStepCap = 100'000'000;

void check_t_grid(const std::vector<double>& t_grid);

/// Quenched survival read at k_{A,t} for each t, with mu(A) the exact marginal.
RescaledCurve rescaled_survival(const FiberMeasure& fm, const BaseProcess& proc, const BaseWindow& window,
                                const Pattern& pat, const std::vector<double>& t_grid,
                                std::int64_t step_cap = kDefaultStepCap);

/// Coordinates a window must cover for rescaled_survival on this grid.
std::size_t rescaled_window_length(const FiberMeasure& fm, const BaseProcess& proc, const Pattern& pat,
                                   const std::vector<double>& t_grid, std::int64_t step_cap = kDefaultStepCap);

struct HittingTime {
  std::uint64_t time = 0;
  bool censored = false;
};

/// Draws x ~ mu_omega lazily and returns the first k in [1, cap] with an
/// occurrence starting at k, or censored(cap). Uses O(n) memory.
HittingTime sample_hitting_time(const PatternAutomaton& aut, const FiberMeasure& fm, const BaseWindow& window,
                                Rng& rng, std::uint64_t cap);

inline HittingTime sample_hitting_time(const FiberMeasure& fm, const BaseWindow& window, const Pattern& pat,
                                       Rng& rng, std::uint64_t cap) {
  return sample_hitting_time(PatternAutomaton(pat), fm, window, rng, cap);
}

struct AnnealedCurve {
  std::vector<double> t;
  std::vector<std::int64_t> k;
  std::vector<double> mean;
  std::vector<double> stderr_;
  double mu_a = 0.0;
};

/// Average of rescaled_survival over n_windows independent base windows
/// (window i uses RNG stream (seed, i)).
AnnealedCurve annealed_survival(const FiberMeasure& fm, const BaseProcess& proc, const Pattern& pat,
                                const std::vector<double>& t_grid, std::size_t n_windows, std::uint64_t seed,
                                unsigned threads = 0, std::int64_t step_cap = kDefaultStepCap);

}  // namespace qhit

#include "qhit/error_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "qhit/parallel.hpp"
#include "qhit/survival.hpp"

namespace qhit {
namespace {

// Neumaier-compensated running sum in extended precision.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0;
  long double comp_ = 0;
};

using Curve = SurvivalCurve<long double>;

long double delta_term(const Curve& survival, const Curve& ret, long double mass, std::size_t jmax) {
  long double best = 0;
  for (std::size_t j = 1; j <= jmax; ++j) best = std::max(best, std::abs(survival(j) * mass - ret(j)));
  return best;
}

std::int64_t resolve_jmax(std::int64_t jmax, std::int64_t fallback) { return jmax > 0 ? jmax : fallback; }

}  // namespace

std::size_t ledger_window_length(const FiberMeasure& fm, const BaseProcess& proc, const Pattern& pat, double t,
                                 std::int64_t g, std::int64_t jmax) {
  const std::int64_t k = rescaled_step(t, marginal_cylinder_measure(fm, proc, pat));
  jmax = resolve_jmax(jmax, 4 * k);
  return static_cast<std::size_t>(k + g + std::max(jmax, g)) + pat.size();
}

ErrorLedger compute_ledger(const FiberMeasure& fm, const BaseProcess& proc, const BaseWindow& window,
                           const Pattern& pat, double t, std::int64_t g, std::int64_t jmax, double budget) {
  check_pattern_against(fm, pat);
  ErrorLedger led;
  led.n = pat.size();
  led.t = t;
  led.mu_a = marginal_cylinder_measure(fm, proc, pat);
  led.k = rescaled_step(t, led.mu_a);
  const double work = static_cast<double>(led.k) * static_cast<double>(pat.size()) * fm.fiber_alphabet_size();
  if (work > budget)
    throw ResourceLimit("ledger: k*n*b = " + std::to_string(work) + " exceeds the operation budget at n = " +
                        std::to_string(pat.size()) + ", t = " + std::to_string(t));
  if (g < 1 || g > led.k)
    throw InvalidArgument("ledger: gap g = " + std::to_string(g) + " must satisfy 1 <= g <= k = " + std::to_string(led.k));
  led.g = g;
  led.jmax = resolve_jmax(jmax, 4 * led.k);
  const auto k = static_cast<std::size_t>(led.k);
  const auto gap = static_cast<std::size_t>(g);
  const auto jm = static_cast<std::size_t>(led.jmax);
  const std::size_t horizon = std::max(jm, gap);
  require_window(window, k + gap + horizon + pat.size(), "compute_ledger");

  const PatternAutomaton aut(pat);
  // Survival curves at offsets i .. i+g are kept in a sliding buffer; H at
  // shift i pairs the joint law at i with the survival at i + g.
  std::deque<Curve> ahead;
  std::size_t next_offset = 1;
  auto fill_to = [&](std::size_t offset) {
    while (next_offset <= offset) ahead.push_back(quenched_survival<long double>(aut, fm, window, next_offset++, horizon));
  };

  CompensatedSum m_sum, g_sum, h_sum, k_sum, delta_sum, rhs_sum;
  long double product = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    fill_to(i + gap);
    const Curve& surv = ahead.front();
    const Curve& surv_gap = ahead[gap];
    const Curve ret = conditional_return_survival<long double>(aut, fm, window, i, horizon);
    const Curve joint = joint_gap_survival<long double>(aut, fm, window, i, gap, jm);
    const long double a = ret(0);

    m_sum.add(a);
    g_sum.add(short_return_mass<long double>(aut, fm, window, i, gap));
    k_sum.add(a * (1 - surv(gap)));
    long double h = 0;
    for (std::size_t j = 1; j <= jm; ++j) h = std::max(h, std::abs(joint(j) - a * surv_gap(j)));
    h_sum.add(h);
    const long double delta = delta_term(surv, ret, a, jm);
    delta_sum.add(delta);
    rhs_sum.add(delta * product);
    product *= 1 - a;
    ahead.pop_front();
  }
  const auto s0 = quenched_survival<long double>(aut, fm, window, 0, k);
  led.M = static_cast<double>(m_sum.value());
  led.G = static_cast<double>(g_sum.value());
  led.H = static_cast<double>(h_sum.value());
  led.K = static_cast<double>(k_sum.value());
  led.delta_sum = static_cast<double>(delta_sum.value());
  led.survival = static_cast<double>(s0(k));
  led.product = static_cast<double>(product);
  led.lemma_lhs = static_cast<double>(std::abs(s0(k) - product));
  led.lemma_rhs = static_cast<double>(rhs_sum.value());
  led.sandwich_gap = static_cast<double>(std::abs(product - std::exp(-m_sum.value())));
  return led;
}

BoundCheck verify_recursion_bound(const FiberMeasure& fm, const BaseProcess& proc, const BaseWindow& window,
                                  const Pattern& pat, double t, std::int64_t jmax) {
  check_pattern_against(fm, pat);
  const std::int64_t k_signed = rescaled_step(t, marginal_cylinder_measure(fm, proc, pat));
  const auto k = static_cast<std::size_t>(k_signed);
  const auto jm = static_cast<std::size_t>(resolve_jmax(jmax, std::max<std::int64_t>(k_signed, 1)));
  require_window(window, k + jm + pat.size() + 1, "verify_recursion_bound");

  const PatternAutomaton aut(pat);
  CompensatedSum rhs;
  long double product = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const Curve surv = quenched_survival<long double>(aut, fm, window, i, jm);
    const Curve ret = conditional_return_survival<long double>(aut, fm, window, i, jm);
    const long double a = ret(0);
    rhs.add(delta_term(surv, ret, a, jm) * product);
    product *= 1 - a;
  }
  const auto s0 = quenched_survival<long double>(aut, fm, window, 0, k);
  BoundCheck out;
  out.lhs = static_cast<double>(std::abs(s0(k) - product));
  out.rhs = static_cast<double>(rhs.value());
  out.pass = out.lhs <= out.rhs + 1e-12;
  return out;
}

bool verify_sandwich(std::span<const double> xs, double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw InvalidArgument("verify_sandwich: need 0 < eps <= 1/2");
  long double sum = 0, product = 1;
  for (double x : xs) {
    if (!(x >= 0.0 && x <= eps)) throw InvalidArgument("verify_sandwich: inputs must lie in [0, eps]");
    sum += x;
    product *= 1.0L - x;
  }
  constexpr long double slack = 1e-14L;
  const long double lower = std::exp(-(1 + 2 * static_cast<long double>(eps)) * sum);
  const long double upper = std::exp(-(1 - 2 * static_cast<long double>(eps)) * sum);
  return lower <= product + slack && product <= upper + slack;
}

std::int64_t gap_schedule(int n, double h0) {
  if (n < 1 || !(h0 > 0.0)) throw InvalidArgument("gap_schedule: need n >= 1 and h0 > 0");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(std::exp(h0 * n / 4.0))));
}

EntropyEstimates estimate_entropies(const FiberMeasure& fm, const BaseProcess& proc, const std::vector<int>& n_range,
                                    std::size_t samples, std::uint64_t seed, unsigned threads, double cap_factor) {
  if (n_range.empty() || samples < 1) throw InvalidArgument("estimate_entropies: need n values and samples >= 1");
  for (std::size_t i = 0; i < n_range.size(); ++i)
    if (n_range[i] < 1 || (i > 0 && n_range[i] <= n_range[i - 1]))
      throw InvalidArgument("estimate_entropies: n values must be positive and increasing");

  struct Draw {
    double smb = 0, ow = 0;
    bool censored = false;
  };
  std::vector<Draw> draws(n_range.size() * samples);
  parallel_for(draws.size(), threads, [&](std::size_t item) {
    const int n = n_range[item / samples];
    const std::uint64_t s = item % samples;
    const std::uint64_t stream = (static_cast<std::uint64_t>(n) << 32) | s;
    BaseSymbolStream omega(proc, seed, stream);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL, stream);
    auto draw_x = [&] { return rng.categorical(fm.matrix().row(omega.next())); };

    std::vector<int> prefix(static_cast<std::size_t>(n));
    long double log_mu = 0;
    for (auto& x : prefix) {
      const int base = omega.next();
      x = rng.categorical(fm.matrix().row(base));
      log_mu += std::log(static_cast<long double>(fm.prob(base, x)));
    }
    Draw& d = draws[item];
    d.smb = static_cast<double>(-log_mu / n);

    const Pattern pat(prefix, fm.fiber_alphabet_size());
    const PatternAutomaton aut(pat);
    const double cap_d = std::min(cap_factor / marginal_cylinder_measure(fm, proc, pat), 0x1.0p40);
    const auto cap = static_cast<std::uint64_t>(std::max(1.0, cap_d));
    int state = aut.run(pat.symbols().subspan(1));
    std::uint64_t r = 0;
    for (std::uint64_t start = 1; start <= cap; ++start) {
      state = aut.next(state, draw_x());
      if (state == aut.accepting()) {
        r = start;
        break;
      }
    }
    if (r == 0) {
      d.censored = true;
      r = cap;
    }
    d.ow = std::log(static_cast<double>(r)) / n;
  });

  EntropyEstimates out;
  out.n = n_range;
  out.h0 = fm.h0();
  const double m = static_cast<double>(samples);
  auto mean_se = [&](std::size_t row, auto field) {
    long double sum = 0, sq = 0;
    for (std::size_t s = 0; s < samples; ++s) {
      const double v = field(draws[row * samples + s]);
      sum += v;
      sq += static_cast<long double>(v) * v;
    }
    const long double mean = sum / m;
    const long double var = samples > 1 ? std::max<long double>(0, (sq - sum * mean) / (m - 1)) : 0;
    return std::pair<double, double>{static_cast<double>(mean), static_cast<double>(std::sqrt(var / m))};
  };
  for (std::size_t row = 0; row < n_range.size(); ++row) {
    const auto [smb, smb_se] = mean_se(row, [](const Draw& d) { return d.smb; });
    const auto [ow, ow_se] = mean_se(row, [](const Draw& d) { return d.ow; });
    const auto censored = mean_se(row, [](const Draw& d) { return d.censored ? 1.0 : 0.0; }).first;
    out.smb_slope.push_back(smb);
    out.smb_stderr.push_back(smb_se);
    out.ow_slope.push_back(ow);
    out.ow_stderr.push_back(ow_se);
    out.censored_fraction.push_back(censored);
    if (censored > 0.5) out.widened_uncertainty = true;
  }
  const std::size_t tail = std::min<std::size_t>(2, n_range.size());
  for (std::size_t i = n_range.size() - tail; i < n_range.size(); ++i) out.h_hat += out.smb_slope[i];
  out.h_hat /= static_cast<double>(tail);
  return out;
}

}  // namespace qhit

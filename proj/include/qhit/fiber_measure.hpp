#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "qhit/base_process.hpp"
#include "qhit/error.hpp"
#include "qhit/rng.hpp"

namespace qhit {

/// A target word y_0 .. y_{n-1} over the fiber alphabet {0..b-1}.
class Pattern {
 public:
  Pattern(std::vector<int> symbols, int alphabet_size);
  /// Parses digits, e.g. Pattern::parse("0110", 2).
  static Pattern parse(std::string_view digits, int alphabet_size);

  std::size_t size() const { return symbols_.size(); }
  int operator[](std::size_t i) const { return symbols_[i]; }
  int alphabet_size() const { return alphabet_size_; }
  std::span<const int> symbols() const { return symbols_; }
  std::string str() const;

 private:
  std::vector<int> symbols_;
  int alphabet_size_;
};

/// Fiber alphabet size and the per-base-symbol 0/1 transition matrices A(omega).
/// Carried as data only; the sample measures built here live on the full shift.
struct RandomShiftSpec {
  int fiber_alphabet_size = 2;
  std::map<int, Eigen::MatrixXi> transition_matrices;

  void validate() const;
  bool is_full_shift() const;
};

/// Random Bernoulli sample measures: under mu_omega the fiber coordinate x_i
/// has law W.row(omega_i). Rows of W are indexed by base symbols.
class FiberMeasure {
 public:
  explicit FiberMeasure(Eigen::MatrixXd w);

  /// Example with base {0,1}: row 0 = (p, 1-p), row 1 = (1-p, p).
  static FiberMeasure two_point(double p);

  const Eigen::MatrixXd& matrix() const { return w_; }
  int base_alphabet_size() const { return static_cast<int>(w_.rows()); }
  int fiber_alphabet_size() const { return static_cast<int>(w_.cols()); }
  double prob(int base_symbol, int fiber_symbol) const { return w_(base_symbol, fiber_symbol); }
  double q_max() const { return q_max_; }
  /// Exponent of the small-cylinder bound mu_omega(C^n) <= c e^{-h0 n}, with c = 1.
  double h0() const { return -std::log(q_max_); }

 private:
  Eigen::MatrixXd w_;
  double q_max_;
};

void check_pattern_against(const FiberMeasure& fm, const Pattern& pat);
void require_window(const BaseWindow& window, std::size_t needed, const char* op);

/// mu_{theta^offset omega}(C^n(y)) = prod_i W[omega_{offset+i}, y_i].
template <typename Scalar = double>
Scalar fiber_cylinder_measure(const FiberMeasure& fm, const BaseWindow& window, const Pattern& pat,
                              std::size_t offset = 0) {
  check_pattern_against(fm, pat);
  require_window(window, offset + pat.size(), "fiber_cylinder_measure");
  Scalar p = 1;
  for (std::size_t i = 0; i < pat.size(); ++i) p *= static_cast<Scalar>(fm.prob(window[offset + i], pat[i]));
  return p;
}

/// Exact marginal mu(C^n(y)) = ∫ mu_omega(C^n(y)) dP(omega).
double marginal_cylinder_measure(const FiberMeasure& fm, const BaseProcess& proc, const Pattern& pat);

struct DensityRatio {
  double ratio = 1.0;
  double log_ratio = 0.0;
  /// Number of coordinates with omega_i == x_i.
  int matches = 0;
  /// p = 1/2: mu_omega equals mu and the ratio is identically 1.
  bool degenerate = false;
};

/// mu_omega(C^n(x)) / mu(C^n(x)) for the two-point model over a fair coin
/// base, via the match count: p^k q^{n-k} 2^n.
DensityRatio density_ratio(const FiberMeasure& fm, const BaseProcess& proc, const BaseWindow& window,
                           const Pattern& pat);

/// x_0 .. x_{length-1} with x_i ~ W.row(omega_i), independently.
std::vector<int> sample_fiber_prefix(const FiberMeasure& fm, const BaseWindow& window, std::size_t length,
                                     Rng& rng);

/// y ~ mu: draws an auxiliary window and a fiber prefix over it.
Pattern sample_marginal_pattern(const FiberMeasure& fm, const BaseProcess& proc, std::size_t n,
                                std::uint64_t seed, std::uint64_t stream);

}  // namespace qhit

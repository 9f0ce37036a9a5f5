#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qhit/base_process.hpp"
#include "qhit/fiber_measure.hpp"

namespace qhit {

/// Exact error decomposition of the hitting-time law for one (omega, A, t, g).
/// All sums run over the base shifts i = 1..k.
struct ErrorLedger {
  std::size_t n = 0;
  double t = 0.0;
  std::int64_t k = 0;
  std::int64_t g = 0;
  std::int64_t jmax = 0;
  double mu_a = 0.0;
  double M = 0.0;             // sum of mu_{theta^i omega}(A)
  double G = 0.0;             // short returns inside A
  double H = 0.0;             // fibered correlation across the gap
  double K = 0.0;             // short entrances
  double delta_sum = 0.0;     // sum of delta_{theta^i omega}(A)
  double lemma_lhs = 0.0;     // |mu_omega(tau > k) - prod (1 - mu_i)|
  double lemma_rhs = 0.0;     // sum delta_i prod_{j<i} (1 - mu_j)
  double sandwich_gap = 0.0;  // |prod (1 - mu_i) - e^{-M}|
  double survival = 0.0;      // mu_omega(tau > k)
  double product = 0.0;       // prod (1 - mu_i)
  /// The sups over j are taken on [1, jmax]; delta_sum and H are lower bounds
  /// of the untruncated sups.
  bool sup_truncated = true;
};

inline constexpr double kDefaultOperationBudget = 1e10;

/// Computes the ledger. jmax <= 0 selects 4k. The window must cover
/// k + g + jmax + n coordinates. Throws ResourceLimit when k * n * b exceeds
/// `budget`, and InvalidArgument unless 1 <= g <= k.
ErrorLedger compute_ledger(const FiberMeasure& fm, const BaseProcess& proc, const BaseWindow& window,
                           const Pattern& pat, double t, std::int64_t g, std::int64_t jmax = 0,
                           double budget = kDefaultOperationBudget);

/// Window length needed by compute_ledger.
std::size_t ledger_window_length(const FiberMeasure& fm, const BaseProcess& proc, const Pattern& pat, double t,
                                 std::int64_t g, std::int64_t jmax = 0);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// |mu_omega(tau > k) - prod_{i=1}^k (1 - mu_{theta^i omega}(A))|
///   <= sum_i delta_{theta^i omega}(A) prod_{j<i} (1 - mu_{theta^j omega}(A)),
/// both sides exact, pass with 1e-12 slack. jmax <= 0 selects max(k, 1),
/// which already covers every j the telescoping uses.
BoundCheck verify_recursion_bound(const FiberMeasure& fm, const BaseProcess& proc, const BaseWindow& window,
                                  const Pattern& pat, double t, std::int64_t jmax = 0);

/// exp(-(1+2e) S) <= prod (1 - x_i) <= exp(-(1-2e) S) for x_i in [0, e], 0 < e <= 1/2.
bool verify_sandwich(std::span<const double> xs, double eps);

/// floor(exp(h0 n / 4)), clamped to >= 1.
std::int64_t gap_schedule(int n, double h0);

struct EntropyEstimates {
  std::vector<int> n;
  std::vector<double> smb_slope;   // mean of -(1/n) log mu_omega(C^n(x))
  std::vector<double> smb_stderr;
  std::vector<double> ow_slope;    // mean of (1/n) log R_n(x, x)
  std::vector<double> ow_stderr;
  std::vector<double> censored_fraction;
  double h_hat = 0.0;
  double h0 = 0.0;
  /// Some n had more than half of its return-time scans censored.
  bool widened_uncertainty = false;
};

/// Samples (omega, x ~ mu_omega) pairs per n. Sample s at length n uses RNG
/// stream (seed, n << 32 | s). Return-time scans stop at
/// cap_factor / mu(C^n(x)) steps. h_hat averages the SMB slopes of the two
/// largest n.
EntropyEstimates estimate_entropies(const FiberMeasure& fm, const BaseProcess& proc, const std::vector<int>& n_range,
                                    std::size_t samples, std::uint64_t seed, unsigned threads = 0,
                                    double cap_factor = 64.0);

}  // namespace qhit

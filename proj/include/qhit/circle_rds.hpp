#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qhit/base_process.hpp"
#include "qhit/big_uint.hpp"
#include "qhit/survival.hpp"

namespace qhit {

/// Random composition of x -> m_0 x and x -> m_1 x (mod 1) driven by a binary
/// base process. Every map preserves Lebesgue measure, so mu_omega = Leb.
struct CircleRDS {
  std::array<unsigned, 2> multipliers{2, 3};
  BaseProcess base = BaseProcess::bernoulli(Eigen::Vector2d(0.5, 0.5));

  void validate() const;
  unsigned max_multiplier() const { return std::max(multipliers[0], multipliers[1]); }
};

/// Bits of precision for an exact horizon: ceil(steps log2 m_max) + 64.
unsigned required_precision_bits(std::uint64_t steps, unsigned max_multiplier);

/// Horizon covered by `bits` of precision (inverse of required_precision_bits).
std::uint64_t precision_horizon(unsigned bits, unsigned max_multiplier);

/// An exact point of the circle: numerator / modulus, where the modulus is
/// either 2^B (dyadic point with B bits of precision) or a word-sized q for
/// rational test points. Multiplication mod 1 never rounds.
class CirclePoint {
 public:
  static CirclePoint dyadic(BigUint numerator, unsigned precision_bits);
  static CirclePoint rational(std::uint64_t numerator, std::uint64_t denominator);
  /// Uniform dyadic point with the given precision.
  static CirclePoint uniform(unsigned precision_bits, Rng& rng);

  const BigUint& numerator() const { return numerator_; }
  /// B for dyadic points, 0 for rational ones (exact at every horizon).
  unsigned precision_bits() const { return precision_bits_; }
  bool is_dyadic() const { return precision_bits_ > 0; }

  void multiply_mod_one(unsigned m);
  /// floor(x * 2^64).
  std::uint64_t position() const;
  double to_double() const { return static_cast<double>(position()) * 0x1.0p-64; }

  bool operator==(const CirclePoint& other) const = default;

 private:
  BigUint numerator_;
  BigUint modulus_;
  unsigned precision_bits_ = 0;
};

/// Ball B(y, r) on the circle, decided on the 64-bit grid.
struct BallTarget {
  double center = 0.0;
  double radius = 0.0;

  BallTarget(double y, double r);
  double measure() const { return std::min(2.0 * radius, 1.0); }
  bool contains(std::uint64_t position) const;

 private:
  std::uint64_t center_fixed_ = 0;
  std::uint64_t radius_fixed_ = 0;
};

/// Lazily iterated f_omega^k(x0): step j applies the map selected by bits[j].
class RandomOrbit {
 public:
  RandomOrbit(const CircleRDS& rds, std::span<const std::uint8_t> bits, CirclePoint x0, std::uint64_t steps);

  const CirclePoint& current() const { return x_; }
  std::uint64_t index() const { return k_; }
  /// Advances to f_omega^{k+1}(x0); throws BudgetExceeded past `steps`.
  const CirclePoint& step();

 private:
  const CircleRDS* rds_;
  std::span<const std::uint8_t> bits_;
  CirclePoint x_;
  std::uint64_t k_ = 0;
  std::uint64_t steps_;
};

RandomOrbit random_orbit(const CircleRDS& rds, std::span<const std::uint8_t> bits, const CirclePoint& x0,
                         std::uint64_t steps);

/// First k in [1, cap] with f_omega^k(x0) in the ball, else censored(cap).
HittingTime hitting_time_ball(const CircleRDS& rds, std::span<const std::uint8_t> bits, const CirclePoint& x0,
                              const BallTarget& target, std::uint64_t cap);

struct CircleLawResult {
  double radius = 0.0;
  std::vector<double> t;
  std::vector<std::int64_t> k;
  std::vector<double> survival;
  double delta_r = 0.0;
  std::size_t trials = 0;
  /// Trials with no hit within twice the largest k on the grid.
  std::size_t censored_count = 0;
  bool widened_uncertainty = false;
  unsigned precision_bits = 0;
};

/// Empirical mu_omega(tau_{B(y,r)} > floor(t / 2r)) with x0 ~ Lebesgue, and
/// Delta_r = max over the grid of |survival - e^{-t}|. Trial i draws from RNG
/// stream (seed, i); `bits` must cover 2 floor(t_max / 2r) steps.
CircleLawResult quenched_law_statistic(const CircleRDS& rds, std::span<const std::uint8_t> bits, double y, double r,
                                       const std::vector<double>& t_grid, std::size_t trials, std::uint64_t seed,
                                       unsigned threads = 0);

/// Steps quenched_law_statistic iterates at most for this grid.
std::uint64_t circle_law_horizon(double r, const std::vector<double>& t_grid);

/// Lebesgue(B(y, r + rho)) <= Lebesgue(B(y, r)) + r^{-1} rho, for 0 < rho < r < 1/2.
bool annulus_mass_check(double y, double r, double rho);

/// Smallest k in [1, horizon] with f_omega^k(x0) == x0 exactly.
std::optional<std::uint64_t> first_period(const CircleRDS& rds, std::span<const std::uint8_t> bits,
                                          const CirclePoint& x0, std::uint64_t horizon);

/// Fraction of uniform starting points whose orbit returns exactly to itself
/// within `horizon` steps.
double aperiodicity_probe(const CircleRDS& rds, std::span<const std::uint8_t> bits, std::size_t trials,
                          std::uint64_t horizon, std::uint64_t seed, unsigned threads = 0);

/// Positions of f_omega^steps(x0) for `samples` uniform x0, in [0, 1).
std::vector<double> pushforward_sample(const CircleRDS& rds, std::span<const std::uint8_t> bits, std::size_t samples,
                                       std::uint64_t steps, std::uint64_t seed, unsigned threads = 0);

}  // namespace qhit

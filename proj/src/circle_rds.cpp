#include "qhit/circle_rds.hpp"

#include <cmath>
#include <string>

#include "qhit/error.hpp"
#include "qhit/parallel.hpp"

namespace qhit {

void CircleRDS::validate() const {
  if (multipliers[0] < 2 || multipliers[1] < 2) throw InvalidArgument("circle multipliers must be >= 2");
  if (base.alphabet_size() != 2) throw InvalidArgument("circle base process must be binary");
}

unsigned required_precision_bits(std::uint64_t steps, unsigned max_multiplier) {
  return static_cast<unsigned>(std::ceil(static_cast<double>(steps) * std::log2(static_cast<double>(max_multiplier)))) +
         64;
}

std::uint64_t precision_horizon(unsigned bits, unsigned max_multiplier) {
  if (bits < 64) return 0;
  auto steps = static_cast<std::uint64_t>(std::floor((bits - 64) / std::log2(static_cast<double>(max_multiplier))));
  while (steps > 0 && required_precision_bits(steps, max_multiplier) > bits) --steps;
  return steps;
}

CirclePoint CirclePoint::dyadic(BigUint numerator, unsigned precision_bits) {
  if (precision_bits == 0) throw InvalidArgument("dyadic point needs precision_bits >= 1");
  if (numerator.bit_length() > precision_bits) throw InvalidArgument("dyadic numerator must be < 2^precision_bits");
  CirclePoint p;
  p.numerator_ = std::move(numerator);
  p.modulus_ = BigUint::power_of_two(precision_bits);
  p.precision_bits_ = precision_bits;
  return p;
}

CirclePoint CirclePoint::rational(std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0 || numerator >= denominator) throw InvalidArgument("rational point needs 0 <= a < q");
  CirclePoint p;
  p.numerator_ = BigUint(numerator);
  p.modulus_ = BigUint(denominator);
  return p;
}

CirclePoint CirclePoint::uniform(unsigned precision_bits, Rng& rng) {
  return dyadic(BigUint::random(precision_bits, rng), precision_bits);
}

void CirclePoint::multiply_mod_one(unsigned m) {
  numerator_.mul_small(m);
  if (is_dyadic()) {
    numerator_.truncate(precision_bits_);
  } else {
    while (numerator_ >= modulus_) numerator_.sub(modulus_);
  }
}

std::uint64_t CirclePoint::position() const {
  if (is_dyadic()) return numerator_.leading_word(precision_bits_);
  const unsigned __int128 scaled = static_cast<unsigned __int128>(numerator_.low_word()) << 64;
  return static_cast<std::uint64_t>(scaled / modulus_.low_word());
}

BallTarget::BallTarget(double y, double r) : center(y), radius(r) {
  if (!(r > 0.0 && r < 0.5)) throw InvalidArgument("ball radius must lie in (0, 1/2)");
  if (!(y >= 0.0 && y < 1.0)) throw InvalidArgument("ball center must lie in [0, 1)");
  center_fixed_ = static_cast<std::uint64_t>(std::ldexp(y, 64));
  radius_fixed_ = static_cast<std::uint64_t>(std::ldexp(r, 64));
}

bool BallTarget::contains(std::uint64_t position) const {
  const std::uint64_t d = position - center_fixed_;
  return std::min(d, std::uint64_t{0} - d) < radius_fixed_;
}

RandomOrbit::RandomOrbit(const CircleRDS& rds, std::span<const std::uint8_t> bits, CirclePoint x0,
                         std::uint64_t steps)
    : rds_(&rds), bits_(bits), x_(std::move(x0)), steps_(steps) {
  if (bits_.size() < steps_)
    throw InvalidArgument("random_orbit: " + std::to_string(bits_.size()) + " base symbols for " +
                          std::to_string(steps_) + " steps");
  if (x_.is_dyadic()) {
    const unsigned need = required_precision_bits(steps_, rds.max_multiplier());
    if (x_.precision_bits() < need)
      throw BudgetExceeded("random_orbit: " + std::to_string(steps_) + " steps need " + std::to_string(need) +
                           " bits, point has " + std::to_string(x_.precision_bits()));
  }
}

const CirclePoint& RandomOrbit::step() {
  if (k_ >= steps_) throw BudgetExceeded("random_orbit: step beyond the configured horizon " + std::to_string(steps_));
  x_.multiply_mod_one(rds_->multipliers[bits_[k_] & 1u]);
  ++k_;
  return x_;
}

RandomOrbit random_orbit(const CircleRDS& rds, std::span<const std::uint8_t> bits, const CirclePoint& x0,
                         std::uint64_t steps) {
  return RandomOrbit(rds, bits, x0, steps);
}

HittingTime hitting_time_ball(const CircleRDS& rds, std::span<const std::uint8_t> bits, const CirclePoint& x0,
                              const BallTarget& target, std::uint64_t cap) {
  RandomOrbit orbit(rds, bits, x0, cap);
  for (std::uint64_t k = 1; k <= cap; ++k)
    if (target.contains(orbit.step().position())) return {k, false};
  return {cap, true};
}

std::uint64_t circle_law_horizon(double r, const std::vector<double>& t_grid) {
  check_t_grid(t_grid);
  return 2 * static_cast<std::uint64_t>(std::floor(t_grid.back() / (2.0 * r)));
}

CircleLawResult quenched_law_statistic(const CircleRDS& rds, std::span<const std::uint8_t> bits, double y, double r,
                                       const std::vector<double>& t_grid, std::size_t trials, std::uint64_t seed,
                                       unsigned threads) {
  rds.validate();
  if (trials < 100) throw InvalidArgument("quenched_law_statistic: needs >= 100 trials");
  const BallTarget target(y, r);
  const std::uint64_t cap = std::max<std::uint64_t>(1, circle_law_horizon(r, t_grid));

  CircleLawResult out;
  out.radius = r;
  out.trials = trials;
  out.precision_bits = required_precision_bits(cap, rds.max_multiplier());
  std::vector<HittingTime> hits(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    hits[i] = hitting_time_ball(rds, bits, CirclePoint::uniform(out.precision_bits, rng), target, cap);
  });

  for (const auto& h : hits) out.censored_count += h.censored ? 1 : 0;
  out.widened_uncertainty = out.censored_count > 0;
  for (double t : t_grid) {
    const auto k = static_cast<std::int64_t>(std::floor(t / target.measure()));
    std::size_t alive = 0;
    for (const auto& h : hits) alive += (h.censored || h.time > static_cast<std::uint64_t>(k)) ? 1 : 0;
    const double s = static_cast<double>(alive) / static_cast<double>(trials);
    out.t.push_back(t);
    out.k.push_back(k);
    out.survival.push_back(s);
    out.delta_r = std::max(out.delta_r, std::abs(s - std::exp(-t)));
  }
  return out;
}

bool annulus_mass_check(double y, double r, double rho) {
  if (!(rho > 0.0 && rho < r && r < 0.5)) throw InvalidArgument("annulus_mass_check: need 0 < rho < r < 1/2");
  if (!(y >= 0.0 && y < 1.0)) throw InvalidArgument("annulus_mass_check: center must lie in [0, 1)");
  // Lebesgue measure of a circle ball does not depend on its center.
  const double outer = std::min(2.0 * (r + rho), 1.0);
  const double inner = std::min(2.0 * r, 1.0);
  return outer <= inner + rho / r;
}

std::optional<std::uint64_t> first_period(const CircleRDS& rds, std::span<const std::uint8_t> bits,
                                          const CirclePoint& x0, std::uint64_t horizon) {
  RandomOrbit orbit(rds, bits, x0, horizon);
  for (std::uint64_t k = 1; k <= horizon; ++k)
    if (orbit.step() == x0) return k;
  return std::nullopt;
}

double aperiodicity_probe(const CircleRDS& rds, std::span<const std::uint8_t> bits, std::size_t trials,
                          std::uint64_t horizon, std::uint64_t seed, unsigned threads) {
  rds.validate();
  if (trials == 0) throw InvalidArgument("aperiodicity_probe: trials must be >= 1");
  const unsigned precision = required_precision_bits(horizon, rds.max_multiplier());
  std::vector<char> periodic(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    periodic[i] = first_period(rds, bits, CirclePoint::uniform(precision, rng), horizon).has_value();
  });
  std::size_t count = 0;
  for (char p : periodic) count += p ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(trials);
}

std::vector<double> pushforward_sample(const CircleRDS& rds, std::span<const std::uint8_t> bits, std::size_t samples,
                                       std::uint64_t steps, std::uint64_t seed, unsigned threads) {
  rds.validate();
  const unsigned precision = required_precision_bits(steps, rds.max_multiplier());
  std::vector<double> out(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    RandomOrbit orbit(rds, bits, CirclePoint::uniform(precision, rng), steps);
    for (std::uint64_t k = 0; k < steps; ++k) orbit.step();
    out[i] = orbit.current().to_double();
  });
  return out;
}

}  // namespace qhit

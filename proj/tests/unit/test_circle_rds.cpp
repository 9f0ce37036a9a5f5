#include <doctest.h>

#include <cmath>
#include <vector>

#include "qhit/circle_rds.hpp"
#include "qhit/error.hpp"
#include "qhit/stats.hpp"

using namespace qhit;

namespace {

std::vector<std::uint8_t> random_bits(std::size_t len, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> bits(len);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
  return bits;
}

}  // namespace

TEST_CASE("precision budget") {
  CHECK(required_precision_bits(100, 2) == 164);
  CHECK(required_precision_bits(100, 3) == 159 + 64);
  CHECK(precision_horizon(required_precision_bits(500, 3), 3) >= 500);
  const CircleRDS rds;
  const std::vector<std::uint8_t> bits(10, 1);
  const CirclePoint x = CirclePoint::dyadic(BigUint(5), 64);
  CHECK_THROWS_AS(random_orbit(rds, bits, x, 10), BudgetExceeded);
  auto orbit = random_orbit(rds, bits, CirclePoint::dyadic(BigUint(5), required_precision_bits(3, 3)), 3);
  for (int i = 0; i < 3; ++i) orbit.step();
  CHECK_THROWS_AS(orbit.step(), BudgetExceeded);
  CHECK_THROWS_AS((CircleRDS{{1, 3}, rds.base}).validate(), InvalidArgument);
}

TEST_CASE("simple orbits") {
  const CircleRDS rds;
  const std::vector<std::uint8_t> zeros(50, 0);
  auto third = random_orbit(rds, zeros, CirclePoint::rational(1, 3), 50);
  for (int k = 1; k <= 50; ++k) CHECK(third.step() == CirclePoint::rational(k % 2 == 1 ? 2 : 1, 3));

  const auto bits = random_bits(50, 1);
  auto origin = random_orbit(rds, bits, CirclePoint::dyadic(BigUint(0), 200), 50);
  for (int k = 0; k < 50; ++k) CHECK(origin.step().numerator().is_zero());
}

TEST_CASE("exact arithmetic matches independent oracles") {
  const CircleRDS rds;
  Rng rng(42);
  for (int config = 0; config < 100; ++config) {
    const auto bits = random_bits(100, 1000 + static_cast<std::uint64_t>(config));
    // Rational points: numerator * m mod q.
    const std::uint64_t q = 2 + rng() % 1000000007ULL;
    std::uint64_t a = rng() % q;
    auto orbit = random_orbit(rds, bits, CirclePoint::rational(a, q), 100);
    bool same = true;
    for (std::size_t k = 0; k < 100; ++k) {
      a = static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * rds.multipliers[bits[k]] % q);
      same = same && orbit.step() == CirclePoint::rational(a, q);
    }
    CHECK(same);

    // Dyadic points: the low word evolves as a word-size product mod 2^64.
    const unsigned precision = required_precision_bits(100, 3);
    const CirclePoint x0 = CirclePoint::uniform(precision, rng);
    std::uint64_t low = x0.numerator().low_word();
    auto dy = random_orbit(rds, bits, x0, 100);
    bool low_same = true;
    for (std::size_t k = 0; k < 100; ++k) {
      low *= rds.multipliers[bits[k]];
      low_same = low_same && dy.step().numerator().low_word() == low;
    }
    CHECK(low_same);
    CHECK(dy.current().numerator().bit_length() <= precision);
  }
}

TEST_CASE("ball hitting times") {
  const CircleRDS rds;
  const std::vector<std::uint8_t> zeros(20000, 0);
  const BallTarget origin(0.0, 0.1);
  const auto never = hitting_time_ball(rds, zeros, CirclePoint::rational(1, 3), origin, 10000);
  CHECK(never.censored);
  CHECK(never.time == 10000);

  // x0 = 1/3 sits in B(1/3, 0.01); the first return is at k = 2.
  const auto back = hitting_time_ball(rds, zeros, CirclePoint::rational(1, 3), BallTarget(1.0 / 3.0, 0.01), 10);
  CHECK_FALSE(back.censored);
  CHECK(back.time == 2);

  const BallTarget wrap(0.99, 0.02);
  CHECK(wrap.contains(0));
  CHECK(wrap.measure() == doctest::Approx(0.04));
  CHECK_THROWS_AS(BallTarget(0.5, 0.5), InvalidArgument);

  // Doubling map, r = 0.01: mean hitting time near 1 / 2r = 50.
  Rng rng(5);
  const double r = 0.01;
  const std::uint64_t cap = 5000;
  const unsigned precision = required_precision_bits(cap, 3);
  double total = 0;
  const int trials = 10000;
  int censored = 0;
  for (int i = 0; i < trials; ++i) {
    const double y = rng.uniform();
    const auto h = hitting_time_ball(rds, zeros, CirclePoint::uniform(precision, rng), BallTarget(y, r), cap);
    censored += h.censored;
    total += static_cast<double>(h.time);
  }
  CHECK(censored == 0);
  CHECK(std::abs(total / trials - 50.0) < 5.0);
}

TEST_CASE("quenched law statistic") {
  const CircleRDS rds;
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 3.0};
  const double r = 0.01;
  const auto bits = random_bits(circle_law_horizon(r, grid), 9);
  const auto res = quenched_law_statistic(rds, bits, 0.3, r, grid, 2000, 4);
  CHECK(res.survival[0] == 1.0);
  for (std::size_t i = 1; i < res.survival.size(); ++i) CHECK(res.survival[i] <= res.survival[i - 1]);
  CHECK(res.k[2] == 50);
  CHECK(res.delta_r < 0.1);
  double worst = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(res.survival[i] - std::exp(-grid[i])));
  CHECK(res.delta_r == worst);

  const auto again = quenched_law_statistic(rds, bits, 0.3, r, grid, 2000, 4, 3);
  CHECK(again.survival == res.survival);
  CHECK(again.censored_count == res.censored_count);

  CHECK_THROWS_AS(quenched_law_statistic(rds, bits, 0.3, r, grid, 99, 4), InvalidArgument);
  CHECK_THROWS_AS(quenched_law_statistic(rds, std::span(bits).first(10), 0.3, r, grid, 200, 4), InvalidArgument);
}

TEST_CASE("annulus mass") {
  CHECK(annulus_mass_check(0.2, 0.1, 0.01));
  CHECK(annulus_mass_check(0.7, 0.4, 0.05));
  Rng rng(8);
  int pass = 0;
  for (int i = 0; i < 1000; ++i) {
    const double r = 0.499 * rng.uniform() + 1e-9;
    const double rho = r * rng.uniform() + 1e-12;
    pass += annulus_mass_check(rng.uniform(), r, std::min(rho, r * 0.999));
  }
  CHECK(pass == 1000);
  CHECK_THROWS_AS(annulus_mass_check(0.1, 0.5, 0.01), InvalidArgument);
  CHECK_THROWS_AS(annulus_mass_check(0.1, 0.1, 0.2), InvalidArgument);
}

TEST_CASE("periodicity and measure preservation") {
  const CircleRDS rds;
  const std::vector<std::uint8_t> zeros(100, 0);
  CHECK(first_period(rds, zeros, CirclePoint::rational(1, 3), 50) == 2u);
  CHECK(first_period(rds, zeros, CirclePoint::dyadic(BigUint(0), 200), 50) == 1u);
  const auto bits = random_bits(100, 3);
  CHECK(aperiodicity_probe(rds, bits, 1000, 50, 7) == 0.0);

  const auto push = pushforward_sample(rds, bits, 100000, 20, 11);
  CHECK(push.size() == 100000);
  CHECK(uniform_ks_statistic(push) < dkw_epsilon(push.size(), 0.01));
}

#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace qhit {

// One generator for the whole library: std::mt19937_64 seeded through
// std::seed_seq from the pair (seed, stream). Both algorithms are fixed by the
// standard, so a (seed, stream) pair names the same sequence everywhere.
// Streams identify units of work, not threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Index drawn from a probability row by inverse-CDF scan.
  template <typename Derived>
  int categorical(const Eigen::DenseBase<Derived>& probs) {
    const double u = uniform();
    double acc = 0.0;
    const Eigen::Index last = probs.size() - 1;
    for (Eigen::Index i = 0; i < last; ++i) {
      acc += static_cast<double>(probs(i));
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(last);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qhit

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qhit/rng.hpp"

namespace qhit {

enum class BaseKind { Bernoulli, Markov };

/// The driving system: an i.i.d. or stationary Markov symbol stream over
/// {0..s}. A Bernoulli process is stored as a Markov chain whose rows all equal
/// the weight vector, so path sampling and cylinder products share one code
/// path; the kind is kept to make product-measure facts exact.
class BaseProcess {
 public:
  static BaseProcess bernoulli(const Eigen::VectorXd& weights);
  static BaseProcess markov(const Eigen::MatrixXd& transition);

  BaseKind kind() const { return kind_; }
  int alphabet_size() const { return static_cast<int>(stationary_.size()); }

  /// Bernoulli weights, or the stationary vector of the Markov chain.
  const Eigen::VectorXd& stationary() const { return stationary_; }
  const Eigen::MatrixXd& transition() const { return transition_; }

 private:
  BaseProcess(BaseKind kind, Eigen::VectorXd stationary, Eigen::MatrixXd transition)
      : kind_(kind), stationary_(std::move(stationary)), transition_(std::move(transition)) {}

  BaseKind kind_;
  Eigen::VectorXd stationary_;
  Eigen::MatrixXd transition_;
};

/// Stateful sampler of one stationary base path, symbol by symbol.
class BaseSymbolStream {
 public:
  BaseSymbolStream(const BaseProcess& proc, std::uint64_t seed, std::uint64_t stream = 0)
      : proc_(&proc), rng_(seed, stream) {}

  int next();

 private:
  const BaseProcess* proc_;
  Rng rng_;
  int last_ = -1;
};

/// A finite, right-extensible realization of omega. Index i refers to the
/// coordinate start_index() + i; every formula only needs nonnegative shifts.
class BaseWindow {
 public:
  BaseWindow(BaseProcess proc, std::uint64_t seed, std::uint64_t stream = 0);

  /// Window with prescribed leading symbols; extensions continue the chain
  /// from the last symbol with generator (seed, stream).
  static BaseWindow from_symbols(BaseProcess proc, std::span<const int> symbols,
                                 std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::int64_t start_index() const { return start_; }
  std::size_t size() const { return symbols_.size(); }
  int operator[](std::size_t i) const { return symbols_[i]; }
  std::span<const std::uint8_t> symbols() const { return symbols_; }
  const BaseProcess& process() const { return proc_; }

  /// Draws further symbols until size() >= length. Deterministic in the seed
  /// regardless of how the extension is split into calls.
  void extend_to(std::size_t length);

  /// The window of theta^k omega: drops the first k symbols.
  BaseWindow shifted(std::size_t k) const;

 private:
  BaseProcess proc_;
  Rng rng_;
  std::vector<std::uint8_t> symbols_;
  std::int64_t start_ = 0;
};

BaseWindow sample_window(const BaseProcess& proc, std::uint64_t seed, std::size_t length,
                         std::uint64_t stream = 0);

/// Exact P of the base cylinder [w_0 ... w_{n-1}] at coordinate 0.
double base_cylinder_prob(const BaseProcess& proc, std::span<const int> word);

/// max over rank-n cylinders U and rank-m cylinders V of
/// |P(U ∩ theta^{-n-gap} V) / (P(U) P(V)) - 1|, by exhaustive enumeration
/// with the gap bridged by a transition-matrix power.
double psi_mixing_coefficient(const BaseProcess& proc, int gap, int n, int m,
                              std::size_t enumeration_cap = std::size_t{1} << 22);

}  // namespace qhit

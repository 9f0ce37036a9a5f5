#include "qhit/base_process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "qhit/error.hpp"

namespace qhit {
namespace {

constexpr double kStochasticTol = 1e-12;

void check_probability_row(const Eigen::VectorXd& row, const std::string& what) {
  if (row.size() < 2) throw InvalidArgument(what + ": alphabet must have at least 2 symbols");
  if (row.size() > 256) throw InvalidArgument(what + ": alphabet larger than 256");
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (!(row(i) > 0.0 && row(i) < 1.0))
      throw InvalidArgument(what + ": entry " + std::to_string(i) + " outside (0,1)");
  }
  if (std::abs(row.sum() - 1.0) > kStochasticTol) throw InvalidArgument(what + ": does not sum to 1");
}

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Decodes a mixed-radix counter into a word, most significant symbol first.
void decode_word(std::size_t code, int alphabet, std::vector<int>& word) {
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    *it = static_cast<int>(code % static_cast<std::size_t>(alphabet));
    code /= static_cast<std::size_t>(alphabet);
  }
}

}  // namespace

BaseProcess BaseProcess::bernoulli(const Eigen::VectorXd& weights) {
  check_probability_row(weights, "Bernoulli weights");
  Eigen::MatrixXd q = weights.transpose().replicate(weights.size(), 1);
  return BaseProcess(BaseKind::Bernoulli, weights, std::move(q));
}

BaseProcess BaseProcess::markov(const Eigen::MatrixXd& transition) {
  const Eigen::Index s = transition.rows();
  if (transition.cols() != s) throw InvalidArgument("Markov transition matrix must be square");
  for (Eigen::Index i = 0; i < s; ++i)
    check_probability_row(transition.row(i).transpose(), "transition row " + std::to_string(i));

  // pi (Q - I) = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd system = transition.transpose() - Eigen::MatrixXd::Identity(s, s);
  system.row(s - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s);
  rhs(s - 1) = 1.0;
  Eigen::VectorXd pi = system.fullPivLu().solve(rhs);
  if ((pi.transpose() * transition - pi.transpose()).cwiseAbs().maxCoeff() > kStochasticTol)
    throw InvalidArgument("Markov chain: stationary vector not resolved to 1e-12");
  return BaseProcess(BaseKind::Markov, std::move(pi), transition);
}

int BaseSymbolStream::next() {
  last_ = last_ < 0 ? rng_.categorical(proc_->stationary())
                    : rng_.categorical(proc_->transition().row(last_));
  return last_;
}

BaseWindow::BaseWindow(BaseProcess proc, std::uint64_t seed, std::uint64_t stream)
    : proc_(std::move(proc)), rng_(seed, stream) {}

BaseWindow BaseWindow::from_symbols(BaseProcess proc, std::span<const int> symbols, std::uint64_t seed,
                                    std::uint64_t stream) {
  BaseWindow w(std::move(proc), seed, stream);
  w.symbols_.reserve(symbols.size());
  for (int a : symbols) {
    if (a < 0 || a >= w.proc_.alphabet_size())
      throw InvalidArgument("base symbol " + std::to_string(a) + " out of range");
    w.symbols_.push_back(static_cast<std::uint8_t>(a));
  }
  return w;
}

void BaseWindow::extend_to(std::size_t length) {
  symbols_.reserve(length);
  while (symbols_.size() < length) {
    const int a = symbols_.empty() ? rng_.categorical(proc_.stationary())
                                   : rng_.categorical(proc_.transition().row(symbols_.back()));
    symbols_.push_back(static_cast<std::uint8_t>(a));
  }
}

BaseWindow BaseWindow::shifted(std::size_t k) const {
  if (k > symbols_.size()) throw InvalidArgument("shift beyond window end");
  BaseWindow w(*this);
  w.symbols_.erase(w.symbols_.begin(), w.symbols_.begin() + static_cast<std::ptrdiff_t>(k));
  w.start_ += static_cast<std::int64_t>(k);
  return w;
}

BaseWindow sample_window(const BaseProcess& proc, std::uint64_t seed, std::size_t length,
                         std::uint64_t stream) {
  if (length == 0) throw InvalidArgument("sample_window: length must be >= 1");
  BaseWindow w(proc, seed, stream);
  w.extend_to(length);
  return w;
}

double base_cylinder_prob(const BaseProcess& proc, std::span<const int> word) {
  if (word.empty()) throw InvalidArgument("base_cylinder_prob: empty word");
  const int s = proc.alphabet_size();
  for (int a : word)
    if (a < 0 || a >= s) throw InvalidArgument("base symbol " + std::to_string(a) + " out of range");
  double p = proc.stationary()(word[0]);
  for (std::size_t i = 1; i < word.size(); ++i) p *= proc.transition()(word[i - 1], word[i]);
  return p;
}

double psi_mixing_coefficient(const BaseProcess& proc, int gap, int n, int m, std::size_t enumeration_cap) {
  if (gap < 0 || n < 1 || m < 1) throw InvalidArgument("psi_mixing_coefficient: need gap >= 0, n, m >= 1");
  const int s = proc.alphabet_size();
  const std::size_t nu = ipow(static_cast<std::size_t>(s), n);
  const std::size_t nv = ipow(static_cast<std::size_t>(s), m);
  if (n > 12 || m > 12 || nu * nv > enumeration_cap)
    throw ResourceLimit("psi_mixing_coefficient: " + std::to_string(nu) + " x " + std::to_string(nv) +
                        " cylinder pairs exceed the enumeration cap");

  // The chain is Markov, so the joint law only sees the bridge from the last
  // symbol of U to the first symbol of V across gap + 1 transitions.
  Eigen::MatrixXd bridge = proc.transition();
  for (int i = 0; i < gap; ++i) bridge = bridge * proc.transition();

  std::vector<int> u(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(m));
  double worst = 0.0;
  for (std::size_t cu = 0; cu < nu; ++cu) {
    decode_word(cu, s, u);
    const double pu = base_cylinder_prob(proc, u);
    for (std::size_t cv = 0; cv < nv; ++cv) {
      decode_word(cv, s, v);
      const double pv = base_cylinder_prob(proc, v);
      const double joint = proc.kind() == BaseKind::Bernoulli
                               ? pu * pv
                               : pu * bridge(u.back(), v.front()) * (pv / proc.stationary()(v.front()));
      worst = std::max(worst, std::abs(joint / (pu * pv) - 1.0));
    }
  }
  return worst;
}

}  // namespace qhit

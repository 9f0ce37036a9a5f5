#include "qhit/fiber_measure.hpp"

#include <algorithm>
#include <string>

namespace qhit {

Pattern::Pattern(std::vector<int> symbols, int alphabet_size)
    : symbols_(std::move(symbols)), alphabet_size_(alphabet_size) {
  if (symbols_.empty()) throw InvalidArgument("pattern must have length >= 1");
  if (alphabet_size_ < 2) throw InvalidArgument("pattern alphabet must have >= 2 symbols");
  for (int a : symbols_)
    if (a < 0 || a >= alphabet_size_) throw InvalidArgument("pattern symbol " + std::to_string(a) + " out of range");
}

Pattern Pattern::parse(std::string_view digits, int alphabet_size) {
  std::vector<int> s;
  s.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '9') throw InvalidArgument("pattern digits must be 0-9");
    s.push_back(c - '0');
  }
  return Pattern(std::move(s), alphabet_size);
}

std::string Pattern::str() const {
  std::string out;
  for (int a : symbols_) {
    if (alphabet_size_ <= 10) {
      out.push_back(static_cast<char>('0' + a));
    } else {
      if (!out.empty()) out.push_back('.');
      out += std::to_string(a);
    }
  }
  return out;
}

void RandomShiftSpec::validate() const {
  if (fiber_alphabet_size < 2) throw InvalidArgument("fiber alphabet must have >= 2 symbols");
  for (const auto& [base_symbol, a] : transition_matrices) {
    const std::string where = "transition matrix for base symbol " + std::to_string(base_symbol);
    if (a.rows() != fiber_alphabet_size || a.cols() != fiber_alphabet_size)
      throw InvalidArgument(where + ": wrong shape");
    if ((a.array() != 0 && a.array() != 1).any()) throw InvalidArgument(where + ": entries must be 0/1");
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (a.row(i).sum() == 0) throw InvalidArgument(where + ": empty row " + std::to_string(i));
      if (a.col(i).sum() == 0) throw InvalidArgument(where + ": empty column " + std::to_string(i));
    }
  }
}

bool RandomShiftSpec::is_full_shift() const {
  return std::all_of(transition_matrices.begin(), transition_matrices.end(),
                     [](const auto& kv) { return (kv.second.array() == 1).all(); });
}

FiberMeasure::FiberMeasure(Eigen::MatrixXd w) : w_(std::move(w)) {
  if (w_.rows() < 1 || w_.cols() < 2) throw InvalidArgument("W needs >= 1 row and >= 2 columns");
  for (Eigen::Index i = 0; i < w_.rows(); ++i) {
    for (Eigen::Index j = 0; j < w_.cols(); ++j)
      if (!(w_(i, j) > 0.0 && w_(i, j) < 1.0))
        throw InvalidArgument("W(" + std::to_string(i) + "," + std::to_string(j) + ") outside (0,1)");
    if (std::abs(w_.row(i).sum() - 1.0) > 1e-12) throw InvalidArgument("row " + std::to_string(i) + " not stochastic");
  }
  q_max_ = w_.maxCoeff();
}

FiberMeasure FiberMeasure::two_point(double p) {
  Eigen::MatrixXd w(2, 2);
  w << p, 1.0 - p, 1.0 - p, p;
  return FiberMeasure(std::move(w));
}

void check_pattern_against(const FiberMeasure& fm, const Pattern& pat) {
  if (pat.alphabet_size() != fm.fiber_alphabet_size())
    throw InvalidArgument("pattern alphabet does not match W");
}

void require_window(const BaseWindow& window, std::size_t needed, const char* op) {
  if (window.size() < needed)
    throw InvalidArgument(std::string(op) + ": window has " + std::to_string(window.size()) +
                          " coordinates, needs " + std::to_string(needed));
}

double marginal_cylinder_measure(const FiberMeasure& fm, const BaseProcess& proc, const Pattern& pat) {
  check_pattern_against(fm, pat);
  if (proc.alphabet_size() != fm.base_alphabet_size()) throw InvalidArgument("W rows do not match base alphabet");
  const Eigen::VectorXd& pi = proc.stationary();
  if (proc.kind() == BaseKind::Bernoulli) {
    double p = 1.0;
    for (std::size_t i = 0; i < pat.size(); ++i) p *= pi.dot(fm.matrix().col(pat[i]));
    return p;
  }
  // pi^T D_0 Q D_1 ... Q D_{n-1} 1 with D_i = diag(W[., y_i]).
  Eigen::RowVectorXd v = pi.transpose().cwiseProduct(fm.matrix().col(pat[0]).transpose());
  for (std::size_t i = 1; i < pat.size(); ++i)
    v = (v * proc.transition()).cwiseProduct(fm.matrix().col(pat[i]).transpose());
  return v.sum();
}

DensityRatio density_ratio(const FiberMeasure& fm, const BaseProcess& proc, const BaseWindow& window,
                           const Pattern& pat) {
  const Eigen::MatrixXd& w = fm.matrix();
  const bool two_point = w.rows() == 2 && w.cols() == 2 && w(0, 0) == w(1, 1) && w(0, 1) == w(1, 0);
  const bool fair_base = proc.kind() == BaseKind::Bernoulli && proc.alphabet_size() == 2 &&
                         proc.stationary()(0) == 0.5 && proc.stationary()(1) == 0.5;
  if (!two_point || !fair_base)
    throw UnsupportedConfiguration("density_ratio: needs a fair-coin base and W = [[p,q],[q,p]]");
  require_window(window, pat.size(), "density_ratio");

  DensityRatio out;
  for (std::size_t i = 0; i < pat.size(); ++i)
    if (window[i] == pat[i]) ++out.matches;
  const double p = w(0, 0);
  if (p == 0.5) {
    out.degenerate = true;
    return out;
  }
  const double n = static_cast<double>(pat.size());
  const double k = static_cast<double>(out.matches);
  out.log_ratio = k * std::log(p) + (n - k) * std::log(1.0 - p) + n * std::log(2.0);
  out.ratio = std::exp(out.log_ratio);
  return out;
}

std::vector<int> sample_fiber_prefix(const FiberMeasure& fm, const BaseWindow& window, std::size_t length,
                                     Rng& rng) {
  require_window(window, length, "sample_fiber_prefix");
  std::vector<int> x(length);
  for (std::size_t i = 0; i < length; ++i) x[i] = rng.categorical(fm.matrix().row(window[i]));
  return x;
}

Pattern sample_marginal_pattern(const FiberMeasure& fm, const BaseProcess& proc, std::size_t n,
                                std::uint64_t seed, std::uint64_t stream) {
  BaseWindow aux = sample_window(proc, seed, n, stream);
  Rng rng(seed, stream ^ 0x9e3779b97f4a7c15ULL);
  return Pattern(sample_fiber_prefix(fm, aux, n, rng), fm.fiber_alphabet_size());
}

}  // namespace qhit

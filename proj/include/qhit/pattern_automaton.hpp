#pragma once

#include <span>
#include <vector>

#include "qhit/fiber_measure.hpp"

namespace qhit {

/// Occurrence automaton of a pattern (Knuth-Morris-Pratt with the failure
/// function folded into a full transition table). State i is the length of
/// the longest suffix of the text read so far that is a prefix of the
/// pattern; state n means an occurrence has just been completed.
class PatternAutomaton {
 public:
  explicit PatternAutomaton(Pattern pat);

  const Pattern& pattern() const { return pattern_; }
  int length() const { return static_cast<int>(pattern_.size()); }
  int accepting() const { return length(); }
  int alphabet_size() const { return pattern_.alphabet_size(); }

  int next(int state, int symbol) const { return table_[static_cast<std::size_t>(state * alphabet_size() + symbol)]; }
  /// Longest proper border of the prefix of length `state`.
  int failure(int state) const { return failure_[static_cast<std::size_t>(state)]; }
  /// Longest proper border of the whole pattern: the state after an occurrence.
  int border() const { return failure(length()); }

  /// State reached from `from` after reading `word`.
  int run(std::span<const int> word, int from = 0) const;

 private:
  Pattern pattern_;
  std::vector<int> failure_;
  std::vector<int> table_;
};

inline PatternAutomaton build_automaton(const Pattern& pat) { return PatternAutomaton(pat); }

}  // namespace qhit

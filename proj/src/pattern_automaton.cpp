#include "qhit/pattern_automaton.hpp"

namespace qhit {

PatternAutomaton::PatternAutomaton(Pattern pat) : pattern_(std::move(pat)) {
  const int n = length();
  const int b = alphabet_size();
  failure_.assign(static_cast<std::size_t>(n + 1), 0);
  for (int i = 1, k = 0; i < n; ++i) {
    while (k > 0 && pattern_[i] != pattern_[k]) k = failure_[k];
    if (pattern_[i] == pattern_[k]) ++k;
    failure_[i + 1] = k;
  }
  table_.assign(static_cast<std::size_t>((n + 1) * b), 0);
  for (int state = 0; state <= n; ++state) {
    for (int a = 0; a < b; ++a) {
      int t;
      if (state < n && pattern_[state] == a)
        t = state + 1;
      else if (state == 0)
        t = 0;
      else
        t = next(failure_[state], a);  // failure state < state, already filled
      table_[static_cast<std::size_t>(state * b + a)] = t;
    }
  }
}

int PatternAutomaton::run(std::span<const int> word, int from) const {
  int s = from;
  for (int a : word) s = next(s, a);
  return s;
}

}  // namespace qhit

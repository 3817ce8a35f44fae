#pragma once

// Reference implementations used to cross-check the engine. They are written
// straight from the rule definitions and share no code with the library.

#include <algorithm>
#include <array>
#include <map>
#include <vector>

#include "trustlens/rating.hpp"
#include "trustlens/voting.hpp"

namespace trustlens::oracle {

struct Tally {
  std::array<int, 3> weight{};  // indexed by L, M, H
  std::array<bool, 3> present{};
  TrustLevel aggregate = TrustLevel::L;
  bool tie = false;
};

// levels[i] is the level of the issue ranked i-th (0 = most important).
inline Tally brute_force_aggregate(const std::vector<TrustLevel>& levels, bool pessimistic) {
  Tally t;
  const int k = static_cast<int>(levels.size());
  for (int i = 0; i < k; ++i) {
    const int idx = static_cast<int>(levels[i]);
    t.weight[idx] += k - (i + 1);
    t.present[idx] = true;
  }
  int best = -1;
  std::vector<int> leaders;
  for (int idx = 0; idx < 3; ++idx) {
    if (!t.present[idx]) continue;
    if (t.weight[idx] > best) {
      best = t.weight[idx];
      leaders = {idx};
    } else if (t.weight[idx] == best) {
      leaders.push_back(idx);
    }
  }
  t.tie = leaders.size() > 1;
  t.aggregate = static_cast<TrustLevel>(pessimistic ? leaders.back() : leaders.front());
  return t;
}

inline std::map<IssueKind, double> borda_scores(const std::vector<voting::Ballot>& ballots) {
  std::map<IssueKind, double> s;
  for (const auto& b : ballots) {
    const double k = static_cast<double>(b.ranking.size());
    for (std::size_t p = 0; p < b.ranking.size(); ++p) {
      s[b.ranking[p]] += k - 1.0 - static_cast<double>(p);
    }
  }
  return s;
}

}  // namespace trustlens::oracle

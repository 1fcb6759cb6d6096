#pragma once

// Straightforward reference computations the library results are checked
// against. Nothing here calls into the code under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

inline double entropy(const std::vector<std::size_t>& codes) {
  std::map<std::size_t, double> freq;
  for (auto c : codes) freq[c] += 1.0;
  double h = 0.0;
  const double n = static_cast<double>(codes.size());
  for (const auto& [code, f] : freq) h -= f / n * std::log2(f / n);
  return h;
}

inline double joint_entropy(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::map<std::pair<std::size_t, std::size_t>, double> freq;
  for (std::size_t i = 0; i < a.size(); ++i) freq[{a[i], b[i]}] += 1.0;
  double h = 0.0;
  const double n = static_cast<double>(a.size());
  for (const auto& [pair, f] : freq) h -= f / n * std::log2(f / n);
  return h;
}

inline double su(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const double ha = entropy(a), hb = entropy(b);
  if (ha + hb == 0.0) return 0.0;
  const double mi = ha + hb - joint_entropy(a, b);
  return 2.0 * mi / (ha + hb);
}

// ff[i][j] feature-feature SU, fc[i] feature-class SU.
inline double merit(const std::vector<std::size_t>& subset, const std::vector<std::vector<double>>& ff,
                    const std::vector<double>& fc) {
  const double k = static_cast<double>(subset.size());
  if (subset.empty()) return 0.0;
  double rcf = 0.0;
  for (auto i : subset) rcf += fc[i];
  rcf /= k;
  double rff = 0.0;
  std::size_t pairs = 0;
  for (std::size_t x = 0; x < subset.size(); ++x)
    for (std::size_t y = x + 1; y < subset.size(); ++y) {
      rff += ff[subset[x]][subset[y]];
      ++pairs;
    }
  if (pairs) rff /= static_cast<double>(pairs);
  const double denom = std::sqrt(k + k * (k - 1.0) * rff);
  return denom > 0 ? k * rcf / denom : 0.0;
}

// Best merit over every non-empty subset.
inline double exhaustive_best_merit(const std::vector<std::vector<double>>& ff, const std::vector<double>& fc) {
  const std::size_t n = fc.size();
  double best = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) subset.push_back(i);
    best = std::max(best, merit(subset, ff, fc));
  }
  return best;
}

// Probability that a random positive outscores a random negative, ties half.
inline double auc_pairwise(const std::vector<double>& scores, const std::vector<bool>& positive) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  return wins / pairs;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Most frequent code, smallest on ties.
inline std::size_t mode(const std::vector<std::size_t>& v) {
  std::map<std::size_t, std::size_t> freq;
  for (auto x : v) ++freq[x];
  std::size_t best = 0, count = 0;
  for (const auto& [code, f] : freq)
    if (f > count) {
      best = code;
      count = f;
    }
  return best;
}

}  // namespace oracle

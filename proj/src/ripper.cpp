#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "fusemine/random.hpp"
#include "learn_common.hpp"

namespace fusemine::detail {

namespace {

double log2s(double x) { return x > 0 ? std::log2(x) : 0.0; }

// Bits to pick k of t elements when each is picked with probability p.
double subset_dl(double t, double k, double p) {
  double bits = 0.0;
  if (k > 0) bits -= k * log2s(p);
  if (t - k > 0) bits -= (t - k) * log2s(1.0 - p);
  return bits;
}

double data_dl(double exp_fp_over_err, double cover, double uncover, double fp, double fn) {
  double bits = log2s(cover + uncover + 1.0);
  double cover_bits, uncover_bits;
  if (cover > uncover) {
    const double exp_err = exp_fp_over_err * (fp + fn);
    cover_bits = subset_dl(cover, fp, cover > 0 ? exp_err / cover : 0.0);
    uncover_bits = uncover > 0 ? subset_dl(uncover, fn, fn / uncover) : 0.0;
  } else {
    const double exp_err = (1.0 - exp_fp_over_err) * (fp + fn);
    cover_bits = cover > 0 ? subset_dl(cover, fp, fp / cover) : 0.0;
    uncover_bits = subset_dl(uncover, fn, uncover > 0 ? exp_err / uncover : 0.0);
  }
  return bits + cover_bits + uncover_bits;
}

class OneClass {
 public:
  OneClass(const TrainData& d, const Rows& data, std::size_t cls, const RipperParams& p,
           std::uint64_t seed)
      : d_(d), data_(data), cls_(cls), p_(p), seed_(seed) {
    double pos = 0;
    for (auto r : data_) pos += d_.y[r] == cls_ ? 1.0 : 0.0;
    exp_fp_ = pos / static_cast<double>(data_.size());
    // Possible conditions: each nominal label, two tests per distinct numeric value.
    for (std::size_t a = 0; a < d_.dims(); ++a) {
      if (d_.nominal(a)) {
        all_conds_ += static_cast<double>(d_.inputs[a].labels.size());
      } else {
        std::set<double> distinct;
        for (auto r : data_) distinct.insert(d_.X[r][a]);
        all_conds_ += 2.0 * static_cast<double>(distinct.size());
      }
    }
    all_conds_ = std::max(all_conds_, 1.0);
  }

  std::vector<Rule> run() {
    std::vector<Rule> rules;
    build(rules);
    reduce_dl(rules);
    for (std::size_t pass = 0; pass < p_.optimizations; ++pass) {
      optimize(rules);
      build(rules);
      reduce_dl(rules);
    }
    return rules;
  }

 private:
  bool positive(std::size_t r) const { return d_.y[r] == cls_; }

  static bool covered(const std::vector<Rule>& rules, const Encoded& x) {
    return std::any_of(rules.begin(), rules.end(), [&](const Rule& r) { return r.matches(x); });
  }

  double theory_dl(const Rule& r) const {
    const double k = static_cast<double>(r.conditions.size());
    if (k == 0) return 0.0;
    double k_bits = log2s(k);
    if (k > 1) k_bits += 2.0 * log2s(k_bits);
    return 0.5 * (k_bits + subset_dl(all_conds_, k, k / all_conds_));
  }

  double total_dl(const std::vector<Rule>& rules) const {
    double theory = 0.0;
    for (const auto& r : rules) theory += theory_dl(r);
    double cover = 0, uncover = 0, fp = 0, fn = 0;
    for (auto r : data_) {
      if (covered(rules, d_.X[r])) {
        cover += 1;
        if (!positive(r)) fp += 1;
      } else {
        uncover += 1;
        if (positive(r)) fn += 1;
      }
    }
    return theory + data_dl(exp_fp_, cover, uncover, fp, fn);
  }

  void split(const Rows& rows, Rows& grow, Rows& prune) {
    grow.clear();
    prune.clear();
    if (!p_.prune || rows.size() < p_.num_folds) {
      grow = rows;
      return;
    }
    const auto fold = content_folds(d_, rows, p_.num_folds, derive_seed(seed_, {cls_, ++splits_}));
    for (std::size_t i = 0; i < rows.size(); ++i) (fold[i] == 0 ? prune : grow).push_back(rows[i]);
  }

  // FOIL-gain greedy growth starting from `start`.
  Rule grow_rule(const Rows& grow, std::vector<Condition> start) const {
    Rule rule;
    rule.cls = cls_;
    rule.conditions = std::move(start);
    Rows cov;
    for (auto r : grow)
      if (rule.matches(d_.X[r])) cov.push_back(r);

    while (true) {
      double p0 = 0;
      for (auto r : cov) p0 += positive(r) ? 1.0 : 0.0;
      const double t0 = static_cast<double>(cov.size());
      if (p0 == t0 || p0 == 0) break;
      const double base = std::log2((p0 + 1.0) / (t0 + 1.0));

      double best_gain = 0.0;
      std::optional<Condition> best;
      auto consider = [&](Condition c, double p, double t) {
        if (t < p_.min_coverage || p == 0) return;
        const double g = p * (std::log2((p + 1.0) / (t + 1.0)) - base);
        if (g > best_gain + 1e-12) {
          best_gain = g;
          best = c;
        }
      };

      for (std::size_t a = 0; a < d_.dims(); ++a) {
        if (d_.nominal(a)) {
          const bool used = std::any_of(rule.conditions.begin(), rule.conditions.end(),
                                        [&](const Condition& c) { return c.attr == a; });
          if (used) continue;
          const std::size_t labels = d_.inputs[a].labels.size();
          std::vector<double> pv(labels, 0.0), tv(labels, 0.0);
          for (auto r : cov) {
            const auto v = static_cast<std::size_t>(d_.X[r][a]);
            if (v >= labels) continue;
            tv[v] += 1.0;
            pv[v] += positive(r) ? 1.0 : 0.0;
          }
          for (std::size_t v = 0; v < labels; ++v)
            consider({a, CondOp::Eq, static_cast<double>(v)}, pv[v], tv[v]);
        } else {
          Rows sorted = cov;
          std::sort(sorted.begin(), sorted.end(), [&](std::size_t l, std::size_t r) {
            return d_.X[l][a] < d_.X[r][a] || (d_.X[l][a] == d_.X[r][a] && l < r);
          });
          double pl = 0, tl = 0;
          for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            tl += 1.0;
            pl += positive(sorted[i]) ? 1.0 : 0.0;
            const double lo = d_.X[sorted[i]][a], hi = d_.X[sorted[i + 1]][a];
            if (!(lo < hi)) continue;
            double t = lo + (hi - lo) / 2.0;
            if (!(t < hi)) t = lo;
            consider({a, CondOp::Le, t}, pl, tl);
            consider({a, CondOp::Gt, t}, p0 - pl, t0 - tl);
          }
        }
      }
      if (!best) break;
      rule.conditions.push_back(*best);
      Rows next;
      for (auto r : cov)
        if (best->matches(d_.X[r])) next.push_back(r);
      cov = std::move(next);
    }
    return rule;
  }

  // Keeps the prefix that scores best on the pruning set. With `context`
  // the score is the accuracy of the whole rule set with the candidate in
  // slot `slot`; otherwise it is (p + 1) / (p + n + 2) of the rule alone.
  Rule prune_rule(Rule rule, const Rows& prune, const std::vector<Rule>* context,
                  std::size_t slot) const {
    if (prune.empty() || rule.conditions.size() <= 1) return rule;
    std::size_t best_len = rule.conditions.size();
    double best_worth = -1.0;
    for (std::size_t len = 1; len <= rule.conditions.size(); ++len) {
      Rule cand = rule;
      cand.conditions.resize(len);
      double worth;
      if (context) {
        auto rules = *context;
        rules[slot] = cand;
        double right = 0;
        for (auto r : prune) right += covered(rules, d_.X[r]) == positive(r) ? 1.0 : 0.0;
        worth = right / static_cast<double>(prune.size());
      } else {
        double p = 0, n = 0;
        for (auto r : prune)
          if (cand.matches(d_.X[r])) (positive(r) ? p : n) += 1.0;
        worth = (p + 1.0) / (p + n + 2.0);
      }
      if (worth >= best_worth - 1e-12) {
        best_worth = worth;
        best_len = len;
      }
    }
    rule.conditions.resize(best_len);
    return rule;
  }

  void build(std::vector<Rule>& rules) {
    Rows uncovered;
    for (auto r : data_)
      if (!covered(rules, d_.X[r])) uncovered.push_back(r);
    double min_dl = total_dl(rules);
    Rows grow, prune;
    while (std::any_of(uncovered.begin(), uncovered.end(), [&](std::size_t r) { return positive(r); })) {
      split(uncovered, grow, prune);
      Rule rule = grow_rule(grow, {});
      rule = prune_rule(std::move(rule), prune, nullptr, 0);
      if (rule.conditions.empty()) break;

      // A rule whose error rate reaches one half is not worth keeping.
      const Rows& check = prune.empty() ? grow : prune;
      double p = 0, n = 0;
      for (auto r : check)
        if (rule.matches(d_.X[r])) (positive(r) ? p : n) += 1.0;
      if (p + n > 0 && n / (p + n) >= 0.5) break;

      rules.push_back(rule);
      const double dl = total_dl(rules);
      if (dl > min_dl + 64.0) {
        rules.pop_back();
        break;
      }
      min_dl = std::min(min_dl, dl);

      Rows rest;
      for (auto r : uncovered)
        if (!rule.matches(d_.X[r])) rest.push_back(r);
      if (rest.size() == uncovered.size()) {
        rules.pop_back();
        break;
      }
      uncovered = std::move(rest);
    }
  }

  void reduce_dl(std::vector<Rule>& rules) const {
    for (std::size_t i = rules.size(); i-- > 0;) {
      auto without = rules;
      without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
      if (total_dl(without) < total_dl(rules)) rules = std::move(without);
    }
  }

  void optimize(std::vector<Rule>& rules) {
    for (std::size_t i = 0; i < rules.size(); ++i) {
      Rows rest;
      for (auto r : data_) {
        bool earlier = false;
        for (std::size_t j = 0; j < i && !earlier; ++j) earlier = rules[j].matches(d_.X[r]);
        if (!earlier) rest.push_back(r);
      }
      Rows grow, prune;
      split(rest, grow, prune);

      std::vector<Rule> options = {rules[i]};
      Rule replacement = prune_rule(grow_rule(grow, {}), prune, &rules, i);
      if (!replacement.conditions.empty()) options.push_back(std::move(replacement));
      Rule revision = prune_rule(grow_rule(grow, rules[i].conditions), prune, &rules, i);
      if (!revision.conditions.empty()) options.push_back(std::move(revision));

      std::size_t pick = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < options.size(); ++o) {
        auto trial = rules;
        trial[i] = options[o];
        const double dl = total_dl(trial);
        if (dl < best - 1e-9) {
          best = dl;
          pick = o;
        }
      }
      rules[i] = options[pick];
    }
  }

  const TrainData& d_;
  const Rows& data_;
  std::size_t cls_;
  const RipperParams& p_;
  std::uint64_t seed_;
  std::uint64_t splits_ = 0;
  double exp_fp_ = 0.0;
  double all_conds_ = 0.0;
};

}  // namespace

RuleList train_ripper(const TrainData& d, const RipperParams& p, std::uint64_t seed) {
  const auto all = d.all_rows();
  const auto freq = class_counts(d, all);
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < d.k; ++c)
    if (freq[c] > 0) order.push_back(c);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return freq[a] < freq[b]; });

  RuleList list;
  list.default_class = order.empty() ? 0 : order.back();
  Rows remaining = all;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const std::size_t c = order[i];
    if (std::none_of(remaining.begin(), remaining.end(), [&](std::size_t r) { return d.y[r] == c; }))
      continue;
    auto rules = OneClass(d, remaining, c, p, seed).run();
    Rows rest;
    for (auto r : remaining) {
      const bool hit = std::any_of(rules.begin(), rules.end(), [&](const Rule& rule) { return rule.matches(d.X[r]); });
      if (!hit) rest.push_back(r);
    }
    for (auto& r : rules) list.rules.push_back(std::move(r));
    remaining = std::move(rest);
    if (remaining.empty()) break;
  }
  fill_rule_counts(list, d);
  return list;
}

}  // namespace fusemine::detail

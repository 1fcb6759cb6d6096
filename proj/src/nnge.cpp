#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "learn_common.hpp"

namespace fusemine::detail {

namespace {

struct Box {
  Exemplar e;
  Rows members;
};

class Nnge {
 public:
  Nnge(const TrainData& d, const NngeParams& p) : d_(d), p_(p) {
    set_.nominal.resize(d.dims());
    set_.ranges.assign(d.dims(), 0.0);
    for (std::size_t a = 0; a < d.dims(); ++a) {
      set_.nominal[a] = d.nominal(a);
      if (d.nominal(a) || d.y.empty()) continue;
      double lo = d.X[0][a], hi = lo;
      for (const auto& x : d.X) {
        lo = std::min(lo, x[a]);
        hi = std::max(hi, x[a]);
      }
      set_.ranges[a] = hi - lo;
    }
    set_.weights = mutual_information_weights();
  }

  ExemplarSet run() {
    for (std::size_t r = 0; r < d_.y.size(); ++r) add(r);
    for (auto& b : boxes_) {
      b.e.members = b.members.size();
      set_.exemplars.push_back(b.e);
    }
    return set_;
  }

 private:
  std::vector<double> mutual_information_weights() const {
    std::vector<double> w(d_.dims(), 0.0);
    const double n = static_cast<double>(d_.y.size());
    if (n == 0) return std::vector<double>(d_.dims(), 1.0);
    std::vector<double> cls(d_.k, 0.0);
    for (auto y : d_.y) cls[y] += 1.0;
    const double h_cls = entropy_bits(cls);
    for (std::size_t a = 0; a < d_.dims(); ++a) {
      std::size_t cats;
      std::vector<std::size_t> code(d_.y.size());
      if (d_.nominal(a)) {
        cats = d_.categories(a);
        for (std::size_t r = 0; r < code.size(); ++r) code[r] = static_cast<std::size_t>(d_.X[r][a]);
      } else {
        cats = p_.mi_bins;
        double lo = d_.X[0][a];
        for (const auto& x : d_.X) lo = std::min(lo, x[a]);
        const double width = set_.ranges[a] / static_cast<double>(cats);
        for (std::size_t r = 0; r < code.size(); ++r) {
          std::size_t b = width > 0 ? static_cast<std::size_t>((d_.X[r][a] - lo) / width) : 0;
          code[r] = std::min(b, cats - 1);
        }
      }
      std::vector<std::vector<double>> joint(cats, std::vector<double>(d_.k, 0.0));
      for (std::size_t r = 0; r < code.size(); ++r) joint[code[r]][d_.y[r]] += 1.0;
      double h_cond = 0.0;
      for (const auto& row : joint) h_cond += total(row) / n * entropy_bits(row);
      w[a] = std::max(h_cls - h_cond, 0.0);
    }
    if (std::all_of(w.begin(), w.end(), [](double v) { return v <= 0.0; }))
      std::fill(w.begin(), w.end(), 1.0);
    return w;
  }

  Exemplar point(std::size_t r) const {
    Exemplar e;
    e.cls = d_.y[r];
    e.lo = d_.X[r];
    e.hi = d_.X[r];
    e.values.resize(d_.dims());
    for (std::size_t a = 0; a < d_.dims(); ++a)
      if (d_.nominal(a)) e.values[a] = {static_cast<std::size_t>(d_.X[r][a])};
    return e;
  }

  Exemplar extended(const Exemplar& e, const Encoded& x) const {
    Exemplar out = e;
    for (std::size_t a = 0; a < d_.dims(); ++a) {
      if (d_.nominal(a)) {
        auto& v = out.values[a];
        const auto xv = static_cast<std::size_t>(x[a]);
        if (!std::binary_search(v.begin(), v.end(), xv)) v.insert(std::upper_bound(v.begin(), v.end(), xv), xv);
      } else {
        out.lo[a] = std::min(out.lo[a], x[a]);
        out.hi[a] = std::max(out.hi[a], x[a]);
      }
    }
    return out;
  }

  Box box_of(const Rows& members) const {
    Box b{point(members.front()), members};
    for (std::size_t i = 1; i < members.size(); ++i) b.e = extended(b.e, d_.X[members[i]]);
    return b;
  }

  bool contains(const Exemplar& e, const Encoded& x) const {
    for (std::size_t a = 0; a < d_.dims(); ++a) {
      if (d_.nominal(a)) {
        if (!std::binary_search(e.values[a].begin(), e.values[a].end(), static_cast<std::size_t>(x[a])))
          return false;
      } else if (x[a] < e.lo[a] || x[a] > e.hi[a]) {
        return false;
      }
    }
    return true;
  }

  bool intersects(const Exemplar& e, const Exemplar& f) const {
    for (std::size_t a = 0; a < d_.dims(); ++a) {
      if (d_.nominal(a)) {
        bool shared = false;
        for (auto v : e.values[a])
          if (std::binary_search(f.values[a].begin(), f.values[a].end(), v)) shared = true;
        if (!shared) return false;
      } else if (e.hi[a] < f.lo[a] || f.hi[a] < e.lo[a]) {
        return false;
      }
    }
    return true;
  }

  double distance(const Exemplar& e, const Encoded& x) const {
    double d2 = 0.0;
    for (std::size_t a = 0; a < d_.dims(); ++a) {
      double g;
      if (d_.nominal(a)) {
        g = std::binary_search(e.values[a].begin(), e.values[a].end(), static_cast<std::size_t>(x[a])) ? 0.0 : 1.0;
      } else {
        const double gap = x[a] < e.lo[a] ? e.lo[a] - x[a] : (x[a] > e.hi[a] ? x[a] - e.hi[a] : 0.0);
        g = set_.ranges[a] > 0 ? gap / set_.ranges[a] : (gap > 0 ? 1.0 : 0.0);
      }
      d2 += (set_.weights[a] * g) * (set_.weights[a] * g);
    }
    return std::sqrt(d2);
  }

  // Carves x out of an other-class box along the attribute that keeps the
  // most members in the two remaining pieces.
  void split_box(std::size_t i, const Encoded& x) {
    const Box box = boxes_[i];
    std::size_t best_attr = 0, best_kept = 0;
    for (std::size_t a = 0; a < d_.dims(); ++a) {
      std::size_t kept = 0;
      for (auto m : box.members) kept += d_.X[m][a] != x[a] ? 1 : 0;
      if (kept > best_kept) {
        best_kept = kept;
        best_attr = a;
      }
    }
    if (best_kept == 0) return;  // every member equals x: conflicting duplicates
    Rows below, above, same;
    for (auto m : box.members) {
      const double v = d_.X[m][best_attr];
      if (v == x[best_attr])
        same.push_back(m);
      else if (d_.nominal(best_attr) || v < x[best_attr])
        below.push_back(m);
      else
        above.push_back(m);
    }
    boxes_.erase(boxes_.begin() + static_cast<std::ptrdiff_t>(i));
    if (!below.empty()) boxes_.push_back(box_of(below));
    if (!above.empty()) boxes_.push_back(box_of(above));
    for (auto m : same) boxes_.push_back(box_of({m}));
  }

  void add(std::size_t r) {
    const auto& x = d_.X[r];
    const std::size_t c = d_.y[r];

    for (std::size_t i = 0; i < boxes_.size(); ++i)
      if (boxes_[i].e.cls == c && contains(boxes_[i].e, x)) {
        boxes_[i].members.push_back(r);
        return;
      }

    for (std::size_t i = boxes_.size(); i-- > 0;)
      if (boxes_[i].e.cls != c && boxes_[i].members.size() > 1 && contains(boxes_[i].e, x)) split_box(i, x);

    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t i = 0; i < boxes_.size(); ++i)
      if (boxes_[i].e.cls == c) near.emplace_back(distance(boxes_[i].e, x), i);
    std::sort(near.begin(), near.end());
    for (std::size_t t = 0; t < near.size() && t < p_.attempts; ++t) {
      const std::size_t i = near[t].second;
      Exemplar grown = extended(boxes_[i].e, x);
      bool clash = false;
      for (const auto& other : boxes_)
        if (other.e.cls != c && intersects(grown, other.e)) {
          clash = true;
          break;
        }
      if (clash) continue;
      boxes_[i].e = std::move(grown);
      boxes_[i].members.push_back(r);
      return;
    }
    boxes_.push_back(box_of({r}));
  }

  const TrainData& d_;
  const NngeParams& p_;
  ExemplarSet set_;
  std::vector<Box> boxes_;
};

}  // namespace

ExemplarSet train_nnge(const TrainData& d, const NngeParams& p) { return Nnge(d, p).run(); }

}  // namespace fusemine::detail

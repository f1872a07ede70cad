#include "trees.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocp/rng.h"

namespace ocp {

const TreeNode& DecisionTree::leaf(const SparseVector& x) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    const TreeNode& n = nodes[node];
    auto it = std::lower_bound(x.indices.begin(), x.indices.end(),
                               static_cast<uint32_t>(n.feature));
    bool present = it != x.indices.end() && *it == static_cast<uint32_t>(n.feature);
    bool go_left;
    if (!present && absent_is_missing) {
      go_left = n.default_left;
    } else {
      double v = present ? x.values[it - x.indices.begin()] : 0.0;
      go_left = v < n.threshold;
    }
    node = go_left ? n.left : n.right;
  }
  return nodes[node];
}

namespace internal {

namespace {

struct Entry {
  double value;
  uint32_t row;
};

double midpoint(double a, double b) {
  double mid = 0.5 * (a + b);
  // Guard against rounding onto the upper value.
  return mid >= b ? a : mid;
}

// Per-feature scratch arrays indexed by feature id, reset through the list
// of touched features.
class FeatureScratch {
 public:
  explicit FeatureScratch(size_t dim)
      : count_(dim, 0), min_(dim, 0.0), max_(dim, 0.0), bucket_(dim, -1) {}

  std::vector<uint32_t> touched;
  std::vector<uint32_t> count_;
  std::vector<double> min_, max_;
  std::vector<int> bucket_;

  void reset() {
    for (uint32_t f : touched) {
      count_[f] = 0;
      bucket_[f] = -1;
    }
    touched.clear();
  }
};

// ---------------------------------------------------------------- forest

class ForestBuilder {
 public:
  ForestBuilder(const std::vector<SparseVector>& x,
                const std::vector<uint32_t>& classes, size_t n_classes,
                const BaselineHyperparams& hp, size_t max_features)
      : x_(x),
        classes_(classes),
        n_classes_(n_classes),
        hp_(hp),
        max_features_(max_features),
        scratch_(x.empty() ? 0 : x[0].dimension) {}

  DecisionTree build(std::vector<uint32_t> rows, std::vector<double> weights,
                     Rng& rng) {
    tree_ = DecisionTree{};
    weight_.assign(x_.size(), 0.0);
    for (size_t k = 0; k < rows.size(); ++k) weight_[rows[k]] = weights[k];
    grow(rows, 0, rng);
    return std::move(tree_);
  }

 private:
  struct Split {
    bool found = false;
    uint32_t feature = 0;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
  };

  int grow(const std::vector<uint32_t>& rows, int depth, Rng& rng) {
    std::vector<double> totals(n_classes_, 0.0);
    for (uint32_t r : rows) totals[classes_[r]] += weight_[r];
    double total = 0.0;
    for (double t : totals) total += t;

    int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    {
      std::vector<double> dist(n_classes_, 0.0);
      for (size_t c = 0; c < n_classes_; ++c) dist[c] = total > 0 ? totals[c] / total : 0.0;
      tree_.nodes[id].value = std::move(dist);
    }
    size_t nonzero_classes = 0;
    for (double t : totals) nonzero_classes += t > 0.0;
    bool depth_ok = hp_.rf_max_depth <= 0 || depth < hp_.rf_max_depth;
    if (rows.size() < 2 || nonzero_classes <= 1 || !depth_ok) return id;

    Split split = best_split(rows, totals, total, rng);
    if (!split.found) return id;

    std::vector<uint32_t> left, right;
    for (uint32_t r : rows) {
      const SparseVector& v = x_[r];
      auto it = std::lower_bound(v.indices.begin(), v.indices.end(), split.feature);
      double value = (it != v.indices.end() && *it == split.feature)
                         ? v.values[it - v.indices.begin()]
                         : 0.0;
      (value < split.threshold ? left : right).push_back(r);
    }
    tree_.nodes[id].feature = static_cast<int>(split.feature);
    tree_.nodes[id].threshold = split.threshold;
    int l = grow(left, depth + 1, rng);
    int r = grow(right, depth + 1, rng);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  Split best_split(const std::vector<uint32_t>& rows,
                   const std::vector<double>& totals, double total, Rng& rng) {
    // Features absent from every row are constant at zero; only features
    // that vary within the node are split candidates. Drawing uniformly
    // among those matches drawing from all features and skipping constants.
    for (uint32_t r : rows) {
      const SparseVector& v = x_[r];
      for (size_t k = 0; k < v.indices.size(); ++k) {
        uint32_t f = v.indices[k];
        double val = v.values[k];
        if (scratch_.count_[f]++ == 0) {
          scratch_.touched.push_back(f);
          scratch_.min_[f] = scratch_.max_[f] = val;
        } else {
          scratch_.min_[f] = std::min(scratch_.min_[f], val);
          scratch_.max_[f] = std::max(scratch_.max_[f], val);
        }
      }
    }
    std::vector<uint32_t> candidates;
    for (uint32_t f : scratch_.touched) {
      bool constant = scratch_.count_[f] == rows.size() &&
                      scratch_.min_[f] == scratch_.max_[f];
      if (!constant) candidates.push_back(f);
    }
    std::sort(candidates.begin(), candidates.end());
    size_t take = std::min(max_features_, candidates.size());
    for (size_t i = 0; i < take; ++i) {
      size_t j = i + rng.uniform_int(candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(take);
    std::sort(candidates.begin(), candidates.end());

    std::vector<std::vector<Entry>> buckets(candidates.size());
    for (size_t b = 0; b < candidates.size(); ++b) scratch_.bucket_[candidates[b]] = static_cast<int>(b);
    for (uint32_t r : rows) {
      const SparseVector& v = x_[r];
      for (size_t k = 0; k < v.indices.size(); ++k) {
        int b = scratch_.bucket_[v.indices[k]];
        if (b >= 0) buckets[b].push_back({v.values[k], r});
      }
    }
    scratch_.reset();

    Split best;
    std::vector<double> left(n_classes_), zero_group(n_classes_);
    for (size_t b = 0; b < candidates.size(); ++b) {
      std::vector<Entry>& entries = buckets[b];
      std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& c) {
        return a.value < c.value || (a.value == c.value && a.row < c.row);
      });
      // Zero-valued rows form one group sitting between the negative and
      // positive entries.
      zero_group = totals;
      for (const Entry& e : entries) zero_group[classes_[e.row]] -= weight_[e.row];
      size_t zero_rows = rows.size() - entries.size();
      size_t first_positive =
          std::lower_bound(entries.begin(), entries.end(), 0.0,
                           [](const Entry& e, double v) { return e.value < v; }) -
          entries.begin();

      std::fill(left.begin(), left.end(), 0.0);
      double left_weight = 0.0;
      size_t left_rows = 0;
      double prev_value = 0.0;
      bool have_prev = false;
      auto consider = [&](double next_value) {
        if (!have_prev || left_rows == 0 || left_rows == rows.size()) return;
        if (next_value <= prev_value) return;
        double right_weight = total - left_weight;
        if (left_weight <= 0.0 || right_weight <= 0.0) return;
        double sl = 0.0, sr = 0.0;
        for (size_t c = 0; c < n_classes_; ++c) {
          double rc = totals[c] - left[c];
          sl += left[c] * left[c];
          sr += rc * rc;
        }
        double score = sl / left_weight + sr / right_weight;
        if (score > best.score + 1e-12) {
          best.found = true;
          best.score = score;
          best.feature = candidates[b];
          best.threshold = midpoint(prev_value, next_value);
        }
      };
      auto add_entry = [&](const Entry& e) {
        consider(e.value);
        left[classes_[e.row]] += weight_[e.row];
        left_weight += weight_[e.row];
        ++left_rows;
        prev_value = e.value;
        have_prev = true;
      };
      for (size_t k = 0; k < first_positive; ++k) add_entry(entries[k]);
      if (zero_rows > 0) {
        consider(0.0);
        for (size_t c = 0; c < n_classes_; ++c) {
          left[c] += zero_group[c];
          left_weight += zero_group[c];
        }
        left_rows += zero_rows;
        prev_value = 0.0;
        have_prev = true;
      }
      for (size_t k = first_positive; k < entries.size(); ++k) add_entry(entries[k]);
    }
    return best;
  }

  const std::vector<SparseVector>& x_;
  const std::vector<uint32_t>& classes_;
  size_t n_classes_;
  const BaselineHyperparams& hp_;
  size_t max_features_;
  FeatureScratch scratch_;
  std::vector<double> weight_;
  DecisionTree tree_;
};

// -------------------------------------------------------------- boosting

class BoostTreeBuilder {
 public:
  BoostTreeBuilder(const std::vector<SparseVector>& x, const BaselineHyperparams& hp)
      : x_(x), hp_(hp), scratch_(x.empty() ? 0 : x[0].dimension) {}

  DecisionTree build(const std::vector<double>& grad, const std::vector<double>& hess) {
    grad_ = &grad;
    hess_ = &hess;
    tree_ = DecisionTree{};
    tree_.absent_is_missing = true;
    std::vector<uint32_t> rows(x_.size());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<uint32_t>(i);
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    bool found = false;
    uint32_t feature = 0;
    double threshold = 0.0;
    bool default_left = false;
    double gain = 0.0;
  };

  double score(double g, double h) const { return g * g / (h + hp_.gbt_lambda); }

  int grow(const std::vector<uint32_t>& rows, int depth) {
    double g = 0.0, h = 0.0;
    for (uint32_t r : rows) {
      g += (*grad_)[r];
      h += (*hess_)[r];
    }
    int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[id].value = {-g / (h + hp_.gbt_lambda) * hp_.gbt_learning_rate};
    if (depth >= hp_.gbt_max_depth || rows.size() < 2) return id;

    Split split = best_split(rows, g, h);
    if (!split.found) return id;
    std::vector<uint32_t> left, right;
    for (uint32_t r : rows) {
      const SparseVector& v = x_[r];
      auto it = std::lower_bound(v.indices.begin(), v.indices.end(), split.feature);
      bool present = it != v.indices.end() && *it == split.feature;
      bool go_left = present ? v.values[it - v.indices.begin()] < split.threshold
                             : split.default_left;
      (go_left ? left : right).push_back(r);
    }
    tree_.nodes[id].feature = static_cast<int>(split.feature);
    tree_.nodes[id].threshold = split.threshold;
    tree_.nodes[id].default_left = split.default_left;
    int l = grow(left, depth + 1);
    int r = grow(right, depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  Split best_split(const std::vector<uint32_t>& rows, double g_total, double h_total) {
    std::vector<uint32_t>& features = scratch_.touched;
    std::vector<std::vector<Entry>> buckets;
    for (uint32_t r : rows) {
      const SparseVector& v = x_[r];
      for (size_t k = 0; k < v.indices.size(); ++k) {
        uint32_t f = v.indices[k];
        if (scratch_.bucket_[f] < 0) {
          scratch_.bucket_[f] = static_cast<int>(buckets.size());
          features.push_back(f);
          buckets.emplace_back();
        }
        buckets[scratch_.bucket_[f]].push_back({v.values[k], r});
      }
    }
    // Visit features in index order so ties resolve deterministically.
    std::vector<std::pair<uint32_t, int>> order;
    order.reserve(features.size());
    for (uint32_t f : features) order.emplace_back(f, scratch_.bucket_[f]);
    std::sort(order.begin(), order.end());
    scratch_.reset();

    const double mcw = hp_.gbt_min_child_weight;
    const double parent = score(g_total, h_total);
    Split best;
    auto consider = [&](double gl, double hl, uint32_t f, double thr, bool dl) {
      double gr = g_total - gl, hr = h_total - hl;
      if (hl < mcw || hr < mcw) return;
      double gain = 0.5 * (score(gl, hl) + score(gr, hr) - parent);
      if (gain > 1e-6 && gain > best.gain + 1e-12) {
        best = {true, f, thr, dl, gain};
      }
    };
    for (auto [f, b] : order) {
      std::vector<Entry>& entries = buckets[b];
      std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& c) {
        return a.value < c.value || (a.value == c.value && a.row < c.row);
      });
      double g_present = 0.0, h_present = 0.0;
      for (const Entry& e : entries) {
        g_present += (*grad_)[e.row];
        h_present += (*hess_)[e.row];
      }
      double g_missing = g_total - g_present, h_missing = h_total - h_present;
      // Missing rows go right; left is a prefix of present entries.
      double gl = 0.0, hl = 0.0;
      for (size_t k = 0; k < entries.size(); ++k) {
        gl += (*grad_)[entries[k].row];
        hl += (*hess_)[entries[k].row];
        if (k + 1 < entries.size()) {
          if (entries[k + 1].value > entries[k].value) {
            consider(gl, hl, f, midpoint(entries[k].value, entries[k + 1].value), false);
          }
        } else {
          double above = std::nextafter(entries[k].value,
                                        std::numeric_limits<double>::infinity());
          consider(gl, hl, f, above, false);
        }
      }
      // Missing rows go left; right is a suffix of present entries.
      double gr = 0.0, hr = 0.0;
      for (size_t k = entries.size(); k-- > 0;) {
        gr += (*grad_)[entries[k].row];
        hr += (*hess_)[entries[k].row];
        if (k > 0) {
          if (entries[k].value > entries[k - 1].value) {
            consider(g_total - gr, h_total - hr, f,
                     midpoint(entries[k - 1].value, entries[k].value), true);
          }
        } else if (h_missing > 0.0 || g_missing != 0.0) {
          consider(g_missing, h_missing, f, entries[0].value, true);
        }
      }
    }
    return best;
  }

  const std::vector<SparseVector>& x_;
  const BaselineHyperparams& hp_;
  FeatureScratch scratch_;
  const std::vector<double>* grad_ = nullptr;
  const std::vector<double>* hess_ = nullptr;
  DecisionTree tree_;
};

}  // namespace

ForestParams train_forest(const std::vector<SparseVector>& x,
                          const std::vector<uint32_t>& classes,
                          size_t n_classes,
                          const std::vector<double>& sample_weight,
                          const BaselineHyperparams& hp) {
  size_t dim = x.empty() ? 0 : x[0].dimension;
  size_t max_features = std::max<size_t>(
      1, static_cast<size_t>(std::sqrt(static_cast<double>(dim))));
  ForestBuilder builder(x, classes, n_classes, hp, max_features);
  Rng rng(hp.seed);
  ForestParams forest;
  const size_t n = x.size();
  for (int t = 0; t < hp.rf_trees; ++t) {
    std::vector<uint32_t> draws(n, 0);
    for (size_t i = 0; i < n; ++i) ++draws[rng.uniform_int(n)];
    std::vector<uint32_t> rows;
    std::vector<double> weights;
    for (size_t i = 0; i < n; ++i) {
      if (draws[i] == 0) continue;
      rows.push_back(static_cast<uint32_t>(i));
      weights.push_back(draws[i] * sample_weight[i]);
    }
    forest.trees.push_back(builder.build(std::move(rows), std::move(weights), rng));
  }
  return forest;
}

BoostParams train_boosting(const std::vector<SparseVector>& x,
                           const std::vector<double>& targets,
                           const std::vector<double>& sample_weight,
                           const BaselineHyperparams& hp) {
  BoostParams boost;
  boost.base_margin = 0.0;
  const size_t n = x.size();
  std::vector<double> margin(n, boost.base_margin), grad(n), hess(n);
  BoostTreeBuilder builder(x, hp);
  for (int round = 0; round < hp.gbt_rounds; ++round) {
    for (size_t i = 0; i < n; ++i) {
      double p = 1.0 / (1.0 + std::exp(-margin[i]));
      grad[i] = (p - targets[i]) * sample_weight[i];
      hess[i] = std::max(p * (1.0 - p), 1e-16) * sample_weight[i];
    }
    DecisionTree tree = builder.build(grad, hess);
    for (size_t i = 0; i < n; ++i) margin[i] += tree.leaf(x[i]).value[0];
    boost.trees.push_back(std::move(tree));
  }
  return boost;
}

}  // namespace internal
}  // namespace ocp

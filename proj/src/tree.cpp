#include "emg/tree.hpp"

#include <algorithm>
#include <string>

#include "emg/error.hpp"
#include "emg/kernels.hpp"

namespace emg {

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t RegressionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (!n.is_leaf()) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

namespace {

template <class SplitFn>
RegressionTree grow(const Matrix& x, std::span<const double> y, const TreeConfig& cfg, SplitFn&& split) {
  if (x.rows() == 0) throw Error("regression tree needs at least one row");
  if (x.rows() != y.size()) throw Error("regression tree rows and targets differ in length");
  const std::size_t min_leaf = std::max<std::size_t>(cfg.min_leaf, 1);

  RegressionTree t;
  t.dims = x.cols();

  struct Pending {
    int node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };
  std::vector<std::size_t> all(x.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  t.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({0, std::move(all), 0});

  while (!stack.empty()) {
    Pending p = std::move(stack.back());
    stack.pop_back();
    double sum = 0.0;
    for (auto r : p.rows) sum += y[r];
    {
      auto& node = t.nodes[static_cast<std::size_t>(p.node)];
      node.count = p.rows.size();
      node.value = sum / static_cast<double>(p.rows.size());
    }
    if (cfg.max_depth != 0 && p.depth >= cfg.max_depth) continue;

    const kernels::Split s = split(x, y, p.rows, min_leaf);
    if (!s.valid || s.gain < kMinSplitGain) continue;

    std::vector<std::size_t> left, right;
    for (auto r : p.rows) (x(r, s.feature) <= s.threshold ? left : right).push_back(r);
    if (left.size() < min_leaf || right.size() < min_leaf) continue;

    const int li = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    const int ri = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    auto& node = t.nodes[static_cast<std::size_t>(p.node)];
    node.feature = static_cast<int>(s.feature);
    node.threshold = s.threshold;
    node.left = li;
    node.right = ri;
    // Right first so the left subtree is expanded (and numbered) first.
    stack.push_back({ri, std::move(right), p.depth + 1});
    stack.push_back({li, std::move(left), p.depth + 1});
  }
  return t;
}

}  // namespace

RegressionTree tree_fit(const Matrix& x, std::span<const double> y, const TreeConfig& cfg) {
  return grow(x, y, cfg, [](const Matrix& xx, std::span<const double> yy, std::span<const std::size_t> rows,
                            std::size_t ml) { return kernels::omp::best_split(xx, yy, rows, ml); });
}

RegressionTree tree_fit_serial(const Matrix& x, std::span<const double> y, const TreeConfig& cfg) {
  return grow(x, y, cfg, [](const Matrix& xx, std::span<const double> yy, std::span<const std::size_t> rows,
                            std::size_t ml) { return kernels::serial::best_split(xx, yy, rows, ml); });
}

double tree_predict(const RegressionTree& t, std::span<const double> x) {
  if (t.nodes.empty()) throw Error("prediction with an empty regression tree");
  if (x.size() != t.dims) {
    throw Error("tree query has " + std::to_string(x.size()) + " dimensions, tree has " + std::to_string(t.dims));
  }
  std::size_t i = 0;
  while (!t.nodes[i].is_leaf()) {
    const auto& n = t.nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return t.nodes[i].value;
}

}  // namespace emg

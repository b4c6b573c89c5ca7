#pragma once

#include <span>
#include <vector>

#include "emg/matrix.hpp"

namespace emg {

/// Flat CART node. Leaves have feature == -1; internal nodes send a row left
/// when x[feature] <= threshold.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;     // mean training target under this node
  std::size_t count = 0;  // training rows under this node

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t dims = 0;

  bool empty() const { return nodes.empty(); }
  std::size_t leaf_count() const;
  std::size_t depth() const;
};

struct TreeConfig {
  std::size_t min_leaf = 10;
  /// Unlimited when 0.
  std::size_t max_depth = 0;
};

inline constexpr double kMinSplitGain = 1e-12;

/// Greedy CART on squared error with exhaustive midpoint thresholds.
RegressionTree tree_fit(const Matrix& x, std::span<const double> y, const TreeConfig& cfg = {});
RegressionTree tree_fit_serial(const Matrix& x, std::span<const double> y, const TreeConfig& cfg = {});

double tree_predict(const RegressionTree& t, std::span<const double> x);

}  // namespace emg

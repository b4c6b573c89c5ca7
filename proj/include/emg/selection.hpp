#pragma once

#include <span>
#include <vector>

#include "emg/preprocess.hpp"
#include "emg/types.hpp"

namespace emg {

struct DiscretizedSeries {
  std::vector<int> symbols;
  std::vector<double> edges;  // symbol = number of edges strictly below the value
  int bins = 0;               // requested bin count
};

/// Equal-frequency binning. Edges sit at midpoints between distinct values;
/// an edge falling inside a run of ties moves to the nearer end of the run.
DiscretizedSeries discretize_ef(std::span<const double> x, int bins);

/// Equal-width binning of [lo, hi] into `bins` cells; out-of-range values
/// clamp to the end cells.
std::vector<int> discretize_ew(std::span<const double> x, int bins, double lo, double hi);

/// Plug-in mutual information in bits. Symbols must be non-negative.
double mutual_information(std::span<const int> a, std::span<const int> b);

/// Plug-in entropy in bits.
double entropy(std::span<const int> a);

enum class RankTarget { Gesture, Force };

struct SelectionConfig {
  int bins = 16;        // equal-frequency bins per channel
  int force_bins = 10;  // equal-width bins over normalized force [0, 1]
  int channels = 3;     // how many channels the trained model keeps
  RankTarget target = RankTarget::Gesture;

  void validate() const;
};

struct ChannelRanking {
  std::vector<ChannelId> order;    // selection order
  std::vector<double> objective;   // mRMR objective at selection time, per pick
  std::vector<double> relevance;   // I(channel; target), per pick
  std::vector<double> score;       // shifted and sum-normalized objective, per pick
};

/// Greedy mRMR (difference form) over pooled per-sample envelopes. Ties go to
/// the lower channel id. `candidates` defaults to all eight channels.
ChannelRanking mrmr_rank(std::span<const ProcessedSequence> seqs, RankTarget target,
                         const SelectionConfig& cfg = {},
                         std::span<const ChannelId> candidates = {});

/// First k channels of the ranking.
std::vector<ChannelId> select_channels(const ChannelRanking& r, int k);

/// channel,rank,objective,score
void write_ranking_csv(const ChannelRanking& r, std::ostream& out);

}  // namespace emg

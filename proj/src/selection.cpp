#include "emg/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "emg/dataset_io.hpp"
#include "emg/error.hpp"

namespace emg {

void SelectionConfig::validate() const {
  if (bins < 2) throw ConfigError("selection.bins must be >= 2");
  if (force_bins < 2) throw ConfigError("selection.force_bins must be >= 2");
  if (channels < 1 || channels > static_cast<int>(kChannelCount)) {
    throw ConfigError("selection.channels must be in 1..8");
  }
}

DiscretizedSeries discretize_ef(std::span<const double> x, int bins) {
  if (bins < 2) throw Error("discretization needs at least 2 bins");
  if (x.size() < static_cast<std::size_t>(bins)) {
    throw Error("series of length " + std::to_string(x.size()) + " is shorter than the bin count " +
                std::to_string(bins));
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  DiscretizedSeries out;
  out.bins = bins;
  for (int b = 1; b < bins; ++b) {
    const std::size_t r = static_cast<std::size_t>(b) * n / static_cast<std::size_t>(bins);
    if (r == 0 || r >= n) continue;
    std::size_t cut = r;  // boundary between sorted[cut - 1] and sorted[cut]
    if (sorted[r - 1] == sorted[r]) {
      const double v = sorted[r];
      const auto run_lo = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
      const auto run_hi = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
      const bool has_lo = run_lo > 0;
      const bool has_hi = run_hi < n;
      if (!has_lo && !has_hi) continue;
      if (has_lo && (!has_hi || r - run_lo <= run_hi - r)) {
        cut = run_lo;
      } else {
        cut = run_hi;
      }
    }
    const double edge = sorted[cut - 1] + (sorted[cut] - sorted[cut - 1]) / 2.0;
    out.edges.push_back(edge);
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());

  out.symbols.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.symbols[i] = static_cast<int>(std::lower_bound(out.edges.begin(), out.edges.end(), x[i]) - out.edges.begin());
  }
  return out;
}

std::vector<int> discretize_ew(std::span<const double> x, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw Error("equal-width discretization needs bins >= 1 and hi > lo");
  std::vector<int> out(x.size());
  const double width = (hi - lo) / bins;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cell = std::floor((x[i] - lo) / width);
    out[i] = static_cast<int>(std::clamp(cell, 0.0, static_cast<double>(bins - 1)));
  }
  return out;
}

namespace {

int symbol_count(std::span<const int> a) {
  int mx = -1;
  for (int v : a) {
    if (v < 0) throw Error("discrete symbols must be non-negative");
    mx = std::max(mx, v);
  }
  return mx + 1;
}

}  // namespace

double entropy(std::span<const int> a) {
  if (a.empty()) return 0.0;
  std::vector<std::size_t> counts(static_cast<std::size_t>(symbol_count(a)), 0);
  for (int v : a) ++counts[static_cast<std::size_t>(v)];
  const double n = static_cast<double>(a.size());
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double mutual_information(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("mutual information needs equal-length series");
  if (a.empty()) throw Error("mutual information needs at least one sample");
  const auto na = static_cast<std::size_t>(symbol_count(a));
  const auto nb = static_cast<std::size_t>(symbol_count(b));
  std::vector<std::size_t> joint(na * nb, 0), ca(na, 0), cb(nb, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto x = static_cast<std::size_t>(a[i]);
    const auto y = static_cast<std::size_t>(b[i]);
    ++joint[x * nb + y];
    ++ca[x];
    ++cb[y];
  }
  const double n = static_cast<double>(a.size());
  double mi = 0.0;
  for (std::size_t x = 0; x < na; ++x) {
    for (std::size_t y = 0; y < nb; ++y) {
      const auto c = joint[x * nb + y];
      if (c == 0) continue;
      const double pxy = static_cast<double>(c) / n;
      // p(x,y) / (p(x) p(y)) = c * n / (ca * cb)
      mi += pxy * std::log2(static_cast<double>(c) * n / (static_cast<double>(ca[x]) * static_cast<double>(cb[y])));
    }
  }
  return std::max(mi, 0.0);
}

constexpr std::size_t kMinPooledSamples = 1000;

ChannelRanking mrmr_rank(std::span<const ProcessedSequence> seqs, RankTarget target, const SelectionConfig& cfg,
                         std::span<const ChannelId> candidates) {
  cfg.validate();
  std::vector<ChannelId> cands(candidates.begin(), candidates.end());
  if (cands.empty()) cands = all_channels();
  std::sort(cands.begin(), cands.end());

  std::size_t total = 0;
  for (const auto& s : seqs) total += s.size();
  if (total < kMinPooledSamples) {
    throw Error("mRMR needs at least 1000 pooled samples, got " + std::to_string(total));
  }

  std::vector<int> y;
  y.reserve(total);
  if (target == RankTarget::Gesture) {
    for (const auto& s : seqs) {
      for (auto g : s.labels) y.push_back(static_cast<int>(index_of(g)));
    }
  } else {
    std::vector<double> f;
    f.reserve(total);
    for (const auto& s : seqs) f.insert(f.end(), s.force.begin(), s.force.end());
    y = discretize_ew(f, cfg.force_bins, 0.0, 1.0);
  }

  const std::size_t m = cands.size();
  std::vector<std::vector<int>> sym(m);
  std::vector<double> relevance(m);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(m); ++i) {
    std::vector<double> pooled;
    pooled.reserve(total);
    for (const auto& s : seqs) {
      const auto& e = s.envelope[cands[i].index()];
      pooled.insert(pooled.end(), e.begin(), e.end());
    }
    sym[i] = discretize_ef(pooled, cfg.bins).symbols;
    relevance[i] = mutual_information(sym[i], y);
  }

  ChannelRanking r;
  std::vector<bool> picked(m, false);
  std::vector<double> redundancy_sum(m, 0.0);
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t best = m;
    double best_obj = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (picked[i]) continue;
      const double obj = step == 0 ? relevance[i] : relevance[i] - redundancy_sum[i] / static_cast<double>(step);
      if (obj > best_obj) {
        best_obj = obj;
        best = i;
      }
    }
    picked[best] = true;
    r.order.push_back(cands[best]);
    r.objective.push_back(best_obj);
    r.relevance.push_back(relevance[best]);
    for (std::size_t i = 0; i < m; ++i) {
      if (!picked[i]) redundancy_sum[i] += mutual_information(sym[i], sym[best]);
    }
  }

  const double lo = *std::min_element(r.objective.begin(), r.objective.end());
  double sum = 0.0;
  for (double o : r.objective) sum += o - lo;
  for (double o : r.objective) {
    r.score.push_back(sum > 0.0 ? (o - lo) / sum : 1.0 / static_cast<double>(m));
  }
  return r;
}

std::vector<ChannelId> select_channels(const ChannelRanking& r, int k) {
  if (k < 1 || k > static_cast<int>(r.order.size())) {
    throw Error("cannot select " + std::to_string(k) + " channels from a ranking of " +
                std::to_string(r.order.size()));
  }
  return {r.order.begin(), r.order.begin() + k};
}

void write_ranking_csv(const ChannelRanking& r, std::ostream& out) {
  out << "channel,rank,objective,score\n";
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    out << r.order[i].value() << ',' << (i + 1) << ',' << format_real9(r.objective[i]) << ','
        << format_real9(r.score[i]) << '\n';
  }
}

}  // namespace emg

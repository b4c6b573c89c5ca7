#include <doctest.h>

#include <set>
#include <sstream>

#include "emg/error.hpp"
#include "emg/evaluation.hpp"
#include "support.hpp"

using namespace emg;

namespace {

std::vector<Sequence> stub_sequences(int per_task, bool with_step) {
  std::vector<Sequence> out;
  int id = 0;
  for (auto g : {Gesture::WF, Gesture::WE, Gesture::WRD, Gesture::WUD, Gesture::HC}) {
    for (int i = 0; i < per_task; ++i) {
      Sequence s;
      s.id = "s" + std::to_string(id++);
      s.task = g;
      out.push_back(s);
    }
  }
  if (with_step) {
    for (int i = 0; i < per_task; ++i) {
      Sequence s;
      s.id = "s" + std::to_string(id++);
      s.task = Gesture::HC;
      s.protocol = Protocol::Step;
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("folds: sizes, coverage, stratification, determinism") {
    const auto seqs = stub_sequences(10, true);  // 60
    const auto plan = kfold_by_sequence(seqs, 5, 7);
    REQUIRE(plan.held_out.size() == 5);
    std::multiset<std::size_t> seen;
    for (std::size_t f = 0; f < 5; ++f) {
      CHECK(plan.held_out[f].size() == 12);
      // Each (protocol, task) stratum has 10 members, so 2 per fold.
      std::map<std::pair<int, int>, int> strata;
      for (auto i : plan.held_out[f]) {
        ++strata[{static_cast<int>(seqs[i].protocol), static_cast<int>(seqs[i].task)}];
        seen.insert(i);
      }
      for (const auto& [key, count] : strata) CHECK(count == 2);
      const auto tr = plan.training(f, seqs.size());
      CHECK(tr.size() == 48);
      for (auto i : tr) CHECK(std::find(plan.held_out[f].begin(), plan.held_out[f].end(), i) == plan.held_out[f].end());
    }
    CHECK(seen.size() == 60);
    CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 60);

    const auto again = kfold_by_sequence(seqs, 5, 7);
    CHECK(again.held_out == plan.held_out);
    CHECK(again.held_out_ids == plan.held_out_ids);
    const auto other = kfold_by_sequence(seqs, 5, 8);
    CHECK(other.held_out != plan.held_out);
  }

  TEST_CASE("folds: five sequences give one per fold; too few is an error") {
    auto seqs = stub_sequences(1, false);
    const auto plan = kfold_by_sequence(seqs, 5, 0);
    for (const auto& f : plan.held_out) CHECK(f.size() == 1);
    seqs.pop_back();
    CHECK_THROWS_AS(kfold_by_sequence(seqs, 5, 0), Error);
  }

  TEST_CASE("accuracy, confusion, rmse") {
    const std::vector<Gesture> truth{Gesture::Rest, Gesture::WF, Gesture::WF, Gesture::HC};
    const std::vector<Gesture> pred{Gesture::Rest, Gesture::WE, Gesture::WF, Gesture::HC};
    CHECK(accuracy(pred, truth) == 0.75);
    const auto c = confusion_matrix(pred, truth);
    CHECK(c[index_of(Gesture::WF)][index_of(Gesture::WE)] == 1);
    CHECK(c[index_of(Gesture::WF)][index_of(Gesture::WF)] == 1);
    std::size_t total = 0;
    for (const auto& row : c) {
      for (auto v : row) total += v;
    }
    CHECK(total == 4);

    const std::vector<double> a{1.0, 2.0, 3.0}, b{1.0, 2.0, 5.0};
    CHECK(rmse(a, b) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(accuracy(pred, std::vector<Gesture>{Gesture::Rest}), Error);
  }

  TEST_CASE("MdAPE") {
    const std::vector<double> truth{0.2, 0.4, 0.5, 0.01};
    CHECK(*mdape(truth, truth) == 0.0);
    std::vector<double> pred;
    for (double t : truth) pred.push_back(t * 1.1);
    CHECK(*mdape(pred, truth) == doctest::Approx(10.0).epsilon(1e-9));
    // The 0.01 sample is below eps and must be ignored.
    pred[3] = 5.0;
    CHECK(*mdape(pred, truth) == doctest::Approx(10.0).epsilon(1e-9));
    // Median of an even count is the mean of the middle pair.
    const std::vector<double> t2{1.0, 1.0}, p2{1.1, 1.3};
    CHECK(*mdape(p2, t2) == doctest::Approx(20.0).epsilon(1e-9));
    const std::vector<double> quiet{0.0, 0.01, 0.02};
    CHECK_FALSE(mdape(quiet, quiet).has_value());
  }

  TEST_CASE("held-out data cannot leak into a fold model") {
    auto seqs = fixture::small_dataset().sequences;
    const auto plan = kfold_by_sequence(seqs, 5, 2024);
    PipelineConfig cfg;
    const auto base = model_to_json(fit_fold(seqs, plan, 0, cfg, RankTarget::Gesture, 3, Heads::Both));

    auto held = seqs;
    for (auto& f : held[plan.held_out[0][0]].emg) {
      for (double& v : f.values) v *= 5.0;
    }
    for (auto& f : held[plan.held_out[0][0]].force) f.force += 40.0;
    CHECK(model_to_json(fit_fold(held, plan, 0, cfg, RankTarget::Gesture, 3, Heads::Both)) == base);

    auto train = seqs;
    const auto t = plan.training(0, seqs.size()).front();
    for (auto& f : train[t].emg) {
      for (double& v : f.values) v *= 5.0;
    }
    CHECK(model_to_json(fit_fold(train, plan, 0, cfg, RankTarget::Gesture, 3, Heads::Both)) != base);
  }

  TEST_CASE("k = 1 with non-overlapping windows reproduces the training labels") {
    const auto& d = fixture::small_dataset();
    PipelineConfig cfg;
    cfg.models.knn_k = 1;
    cfg.models.min_leaf = 1;
    cfg.features.stride = cfg.features.window_len;
    cfg.selection.channels = 8;
    const auto m = fit_pipeline(d.sequences, cfg);
    for (std::size_t i : {0u, 4u, 5u}) {
      const auto pred = predict_sequence(m, d.sequences[i]);
      REQUIRE_FALSE(pred.empty());
      std::size_t hit = 0;
      for (const auto& p : pred) hit += p.gesture == p.truth_gesture;
      CHECK(hit == pred.size());
    }
  }

  TEST_CASE("sweep report and CSV shape") {
    const auto& d = fixture::small_dataset();
    const auto gr = gesture_subset(d);
    const auto gp = kfold_by_sequence(gr, 5, 1);
    const auto fp = kfold_by_sequence(d.sequences, 5, 1);
    const auto r = channel_sweep(gr, gp, d.sequences, fp, PipelineConfig{}, 0.05, 1, 2);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].channels == 1);
    CHECK(r.rows[1].channels == 2);
    CHECK(r.gr_rankings.size() == 5);
    CHECK(r.fe_rankings.size() == 5);
    for (const auto& row : r.rows) {
      CHECK(row.gr_accuracy >= 0.0);
      CHECK(row.gr_accuracy <= 1.0);
      CHECK(row.fe_rmse >= 0.0);
    }
    std::ostringstream out;
    write_sweep_csv(r, out);
    std::istringstream in(out.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].rfind("channels,gr_accuracy", 0) == 0);
    for (const auto& l : lines) CHECK(std::count(l.begin(), l.end(), ',') == 6);
  }
}

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qent/cascade.hpp"
#include "qent/parallel.hpp"
#include "qent/rng.hpp"
#include "qent/svm.hpp"
#include "qent/types.hpp"

namespace qent {

//============================================================================
// Permutation feature importance
//============================================================================

struct ImportanceRanking {
  RVector scores;          // R_f per flat feature index (1-based offset by 1)
  std::vector<int> order;  // flat indices sorted by descending score
  int n_repeats = 0;
  double baseline = 0.0;   // accuracy S on the untouched evaluation set
};

// How a feature column is randomized. The default permutes the column within
// the evaluation set; Uniform redraws every entry from U[-1, 1].
enum class RandomizeMode { Permute, Uniform };

// Mean accuracy drop over n_repeats randomizations of each feature column.
// Scores may be negative; ranking breaks ties toward the smaller flat index.
inline ImportanceRanking importance_scores(const SvmModel& model, const RMatrix& X_full,
                                           const std::vector<int>& labels, int n_repeats,
                                           std::uint64_t seed,
                                           RandomizeMode mode = RandomizeMode::Permute,
                                           int threads = 1) {
  if (n_repeats < 1) throw std::invalid_argument("importance_scores: n_repeats must be >= 1");
  if (X_full.cols() != kNumFeatures)
    throw std::invalid_argument("importance_scores: need full 63-column features");
  ImportanceRanking out;
  out.n_repeats = n_repeats;
  out.baseline = accuracy_of(model, project_features(X_full, model.active_features), labels);
  out.scores = RVector::Zero(kNumFeatures);

  parallel_for(kNumFeatures, threads, [&](long fi) {
    const int flat = static_cast<int>(fi) + 1;
    RMatrix work = X_full;
    double drop_sum = 0.0;
    for (int rep = 0; rep < n_repeats; ++rep) {
      RngStream rng(seed, make_stream(StreamDomain::Importance,
                                      static_cast<std::uint64_t>(flat) * 1024 + rep));
      if (mode == RandomizeMode::Permute) {
        std::vector<double> col(X_full.rows());
        for (long r = 0; r < X_full.rows(); ++r) col[r] = X_full(r, flat - 1);
        rng.shuffle(col);
        for (long r = 0; r < X_full.rows(); ++r) work(r, flat - 1) = col[r];
      } else {
        for (long r = 0; r < X_full.rows(); ++r) work(r, flat - 1) = rng.uniform(-1.0, 1.0);
      }
      const double acc =
          accuracy_of(model, project_features(work, model.active_features), labels);
      drop_sum += out.baseline - acc;
    }
    out.scores(flat - 1) = drop_sum / n_repeats;
  });

  out.order.resize(kNumFeatures);
  std::iota(out.order.begin(), out.order.end(), 1);
  std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    if (out.scores(a - 1) != out.scores(b - 1)) return out.scores(a - 1) > out.scores(b - 1);
    return a < b;
  });
  return out;
}

//============================================================================
// Prefix-k retraining curves
//============================================================================

struct BinarySplits {
  RMatrix X_train;  // n x 63 full-width rows
  std::vector<int> y_train;
  RMatrix X_test;
  std::vector<int> y_test;
  double C = 1.0;
  double gamma = 1.0;
};

struct PrefixPoint {
  int k = 0;
  int feature = 0;  // flat index added at this rank
  double accuracy = 0.0;
};

// Retrain on the top-k features of `order` for each requested k, with the
// fixed (C, gamma) of the full model, and report test accuracy.
inline std::vector<PrefixPoint> prefix_accuracy_curve(const BinarySplits& data,
                                                      const std::vector<int>& order,
                                                      const std::vector<int>& ks,
                                                      const SmoParams& smo, int threads = 1) {
  if (order.size() != kNumFeatures)
    throw std::invalid_argument("prefix_accuracy_curve: ranking must cover all 63 features");
  std::vector<PrefixPoint> curve(ks.size());
  parallel_for(static_cast<long>(ks.size()), threads, [&](long idx) {
    const int k = ks[idx];
    if (k < 1 || k > kNumFeatures) throw std::invalid_argument("prefix_accuracy_curve: bad k");
    const std::vector<int> active(order.begin(), order.begin() + k);
    KernelSpec spec{KernelKind::RBF, data.gamma, 3, 0.0};
    SvmModel m = train_svm(project_features(data.X_train, active), data.y_train, data.C, spec,
                           smo, active);
    curve[idx] = {k, order[k - 1],
                  accuracy_of(m, project_features(data.X_test, active), data.y_test)};
  });
  return curve;
}

//============================================================================
// Feature Consensus Algorithm
//============================================================================

// One model's ranked features plus the test accuracy of each prefix length;
// the gain of rank r (r >= 2) is accuracy[r-1] - accuracy[r-2].
struct ModelCurve {
  std::vector<int> order;
  std::vector<double> accuracy;
};

struct ConsensusRanking {
  std::vector<int> order;               // permutation of 1..63
  std::vector<std::string> provenance;  // source of each position
  std::vector<int> reserve_trace;       // features pushed to the reserve, in order
};

inline void check_model_curve(const ModelCurve& c, const char* tag) {
  if (c.order.size() != kNumFeatures || c.accuracy.size() != kNumFeatures)
    throw std::invalid_argument(std::string("consensus_ranking: malformed ranking for ") + tag);
  std::vector<bool> seen(kNumFeatures + 1, false);
  for (int f : c.order) {
    if (f < 1 || f > kNumFeatures || seen[f])
      throw std::invalid_argument(std::string("consensus_ranking: ranking for ") + tag +
                                  " is not a permutation of 1..63");
    seen[f] = true;
  }
}

// Merge the three per-model rankings: seed with the three top features
// (order GHZ, W, B), then at each rank keep the max-gain candidate and push
// the other two onto a FIFO reserve; a candidate that was already selected
// is replaced by the first unseen reserve entry.
inline ConsensusRanking consensus_ranking(const ModelCurve& ghz, const ModelCurve& w,
                                          const ModelCurve& b) {
  check_model_curve(ghz, "GHZ");
  check_model_curve(w, "W");
  check_model_curve(b, "B");
  ConsensusRanking out;
  std::vector<bool> seen(kNumFeatures + 1, false);
  auto take = [&](int f, const std::string& tag) {
    if (!seen[f]) {
      seen[f] = true;
      out.order.push_back(f);
      out.provenance.push_back(tag);
    }
  };
  take(ghz.order[0], "GHZ");
  take(w.order[0], "W");
  take(b.order[0], "B");

  std::vector<int> reserve;
  std::size_t head = 0;
  struct Cand {
    int feature;
    double gain;
    int priority;  // 0 = GHZ, 1 = W, 2 = B; breaks exact gain ties
    const char* tag;
  };
  for (int r = 1; r < kNumFeatures; ++r) {
    std::array<Cand, 3> cand{{{ghz.order[r], ghz.accuracy[r] - ghz.accuracy[r - 1], 0, "GHZ"},
                              {w.order[r], w.accuracy[r] - w.accuracy[r - 1], 1, "W"},
                              {b.order[r], b.accuracy[r] - b.accuracy[r - 1], 2, "B"}}};
    std::sort(cand.begin(), cand.end(), [](const Cand& x, const Cand& y) {
      if (x.gain != y.gain) return x.gain > y.gain;
      return x.priority < y.priority;
    });
    reserve.push_back(cand[1].feature);
    reserve.push_back(cand[2].feature);
    out.reserve_trace.push_back(cand[1].feature);
    out.reserve_trace.push_back(cand[2].feature);
    if (!seen[cand[0].feature]) {
      take(cand[0].feature, cand[0].tag);
    } else {
      while (head < reserve.size() && seen[reserve[head]]) ++head;
      if (head < reserve.size()) take(reserve[head++], "reserve");
    }
  }
  // Anything never selected: remaining reserve entries, then flat order.
  for (std::size_t i = head; i < reserve.size(); ++i)
    if (!seen[reserve[i]]) take(reserve[i], "reserve-fill");
  for (int f = 1; f <= kNumFeatures; ++f)
    if (!seen[f]) take(f, "flat-fill");
  return out;
}

//============================================================================
// Cascade prefix curve
//============================================================================

struct CascadePrefixPoint {
  int k = 0;
  double acc_b = 0.0;
  double acc_w = 0.0;
  double acc_ghz = 0.0;
  double acc_cascade = 0.0;
};

// Retrain all three member models on the top-k consensus features, rebuild
// the cascade and score it on the four-class test set. Needs k >= 3.
inline std::vector<CascadePrefixPoint> cascade_prefix_curve(
    const std::vector<int>& consensus_order, const std::vector<int>& ks, const BinarySplits& b,
    const BinarySplits& w, const BinarySplits& ghz, const LabeledDataset& test4,
    const SmoParams& smo, int threads = 1) {
  if (consensus_order.size() != kNumFeatures)
    throw std::invalid_argument("cascade_prefix_curve: consensus must cover all 63 features");
  for (int k : ks)
    if (k < 3 || k > kNumFeatures)
      throw std::invalid_argument("cascade_prefix_curve: k must be in 3..63");
  std::vector<CascadePrefixPoint> curve(ks.size());
  parallel_for(static_cast<long>(ks.size()), threads, [&](long idx) {
    const int k = ks[idx];
    const std::vector<int> active(consensus_order.begin(), consensus_order.begin() + k);
    auto fit = [&](const BinarySplits& d) {
      KernelSpec spec{KernelKind::RBF, d.gamma, 3, 0.0};
      return train_svm(project_features(d.X_train, active), d.y_train, d.C, spec, smo, active);
    };
    CascadeModel cm{fit(ghz), fit(w), fit(b)};
    CascadePrefixPoint p;
    p.k = k;
    p.acc_b = accuracy_of(cm.m_b, project_features(b.X_test, active), b.y_test);
    p.acc_w = accuracy_of(cm.m_w, project_features(w.X_test, active), w.y_test);
    p.acc_ghz = accuracy_of(cm.m_ghz, project_features(ghz.X_test, active), ghz.y_test);
    p.acc_cascade = evaluate_cascade(cm, test4).accuracy;
    curve[idx] = p;
  });
  return curve;
}

}  // namespace qent

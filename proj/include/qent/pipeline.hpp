#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "qent/cascade.hpp"
#include "qent/config.hpp"
#include "qent/featsel.hpp"
#include "qent/io.hpp"
#include "qent/noise.hpp"
#include "qent/oracles.hpp"
#include "qent/parallel.hpp"
#include "qent/rng.hpp"
#include "qent/sampling.hpp"
#include "qent/svm.hpp"

namespace qent {

//============================================================================
// Splits
//============================================================================

struct SplitIndices {
  std::vector<long> train, val, test;
};

// Deterministic shuffle-then-slice split; depends only on (seed, n, fractions).
inline SplitIndices split_dataset(long n, std::uint64_t seed, double f_train = 0.70,
                                  double f_val = 0.15) {
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  RngStream rng(seed, make_stream(StreamDomain::Split, static_cast<std::uint64_t>(n)));
  rng.shuffle(idx);
  const long n_train = static_cast<long>(f_train * n);
  const long n_val = static_cast<long>(f_val * n);
  SplitIndices s;
  s.train.assign(idx.begin(), idx.begin() + n_train);
  s.val.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
  s.test.assign(idx.begin() + n_train + n_val, idx.end());
  return s;
}

inline RMatrix rows_of(const RMatrix& X, const std::vector<long>& idx) {
  RMatrix out(static_cast<long>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<long>(i)) = X.row(idx[i]);
  return out;
}

inline std::vector<int> labels_of(const std::vector<int>& y, const std::vector<long>& idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
  return out;
}

//============================================================================
// Witness model training (tune on a subsample, train on the full split)
//============================================================================

struct WitnessTraining {
  SvmModel model;
  GridCell cell;
  Metrics val_metrics;
  Metrics test_metrics;
  SplitIndices split;
};

inline WitnessTraining train_witness(const LabeledDataset& ds, const ExperimentConfig& cfg) {
  cfg.validate();
  if (ds.kind == DatasetKind::Cascade4)
    throw std::invalid_argument("train_witness: need a binary dataset");
  WitnessTraining out;
  out.split = split_dataset(ds.rows(), cfg.seed, cfg.split_train, cfg.split_val);
  const RMatrix X_train = rows_of(ds.features, out.split.train);
  const std::vector<int> y_train = labels_of(ds.labels, out.split.train);
  const RMatrix X_val = rows_of(ds.features, out.split.val);
  const std::vector<int> y_val = labels_of(ds.labels, out.split.val);
  const RMatrix X_test = rows_of(ds.features, out.split.test);
  const std::vector<int> y_test = labels_of(ds.labels, out.split.test);
  if (y_train.empty() || y_val.empty() || y_test.empty())
    throw std::invalid_argument("train_witness: a split is empty");

  const long tune_n = std::min<long>(cfg.tune_rows, X_train.rows());
  const RMatrix X_tune = X_train.topRows(tune_n);
  const std::vector<int> y_tune(y_train.begin(), y_train.begin() + tune_n);
  out.cell = tune_svm(X_tune, y_tune, X_val, y_val, cfg.grid_c, cfg.grid_gamma, KernelKind::RBF,
                      cfg.smo_params(), cfg.threads);

  std::vector<int> all63(kNumFeatures);
  std::iota(all63.begin(), all63.end(), 1);
  KernelSpec spec{KernelKind::RBF, out.cell.gamma, 3, 0.0};
  out.model = train_svm(X_train, y_train, out.cell.C, spec, cfg.smo_params(), all63);
  out.val_metrics = evaluate(out.model, X_val, y_val);
  out.test_metrics = evaluate(out.model, X_test, y_test);
  out.model.meta.val_accuracy = out.val_metrics.accuracy;
  return out;
}

//============================================================================
// OOD evaluation
//============================================================================

struct OodSummary {
  OodFamily family;
  bool rotated = false;
  std::string model;  // "B", "W", "GHZ"
  long n = 0;
  double accuracy = 0.0;
};

struct OodReport {
  std::string per_sample_csv;  // family,params,model,predicted,expected
  std::vector<OodSummary> summary;
};

// Every family is evaluated both as written and under per-sample local
// rotations; UPB is defined with the rotation, so its "rotated" mode is the
// family itself and "plain" drops the rotation.
inline OodReport run_ood(const SvmModel& m_b, const SvmModel& m_w, const SvmModel& m_ghz,
                         long n_samples, std::uint64_t seed, std::uint64_t config_hash,
                         int threads = 1) {
  OodReport report;
  report.per_sample_csv = artifact_header(config_hash, seed);
  report.per_sample_csv += "family,params,model,predicted,expected\n";
  const OodFamily families[] = {OodFamily::Horodecki, OodFamily::Edge, OodFamily::Upb,
                                OodFamily::XState};
  for (int fi = 0; fi < 4; ++fi) {
    for (int mode = 0; mode < 2; ++mode) {
      const bool rotated = mode == 1;
      const OodFamily family = families[fi];
      std::vector<OodSample> samples(n_samples);
      parallel_for(n_samples, threads, [&](long i) {
        RngStream rng(seed, make_stream(StreamDomain::Ood,
                                        (static_cast<std::uint64_t>(fi * 2 + mode) << 32) |
                                            static_cast<std::uint64_t>(i)));
        samples[i] = ood_sample(family, rng, rotated);
      });
      RMatrix X(n_samples, kNumFeatures);
      for (long i = 0; i < n_samples; ++i)
        X.row(i) = features_of(samples[i].rho).transpose();
      struct ModelRow {
        const SvmModel* model;
        const char* name;
      };
      const ModelRow rows[] = {{&m_b, "B"}, {&m_w, "W"}, {&m_ghz, "GHZ"}};
      for (const auto& mr : rows) {
        const RVector scores =
            decision_values(*mr.model, project_features(X, mr.model->active_features));
        long hits = 0, counted = 0;
        for (long i = 0; i < n_samples; ++i) {
          const int expected = mr.name == std::string("B")   ? samples[i].expect_b
                               : mr.name == std::string("W") ? samples[i].expect_w
                                                             : samples[i].expect_ghz;
          if (expected < 0) continue;
          const int pred = scores(i) > 0.0 ? 1 : 0;
          ++counted;
          if (pred == expected) ++hits;
          report.per_sample_csv += std::string(ood_family_name(family)) + "," +
                                   samples[i].params + (rotated ? ";rot=1" : ";rot=0") + "," +
                                   mr.name + "," + std::to_string(pred) + "," +
                                   std::to_string(expected) + "\n";
        }
        if (counted > 0)
          report.summary.push_back(
              {family, rotated, mr.name, counted, static_cast<double>(hits) / counted});
      }
    }
  }
  return report;
}

inline std::string ood_summary_csv(const OodReport& report, std::uint64_t config_hash,
                                   std::uint64_t seed) {
  std::string out = artifact_header(config_hash, seed);
  out += "family,rotated,model,n,accuracy\n";
  for (const auto& s : report.summary)
    out += std::string(ood_family_name(s.family)) + "," + (s.rotated ? "1" : "0") + "," +
           s.model + "," + std::to_string(s.n) + "," + fmt_double(s.accuracy) + "\n";
  return out;
}

inline double ood_accuracy(const OodReport& report, OodFamily family, const std::string& model,
                           bool rotated) {
  for (const auto& s : report.summary)
    if (s.family == family && s.model == model && s.rotated == rotated) return s.accuracy;
  throw std::runtime_error("ood_accuracy: family/model pair not found");
}

//============================================================================
// Noise sweep CSV
//============================================================================

inline std::string noise_sweep_csv(const std::vector<NoiseSweepRow>& table,
                                   std::uint64_t config_hash, std::uint64_t seed) {
  std::string out = artifact_header(config_hash, seed);
  out += "# depolarizing convention: rho -> (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z)\n";
  out += "kind,strength,accuracy,n_states,seed\n";
  for (const auto& r : table)
    out += std::string(noise_kind_name(r.kind)) + "," + fmt_double(r.strength) + "," +
           fmt_double(r.accuracy) + "," + std::to_string(r.n_states) + "," +
           std::to_string(seed) + "\n";
  return out;
}

//============================================================================
// Feature-selection stage
//============================================================================

struct FeatselModelStage {
  LabeledDataset ds;
  BinarySplits task;     // train/test splits plus tuned (C, gamma)
  SvmModel full_model;   // trained on all 63 features at this stage's scale
  ImportanceRanking ranking;
  std::vector<PrefixPoint> curve;  // prefix curve over the model's own ranking
};

struct FeatselOutputs {
  FeatselModelStage b, w, ghz;
  ConsensusRanking consensus;
  LabeledDataset test4;
  std::vector<CascadePrefixPoint> cascade_curve;    // consensus order, k = 3..63
  std::vector<CascadePrefixPoint> consensus_head;   // k = 1, 2 (no cascade yet)
  double full_cascade_accuracy = 0.0;
};

inline std::vector<int> all_k_values(int lo, int hi) {
  std::vector<int> ks;
  for (int k = lo; k <= hi; ++k) ks.push_back(k);
  return ks;
}

inline FeatselModelStage featsel_stage_for(DatasetKind kind, const ExperimentConfig& cfg) {
  FeatselModelStage st;
  st.ds = build_dataset(kind, cfg.featsel_rows, cfg.seed, cfg.threads);
  const SplitIndices split =
      split_dataset(st.ds.rows(), cfg.seed, cfg.split_train, cfg.split_val);
  st.task.X_train = rows_of(st.ds.features, split.train);
  st.task.y_train = labels_of(st.ds.labels, split.train);
  st.task.X_test = rows_of(st.ds.features, split.test);
  st.task.y_test = labels_of(st.ds.labels, split.test);
  RMatrix X_val = rows_of(st.ds.features, split.val);
  std::vector<int> y_val = labels_of(st.ds.labels, split.val);

  const long tune_n = std::min<long>(cfg.tune_rows, st.task.X_train.rows());
  const RMatrix X_tune = st.task.X_train.topRows(tune_n);
  const std::vector<int> y_tune(st.task.y_train.begin(), st.task.y_train.begin() + tune_n);
  const GridCell cell = tune_svm(X_tune, y_tune, X_val, y_val, cfg.grid_c, cfg.grid_gamma,
                                 KernelKind::RBF, cfg.smo_params(), cfg.threads);
  st.task.C = cell.C;
  st.task.gamma = cell.gamma;

  std::vector<int> all63(kNumFeatures);
  std::iota(all63.begin(), all63.end(), 1);
  KernelSpec spec{KernelKind::RBF, st.task.gamma, 3, 0.0};
  st.full_model = train_svm(st.task.X_train, st.task.y_train, st.task.C, spec, cfg.smo_params(),
                            all63);

  // importance is scored on a validation subsample; 50 repeats average out
  // the permutation noise
  const long eval_n = std::min<long>(cfg.featsel_eval_rows, X_val.rows());
  const RMatrix X_eval = X_val.topRows(eval_n);
  const std::vector<int> y_eval(y_val.begin(), y_val.begin() + eval_n);
  const std::uint64_t rank_seed = cfg.seed ^ (static_cast<std::uint64_t>(kind) + 1);
  st.ranking = importance_scores(st.full_model, X_eval, y_eval, cfg.featsel_repeats, rank_seed,
                                 RandomizeMode::Permute, cfg.threads);
  st.curve = prefix_accuracy_curve(st.task, st.ranking.order, all_k_values(1, kNumFeatures),
                                   cfg.smo_params(), cfg.threads);
  return st;
}

inline ModelCurve to_model_curve(const std::vector<PrefixPoint>& curve) {
  ModelCurve mc;
  for (const auto& p : curve) {
    mc.order.push_back(p.feature);
    mc.accuracy.push_back(p.accuracy);
  }
  return mc;
}

inline FeatselOutputs run_featsel(const ExperimentConfig& cfg) {
  cfg.validate();
  FeatselOutputs out;
  out.b = featsel_stage_for(DatasetKind::B, cfg);
  out.w = featsel_stage_for(DatasetKind::W, cfg);
  out.ghz = featsel_stage_for(DatasetKind::GHZ, cfg);
  out.consensus = consensus_ranking(to_model_curve(out.ghz.curve), to_model_curve(out.w.curve),
                                    to_model_curve(out.b.curve));
  out.test4 = build_cascade4_dataset(cfg.featsel_cascade4_rows, cfg.seed + 1, cfg.threads);
  out.cascade_curve =
      cascade_prefix_curve(out.consensus.order, all_k_values(3, kNumFeatures), out.b.task,
                           out.w.task, out.ghz.task, out.test4, cfg.smo_params(), cfg.threads);
  for (int k : {1, 2}) {
    CascadePrefixPoint p;
    p.k = k;
    const std::vector<int> ks{k};
    p.acc_b = prefix_accuracy_curve(out.b.task, out.consensus.order, ks, cfg.smo_params())[0]
                  .accuracy;
    p.acc_w = prefix_accuracy_curve(out.w.task, out.consensus.order, ks, cfg.smo_params())[0]
                  .accuracy;
    p.acc_ghz = prefix_accuracy_curve(out.ghz.task, out.consensus.order, ks,
                                      cfg.smo_params())[0]
                    .accuracy;
    p.acc_cascade = std::numeric_limits<double>::quiet_NaN();
    out.consensus_head.push_back(p);
  }
  CascadeModel full{out.ghz.full_model, out.w.full_model, out.b.full_model};
  out.full_cascade_accuracy = evaluate_cascade(full, out.test4).accuracy;
  return out;
}

// Table-2 shaped ablation CSV: rows follow the consensus order; the cascade
// column is empty until k = 3.
inline std::string ablation_csv(const FeatselOutputs& fs, std::uint64_t config_hash,
                                std::uint64_t seed) {
  std::string out = artifact_header(config_hash, seed);
  out += "feature_name,acc_B,acc_W,acc_GHZ,acc_cascade\n";
  auto emit = [&](const CascadePrefixPoint& p) {
    out += PauliIndex::from_flat(fs.consensus.order[p.k - 1]).name() + "," + fmt_double(p.acc_b) +
           "," + fmt_double(p.acc_w) + "," + fmt_double(p.acc_ghz) + ",";
    if (!std::isnan(p.acc_cascade)) out += fmt_double(p.acc_cascade);
    out += "\n";
  };
  for (const auto& p : fs.consensus_head) emit(p);
  for (const auto& p : fs.cascade_curve) emit(p);
  return out;
}

// Fig. 8 CSV: per rank, the three models' candidate features and gains.
inline std::string consensus_gains_csv(const ModelCurve& ghz, const ModelCurve& w,
                                       const ModelCurve& b, std::uint64_t config_hash,
                                       std::uint64_t seed) {
  std::string out = artifact_header(config_hash, seed);
  out += "rank,model,feature,gain\n";
  auto emit = [&](const ModelCurve& c, const char* name) {
    for (int r = 1; r < kNumFeatures; ++r)
      out += std::to_string(r + 1) + "," + name + "," +
             PauliIndex::from_flat(c.order[r]).name() + "," +
             fmt_double(c.accuracy[r] - c.accuracy[r - 1]) + "\n";
  };
  emit(ghz, "GHZ");
  emit(w, "W");
  emit(b, "B");
  return out;
}

}  // namespace qent

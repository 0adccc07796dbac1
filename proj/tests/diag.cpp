// scratch diagnostics; not part of the test suite
#include <cstdio>

#include "qent/oracles.hpp"
#include "qent/pipeline.hpp"
#include "qent/rng.hpp"
#include "qent/sampling.hpp"

using namespace qent;

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "bisep";

  if (mode == "bisep") {
    RngStream rng(123, 0);
    int npt_any = 0, witness_w_neg = 0;
    double min_eig_sum = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      const DensityMatrix rho = biseparable_state(rng);
      double worst = 1.0;
      for (Subsystem s : {Subsystem::A, Subsystem::B, Subsystem::C})
        worst = std::min(worst, ppt_check(rho, s).min_eig);
      if (worst < -1e-9) npt_any++;
      min_eig_sum += worst;
      if (witness_value(rho, Witness::W) < 0) witness_w_neg++;
    }
    std::printf("biseparable: NPT-on-some-cut fraction = %.3f, mean worst PT eig = %.4f\n",
                double(npt_any) / n, min_eig_sum / n);

    int sep_purity_hi = 0;
    double sep_purity_sum = 0;
    for (int i = 0; i < n; ++i) {
      const DensityMatrix rho = separable_state(rng);
      const double p = purity(rho);
      sep_purity_sum += p;
      if (p > 0.5) sep_purity_hi++;
    }
    std::printf("separable: mean purity = %.4f, frac purity>0.5 = %.3f\n", sep_purity_sum / n,
                double(sep_purity_hi) / n);

    double bis_purity_sum = 0;
    RngStream rng2(321, 0);
    for (int i = 0; i < n; ++i) bis_purity_sum += purity(biseparable_state(rng2));
    std::printf("biseparable: mean purity = %.4f\n", bis_purity_sum / n);
  } else if (mode == "ghzdiag") {
    // per-subtype accuracy of a trained GHZ model
    const SvmModel m = load_model(argv[2]);
    RngStream rng(999, 0);
    auto acc_on = [&](const char* name, auto gen, int expect) {
      const int n = 500;
      long hit = 0;
      for (int i = 0; i < n; ++i) {
        const DensityMatrix rho = gen();
        const RVector f = features_of(rho);
        const int pred = predict(m, project_features(f, m.active_features));
        if (pred == expect) ++hit;
      }
      std::printf("%-34s expect=%d acc=%.3f\n", name, expect, double(hit) / n);
      std::fflush(stdout);
    };
    const DensityMatrix ghz = DensityMatrix::validated(projector(ghz_ket()));
    const DensityMatrix w = DensityMatrix::validated(projector(w_ket()));
    acc_on("rotated pure GHZ", [&] { return rotated_class_state(ghz, rng); }, 1);
    acc_on("ghz_w eps in [0, 0.35) rot", [&] { return ghz_w_mixture(rng.uniform(0.0, 0.35), &rng).first; }, 1);
    acc_on("ghz_w eps in [0.35, 0.6) rot", [&] { return ghz_w_mixture(rng.uniform(0.35, 0.6), &rng).first; }, 1);
    acc_on("ghz_w eps in [0.6, 0.708) rot", [&] { return ghz_w_mixture(rng.uniform(0.6, 0.708), &rng).first; }, 1);
    acc_on("ghz_w eps in [0.708, 0.8] rot", [&] { return ghz_w_mixture(rng.uniform(0.708, 0.8), &rng).first; }, 0);
    acc_on("ghz_w eps in [0.8, 1.0] rot", [&] { return ghz_w_mixture(rng.uniform(0.8, 1.0), &rng).first; }, 0);
    acc_on("rotated pure W", [&] { return rotated_class_state(w, rng); }, 0);
    acc_on("class_w member", [&] { return class_w_member(rng); }, 0);
    acc_on("classB", [&] { return classB_state(rng); }, 0);
    acc_on("werner_w alpha>3/7 rot", [&] {
      return werner_w_state(3.0 / 7.0 + (1.0 - 3.0 / 7.0) * rng.uniform(), &rng).first;
    }, 0);
    acc_on("noisy_gen_ghz GME", [&] { return noisy_generalized_ghz(rng, true); }, 1);
    acc_on("noisy_gen_ghz C=0", [&] { return noisy_generalized_ghz(rng, false); }, 0);
    acc_on("werner_ghz p>5/7 rot", [&] {
      return werner_ghz_state(5.0 / 7.0 + (1 - 5.0 / 7.0) * (1 - rng.uniform()), &rng);
    }, 1);
  } else if (mode == "xdiag") {
    // X-state error anatomy for a trained GHZ model
    const SvmModel m = load_model(argv[2]);
    RngStream rng(555, 0);
    long n_gme = 0, gme_wrong = 0, n_non = 0, non_wrong = 0;
    std::map<int, std::pair<long, long>> by_bin;  // C_GME decile -> (count, wrong)
    for (int i = 0; i < 4000; ++i) {
      const XState x = random_x_state(rng);
      const int pred = predict(m, project_features(features_of(x.rho), m.active_features));
      const int bin = x.gme_label == 0 ? -1 : std::min(9, int(x.gme_concurrence * 10));
      by_bin[bin].first++;
      if (pred != x.gme_label) by_bin[bin].second++;
      if (x.gme_label == 1) {
        n_gme++;
        gme_wrong += pred != 1;
      } else {
        n_non++;
        non_wrong += pred != 0;
      }
    }
    std::printf("GME states:     n=%ld wrong=%ld (%.3f)\n", n_gme, gme_wrong,
                double(gme_wrong) / n_gme);
    std::printf("non-GME states: n=%ld wrong=%ld (%.3f)\n", n_non, non_wrong,
                double(non_wrong) / n_non);
    for (const auto& [bin, cw] : by_bin)
      std::printf("  bin %2d: n=%5ld wrong=%.3f\n", bin, cw.first,
                  double(cw.second) / cw.first);
  } else if (mode == "xdec") {
    // decision-value distribution on X-states, split by true GME label
    const SvmModel m = load_model(argv[2]);
    RngStream rng(555, 0);
    std::vector<double> dec_gme, dec_non;
    for (int i = 0; i < 4000; ++i) {
      const XState x = random_x_state(rng);
      const double d =
          decision_value(m, project_features(features_of(x.rho), m.active_features));
      (x.gme_label == 1 ? dec_gme : dec_non).push_back(d);
    }
    auto report = [](const char* name, std::vector<double>& v) {
      std::sort(v.begin(), v.end());
      std::printf("%s n=%zu min=%.3f p10=%.3f median=%.3f p90=%.3f max=%.3f\n", name, v.size(),
                  v.front(), v[v.size() / 10], v[v.size() / 2], v[9 * v.size() / 10], v.back());
    };
    report("GME    ", dec_gme);
    report("non-GME", dec_non);
    // best achievable accuracy over all thresholds
    double best = 0;
    for (double thr = -2.0; thr <= 2.0; thr += 0.005) {
      long ok = 0;
      for (double d : dec_gme) ok += d > thr;
      for (double d : dec_non) ok += d <= thr;
      best = std::max(best, double(ok) / (dec_gme.size() + dec_non.size()));
    }
    std::printf("best threshold accuracy=%.4f\n", best);
  } else if (mode == "horo") {
    // M_W false-fire pattern across the Horodecki parameter range
    const SvmModel m = load_model(argv[2]);
    RngStream rng(777, 0);
    for (int decile = 0; decile < 9; ++decile) {
      const double lo = 0.05 + decile * 0.1;
      long wrong = 0;
      const int n = 400;
      for (int i = 0; i < n; ++i) {
        const DensityMatrix rho = horodecki_state(rng.uniform(lo, std::min(0.95, lo + 0.1)));
        wrong += predict(m, project_features(features_of(rho), m.active_features)) != 0;
      }
      std::printf("a in [%.2f,%.2f): fire rate=%.3f\n", lo, lo + 0.1, double(wrong) / n);
    }
  } else if (mode == "oodgrid") {
    // val accuracy vs OOD behavior across kernel widths
    const LabeledDataset ds = load_dataset(argv[2], dataset_kind_from_name(argv[3]));
    const std::string kind = argv[3];
    const SplitIndices split = split_dataset(ds.rows(), 42, 0.70, 0.15);
    const RMatrix X_train = rows_of(ds.features, split.train);
    const std::vector<int> y_train = labels_of(ds.labels, split.train);
    const RMatrix X_val = rows_of(ds.features, split.val);
    const std::vector<int> y_val = labels_of(ds.labels, split.val);
    for (double gamma : {1.0 / 63.0, 0.05, 0.1}) {
      for (double C : {1.0, 10.0, 100.0}) {
        SmoParams p;
        p.cache_bytes = std::size_t(768) << 20;
        SvmModel m =
            train_svm(X_train, y_train, C, KernelSpec{KernelKind::RBF, gamma, 3, 0.0}, p);
        std::vector<int> all63(kNumFeatures);
        std::iota(all63.begin(), all63.end(), 1);
        m.active_features = all63;
        const double val = accuracy_of(m, X_val, y_val);
        double ood_err = 0;
        RngStream rng(555, 0);
        if (kind == "GHZ") {
          long n_gme = 0, wrong = 0;
          for (int i = 0; i < 3000; ++i) {
            const XState x = random_x_state(rng);
            const int pred = predict(m, project_features(features_of(x.rho), m.active_features));
            if (x.gme_label == 1) {
              n_gme++;
              wrong += pred != 1;
            } else {
              wrong += pred != 0;
            }
          }
          ood_err = double(wrong) / 3000;
          std::printf("gamma=%-8g C=%-5g val=%.4f x_err=%.4f (gme n=%ld) sv=%ld\n", gamma, C,
                      val, ood_err, n_gme, long(m.signed_duals.size()));
        } else {
          long wrong = 0;
          for (int i = 0; i < 2000; ++i) {
            const DensityMatrix rho = horodecki_state(rng.uniform(0.05, 0.95));
            wrong += predict(m, project_features(features_of(rho), m.active_features)) != 0;
          }
          ood_err = double(wrong) / 2000;
          std::printf("gamma=%-8g C=%-5g val=%.4f horo_fire=%.4f sv=%ld\n", gamma, C, val,
                      ood_err, long(m.signed_duals.size()));
        }
        std::fflush(stdout);
      }
    }
  } else if (mode == "grid") {
    // wider hyperparameter probe on an existing dataset
    const LabeledDataset ds = load_dataset(argv[2], dataset_kind_from_name(argv[3]));
    ExperimentConfig cfg;
    cfg.threads = 2;
    const SplitIndices split = split_dataset(ds.rows(), 42, 0.70, 0.15);
    const RMatrix X_train = rows_of(ds.features, split.train);
    const std::vector<int> y_train = labels_of(ds.labels, split.train);
    const RMatrix X_val = rows_of(ds.features, split.val);
    const std::vector<int> y_val = labels_of(ds.labels, split.val);
    const long tune_n = std::min<long>(6000, X_train.rows());
    const RMatrix X_tune = X_train.topRows(tune_n);
    const std::vector<int> y_tune(y_train.begin(), y_train.begin() + tune_n);
    for (double C : {10.0, 100.0, 1000.0}) {
      for (double gamma : {0.3, 1.0, 3.0, 10.0, 30.0}) {
        SmoParams p;
        p.cache_bytes = std::size_t(512) << 20;
        const SvmModel m = train_svm(X_tune, y_tune, C, KernelSpec{KernelKind::RBF, gamma, 3, 0.0}, p);
        std::printf("C=%-7g gamma=%-5g val_acc=%.4f sv=%ld iters=%ld\n", C, gamma,
                    accuracy_of(m, X_val, y_val), long(m.signed_duals.size()),
                    m.meta.iterations);
        std::fflush(stdout);
      }
    }
  }
  return 0;
}

// qent: generate three-qubit entanglement datasets, train the witness SVMs,
// compose the cascade, and run the OOD / noise / feature-selection studies.
// Every artifact is a CSV or JSON file that regenerates bit-identically from
// (config, seed).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qent/cascade.hpp"
#include "qent/config.hpp"
#include "qent/featsel.hpp"
#include "qent/io.hpp"
#include "qent/noise.hpp"
#include "qent/oracles.hpp"
#include "qent/pipeline.hpp"
#include "qent/sampling.hpp"
#include "qent/svm.hpp"

namespace fs = std::filesystem;
using namespace qent;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out = "out";
  bool seed_set = false;
  std::uint64_t seed = 42;
  int threads = 0;
};

ExperimentConfig effective_config(const GlobalOpts& g) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  if (g.seed_set) cfg.seed = g.seed;
  if (g.threads > 0) cfg.threads = g.threads;
  cfg.validate();
  return cfg;
}

void ensure_dir(const std::string& path) {
  if (!path.empty()) fs::create_directories(path);
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

SvmModel load_model_checked(const std::string& path, const char* expect_kind) {
  std::string kind;
  SvmModel m = load_model(path, &kind);
  if (!kind.empty() && kind != expect_kind)
    std::fprintf(stderr, "note: %s declares kind %s, used as %s\n", path.c_str(), kind.c_str(),
                 expect_kind);
  return m;
}

BinarySplits make_task(const LabeledDataset& ds, const ExperimentConfig& cfg, double C,
                       double gamma) {
  const SplitIndices split = split_dataset(ds.rows(), cfg.seed, cfg.split_train, cfg.split_val);
  BinarySplits t;
  t.X_train = rows_of(ds.features, split.train);
  t.y_train = labels_of(ds.labels, split.train);
  t.X_test = rows_of(ds.features, split.test);
  t.y_test = labels_of(ds.labels, split.test);
  t.C = C;
  t.gamma = gamma;
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-qubit entanglement classification pipeline"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "flat key=value config file");
  app.add_option("--out", g.out, "output file or directory (per subcommand)");
  auto* seed_opt = app.add_option("--seed", g.seed, "root seed for all RNG streams");
  app.add_option("--threads", g.threads, "worker threads (default: hardware)");

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a labeled dataset CSV");
  gen->fallthrough();
  std::string gen_kind;
  long gen_n = 1000;
  gen->add_option("--kind", gen_kind, "B, W, GHZ or CASCADE4")
      ->required()
      ->check(CLI::IsMember({"B", "W", "GHZ", "CASCADE4"}));
  gen->add_option("--n", gen_n, "number of rows")->required()->check(CLI::PositiveNumber);

  // ---- train --------------------------------------------------------------
  auto* train = app.add_subcommand("train", "tune and train one witness model");
  train->fallthrough();
  std::string train_kind, train_data;
  train->add_option("--kind", train_kind, "B, W or GHZ")
      ->required()
      ->check(CLI::IsMember({"B", "W", "GHZ"}));
  train->add_option("--data", train_data, "dataset CSV from gen")->required();

  // ---- eval ---------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a dataset");
  eval_cmd->fallthrough();
  std::string eval_model, eval_data, eval_kind;
  eval_cmd->add_option("--model", eval_model, "model JSON")->required();
  eval_cmd->add_option("--data", eval_data, "binary dataset CSV")->required();
  eval_cmd->add_option("--kind", eval_kind, "dataset kind (B, W or GHZ)")
      ->required()
      ->check(CLI::IsMember({"B", "W", "GHZ"}));

  // ---- cascade-eval -------------------------------------------------------
  auto* casc = app.add_subcommand("cascade-eval", "evaluate the 4-class cascade");
  casc->fallthrough();
  std::string c_ghz, c_w, c_b, c_bundle, c_data, c_bundle_out;
  casc->add_option("--ghz", c_ghz, "GHZ model JSON");
  casc->add_option("--w", c_w, "W model JSON");
  casc->add_option("--b", c_b, "B model JSON");
  casc->add_option("--bundle", c_bundle, "cascade bundle JSON (alternative to --ghz/--w/--b)");
  casc->add_option("--data", c_data, "CASCADE4 dataset CSV")->required();
  casc->add_option("--bundle-out", c_bundle_out, "write the cascade bundle JSON here");

  // ---- ood ----------------------------------------------------------------
  auto* ood = app.add_subcommand("ood", "score the witness models on the OOD families");
  ood->fallthrough();
  std::string o_ghz, o_w, o_b;
  long o_n = 2000;
  ood->add_option("--ghz", o_ghz)->required();
  ood->add_option("--w", o_w)->required();
  ood->add_option("--b", o_b)->required();
  ood->add_option("--n", o_n, "samples per family")->check(CLI::PositiveNumber);

  // ---- noise --------------------------------------------------------------
  auto* noise = app.add_subcommand("noise", "noise-channel robustness sweep");
  noise->fallthrough();
  std::string n_bundle, n_data;
  std::vector<double> n_strengths;
  std::vector<std::string> n_kinds;
  noise->add_option("--bundle", n_bundle, "cascade bundle JSON")->required();
  noise->add_option("--data", n_data, "CASCADE4 dataset CSV")->required();
  noise->add_option("--strengths", n_strengths, "noise strengths (default: config grid)");
  noise->add_option("--kinds", n_kinds, "channels to sweep")
      ->check(CLI::IsMember({"amplitude_damping", "phase_damping", "depolarizing"}));

  // ---- rank ---------------------------------------------------------------
  auto* rank = app.add_subcommand("rank", "permutation importance + prefix curve");
  rank->fallthrough();
  std::string r_model, r_data, r_kind;
  bool r_uniform = false;
  rank->add_option("--model", r_model, "model JSON")->required();
  rank->add_option("--data", r_data, "dataset CSV")->required();
  rank->add_option("--kind", r_kind, "B, W or GHZ")
      ->required()
      ->check(CLI::IsMember({"B", "W", "GHZ"}));
  rank->add_flag("--uniform", r_uniform, "randomize with U[-1,1] instead of permuting");

  // ---- consensus ----------------------------------------------------------
  auto* cons = app.add_subcommand("consensus", "merge the per-model prefix curves");
  cons->fallthrough();
  std::string cs_b, cs_w, cs_ghz;
  cons->add_option("--curve-b", cs_b, "prefix curve CSV of M_B")->required();
  cons->add_option("--curve-w", cs_w, "prefix curve CSV of M_W")->required();
  cons->add_option("--curve-ghz", cs_ghz, "prefix curve CSV of M_GHZ")->required();

  // ---- ablation -----------------------------------------------------------
  auto* abl = app.add_subcommand("ablation", "retrain on consensus prefixes (Table-2 CSV)");
  abl->fallthrough();
  std::string a_consensus, a_db, a_dw, a_dghz, a_d4, a_mb, a_mw, a_mghz;
  abl->add_option("--consensus", a_consensus, "consensus JSON")->required();
  abl->add_option("--data-b", a_db)->required();
  abl->add_option("--data-w", a_dw)->required();
  abl->add_option("--data-ghz", a_dghz)->required();
  abl->add_option("--data4", a_d4, "CASCADE4 dataset CSV")->required();
  abl->add_option("--model-b", a_mb, "model JSON providing (C, gamma)")->required();
  abl->add_option("--model-w", a_mw)->required();
  abl->add_option("--model-ghz", a_mghz)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    g.seed_set = seed_opt->count() > 0;
    const ExperimentConfig cfg = effective_config(g);
    const std::uint64_t h = cfg.hash();

    if (*gen) {
      const DatasetKind kind = dataset_kind_from_name(gen_kind);
      if (gen_n < (kind == DatasetKind::Cascade4 ? 4 : 2))
        throw std::invalid_argument("gen: --n too small for the kind");
      const LabeledDataset ds = build_dataset(kind, gen_n, cfg.seed, cfg.threads);
      ensure_dir(fs::path(g.out).parent_path().string());
      save_dataset(ds, g.out, h);
      std::printf("wrote %s (%ld rows)\n", g.out.c_str(), ds.rows());
    } else if (*train) {
      const DatasetKind kind = dataset_kind_from_name(train_kind);
      const LabeledDataset ds = load_dataset(train_data, kind);
      const WitnessTraining t = train_witness(ds, cfg);
      ensure_dir(g.out);
      const std::string model_path = join(g.out, "model_" + train_kind + ".json");
      save_model(t.model, train_kind, model_path);
      write_text_file(join(g.out, "metrics_" + train_kind + ".csv"),
                      metrics_to_csv({{"val", t.val_metrics}, {"test", t.test_metrics}}, h,
                                     cfg.seed));
      std::printf("kind=%s C=%g gamma=%g val_acc=%.4f test_acc=%.4f test_auc=%.4f sv=%ld\n",
                  train_kind.c_str(), t.cell.C, t.cell.gamma, t.val_metrics.accuracy,
                  t.test_metrics.accuracy, t.test_metrics.auc,
                  static_cast<long>(t.model.signed_duals.size()));
    } else if (*eval_cmd) {
      const LabeledDataset ds = load_dataset(eval_data, dataset_kind_from_name(eval_kind));
      const SvmModel m = load_model(eval_model);
      const Metrics metrics =
          evaluate(m, project_features(ds.features, m.active_features), ds.labels);
      ensure_dir(fs::path(g.out).parent_path().string());
      write_text_file(g.out, metrics_to_csv({{"eval", metrics}}, h, cfg.seed));
      std::printf("accuracy=%.4f auc=%.4f n=%ld\n", metrics.accuracy, metrics.auc, ds.rows());
    } else if (*casc) {
      CascadeModel cm;
      if (!c_bundle.empty()) {
        cm = load_cascade(c_bundle);
      } else {
        if (c_ghz.empty() || c_w.empty() || c_b.empty())
          throw CLI::ValidationError("cascade-eval",
                                     "need --bundle or all of --ghz/--w/--b");
        cm.m_ghz = load_model_checked(c_ghz, "GHZ");
        cm.m_w = load_model_checked(c_w, "W");
        cm.m_b = load_model_checked(c_b, "B");
      }
      const LabeledDataset ds = load_dataset(c_data, DatasetKind::Cascade4);
      const CascadeMetrics m = evaluate_cascade(cm, ds);
      ensure_dir(fs::path(g.out).parent_path().string());
      write_text_file(g.out, cascade_metrics_to_csv(m, h, cfg.seed));
      if (!c_bundle_out.empty()) save_cascade(cm, c_bundle_out);
      std::printf("cascade accuracy=%.4f n=%ld\n", m.accuracy, ds.rows());
    } else if (*ood) {
      const SvmModel mb = load_model_checked(o_b, "B");
      const SvmModel mw = load_model_checked(o_w, "W");
      const SvmModel mghz = load_model_checked(o_ghz, "GHZ");
      const OodReport report = run_ood(mb, mw, mghz, o_n, cfg.seed, h, cfg.threads);
      ensure_dir(g.out);
      write_text_file(join(g.out, "ood_report.csv"), report.per_sample_csv);
      write_text_file(join(g.out, "ood_summary.csv"), ood_summary_csv(report, h, cfg.seed));
      for (const auto& s : report.summary)
        std::printf("%-10s rot=%d model=%-3s n=%ld acc=%.4f\n", ood_family_name(s.family),
                    s.rotated ? 1 : 0, s.model.c_str(), s.n, s.accuracy);
    } else if (*noise) {
      const CascadeModel cm = load_cascade(n_bundle);
      const LabeledDataset ds = load_dataset(n_data, DatasetKind::Cascade4);
      std::vector<double> strengths = n_strengths.empty() ? cfg.noise_strengths : n_strengths;
      if (strengths.empty()) throw CLI::ValidationError("noise", "empty strength grid");
      std::vector<NoiseKind> kinds;
      if (n_kinds.empty())
        kinds = {NoiseKind::AmplitudeDamping, NoiseKind::PhaseDamping, NoiseKind::Depolarizing};
      else
        for (const auto& k : n_kinds) kinds.push_back(noise_kind_from_name(k));
      const auto table = noise_sweep(cm, ds, kinds, strengths, cfg.threads);
      ensure_dir(fs::path(g.out).parent_path().string());
      write_text_file(g.out, noise_sweep_csv(table, h, cfg.seed));
      for (const auto& r : table)
        std::printf("%-18s strength=%.3f accuracy=%.4f\n", noise_kind_name(r.kind), r.strength,
                    r.accuracy);
    } else if (*rank) {
      const LabeledDataset ds = load_dataset(r_data, dataset_kind_from_name(r_kind));
      const SvmModel m = load_model(r_model);
      const SplitIndices split =
          split_dataset(ds.rows(), cfg.seed, cfg.split_train, cfg.split_val);
      RMatrix X_val = rows_of(ds.features, split.val);
      std::vector<int> y_val = labels_of(ds.labels, split.val);
      const long eval_n = std::min<long>(cfg.featsel_eval_rows, X_val.rows());
      const RMatrix X_eval = X_val.topRows(eval_n);
      const std::vector<int> y_eval(y_val.begin(), y_val.begin() + eval_n);
      const std::uint64_t rank_seed =
          cfg.seed ^ (static_cast<std::uint64_t>(dataset_kind_from_name(r_kind)) + 1);
      const ImportanceRanking ranking = importance_scores(
          m, X_eval, y_eval, cfg.featsel_repeats, rank_seed,
          r_uniform ? RandomizeMode::Uniform : RandomizeMode::Permute, cfg.threads);

      BinarySplits task = make_task(ds, cfg, m.C, m.kernel.gamma);
      const auto curve = prefix_accuracy_curve(task, ranking.order,
                                               all_k_values(1, kNumFeatures), cfg.smo_params(),
                                               cfg.threads);
      ensure_dir(g.out);
      write_text_file(join(g.out, "ranking_" + r_kind + ".json"),
                      ranking_to_json(ranking, rank_seed).dump(2) + "\n");
      write_text_file(join(g.out, "prefix_curve_" + r_kind + ".csv"),
                      prefix_curve_to_csv(curve, h, cfg.seed));
      std::printf("kind=%s baseline=%.4f top5=", r_kind.c_str(), ranking.baseline);
      for (int i = 0; i < 5; ++i)
        std::printf("%s%s", PauliIndex::from_flat(ranking.order[i]).name().c_str(),
                    i < 4 ? "," : "\n");
    } else if (*cons) {
      const ModelCurve curve_b = to_model_curve(prefix_curve_from_csv(read_text_file(cs_b)));
      const ModelCurve curve_w = to_model_curve(prefix_curve_from_csv(read_text_file(cs_w)));
      const ModelCurve curve_ghz = to_model_curve(prefix_curve_from_csv(read_text_file(cs_ghz)));
      const ConsensusRanking cr = consensus_ranking(curve_ghz, curve_w, curve_b);
      ensure_dir(g.out);
      write_text_file(join(g.out, "consensus.json"), consensus_to_json(cr).dump(2) + "\n");
      write_text_file(join(g.out, "consensus_gains.csv"),
                      consensus_gains_csv(curve_ghz, curve_w, curve_b, h, cfg.seed));
      std::printf("consensus head: ");
      for (int i = 0; i < 6; ++i)
        std::printf("%s%s", PauliIndex::from_flat(cr.order[i]).name().c_str(),
                    i < 5 ? "," : "\n");
    } else if (*abl) {
      const ConsensusRanking cr =
          consensus_from_json(json::parse(read_text_file(a_consensus)));
      const SvmModel mb = load_model(a_mb);
      const SvmModel mw = load_model(a_mw);
      const SvmModel mghz = load_model(a_mghz);
      const LabeledDataset db = load_dataset(a_db, DatasetKind::B);
      const LabeledDataset dw = load_dataset(a_dw, DatasetKind::W);
      const LabeledDataset dghz = load_dataset(a_dghz, DatasetKind::GHZ);
      const LabeledDataset d4 = load_dataset(a_d4, DatasetKind::Cascade4);
      BinarySplits tb = make_task(db, cfg, mb.C, mb.kernel.gamma);
      BinarySplits tw = make_task(dw, cfg, mw.C, mw.kernel.gamma);
      BinarySplits tghz = make_task(dghz, cfg, mghz.C, mghz.kernel.gamma);

      FeatselOutputs fs_out;
      fs_out.consensus = cr;
      fs_out.cascade_curve = cascade_prefix_curve(cr.order, all_k_values(3, kNumFeatures), tb,
                                                  tw, tghz, d4, cfg.smo_params(), cfg.threads);
      for (int k : {1, 2}) {
        CascadePrefixPoint p;
        p.k = k;
        const std::vector<int> ks{k};
        p.acc_b = prefix_accuracy_curve(tb, cr.order, ks, cfg.smo_params())[0].accuracy;
        p.acc_w = prefix_accuracy_curve(tw, cr.order, ks, cfg.smo_params())[0].accuracy;
        p.acc_ghz = prefix_accuracy_curve(tghz, cr.order, ks, cfg.smo_params())[0].accuracy;
        p.acc_cascade = std::numeric_limits<double>::quiet_NaN();
        fs_out.consensus_head.push_back(p);
      }
      ensure_dir(fs::path(g.out).parent_path().string());
      write_text_file(g.out, ablation_csv(fs_out, h, cfg.seed));
      std::printf("ablation rows=%zu -> %s\n",
                  fs_out.cascade_curve.size() + fs_out.consensus_head.size(), g.out.c_str());
    }
    return 0;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qent/cascade.hpp"
#include "qent/featsel.hpp"
#include "qent/qcore.hpp"
#include "qent/sampling.hpp"
#include "qent/svm.hpp"
#include "qent/types.hpp"

namespace qent {

using json = nlohmann::json;

inline constexpr int kModelFormatVersion = 1;

// 17 significant digits: doubles round-trip exactly through text.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a, used to stamp artifacts with a config fingerprint.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string artifact_header(std::uint64_t config_hash, std::uint64_t seed) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "# config=%016llx seed=%llu\n",
                static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(seed));
  return buf;
}

//============================================================================
// Dataset CSV + metadata sidecar
//============================================================================

inline std::string dataset_csv_header() {
  std::string h;
  for (const auto& name : feature_names()) {
    h += name;
    h += ',';
  }
  h += "label\n";
  return h;
}

inline std::string dataset_to_csv(const LabeledDataset& ds, std::uint64_t config_hash) {
  std::string out = artifact_header(config_hash, ds.meta.seed);
  out += dataset_csv_header();
  for (long i = 0; i < ds.rows(); ++i) {
    for (int j = 0; j < kNumFeatures; ++j) {
      out += fmt_double(ds.features(i, j));
      out += ',';
    }
    out += std::to_string(ds.labels[i]);
    out += '\n';
  }
  return out;
}

inline json dataset_meta_json(const LabeledDataset& ds) {
  json counts = json::object();
  for (const auto& [label, count] : ds.meta.class_counts) counts[std::to_string(label)] = count;
  return json{{"kind", dataset_kind_name(ds.kind)},
              {"seed", ds.meta.seed},
              {"counts", counts},
              {"generator_version", ds.meta.generator_version}};
}

inline void save_dataset(const LabeledDataset& ds, const std::string& csv_path,
                         std::uint64_t config_hash) {
  write_text_file(csv_path, dataset_to_csv(ds, config_hash));
  std::filesystem::path meta = csv_path;
  meta.replace_extension(".meta.json");
  write_text_file(meta.string(), dataset_meta_json(ds).dump(2) + "\n");
}

inline LabeledDataset load_dataset(const std::string& csv_path, DatasetKind kind) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open dataset: " + csv_path);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // column names; verify the shape, order is fixed
      header_seen = true;
      long commas = std::count(line.begin(), line.end(), ',');
      if (commas != kNumFeatures)
        throw std::runtime_error("dataset schema mismatch (expected 63 features + label): " +
                                 csv_path);
      continue;
    }
    std::vector<double> vals;
    vals.reserve(kNumFeatures + 1);
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != kNumFeatures + 1)
      throw std::runtime_error("dataset row has wrong arity: " + csv_path);
    labels.push_back(static_cast<int>(vals.back()));
    vals.pop_back();
    rows.push_back(std::move(vals));
  }
  LabeledDataset ds;
  ds.kind = kind;
  ds.features.resize(static_cast<long>(rows.size()), kNumFeatures);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < kNumFeatures; ++j) ds.features(static_cast<long>(i), j) = rows[i][j];
  ds.labels = std::move(labels);
  for (int l : ds.labels) ds.meta.class_counts[l]++;
  const int max_label = kind == DatasetKind::Cascade4 ? 3 : 1;
  for (int l : ds.labels)
    if (l < 0 || l > max_label)
      throw std::runtime_error("dataset label out of range for kind: " + csv_path);
  // restore seed from the sidecar when present
  std::filesystem::path meta = csv_path;
  meta.replace_extension(".meta.json");
  if (std::filesystem::exists(meta)) {
    const json j = json::parse(read_text_file(meta.string()));
    if (j.contains("seed")) ds.meta.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("generator_version"))
      ds.meta.generator_version = j["generator_version"].get<std::string>();
    if (j.contains("kind") && j["kind"].get<std::string>() != dataset_kind_name(kind))
      throw std::runtime_error("dataset kind mismatch with sidecar: " + csv_path);
  }
  return ds;
}

//============================================================================
// Model JSON
//============================================================================

inline json model_to_json(const SvmModel& m, const std::string& kind) {
  json sv = json::array();
  for (Eigen::Index r = 0; r < m.support_vectors.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.support_vectors.cols(); ++c)
      row.push_back(m.support_vectors(r, c));
    sv.push_back(std::move(row));
  }
  json duals = json::array();
  for (Eigen::Index i = 0; i < m.signed_duals.size(); ++i) duals.push_back(m.signed_duals(i));
  return json{{"format_version", kModelFormatVersion},
              {"kind", kind},
              {"kernel",
               {{"kind", m.kernel.kind == KernelKind::RBF ? "RBF" : "POLY"},
                {"gamma", m.kernel.gamma},
                {"degree", m.kernel.degree},
                {"coef0", m.kernel.coef0}}},
              {"C", m.C},
              {"bias", m.bias},
              {"active_features", m.active_features},
              {"support_vectors", sv},
              {"signed_duals", duals},
              {"meta",
               {{"seed", m.meta.seed},
                {"iterations", m.meta.iterations},
                {"val_accuracy", m.meta.val_accuracy}}}};
}

inline SvmModel model_from_json(const json& j, std::string* kind_out = nullptr) {
  if (!j.contains("format_version") || j["format_version"].get<int>() != kModelFormatVersion)
    throw std::runtime_error("model JSON has an incompatible format_version");
  SvmModel m;
  const json& k = j.at("kernel");
  const std::string kk = k.at("kind").get<std::string>();
  if (kk == "RBF")
    m.kernel.kind = KernelKind::RBF;
  else if (kk == "POLY")
    m.kernel.kind = KernelKind::POLY;
  else
    throw std::runtime_error("model JSON: unknown kernel kind " + kk);
  m.kernel.gamma = k.at("gamma").get<double>();
  m.kernel.degree = k.value("degree", 3);
  m.kernel.coef0 = k.value("coef0", 0.0);
  m.C = j.at("C").get<double>();
  m.bias = j.at("bias").get<double>();
  m.active_features = j.at("active_features").get<std::vector<int>>();
  const json& sv = j.at("support_vectors");
  const json& duals = j.at("signed_duals");
  if (sv.size() != duals.size())
    throw std::runtime_error("model JSON: support vector / dual count mismatch");
  const Eigen::Index rows = static_cast<Eigen::Index>(sv.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(m.active_features.size());
  m.support_vectors.resize(rows, cols);
  m.signed_duals.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(sv[r].size()) != cols)
      throw std::runtime_error("model JSON: support vector arity mismatch");
    for (Eigen::Index c = 0; c < cols; ++c) m.support_vectors(r, c) = sv[r][c].get<double>();
    m.signed_duals(r) = duals[r].get<double>();
  }
  if (j.contains("meta")) {
    m.meta.seed = j["meta"].value("seed", std::uint64_t(0));
    m.meta.iterations = j["meta"].value("iterations", long(0));
    m.meta.val_accuracy = j["meta"].value("val_accuracy", -1.0);
  }
  if (kind_out) *kind_out = j.value("kind", "");
  return m;
}

inline void save_model(const SvmModel& m, const std::string& kind, const std::string& path) {
  write_text_file(path, model_to_json(m, kind).dump(2) + "\n");
}

inline SvmModel load_model(const std::string& path, std::string* kind_out = nullptr) {
  return model_from_json(json::parse(read_text_file(path)), kind_out);
}

//============================================================================
// Cascade bundle
//============================================================================

inline json cascade_to_json(const CascadeModel& c) {
  return json{{"format_version", kModelFormatVersion},
              {"class_order", {"S", "B\\S", "W\\B", "GHZ\\W"}},
              {"models",
               {{"ghz", model_to_json(c.m_ghz, "GHZ")},
                {"w", model_to_json(c.m_w, "W")},
                {"b", model_to_json(c.m_b, "B")}}}};
}

inline CascadeModel cascade_from_json(const json& j) {
  if (!j.contains("models")) throw std::runtime_error("cascade JSON: missing models");
  CascadeModel c;
  c.m_ghz = model_from_json(j["models"].at("ghz"));
  c.m_w = model_from_json(j["models"].at("w"));
  c.m_b = model_from_json(j["models"].at("b"));
  return c;
}

inline void save_cascade(const CascadeModel& c, const std::string& path) {
  write_text_file(path, cascade_to_json(c).dump(2) + "\n");
}

inline CascadeModel load_cascade(const std::string& path) {
  return cascade_from_json(json::parse(read_text_file(path)));
}

//============================================================================
// Metrics, rankings, curves
//============================================================================

// Long-format metrics table; ROC points carry one row per threshold.
inline std::string metrics_to_csv(const std::vector<std::pair<std::string, Metrics>>& splits,
                                  std::uint64_t config_hash, std::uint64_t seed) {
  std::string out = artifact_header(config_hash, seed);
  out += "split,record,index,value_a,value_b\n";
  for (const auto& [split, m] : splits) {
    out += split + ",accuracy,0," + fmt_double(m.accuracy) + ",\n";
    out += split + ",auc,0," + fmt_double(m.auc) + ",\n";
    for (int r = 0; r < m.confusion.rows(); ++r)
      for (int c = 0; c < m.confusion.cols(); ++c)
        out += split + ",confusion," + std::to_string(r * m.confusion.cols() + c) + "," +
               std::to_string(m.confusion(r, c)) + ",\n";
    for (std::size_t i = 0; i < m.roc.size(); ++i)
      out += split + ",roc," + std::to_string(i) + "," + fmt_double(m.roc[i].first) + "," +
             fmt_double(m.roc[i].second) + "\n";
  }
  return out;
}

inline std::string cascade_metrics_to_csv(const CascadeMetrics& m, std::uint64_t config_hash,
                                          std::uint64_t seed) {
  std::string out = artifact_header(config_hash, seed);
  out += "record,index,value\n";
  out += "accuracy,0," + fmt_double(m.accuracy) + "\n";
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      out += "confusion," + std::to_string(4 * r + c) + "," + std::to_string(m.confusion(r, c)) +
             "\n";
  return out;
}

inline json ranking_to_json(const ImportanceRanking& r, std::uint64_t seed) {
  json scores = json::array();
  for (int i = 0; i < kNumFeatures; ++i) scores.push_back(r.scores(i));
  return json{{"scores", scores},
              {"order", r.order},
              {"n_repeats", r.n_repeats},
              {"baseline", r.baseline},
              {"seed", seed}};
}

inline ImportanceRanking ranking_from_json(const json& j) {
  ImportanceRanking r;
  const auto scores = j.at("scores").get<std::vector<double>>();
  if (scores.size() != kNumFeatures) throw std::runtime_error("ranking JSON: need 63 scores");
  r.scores = Eigen::Map<const RVector>(scores.data(), kNumFeatures);
  r.order = j.at("order").get<std::vector<int>>();
  r.n_repeats = j.value("n_repeats", 0);
  r.baseline = j.value("baseline", 0.0);
  return r;
}

inline std::string prefix_curve_to_csv(const std::vector<PrefixPoint>& curve,
                                       std::uint64_t config_hash, std::uint64_t seed) {
  std::string out = artifact_header(config_hash, seed);
  out += "k,feature,accuracy\n";
  for (const auto& p : curve)
    out += std::to_string(p.k) + "," + PauliIndex::from_flat(p.feature).name() + "," +
           fmt_double(p.accuracy) + "\n";
  return out;
}

inline std::vector<PrefixPoint> prefix_curve_from_csv(const std::string& text) {
  std::vector<PrefixPoint> curve;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("k,", 0) == 0) continue;
    std::stringstream ls(line);
    std::string k, name, acc;
    std::getline(ls, k, ',');
    std::getline(ls, name, ',');
    std::getline(ls, acc, ',');
    curve.push_back({std::stoi(k), PauliIndex::from_name(name).flat(), std::stod(acc)});
  }
  return curve;
}

inline json consensus_to_json(const ConsensusRanking& c) {
  return json{{"order", c.order}, {"provenance", c.provenance}, {"reserve_trace", c.reserve_trace}};
}

inline ConsensusRanking consensus_from_json(const json& j) {
  ConsensusRanking c;
  c.order = j.at("order").get<std::vector<int>>();
  c.provenance = j.value("provenance", std::vector<std::string>{});
  c.reserve_trace = j.value("reserve_trace", std::vector<int>{});
  if (c.order.size() != kNumFeatures)
    throw std::runtime_error("consensus JSON: order must list all 63 features");
  return c;
}

}  // namespace qent

#pragma once

#include <stdexcept>
#include <vector>

#include "qent/sampling.hpp"
#include "qent/svm.hpp"
#include "qent/types.hpp"

namespace qent {

// Ordered triple of witness models applied GHZ -> W -> B; the first model
// that fires decides the class, matching the nested hierarchy.
struct CascadeModel {
  SvmModel m_ghz;
  SvmModel m_w;
  SvmModel m_b;
};

inline EntClass classify(const CascadeModel& model, const RVector& features63) {
  if (features63.size() != kNumFeatures)
    throw std::invalid_argument("classify: need the full 63-entry feature vector");
  auto fires = [&](const SvmModel& m) {
    return predict(m, project_features(features63, m.active_features)) == 1;
  };
  if (fires(model.m_ghz)) return EntClass::GHZminusW;
  if (fires(model.m_w)) return EntClass::WminusB;
  if (fires(model.m_b)) return EntClass::BminusS;
  return EntClass::S;
}

// Batch classification over full-width feature rows.
inline std::vector<int> classify_rows(const CascadeModel& model, const RMatrix& X) {
  const RVector d_ghz = decision_values(model.m_ghz, project_features(X, model.m_ghz.active_features));
  const RVector d_w = decision_values(model.m_w, project_features(X, model.m_w.active_features));
  const RVector d_b = decision_values(model.m_b, project_features(X, model.m_b.active_features));
  std::vector<int> out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (d_ghz(i) > 0.0)
      out[i] = static_cast<int>(EntClass::GHZminusW);
    else if (d_w(i) > 0.0)
      out[i] = static_cast<int>(EntClass::WminusB);
    else if (d_b(i) > 0.0)
      out[i] = static_cast<int>(EntClass::BminusS);
    else
      out[i] = static_cast<int>(EntClass::S);
  }
  return out;
}

struct CascadeMetrics {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // 4x4, (true class, predicted class)
};

inline CascadeMetrics evaluate_cascade(const CascadeModel& model, const LabeledDataset& ds) {
  if (ds.kind != DatasetKind::Cascade4)
    throw std::invalid_argument("evaluate_cascade: need a CASCADE4 dataset");
  CascadeMetrics m;
  m.confusion = Eigen::MatrixXi::Zero(4, 4);
  const std::vector<int> pred = classify_rows(model, ds.features);
  long correct = 0;
  for (long i = 0; i < ds.rows(); ++i) {
    m.confusion(ds.labels[i], pred[i])++;
    if (ds.labels[i] == pred[i]) ++correct;
  }
  m.accuracy = ds.rows() > 0 ? static_cast<double>(correct) / ds.rows() : 0.0;
  return m;
}

inline CascadeMetrics evaluate_cascade(const CascadeModel& model, const RMatrix& X,
                                       const std::vector<int>& labels4) {
  LabeledDataset ds;
  ds.kind = DatasetKind::Cascade4;
  ds.features = X;
  ds.labels = labels4;
  return evaluate_cascade(model, ds);
}

// Balanced four-class dataset from the per-class generators: S, B\S, W\B
// (dataset-W label-1 mix) and GHZ\W (dataset-GHZ label-1 mix).
inline LabeledDataset build_cascade4_dataset(long n, std::uint64_t seed, int threads = 1) {
  if (n < 4) throw std::invalid_argument("build_cascade4_dataset: need n >= 4");
  return build_dataset(DatasetKind::Cascade4, n, seed, threads);
}

}  // namespace qent

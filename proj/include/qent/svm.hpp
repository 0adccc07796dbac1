#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qent/parallel.hpp"
#include "qent/types.hpp"

namespace qent {

//============================================================================
// Kernels
//============================================================================

enum class KernelKind { RBF, POLY };

struct KernelSpec {
  KernelKind kind = KernelKind::RBF;
  double gamma = 1.0;   // RBF scale / POLY inner-product scale
  int degree = 3;       // POLY only, 2..9
  double coef0 = 0.0;   // POLY only

  void validate() const {
    if (gamma <= 0.0) throw std::invalid_argument("KernelSpec: gamma must be positive");
    if (kind == KernelKind::POLY && (degree < 2 || degree > 9))
      throw std::invalid_argument("KernelSpec: poly degree must be in 2..9");
  }
};

inline double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

inline double kernel_eval(const KernelSpec& spec, const RVector& x, const RVector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel_eval: length mismatch");
  if (spec.kind == KernelKind::RBF) return std::exp(-spec.gamma * (x - y).squaredNorm());
  return ipow(spec.gamma * x.dot(y) + spec.coef0, spec.degree);
}

//============================================================================
// Model
//============================================================================

struct TrainMeta {
  std::uint64_t seed = 0;
  long iterations = 0;
  double val_accuracy = -1.0;
};

struct SvmModel {
  KernelSpec kernel;
  double C = 1.0;
  double bias = 0.0;
  std::vector<int> active_features;  // Pauli flat indices, defines column order
  RMatrix support_vectors;           // s x |active_features|
  RVector signed_duals;              // alpha_i * y_i
  TrainMeta meta;
};

// Kernel values of one point against all support vectors, then the weighted
// sum. Fine for single queries; batch paths below use blocked GEMMs.
inline double decision_value(const SvmModel& m, const RVector& x) {
  if (x.size() != m.support_vectors.cols())
    throw std::invalid_argument("decision_value: feature count mismatch");
  double sum = m.bias;
  for (Eigen::Index s = 0; s < m.support_vectors.rows(); ++s)
    sum += m.signed_duals(s) * kernel_eval(m.kernel, m.support_vectors.row(s).transpose(), x);
  return sum;
}

inline int predict(const SvmModel& m, const RVector& x) { return decision_value(m, x) > 0.0 ? 1 : 0; }

// Decision values for a whole sample block (rows of X, already restricted to
// the model's active features).
inline RVector decision_values(const SvmModel& m, const RMatrix& X) {
  if (X.cols() != m.support_vectors.cols())
    throw std::invalid_argument("decision_values: feature count mismatch");
  const Eigen::Index n = X.rows(), s = m.support_vectors.rows();
  RVector out = RVector::Constant(n, m.bias);
  if (s == 0) return out;
  RVector sv_sq;
  if (m.kernel.kind == KernelKind::RBF) sv_sq = m.support_vectors.rowwise().squaredNorm();
  const Eigen::Index block = 1024;
  for (Eigen::Index start = 0; start < n; start += block) {
    const Eigen::Index rows = std::min(block, n - start);
    Eigen::MatrixXd dots = X.middleRows(start, rows) * m.support_vectors.transpose();
    if (m.kernel.kind == KernelKind::RBF) {
      RVector x_sq = X.middleRows(start, rows).rowwise().squaredNorm();
      Eigen::MatrixXd d2 = (-2.0 * dots).colwise() + x_sq;
      d2.rowwise() += sv_sq.transpose();
      out.segment(start, rows) += ((-m.kernel.gamma) * d2.array().max(0.0)).exp().matrix() * m.signed_duals;
    } else {
      Eigen::ArrayXXd k = (m.kernel.gamma * dots.array() + m.kernel.coef0);
      Eigen::ArrayXXd acc = Eigen::ArrayXXd::Ones(rows, s);
      for (int e = 0; e < m.kernel.degree; ++e) acc *= k;
      out.segment(start, rows) += acc.matrix() * m.signed_duals;
    }
  }
  return out;
}

// Project full 63-feature rows onto the model's active feature subset.
inline RMatrix project_features(const RMatrix& X, const std::vector<int>& active) {
  RMatrix out(X.rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) {
    const int flat = active[j];
    if (flat < 1 || flat > 63) throw std::invalid_argument("project_features: bad feature index");
    out.col(static_cast<Eigen::Index>(j)) = X.col(flat - 1);
  }
  return out;
}

inline RVector project_features(const RVector& x, const std::vector<int>& active) {
  RVector out(static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) out(static_cast<Eigen::Index>(j)) = x(active[j] - 1);
  return out;
}

//============================================================================
// SMO trainer
//============================================================================

struct SmoParams {
  double tol = 1e-3;          // KKT gap at which to stop
  long max_epochs = 10000;    // iteration budget = max_epochs * n pair updates
  std::size_t cache_bytes = std::size_t(1) << 30;
  std::uint64_t seed = 0;     // recorded in the model meta
};

namespace detail {

// LRU cache of kernel matrix rows.
class KernelRowCache {
 public:
  KernelRowCache(const RMatrix& X, const KernelSpec& spec, std::size_t capacity_bytes)
      : X_(X), spec_(spec) {
    const std::size_t row_bytes = sizeof(double) * static_cast<std::size_t>(X.rows());
    capacity_rows_ = std::max<std::size_t>(2, capacity_bytes / std::max<std::size_t>(1, row_bytes));
    if (spec.kind == KernelKind::RBF) sq_ = X.rowwise().squaredNorm();
  }

  const RVector& row(Eigen::Index i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (lru_.size() >= capacity_rows_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    lru_.emplace_front(i, compute(i));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

  double diag(Eigen::Index i) const {
    if (spec_.kind == KernelKind::RBF) return 1.0;
    return ipow(spec_.gamma * X_.row(i).squaredNorm() + spec_.coef0, spec_.degree);
  }

 private:
  RVector compute(Eigen::Index i) const {
    RVector dots = X_ * X_.row(i).transpose();
    if (spec_.kind == KernelKind::RBF) {
      Eigen::ArrayXd d2 = (sq_.array() - 2.0 * dots.array() + sq_(i)).max(0.0);
      return (-spec_.gamma * d2).exp().matrix();
    }
    Eigen::ArrayXd k = spec_.gamma * dots.array() + spec_.coef0;
    Eigen::ArrayXd acc = Eigen::ArrayXd::Ones(k.size());
    for (int e = 0; e < spec_.degree; ++e) acc *= k;
    return acc.matrix();
  }

  const RMatrix& X_;
  KernelSpec spec_;
  RVector sq_;
  std::size_t capacity_rows_ = 2;
  std::list<std::pair<Eigen::Index, RVector>> lru_;
  std::unordered_map<Eigen::Index, std::list<std::pair<Eigen::Index, RVector>>::iterator> index_;
};

}  // namespace detail

// Soft-margin dual SVM trained by sequential minimal optimization with
// maximal-KKT-violating pair selection. Labels are {0,1}, mapped to -/+1.
// Deterministic: selection scans break ties toward the lower index.
inline SvmModel train_svm(const RMatrix& X, const std::vector<int>& labels, double C,
                          const KernelSpec& spec, const SmoParams& params = {},
                          std::vector<int> active_features = {}) {
  spec.validate();
  if (C <= 0.0) throw std::invalid_argument("train_svm: C must be positive");
  const Eigen::Index n = X.rows();
  if (n < 2 || static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("train_svm: bad training set");
  RVector y(n);
  bool has_pos = false, has_neg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = labels[i] == 1 ? 1.0 : -1.0;
    (labels[i] == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("train_svm: single-class input");

  detail::KernelRowCache cache(X, spec, params.cache_bytes);
  RVector alpha = RVector::Zero(n);
  RVector grad = RVector::Constant(n, -1.0);  // dual gradient at alpha = 0
  RVector diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = cache.diag(i);

  const long max_iter = params.max_epochs * static_cast<long>(n);
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    // i maximizes -y g over I_up, j minimizes it over I_low
    Eigen::Index bi = -1, bj = -1;
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      const bool in_up = (y(t) > 0 && alpha(t) < C) || (y(t) < 0 && alpha(t) > 0);
      const bool in_low = (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < C);
      if (in_up && v > up) {
        up = v;
        bi = t;
      }
      if (in_low && v < low) {
        low = v;
        bj = t;
      }
    }
    if (bi < 0 || bj < 0 || up - low <= params.tol) break;

    const RVector& ki = cache.row(bi);
    double kij = ki(bj);
    double eta = diag(bi) + diag(bj) - 2.0 * kij;
    if (eta <= 0.0) eta = 1e-12;
    double step = (up - low) / eta;
    const double cap_i = y(bi) > 0 ? C - alpha(bi) : alpha(bi);
    const double cap_j = y(bj) > 0 ? alpha(bj) : C - alpha(bj);
    step = std::min(step, std::min(cap_i, cap_j));
    if (step <= 0.0) break;

    alpha(bi) = std::clamp(alpha(bi) + y(bi) * step, 0.0, C);
    alpha(bj) = std::clamp(alpha(bj) - y(bj) * step, 0.0, C);
    const RVector& kj = cache.row(bj);
    grad.array() += step * y.array() * (ki.array() - kj.array());
  }

  // Bias from free support vectors; fall back to the KKT midpoint.
  double bias = 0.0;
  long free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha(t) > 0.0 && alpha(t) < C) {
      bias += -y(t) * grad(t);
      ++free_count;
    }
  if (free_count > 0) {
    bias /= static_cast<double>(free_count);
  } else {
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      if ((y(t) > 0 && alpha(t) < C) || (y(t) < 0 && alpha(t) > 0)) up = std::max(up, v);
      if ((y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < C)) low = std::min(low, v);
    }
    bias = (up + low) / 2.0;
  }

  SvmModel model;
  model.kernel = spec;
  model.C = C;
  model.bias = bias;
  model.active_features = std::move(active_features);
  model.meta.seed = params.seed;
  model.meta.iterations = iter;
  long sv = 0;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha(t) > 0.0) ++sv;
  model.support_vectors.resize(sv, X.cols());
  model.signed_duals.resize(sv);
  for (Eigen::Index t = 0, s = 0; t < n; ++t)
    if (alpha(t) > 0.0) {
      model.support_vectors.row(s) = X.row(t);
      model.signed_duals(s) = alpha(t) * y(t);
      ++s;
    }
  return model;
}

//============================================================================
// Metrics
//============================================================================

struct Metrics {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;                       // (true label, predicted)
  std::vector<std::pair<double, double>> roc;      // (fpr, tpr)
  double auc = 0.5;
};

// ROC by sweeping thresholds across the sorted unique scores (midpoints plus
// the two infinite endpoints); AUC is the trapezoidal integral.
inline void roc_curve(const RVector& scores, const std::vector<int>& labels,
                      std::vector<std::pair<double, double>>& roc, double& auc) {
  const Eigen::Index n = scores.size();
  long pos = 0, neg = 0;
  for (int l : labels) (l == 1 ? pos : neg)++;
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores(a) > scores(b); });
  roc.clear();
  roc.emplace_back(0.0, 0.0);
  auc = 0.0;
  long tp = 0, fp = 0;
  double px = 0.0, py = 0.0;
  Eigen::Index i = 0;
  while (i < n) {
    const double s = scores(order[i]);
    while (i < n && scores(order[i]) == s) {
      (labels[order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    const double x = neg > 0 ? static_cast<double>(fp) / neg : 0.0;
    const double y = pos > 0 ? static_cast<double>(tp) / pos : 0.0;
    auc += (x - px) * (y + py) / 2.0;
    roc.emplace_back(x, y);
    px = x;
    py = y;
  }
  if (roc.back() != std::make_pair(1.0, 1.0)) {
    auc += (1.0 - px) * (1.0 + py) / 2.0;
    roc.emplace_back(1.0, 1.0);
  }
  if (pos == 0 || neg == 0) auc = 0.5;  // degenerate sweep carries no ranking information
}

inline Metrics evaluate(const SvmModel& model, const RMatrix& X, const std::vector<int>& labels) {
  const RVector scores = decision_values(model, X);
  Metrics m;
  m.confusion = Eigen::MatrixXi::Zero(2, 2);
  long correct = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int pred = scores(i) > 0.0 ? 1 : 0;
    m.confusion(labels[i], pred)++;
    if (pred == labels[i]) ++correct;
  }
  m.accuracy = X.rows() > 0 ? static_cast<double>(correct) / X.rows() : 0.0;
  roc_curve(scores, labels, m.roc, m.auc);
  return m;
}

inline double accuracy_of(const SvmModel& model, const RMatrix& X, const std::vector<int>& labels) {
  const RVector scores = decision_values(model, X);
  long correct = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    if ((scores(i) > 0.0 ? 1 : 0) == labels[i]) ++correct;
  return X.rows() > 0 ? static_cast<double>(correct) / X.rows() : 0.0;
}

//============================================================================
// Grid tuning
//============================================================================

struct GridCell {
  double C = 1.0;
  double gamma = 1.0;
  double val_accuracy = 0.0;
};

// Argmax of validation accuracy over the (C, gamma) grid; ties break toward
// smaller C, then smaller gamma. Cells are trained on (X_train, y_train) and
// are independent, so they may run in parallel.
inline GridCell tune_svm(const RMatrix& X_train, const std::vector<int>& y_train,
                         const RMatrix& X_val, const std::vector<int>& y_val,
                         std::vector<double> c_grid, std::vector<double> gamma_grid,
                         KernelKind kind, const SmoParams& params = {}, int threads = 1) {
  if (c_grid.empty() || gamma_grid.empty()) throw std::invalid_argument("tune_svm: empty grid");
  std::sort(c_grid.begin(), c_grid.end());
  std::sort(gamma_grid.begin(), gamma_grid.end());
  std::vector<GridCell> cells;
  for (double C : c_grid)
    for (double gamma : gamma_grid) cells.push_back({C, gamma, 0.0});
  parallel_for(static_cast<long>(cells.size()), threads, [&](long i) {
    KernelSpec spec{kind, cells[i].gamma, 3, 0.0};
    SvmModel m = train_svm(X_train, y_train, cells[i].C, spec, params);
    cells[i].val_accuracy = accuracy_of(m, X_val, y_val);
  });
  GridCell best = cells.front();
  for (const auto& c : cells)
    if (c.val_accuracy > best.val_accuracy) best = c;
  return best;
}

}  // namespace qent

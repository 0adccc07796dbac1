#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qent/parallel.hpp"
#include "qent/qcore.hpp"
#include "qent/rng.hpp"
#include "qent/types.hpp"

namespace qent {

//============================================================================
// Random states
//============================================================================

// Haar-distributed unitary via Ginibre + QR with the R-diagonal phase fix.
inline CMatrix haar_unitary(int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("haar_unitary: d must be >= 1");
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    q.col(j) *= std::abs(rjj) > 0.0 ? rjj / std::abs(rjj) : Complex(1.0, 0.0);
  }
  return q;
}

// Haar pure state; a normalized complex Gaussian vector equals U|0>.
inline CVector haar_ket(int d, RngStream& rng) {
  CVector v = rng.complex_gaussian(d);
  return v / v.norm();
}

inline DensityMatrix haar_pure_state(int d, RngStream& rng) {
  return DensityMatrix::validated(projector(haar_ket(d, rng)));
}

// Mai-Alquier ensemble: Dirichlet-weighted mix of Haar pure states.
inline DensityMatrix ma_mixed_state(int d, int n_components, double beta, RngStream& rng) {
  if (n_components < 1 || n_components > 50)
    throw std::invalid_argument("ma_mixed_state: n_components must be in 1..50");
  const auto w = rng.dirichlet(n_components, beta);
  CMatrix m = CMatrix::Zero(d, d);
  for (int i = 0; i < n_components; ++i) m += w[i] * projector(haar_ket(d, rng));
  m /= m.trace().real();
  return DensityMatrix::validated(std::move(m));
}

inline constexpr int kMaxMaComponents = 50;
inline constexpr double kDefaultDirichletBeta = 1.0;

// Single-qubit factor: fair coin between a Haar pure state and an MA mix.
inline DensityMatrix single_qubit_factor(RngStream& rng) {
  if (rng.coin()) return haar_pure_state(2, rng);
  const int n = static_cast<int>(rng.uniform_int(1, kMaxMaComponents));
  return ma_mixed_state(2, n, kDefaultDirichletBeta, rng);
}

// One product term rho_1 ⊗ rho_2 ⊗ rho_3.
inline DensityMatrix product_state(RngStream& rng) {
  CMatrix m = tensor_product(tensor_product(single_qubit_factor(rng).mat(),
                                            single_qubit_factor(rng).mat()),
                             single_qubit_factor(rng).mat());
  return DensityMatrix::validated(std::move(m));
}

// Class S: convex combination of up to 50 product states.
inline DensityMatrix separable_state(RngStream& rng) {
  const int m = static_cast<int>(rng.uniform_int(1, 50));
  const auto w = rng.dirichlet(m, kDefaultDirichletBeta);
  CMatrix acc = CMatrix::Zero(8, 8);
  for (int t = 0; t < m; ++t) acc += w[t] * product_state(rng).mat();
  acc /= acc.trace().real();
  return DensityMatrix::validated(std::move(acc));
}

inline constexpr double kNptThreshold = -1e-6;

// Rejection-sample a two-qubit state that fails the PPT test. Component
// counts are capped at 10: broad mixtures almost never survive the PPT
// rejection, and the accepted ensemble should retain strongly entangled
// pairs rather than barely-NPT ones.
inline DensityMatrix two_qubit_entangled(RngStream& rng) {
  for (long attempt = 0; attempt < 1000000; ++attempt) {
    const int n = static_cast<int>(rng.uniform_int(1, 10));
    DensityMatrix cand = ma_mixed_state(4, n, kDefaultDirichletBeta, rng);
    if (min_eigenvalue(partial_transpose(cand, Subsystem::B)) < kNptThreshold) return cand;
  }
  throw std::runtime_error("two_qubit_entangled: exceeded 1e6 rejections");
}

// Pure two-qubit entangled state in Schmidt form cos(x)|00> + sin(x)|11>
// under local rotations; x is kept away from zero so the pair is robustly
// entangled (concurrence sin 2x >= 1/2), and x = pi/4 is the Bell corner.
inline DensityMatrix schmidt_pair(RngStream& rng) {
  const double x = rng.uniform(M_PI / 12.0, M_PI / 4.0);
  CVector ket = CVector::Zero(4);
  ket(0) = std::cos(x);
  ket(3) = std::sin(x);
  const CMatrix u = tensor_product(haar_unitary(2, rng), haar_unitary(2, rng));
  CVector rot = u * ket;
  return DensityMatrix::validated(projector(rot));
}

// Class B\S: Dirichlet mix of single-qubit ⊗ entangled-pair terms, with the
// bipartition of each term drawn uniformly from {A|BC, B|AC, C|AB}. Pairs
// come from the NPT-certified MA ensemble, with a slice of Schmidt-form
// pure pairs so strongly entangled blocks are represented. Mixing can wash
// the entanglement out, so the mixture itself is re-certified by the PPT
// test and resampled until it is entangled across some cut; without that, a
// large share of label-1 rows would be indistinguishable from (or literally
// inside) class S.
inline DensityMatrix biseparable_state(RngStream& rng) {
  for (long attempt = 0; attempt < 1000000; ++attempt) {
    const int terms = static_cast<int>(rng.uniform_int(1, 10));
    const auto w = rng.dirichlet(terms, kDefaultDirichletBeta);
    CMatrix acc = CMatrix::Zero(8, 8);
    for (int t = 0; t < terms; ++t) {
      const long cut = rng.uniform_int(0, 2);
      const CMatrix single = single_qubit_factor(rng).mat();
      const CMatrix pair =
          (rng.uniform() < 0.25 ? schmidt_pair(rng) : two_qubit_entangled(rng)).mat();
      CMatrix term;
      switch (cut) {
        case 0:  // A | BC
          term = tensor_product(single, pair);
          break;
        case 1:  // B | AC: build in order (B, A, C), then swap the first two
          term = permute_qubits(tensor_product(single, pair), {1, 0, 2});
          break;
        default:  // C | AB
          term = tensor_product(pair, single);
          break;
      }
      acc += w[t] * term;
    }
    acc /= acc.trace().real();
    DensityMatrix rho = DensityMatrix::validated(std::move(acc));
    for (int q = 0; q < 3; ++q)
      if (min_eigenvalue(partial_transpose(rho, static_cast<Subsystem>(q))) < kNptThreshold)
        return rho;
  }
  throw std::runtime_error("biseparable_state: exceeded 1e6 rejections");
}

// Class B = convex hull of S and B\S. Half of the draws are raw members of
// the union (so the witness models see undiluted biseparable states on the
// B side); the rest are supplementary convex combinations, including
// white-noise mixtures of a single biseparable state (these fill the B
// interior along the maximally-mixed direction).
inline DensityMatrix classB_state(RngStream& rng) {
  const double u = rng.uniform();
  if (u < 0.4) return rng.coin() ? biseparable_state(rng) : separable_state(rng);
  if (u < 0.7) {
    const double q = 1.0 - rng.uniform();
    CMatrix m =
        q * biseparable_state(rng).mat() + (1.0 - q) * CMatrix::Identity(8, 8) / 8.0;
    m /= m.trace().real();
    return DensityMatrix::validated(std::move(m));
  }
  const int terms = static_cast<int>(rng.uniform_int(2, 10));
  const auto w = rng.dirichlet(terms, kDefaultDirichletBeta);
  CMatrix acc = CMatrix::Zero(8, 8);
  for (int t = 0; t < terms; ++t)
    acc += w[t] * (rng.coin() ? biseparable_state(rng) : separable_state(rng)).mat();
  acc /= acc.trace().real();
  return DensityMatrix::validated(std::move(acc));
}

// Conjugate by a product of Haar local unitaries; preserves the class.
inline DensityMatrix rotated_class_state(const DensityMatrix& base, RngStream& rng) {
  if (base.dim() != 8) throw std::invalid_argument("rotated_class_state: need an 8x8 state");
  const CMatrix u = tensor_product(tensor_product(haar_unitary(2, rng), haar_unitary(2, rng)),
                                   haar_unitary(2, rng));
  CMatrix m = u * base.mat() * u.adjoint();
  m /= m.trace().real();
  return DensityMatrix::validated(std::move(m));
}

inline constexpr double kWernerWThreshold = 3.0 / 7.0;  // alpha_c
inline constexpr double kGhzWThreshold = 0.708;         // epsilon_c

// Werner-GHZ mixtures p |GHZ><GHZ| + (1-p) I/8 are biseparable for
// p <= 3/7; above 5/7 the witness 3/4 - <GHZ|rho|GHZ> certifies GHZ\W
// (value (5 - 7p)/8 < 0). The band in between is left unsampled.
inline constexpr double kWernerGhzBisepBound = 3.0 / 7.0;
inline constexpr double kWernerGhzWitnessBound = 5.0 / 7.0;

// Werner-W state alpha |W><W| + (1 - alpha) I/8. Above alpha_c = 3/7 the
// state sits in W\B (label 1), at or below it stays inside B (label 0).
inline std::pair<DensityMatrix, int> werner_w_state(double alpha, RngStream* rot = nullptr) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("werner_w_state: alpha in [0,1]");
  CMatrix m = alpha * projector(w_ket()) + (1.0 - alpha) * CMatrix::Identity(8, 8) / 8.0;
  DensityMatrix rho = DensityMatrix::validated(std::move(m));
  if (rot) rho = rotated_class_state(rho, *rot);
  return {std::move(rho), alpha > kWernerWThreshold ? 1 : 0};
}

inline DensityMatrix werner_ghz_state(double p, RngStream* rot = nullptr) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("werner_ghz_state: p in [0,1]");
  CMatrix m = p * projector(ghz_ket()) + (1.0 - p) * CMatrix::Identity(8, 8) / 8.0;
  DensityMatrix rho = DensityMatrix::validated(std::move(m));
  if (rot) rho = rotated_class_state(rho, *rot);
  return rho;
}

// Generalized GHZ-type ket cos(theta)|000> + e^{i phi} sin(theta)|111>.
inline CVector generalized_ghz_ket(double theta, double phi) {
  CVector v = CVector::Zero(8);
  v(0) = std::cos(theta);
  v(7) = std::polar(std::sin(theta), phi);
  return v;
}

// Noisy generalized GHZ state q P + (1-q) I/8, with the label certified by
// the X-state GME concurrence: positive concurrence means genuinely
// multipartite (GHZ-type coherence), zero means biseparable. Label-1 draws
// require a clear margin so the sampled sides do not force the classifier
// to resolve the hairline around zero concurrence.
inline constexpr double kNoisyGhzGmeMargin = 0.15;

inline DensityMatrix noisy_generalized_ghz(RngStream& rng, bool want_gme) {
  for (long attempt = 0; attempt < 1000000; ++attempt) {
    const double theta = rng.uniform(M_PI / 12.0, 5.0 * M_PI / 12.0);
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    const double q = want_gme ? 1.0 - rng.uniform() : rng.uniform();
    CMatrix m = q * projector(generalized_ghz_ket(theta, phi)) +
                (1.0 - q) * CMatrix::Identity(8, 8) / 8.0;
    const double c = x_state_gme_concurrence(m);
    if (want_gme ? c > kNoisyGhzGmeMargin : c <= 1e-9) {
      DensityMatrix rho = DensityMatrix::validated(std::move(m));
      return rotated_class_state(rho, rng);
    }
  }
  throw std::runtime_error("noisy_generalized_ghz: exceeded 1e6 rejections");
}

// (1 - eps) |GHZ><GHZ| + eps |W><W|. Below eps_c = 0.708 the mixture is
// GHZ\W (label 1); at or above it belongs to the W class (label 0).
inline std::pair<DensityMatrix, int> ghz_w_mixture(double eps, RngStream* rot = nullptr) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("ghz_w_mixture: eps in [0,1]");
  CMatrix m = (1.0 - eps) * projector(ghz_ket()) + eps * projector(w_ket());
  DensityMatrix rho = DensityMatrix::validated(std::move(m));
  if (rot) rho = rotated_class_state(rho, *rot);
  return {std::move(rho), eps < kGhzWThreshold ? 1 : 0};
}

//============================================================================
// Labeled datasets
//============================================================================

enum class DatasetKind { B, W, GHZ, Cascade4 };

inline const char* dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::B: return "B";
    case DatasetKind::W: return "W";
    case DatasetKind::GHZ: return "GHZ";
    case DatasetKind::Cascade4: return "CASCADE4";
  }
  return "?";
}

inline DatasetKind dataset_kind_from_name(const std::string& s) {
  if (s == "B") return DatasetKind::B;
  if (s == "W") return DatasetKind::W;
  if (s == "GHZ") return DatasetKind::GHZ;
  if (s == "CASCADE4") return DatasetKind::Cascade4;
  throw std::invalid_argument("unknown dataset kind: " + s);
}

struct DatasetMeta {
  std::uint64_t seed = 0;
  std::string generator_version = kGeneratorVersion;
  std::map<int, long> class_counts;
};

struct LabeledDataset {
  DatasetKind kind = DatasetKind::B;
  RMatrix features;         // n x 63, canonical Pauli order
  std::vector<int> labels;  // {0,1} for binary kinds, 0..3 for CASCADE4
  DatasetMeta meta;

  long rows() const { return features.rows(); }
};

// Row generators for the three binary datasets. Mix fractions inside each
// label follow the dataset recipes: boundary-family samples are blended in
// to densify the decision region around alpha_c and eps_c.

inline DensityMatrix dataset_b_row(int label, RngStream& rng) {
  return label == 0 ? separable_state(rng) : biseparable_state(rng);
}

inline DensityMatrix dataset_w_label1_row(RngStream& rng) {
  if (rng.uniform() < 0.5) {
    DensityMatrix w = DensityMatrix::validated(projector(w_ket()));
    return rotated_class_state(w, rng);
  }
  const double alpha = kWernerWThreshold + (1.0 - kWernerWThreshold) * (1.0 - rng.uniform());
  return werner_w_state(alpha, &rng).first;
}

inline DensityMatrix dataset_w_label0_row(RngStream& rng) {
  if (rng.uniform() < 0.7) return classB_state(rng);
  return werner_w_state(kWernerWThreshold * rng.uniform(), &rng).first;
}

inline DensityMatrix dataset_w_row(int label, RngStream& rng) {
  return label == 0 ? dataset_w_label0_row(rng) : dataset_w_label1_row(rng);
}

// Any member of the W class: the union of the dataset-W row generators,
// relabeled 0 (both sides of that dataset lie inside W).
inline DensityMatrix class_w_member(RngStream& rng) {
  return rng.coin() ? dataset_w_label1_row(rng) : dataset_w_label0_row(rng);
}

// GHZ\W side: rotated pure GHZ, GHZ/W mixtures below eps_c, and GME-
// certified noisy generalized-GHZ states (the last family covers the
// "GHZ-type coherence plus broadband noise" direction that none of the
// pure-state mixtures reach).
inline DensityMatrix dataset_ghz_label1_row(RngStream& rng) {
  if (rng.uniform() < 0.5) {
    DensityMatrix g = DensityMatrix::validated(projector(ghz_ket()));
    return rotated_class_state(g, rng);
  }
  return ghz_w_mixture(kGhzWThreshold * rng.uniform(), &rng).first;
}

inline DensityMatrix dataset_ghz_label0_row(RngStream& rng) {
  const double u = rng.uniform();
  if (u < 0.7) return class_w_member(rng);
  if (u < 0.95)
    return ghz_w_mixture(kGhzWThreshold + (1.0 - kGhzWThreshold) * rng.uniform(), &rng).first;
  return noisy_generalized_ghz(rng, false);
}

inline DensityMatrix dataset_ghz_row(int label, RngStream& rng) {
  return label == 0 ? dataset_ghz_label0_row(rng) : dataset_ghz_label1_row(rng);
}

inline StreamDomain dataset_stream_domain(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::B: return StreamDomain::DatasetB;
    case DatasetKind::W: return StreamDomain::DatasetW;
    case DatasetKind::GHZ: return StreamDomain::DatasetGHZ;
    case DatasetKind::Cascade4: return StreamDomain::Dataset4;
  }
  throw std::invalid_argument("bad dataset kind");
}

inline DensityMatrix dataset_row_state(DatasetKind kind, int label, RngStream& rng) {
  switch (kind) {
    case DatasetKind::B: return dataset_b_row(label, rng);
    case DatasetKind::W: return dataset_w_row(label, rng);
    case DatasetKind::GHZ: return dataset_ghz_row(label, rng);
    case DatasetKind::Cascade4:
      switch (label) {
        case 0: return separable_state(rng);
        case 1: return biseparable_state(rng);
        case 2: return dataset_w_label1_row(rng);
        default: return dataset_ghz_label1_row(rng);
      }
  }
  throw std::invalid_argument("bad dataset kind");
}

// Balanced labeled dataset; row i derives its RNG stream from (seed, i), so
// generation is order-independent, reproducible row by row, and safe to
// parallelize.
inline LabeledDataset build_dataset(DatasetKind kind, long n_rows, std::uint64_t seed,
                                    int threads = 1) {
  const int n_classes = kind == DatasetKind::Cascade4 ? 4 : 2;
  if (n_rows < n_classes) throw std::invalid_argument("build_dataset: too few rows");
  LabeledDataset ds;
  ds.kind = kind;
  ds.meta.seed = seed;
  ds.features.resize(n_rows, kNumFeatures);
  ds.labels.resize(n_rows);
  const StreamDomain dom = dataset_stream_domain(kind);
  parallel_for(n_rows, threads, [&](long i) {
    const int label = static_cast<int>(i % n_classes);
    RngStream rng(seed, make_stream(dom, static_cast<std::uint64_t>(i)));
    ds.features.row(i) = features_of(dataset_row_state(kind, label, rng)).transpose();
    ds.labels[i] = label;
  });
  for (long i = 0; i < n_rows; ++i) ds.meta.class_counts[ds.labels[i]]++;
  return ds;
}

}  // namespace qent

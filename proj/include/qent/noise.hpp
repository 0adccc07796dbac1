#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qent/cascade.hpp"
#include "qent/parallel.hpp"
#include "qent/qcore.hpp"
#include "qent/types.hpp"

namespace qent {

//============================================================================
// Single-qubit Kraus channels
//============================================================================

enum class NoiseKind { AmplitudeDamping, PhaseDamping, Depolarizing };

inline const char* noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::AmplitudeDamping: return "amplitude_damping";
    case NoiseKind::PhaseDamping: return "phase_damping";
    case NoiseKind::Depolarizing: return "depolarizing";
  }
  return "?";
}

inline NoiseKind noise_kind_from_name(const std::string& s) {
  if (s == "amplitude_damping") return NoiseKind::AmplitudeDamping;
  if (s == "phase_damping") return NoiseKind::PhaseDamping;
  if (s == "depolarizing") return NoiseKind::Depolarizing;
  throw std::invalid_argument("unknown noise kind: " + s);
}

// Depolarizing convention: rho -> (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z);
// identity at p = 0, full mixing at p = 3/4.
inline std::vector<Eigen::Matrix2cd> kraus_set(NoiseKind kind, double strength) {
  if (strength < 0.0 || strength > 1.0)
    throw std::invalid_argument("kraus_set: strength must be in [0,1]");
  std::vector<Eigen::Matrix2cd> ks;
  switch (kind) {
    case NoiseKind::AmplitudeDamping: {
      Eigen::Matrix2cd k0, k1;
      k0 << 1, 0, 0, std::sqrt(1.0 - strength);
      k1 << 0, std::sqrt(strength), 0, 0;
      ks = {k0, k1};
      break;
    }
    case NoiseKind::PhaseDamping: {
      Eigen::Matrix2cd k0, k1;
      k0 << 1, 0, 0, std::sqrt(1.0 - strength);
      k1 << 0, 0, 0, std::sqrt(strength);
      ks = {k0, k1};
      break;
    }
    case NoiseKind::Depolarizing: {
      for (int p = 0; p < 4; ++p) {
        const double w = p == 0 ? 1.0 - strength : strength / 3.0;
        ks.push_back(std::sqrt(w) * pauli_matrix(p));
      }
      break;
    }
  }
  return ks;
}

struct NoiseChannel {
  NoiseKind kind = NoiseKind::Depolarizing;
  double strength = 0.0;
  std::vector<Eigen::Matrix2cd> kraus;

  static NoiseChannel make(NoiseKind kind, double strength) {
    NoiseChannel c{kind, strength, kraus_set(kind, strength)};
    Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
    for (const auto& k : c.kraus) sum += k.adjoint() * k;
    if ((sum - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::runtime_error("NoiseChannel: Kraus completeness violated");
    return c;
  }
};

// Channel applied independently to all three qubits: the Kraus set of the
// product channel is every tensor triple K_a ⊗ K_b ⊗ K_c.
inline std::vector<CMatrix> kraus_triples(const NoiseChannel& c) {
  std::vector<CMatrix> out;
  out.reserve(c.kraus.size() * c.kraus.size() * c.kraus.size());
  for (const auto& a : c.kraus)
    for (const auto& b : c.kraus)
      for (const auto& k : c.kraus)
        out.push_back(tensor_product(tensor_product(CMatrix(a), CMatrix(b)), CMatrix(k)));
  return out;
}

inline DensityMatrix apply_all_qubits(const DensityMatrix& rho, const NoiseChannel& channel) {
  if (rho.dim() != 8) throw std::invalid_argument("apply_all_qubits: need an 8x8 state");
  CMatrix out = CMatrix::Zero(8, 8);
  for (const auto& t : kraus_triples(channel)) out += t * rho.mat() * t.adjoint();
  return DensityMatrix::validated(std::move(out));
}

//============================================================================
// Robustness sweep
//============================================================================

struct NoiseSweepRow {
  NoiseKind kind;
  double strength = 0.0;
  double accuracy = 0.0;
  long n_states = 0;
};

// Corrupt every test state, recompute features, classify, and score against
// the clean labels. States are reconstructed from the stored feature rows
// (the Pauli map is exactly invertible for physical rows).
inline std::vector<NoiseSweepRow> noise_sweep(const CascadeModel& cascade,
                                              const LabeledDataset& clean,
                                              const std::vector<NoiseKind>& kinds,
                                              const std::vector<double>& strengths,
                                              int threads = 1) {
  if (clean.kind != DatasetKind::Cascade4)
    throw std::invalid_argument("noise_sweep: need a CASCADE4 dataset");
  if (strengths.empty() || kinds.empty())
    throw std::invalid_argument("noise_sweep: empty sweep grid");
  const long n = clean.rows();
  std::vector<NoiseSweepRow> table;
  for (NoiseKind kind : kinds) {
    for (double strength : strengths) {
      const NoiseChannel channel = NoiseChannel::make(kind, strength);
      const auto triples = kraus_triples(channel);
      RMatrix noisy(n, kNumFeatures);
      parallel_for(n, threads, [&](long i) {
        const CMatrix m = state_of_features(clean.features.row(i).transpose());
        CMatrix out = CMatrix::Zero(8, 8);
        for (const auto& t : triples) out += t * m * t.adjoint();
        noisy.row(i) =
            features_of(DensityMatrix::validated(std::move(out))).transpose();
      });
      const CascadeMetrics cm = evaluate_cascade(cascade, noisy, clean.labels);
      table.push_back({kind, strength, cm.accuracy, n});
    }
  }
  return table;
}

}  // namespace qent

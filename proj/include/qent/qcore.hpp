#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qent/types.hpp"

namespace qent {

//============================================================================
// Pauli-string bookkeeping
//============================================================================

// Three-letter Pauli label (i, j, k) over {I, X, Y, Z} = {0, 1, 2, 3}, with
// the all-identity string excluded. Flat index n = 16 i + 4 j + k covers
// 1..63 and fixes the feature and CSV column order ("IIX" = 1, "ZZZ" = 63).
struct PauliIndex {
  int i = 0, j = 0, k = 0;

  int flat() const { return 16 * i + 4 * j + k; }

  std::string name() const {
    static const char letters[] = "IXYZ";
    return {letters[i], letters[j], letters[k]};
  }

  static PauliIndex from_flat(int n) {
    if (n < 1 || n > 63) throw std::invalid_argument("PauliIndex: flat index must be in 1..63");
    return {n / 16, (n / 4) % 4, n % 4};
  }

  static PauliIndex from_name(const std::string& s) {
    if (s.size() != 3) throw std::invalid_argument("PauliIndex: name must have 3 letters");
    auto digit = [](char c) {
      switch (c) {
        case 'I': return 0;
        case 'X': return 1;
        case 'Y': return 2;
        case 'Z': return 3;
      }
      throw std::invalid_argument("PauliIndex: letters must be one of I, X, Y, Z");
    };
    PauliIndex p{digit(s[0]), digit(s[1]), digit(s[2])};
    if (p.flat() == 0) throw std::invalid_argument("PauliIndex: III is not a feature");
    return p;
  }
};

inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    v.reserve(kNumFeatures);
    for (int n = 1; n <= 63; ++n) v.push_back(PauliIndex::from_flat(n).name());
    return v;
  }();
  return names;
}

inline const Eigen::Matrix2cd& pauli_matrix(int p) {
  static const std::array<Eigen::Matrix2cd, 4> mats = [] {
    std::array<Eigen::Matrix2cd, 4> m;
    const Complex i(0.0, 1.0);
    m[0] << 1, 0, 0, 1;
    m[1] << 0, 1, 1, 0;
    m[2] << 0, -i, i, 0;
    m[3] << 1, 0, 0, -1;
    return m;
  }();
  if (p < 0 || p > 3) throw std::invalid_argument("pauli_matrix: index must be in 0..3");
  return mats[p];
}

// Every 3-qubit Pauli string has exactly one nonzero per row: entry
// (r, r ^ xor_mask) with value val[r]. Traces and reconstructions run on
// this sparse form instead of dense 8x8 products.
struct PauliAction {
  int xor_mask = 0;
  std::array<Complex, 8> val{};
};

inline const PauliAction& pauli_action(int flat) {
  static const std::array<PauliAction, 64> table = [] {
    std::array<PauliAction, 64> t;
    auto flips = [](int p) { return p == 1 || p == 2; };
    auto entry = [](int p, int row_bit) -> Complex {
      switch (p) {
        case 0: return {1.0, 0.0};
        case 1: return {1.0, 0.0};
        case 2: return row_bit == 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
        default: return row_bit == 0 ? Complex(1.0, 0.0) : Complex(-1.0, 0.0);
      }
    };
    for (int n = 0; n < 64; ++n) {
      const int pi = n / 16, pj = (n / 4) % 4, pk = n % 4;
      PauliAction a;
      a.xor_mask = (flips(pi) << 2) | (flips(pj) << 1) | static_cast<int>(flips(pk));
      for (int r = 0; r < 8; ++r)
        a.val[r] = entry(pi, (r >> 2) & 1) * entry(pj, (r >> 1) & 1) * entry(pk, r & 1);
      t[n] = a;
    }
    return t;
  }();
  if (flat < 0 || flat > 63) throw std::invalid_argument("pauli_action: index must be in 0..63");
  return table[flat];
}

// Dense 8x8 Pauli string, mostly for tests and witnesses.
inline CMatrix pauli_string_matrix(const PauliIndex& p) {
  const PauliAction& a = pauli_action(p.flat());
  CMatrix m = CMatrix::Zero(8, 8);
  for (int r = 0; r < 8; ++r) m(r, r ^ a.xor_mask) = a.val[r];
  return m;
}

//============================================================================
// Density matrices
//============================================================================

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = -1e-9;

inline double max_hermiticity_violation(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Smallest eigenvalue of a Hermitian matrix (rejects non-Hermitian input).
inline double min_eigenvalue(const CMatrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("min_eigenvalue: matrix must be square");
  if (max_hermiticity_violation(h) > 1e-10)
    throw std::invalid_argument("min_eigenvalue: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Validated quantum state: Hermitian to 1e-12, unit trace to 1e-10, and
// positive semidefinite to -1e-9 (room for roundoff from long convex mixes).
class DensityMatrix {
 public:
  DensityMatrix() : mat_(CMatrix::Zero(0, 0)) {}

  static DensityMatrix validated(CMatrix m) {
    const auto d = m.rows();
    if (m.cols() != d || (d != 2 && d != 4 && d != 8))
      throw std::invalid_argument("DensityMatrix: dim must be one of {2, 4, 8}");
    if (max_hermiticity_violation(m) > kHermitianTol)
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > kTraceTol || std::abs(m.trace().imag()) > kTraceTol)
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < kPsdTol)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                  std::to_string(es.eigenvalues()(0)));
    return DensityMatrix(std::move(m));
  }

  const CMatrix& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  explicit DensityMatrix(CMatrix m) : mat_(std::move(m)) {}
  CMatrix mat_;
};

inline double purity(const DensityMatrix& rho) {
  return (rho.mat() * rho.mat()).trace().real();
}

inline CMatrix projector(const CVector& ket) { return ket * ket.adjoint(); }

// <ket| rho |ket>
inline double fidelity_with(const DensityMatrix& rho, const CVector& ket) {
  return ket.dot(rho.mat() * ket).real();
}

inline CVector basis_ket(int dim, int idx) {
  CVector v = CVector::Zero(dim);
  v(idx) = 1.0;
  return v;
}

// |GHZ> = (|000> + |111>)/sqrt(2)
inline CVector ghz_ket() {
  CVector v = CVector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  return v;
}

// |W> = (|001> + |010> + |100>)/sqrt(3)
inline CVector w_ket() {
  CVector v = CVector::Zero(8);
  v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
  return v;
}

//============================================================================
// Operations
//============================================================================

// Kronecker product; the left factor is the most significant subsystem.
inline CMatrix tensor_product(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Pauli expectation vector t_n = Tr(rho P_n), n = 1..63 in flat order.
inline RVector features_of(const DensityMatrix& rho) {
  if (rho.dim() != 8) throw std::invalid_argument("features_of: need an 8x8 state");
  const CMatrix& m = rho.mat();
  RVector f(kNumFeatures);
  for (int n = 1; n <= 63; ++n) {
    const PauliAction& a = pauli_action(n);
    Complex t = 0.0;
    for (int r = 0; r < 8; ++r) t += a.val[r] * m(r ^ a.xor_mask, r);
    if (std::abs(t.imag()) > 1e-10)
      throw std::runtime_error("features_of: Pauli trace has imaginary residue");
    f(n - 1) = t.real();
  }
  return f;
}

// rho = (1/8)(I + sum_n f_n P_n). Hermitian and unit trace for any real
// input; positive semidefiniteness is NOT guaranteed for arbitrary vectors.
inline CMatrix state_of_features(const RVector& f) {
  if (f.size() != kNumFeatures) throw std::invalid_argument("state_of_features: need 63 entries");
  CMatrix m = CMatrix::Identity(8, 8) / 8.0;
  for (int n = 1; n <= 63; ++n) {
    const PauliAction& a = pauli_action(n);
    for (int r = 0; r < 8; ++r) m(r, r ^ a.xor_mask) += f(n - 1) * a.val[r] / 8.0;
  }
  return m;
}

// Genuine-multipartite concurrence of a three-qubit X matrix (support on
// the diagonal d_0..d_7 and anti-diagonal z_i at (i, 7-i)):
// C = 2 max(0, max_i (|z_i| - sum_{j != i} sqrt(d_j d_{7-j}))).
// Zero exactly when the state is biseparable.
inline double x_state_gme_concurrence(const CMatrix& m) {
  double best = 0.0;
  for (int i = 0; i < 4; ++i) {
    double others = 0.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) others += std::sqrt(std::max(0.0, m(j, j).real() * m(7 - j, 7 - j).real()));
    best = std::max(best, std::abs(m(i, 7 - i)) - others);
  }
  return 2.0 * std::max(0.0, best);
}

enum class Subsystem { A = 0, B = 1, C = 2 };

inline Subsystem subsystem_from_name(const std::string& s) {
  if (s == "A") return Subsystem::A;
  if (s == "B") return Subsystem::B;
  if (s == "C") return Subsystem::C;
  throw std::invalid_argument("subsystem must be A, B or C");
}

// Trace out one qubit of a 3-qubit state; remaining qubits keep their order.
inline DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem traced) {
  if (rho.dim() != 8) throw std::invalid_argument("partial_trace: need an 8x8 state");
  const int q = static_cast<int>(traced);
  // qubit A = most significant bit; the kept qubits retain their order
  auto embed = [&](int two, int v) {
    const int hi = (two >> 1) & 1, lo = two & 1;
    int full[3];
    int pos = 0;
    for (int s = 0; s < 3; ++s) full[s] = (s == q) ? v : (pos++ == 0 ? hi : lo);
    return (full[0] << 2) | (full[1] << 1) | full[2];
  };
  CMatrix out = CMatrix::Zero(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int v = 0; v < 2; ++v) out(r, c) += rho.mat()(embed(r, v), embed(c, v));
  return DensityMatrix::validated(std::move(out));
}

// Transpose the indices of one qubit; the workhorse of the PPT criterion.
// Output is Hermitian and unit trace but in general not PSD.
inline CMatrix partial_transpose_qubit(const CMatrix& m, int qubit, int n_qubits) {
  const int dim = 1 << n_qubits;
  if (m.rows() != dim || m.cols() != dim)
    throw std::invalid_argument("partial_transpose: dimension mismatch");
  if (qubit < 0 || qubit >= n_qubits) throw std::invalid_argument("partial_transpose: bad qubit");
  const int mask = 1 << (n_qubits - 1 - qubit);
  CMatrix out(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const int nr = (r & ~mask) | (c & mask);
      const int nc = (c & ~mask) | (r & mask);
      out(nr, nc) = m(r, c);
    }
  return out;
}

// Partition names the transposed factor: for dim 8 one of A|BC, B|AC, C|AB
// (the single qubit is transposed); for dim 4 subsystem A or B.
inline CMatrix partial_transpose(const DensityMatrix& rho, Subsystem transposed) {
  if (rho.dim() == 8) return partial_transpose_qubit(rho.mat(), static_cast<int>(transposed), 3);
  if (rho.dim() == 4) {
    if (transposed == Subsystem::C)
      throw std::invalid_argument("partial_transpose: dim-4 partition must be A or B");
    return partial_transpose_qubit(rho.mat(), static_cast<int>(transposed), 2);
  }
  throw std::invalid_argument("partial_transpose: dim must be 4 or 8");
}

// Relabel the qubits of an 8x8 matrix: output qubit q is input qubit perm[q].
inline CMatrix permute_qubits(const CMatrix& m, const std::array<int, 3>& perm) {
  if (m.rows() != 8 || m.cols() != 8) throw std::invalid_argument("permute_qubits: need 8x8");
  auto map = [&](int idx) {
    int out = 0;
    for (int q = 0; q < 3; ++q) out |= ((idx >> (2 - perm[q])) & 1) << (2 - q);
    return out;
  };
  CMatrix out(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) out(map(r), map(c)) = m(r, c);
  return out;
}

}  // namespace qent

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qent/qcore.hpp"
#include "qent/rng.hpp"
#include "qent/sampling.hpp"
#include "qent/types.hpp"

namespace qent {

//============================================================================
// Analytic ground truth: PPT test and the two witness operators
//============================================================================

struct PptResult {
  bool is_ppt = false;
  double min_eig = 0.0;
};

inline PptResult ppt_check(const DensityMatrix& rho, Subsystem partition) {
  const double e = min_eigenvalue(partial_transpose(rho, partition));
  return {e >= -1e-9, e};
}

enum class Witness { GHZ, W };

// Tr(W rho) with W_GHZ = 3/4 I - P_GHZ and W_W = 2/3 I - P_W; computed as
// constant minus the fidelity against the standard pure state.
inline double witness_value(const DensityMatrix& rho, Witness which) {
  if (rho.dim() != 8) throw std::invalid_argument("witness_value: need an 8x8 state");
  if (which == Witness::GHZ) return 0.75 - fidelity_with(rho, ghz_ket());
  return 2.0 / 3.0 - fidelity_with(rho, w_ket());
}

//============================================================================
// Out-of-distribution families
//============================================================================

// Horodecki 2 (x) 4 bound entangled state, qubit A against the pair BC.
inline DensityMatrix horodecki_state(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("horodecki_state: need 0 < a < 1");
  const double s = std::sqrt(1.0 - a * a) / 2.0;
  CMatrix m = CMatrix::Zero(8, 8);
  for (int i = 0; i < 4; ++i) m(i, i) = a;
  for (int i = 0; i < 3; ++i) {
    m(i, i + 5) = a;
    m(i + 5, i) = a;
    m(i + 5, i + 5) = a;
  }
  m(4, 4) = m(7, 7) = (1.0 + a) / 2.0;
  m(4, 7) = m(7, 4) = s;
  m /= 7.0 * a + 1.0;
  return DensityMatrix::validated(std::move(m));
}

// Edge state: diagonal (1, a, b, c, 1/c, 1/b, 1/a, 1) with corner coherences,
// normalized by n = 2 + a + 1/a + b + 1/b + c + 1/c.
inline DensityMatrix edge_state(double a, double b, double c) {
  if (a <= 0.0 || b <= 0.0 || c <= 0.0)
    throw std::invalid_argument("edge_state: parameters must be positive");
  CMatrix m = CMatrix::Zero(8, 8);
  const double diag[8] = {1.0, a, b, c, 1.0 / c, 1.0 / b, 1.0 / a, 1.0};
  for (int i = 0; i < 8; ++i) m(i, i) = diag[i];
  m(0, 7) = m(7, 0) = 1.0;
  m /= 2.0 + a + 1.0 / a + b + 1.0 / b + c + 1.0 / c;
  return DensityMatrix::validated(std::move(m));
}

// The four "Shifts" UPB kets |000>, |-+1>, |+1->, |1-+>.
inline std::vector<CVector> upb_kets() {
  const CVector zero = basis_ket(2, 0), one = basis_ket(2, 1);
  const CVector plus = (zero + one) / std::sqrt(2.0);
  const CVector minus = (zero - one) / std::sqrt(2.0);
  auto kron3 = [](const CVector& x, const CVector& y, const CVector& z) {
    CVector out(8);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) out(4 * i + 2 * j + k) = x(i) * y(j) * z(k);
    return out;
  };
  return {kron3(zero, zero, zero), kron3(minus, plus, one), kron3(plus, one, minus),
          kron3(one, minus, plus)};
}

// Normalized projector onto the complement of the UPB span; bound entangled
// across every cut. The paper writes 1 - sum |v_i><v_i|; the 1/4 makes it a
// state.
inline DensityMatrix upb_state(RngStream* rot = nullptr) {
  CMatrix m = CMatrix::Identity(8, 8);
  for (const auto& v : upb_kets()) m -= projector(v);
  m /= 4.0;
  DensityMatrix rho = DensityMatrix::validated(std::move(m));
  if (rot) rho = rotated_class_state(rho, *rot);
  return rho;
}

// X-state support: diagonal d_0..d_7 plus anti-diagonal coherences z_i at
// (i, 7-i), i = 0..3. PSD iff |z_i|^2 <= d_i d_{7-i}. The GME criterion is
// x_state_gme_concurrence (qcore).
struct XState {
  DensityMatrix rho;
  int gme_label = 0;
  double gme_concurrence = 0.0;
};

inline XState random_x_state(RngStream& rng) {
  const auto d = rng.dirichlet(8, 1.0);
  CMatrix m = CMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) m(i, i) = d[i];
  for (int i = 0; i < 4; ++i) {
    const double zmax = std::sqrt(d[i] * d[7 - i]);
    const double r = rng.uniform() * zmax;
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    const Complex z = std::polar(r, phi);
    m(i, 7 - i) = z;
    m(7 - i, i) = std::conj(z);
  }
  XState out;
  out.gme_concurrence = x_state_gme_concurrence(m);
  out.gme_label = out.gme_concurrence > 1e-9 ? 1 : 0;
  out.rho = DensityMatrix::validated(std::move(m));
  return out;
}

//============================================================================
// Family descriptors for the OOD evaluation
//============================================================================

enum class OodFamily { Horodecki, Edge, Upb, XState };

inline const char* ood_family_name(OodFamily f) {
  switch (f) {
    case OodFamily::Horodecki: return "HORODECKI";
    case OodFamily::Edge: return "EDGE";
    case OodFamily::Upb: return "UPB";
    case OodFamily::XState: return "XSTATE";
  }
  return "?";
}

struct OodSample {
  DensityMatrix rho;
  std::string params;
  // Expected binary outputs per witness model; -1 marks "not meaningful".
  int expect_b = -1, expect_w = -1, expect_ghz = -1;
};

// Parameter sweeps: Horodecki a ~ U(0.05, 0.95); Edge a,b,c log-uniform on
// (0.1, 10). Horodecki/Edge/UPB all live in B\S, so (M_B, M_W, M_GHZ) should
// read (1, 0, 0); for X-states only M_GHZ is meaningful.
inline OodSample ood_sample(OodFamily family, RngStream& rng, bool rotated) {
  OodSample s;
  char buf[96];
  switch (family) {
    case OodFamily::Horodecki: {
      const double a = rng.uniform(0.05, 0.95);
      s.rho = horodecki_state(a);
      std::snprintf(buf, sizeof(buf), "a=%.6f", a);
      s.expect_b = 1, s.expect_w = 0, s.expect_ghz = 0;
      break;
    }
    case OodFamily::Edge: {
      auto logu = [&] { return std::exp(rng.uniform(std::log(0.1), std::log(10.0))); };
      const double a = logu(), b = logu(), c = logu();
      s.rho = edge_state(a, b, c);
      std::snprintf(buf, sizeof(buf), "a=%.6f;b=%.6f;c=%.6f", a, b, c);
      s.expect_b = 1, s.expect_w = 0, s.expect_ghz = 0;
      break;
    }
    case OodFamily::Upb: {
      s.rho = upb_state(rotated ? &rng : nullptr);
      std::snprintf(buf, sizeof(buf), "-");
      s.expect_b = 1, s.expect_w = 0, s.expect_ghz = 0;
      rotated = false;  // rotation already applied as part of the family definition
      break;
    }
    case OodFamily::XState: {
      XState x = random_x_state(rng);
      std::snprintf(buf, sizeof(buf), "cgme=%.6f", x.gme_concurrence);
      s.rho = std::move(x.rho);
      s.expect_ghz = x.gme_label;
      break;
    }
  }
  if (rotated) s.rho = rotated_class_state(s.rho, rng);
  s.params = buf;
  return s;
}

}  // namespace qent

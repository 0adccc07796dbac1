#include <catch2/catch_amalgamated.hpp>

#include "qent/qcore.hpp"
#include "qent/rng.hpp"
#include "qent/sampling.hpp"

using namespace qent;

namespace {

CVector bell_phi_plus() {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

double feature(const RVector& f, const char* name) {
  return f(PauliIndex::from_name(name).flat() - 1);
}

}  // namespace

TEST_CASE("PauliIndex bijection between names, triples and flat indices") {
  CHECK(PauliIndex::from_name("IIX").flat() == 1);
  CHECK(PauliIndex::from_name("ZZZ").flat() == 63);
  CHECK(PauliIndex::from_flat(1).name() == "IIX");
  CHECK(PauliIndex::from_flat(63).name() == "ZZZ");
  for (int n = 1; n <= 63; ++n) {
    const PauliIndex p = PauliIndex::from_flat(n);
    CHECK(p.flat() == n);
    CHECK(PauliIndex::from_name(p.name()).flat() == n);
  }
  CHECK_THROWS_AS(PauliIndex::from_flat(0), std::invalid_argument);
  CHECK_THROWS_AS(PauliIndex::from_flat(64), std::invalid_argument);
  CHECK_THROWS_AS(PauliIndex::from_name("III"), std::invalid_argument);
  CHECK_THROWS_AS(PauliIndex::from_name("ABC"), std::invalid_argument);
}

TEST_CASE("pauli_string_matrix matches dense tensor products") {
  for (int n : {1, 5, 27, 42, 63}) {
    const PauliIndex p = PauliIndex::from_flat(n);
    const CMatrix dense = tensor_product(
        tensor_product(CMatrix(pauli_matrix(p.i)), CMatrix(pauli_matrix(p.j))),
        CMatrix(pauli_matrix(p.k)));
    CHECK((pauli_string_matrix(p) - dense).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("tensor_product basic identities") {
  const CMatrix i2 = CMatrix::Identity(2, 2);
  CHECK((tensor_product(i2, i2) - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  const CMatrix zp = tensor_product(CMatrix(pauli_matrix(3)), p0);
  CHECK(zp(0, 0) == Complex(1.0, 0.0));
  CHECK(zp(2, 2) == Complex(-1.0, 0.0));
  CHECK(zp(1, 1) == Complex(0.0, 0.0));

  const CMatrix proj01 = tensor_product(p0, p1);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(proj01(r, c) == ((r == 1 && c == 1) ? Complex(1.0, 0.0) : Complex(0.0, 0.0)));
}

TEST_CASE("features_of computational basis state |000>") {
  const DensityMatrix rho = DensityMatrix::validated(projector(basis_ket(8, 0)));
  const RVector f = features_of(rho);
  for (const char* z : {"IIZ", "IZI", "ZII", "IZZ", "ZIZ", "ZZI", "ZZZ"})
    CHECK(feature(f, z) == Catch::Approx(1.0).margin(1e-12));
  int nonzero = 0;
  for (int n = 0; n < 63; ++n)
    if (std::abs(f(n)) > 1e-12) ++nonzero;
  CHECK(nonzero == 7);
}

TEST_CASE("features_of GHZ state") {
  const DensityMatrix rho = DensityMatrix::validated(projector(ghz_ket()));
  const RVector f = features_of(rho);
  for (const char* p : {"ZZI", "ZIZ", "IZZ", "XXX"})
    CHECK(feature(f, p) == Catch::Approx(1.0).margin(1e-12));
  for (const char* p : {"XYY", "YXY", "YYX"})
    CHECK(feature(f, p) == Catch::Approx(-1.0).margin(1e-12));
  int nonzero = 0;
  for (int n = 0; n < 63; ++n)
    if (std::abs(f(n)) > 1e-12) ++nonzero;
  CHECK(nonzero == 7);
}

TEST_CASE("features_of W state") {
  const DensityMatrix rho = DensityMatrix::validated(projector(w_ket()));
  const RVector f = features_of(rho);
  CHECK(feature(f, "IIZ") == Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(feature(f, "IZI") == Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(feature(f, "ZII") == Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(feature(f, "ZZZ") == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("state_of_features reconstruction") {
  SECTION("all zeros gives the maximally mixed state") {
    const CMatrix m = state_of_features(RVector::Zero(63));
    CHECK((m - CMatrix::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("roundtrip on the GHZ projector") {
    const DensityMatrix rho = DensityMatrix::validated(projector(ghz_ket()));
    const CMatrix back = state_of_features(features_of(rho));
    CHECK((back - rho.mat()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("out-of-range feature vector reconstructs to a non-PSD matrix") {
    RVector f = RVector::Zero(63);
    f(PauliIndex::from_name("IIZ").flat() - 1) = 2.0;
    const CMatrix m = state_of_features(f);
    CHECK(std::abs(m.trace().real() - 1.0) < 1e-12);
    CHECK(max_hermiticity_violation(m) < 1e-14);
    CHECK(min_eigenvalue(m) < -0.1);
  }
}

TEST_CASE("partial_trace") {
  SECTION("trace A of |000>") {
    const DensityMatrix rho = DensityMatrix::validated(projector(basis_ket(8, 0)));
    const DensityMatrix red = partial_trace(rho, Subsystem::A);
    CHECK((red.mat() - projector(basis_ket(4, 0))).cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("trace C of GHZ gives an even classical mixture") {
    const DensityMatrix rho = DensityMatrix::validated(projector(ghz_ket()));
    const DensityMatrix red = partial_trace(rho, Subsystem::C);
    CMatrix expect = CMatrix::Zero(4, 4);
    expect(0, 0) = expect(3, 3) = 0.5;
    CHECK((red.mat() - expect).cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("trace B of a product state factorizes") {
    RngStream rng(7, 1);
    const DensityMatrix r1 = ma_mixed_state(2, 3, 1.0, rng);
    const DensityMatrix r2 = ma_mixed_state(2, 2, 1.0, rng);
    const DensityMatrix r3 = ma_mixed_state(2, 4, 1.0, rng);
    const DensityMatrix rho = DensityMatrix::validated(
        tensor_product(tensor_product(r1.mat(), r2.mat()), r3.mat()));
    const DensityMatrix red = partial_trace(rho, Subsystem::B);
    CHECK((red.mat() - tensor_product(r1.mat(), r3.mat())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("partial_transpose") {
  SECTION("product states stay PSD under any partial transpose") {
    RngStream rng(11, 2);
    const DensityMatrix rho = product_state(rng);
    for (Subsystem s : {Subsystem::A, Subsystem::B, Subsystem::C})
      CHECK(min_eigenvalue(partial_transpose(rho, s)) >= -1e-12);
  }
  SECTION("Bell state on two qubits has PT eigenvalue -1/2") {
    const DensityMatrix bell = DensityMatrix::validated(projector(bell_phi_plus()));
    CHECK(min_eigenvalue(partial_transpose(bell, Subsystem::B)) ==
          Catch::Approx(-0.5).margin(1e-12));
  }
  SECTION("Bell ⊗ |0> keeps the Bell spectrum on the A|BC cut") {
    CMatrix p0 = CMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    const DensityMatrix rho = DensityMatrix::validated(
        tensor_product(projector(bell_phi_plus()), p0));
    CHECK(min_eigenvalue(partial_transpose(rho, Subsystem::A)) ==
          Catch::Approx(-0.5).margin(1e-9));
  }
  SECTION("involution: applying the same transpose twice is the identity") {
    RngStream rng(3, 9);
    const DensityMatrix rho = ma_mixed_state(8, 10, 1.0, rng);
    for (Subsystem s : {Subsystem::A, Subsystem::B, Subsystem::C}) {
      const CMatrix pt = partial_transpose(rho, s);
      const CMatrix back = partial_transpose_qubit(pt, static_cast<int>(s), 3);
      CHECK((back - rho.mat()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("min_eigenvalue") {
  CHECK(min_eigenvalue(CMatrix::Identity(8, 8) / 8.0) == Catch::Approx(0.125).margin(1e-14));
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  d(2, 2) = 3.0;
  CHECK(min_eigenvalue(d) == Catch::Approx(-2.0).margin(1e-14));
  CHECK(min_eigenvalue(projector(ghz_ket())) == Catch::Approx(0.0).margin(1e-12));
  CMatrix nh = CMatrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(min_eigenvalue(nh), std::invalid_argument);
}

TEST_CASE("permute_qubits reorders the tensor factors") {
  RngStream rng(5, 4);
  const CMatrix a = haar_pure_state(2, rng).mat();
  const CMatrix b = ma_mixed_state(2, 3, 1.0, rng).mat();
  const CMatrix c = ma_mixed_state(2, 2, 1.0, rng).mat();
  const CMatrix abc = tensor_product(tensor_product(a, b), c);
  const CMatrix bac = tensor_product(tensor_product(b, a), c);
  CHECK((permute_qubits(abc, {1, 0, 2}) - bac).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("feature map properties on random valid states") {
  RngStream rng(2024, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 50));
    const DensityMatrix rho = ma_mixed_state(8, n, 1.0, rng);
    const RVector f = features_of(rho);

    // every Pauli expectation of a valid state lies in [-1, 1]
    CHECK(f.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);

    // roundtrip
    const CMatrix back = state_of_features(f);
    CHECK((back - rho.mat()).cwiseAbs().maxCoeff() < 1e-10);

    // Parseval: purity = (1 + sum f^2)/8
    CHECK(purity(rho) == Catch::Approx((1.0 + f.squaredNorm()) / 8.0).margin(1e-10));
  }
}

TEST_CASE("partial_trace of valid states stays a valid state") {
  RngStream rng(77, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const DensityMatrix rho = ma_mixed_state(8, static_cast<int>(rng.uniform_int(1, 50)), 1.0, rng);
    for (Subsystem s : {Subsystem::A, Subsystem::B, Subsystem::C})
      CHECK_NOTHROW(partial_trace(rho, s));
  }
}

TEST_CASE("DensityMatrix validation rejects bad inputs") {
  CMatrix m = CMatrix::Identity(8, 8) / 8.0;
  m(0, 1) = Complex(0.1, 0.0);  // not Hermitian
  CHECK_THROWS_AS(DensityMatrix::validated(m), std::invalid_argument);

  CMatrix t = CMatrix::Identity(8, 8);  // trace 8
  CHECK_THROWS_AS(DensityMatrix::validated(t), std::invalid_argument);

  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix::validated(neg), std::invalid_argument);

  CMatrix odd = CMatrix::Identity(3, 3) / 3.0;
  CHECK_THROWS_AS(DensityMatrix::validated(odd), std::invalid_argument);
}

#include <catch2/catch_amalgamated.hpp>

#include "qent/oracles.hpp"
#include "qent/qcore.hpp"
#include "qent/rng.hpp"
#include "qent/sampling.hpp"

using namespace qent;

TEST_CASE("haar_unitary is unitary and phase-fixed") {
  RngStream rng(1, 0);
  for (int d : {1, 2, 4, 8}) {
    const CMatrix u = haar_unitary(d, rng);
    CHECK((u.adjoint() * u - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
  }
  const CMatrix u1 = haar_unitary(1, rng);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("haar_unitary covers the Bloch sphere uniformly", "[heavy]") {
  RngStream rng(12345, 0);
  double mx = 0, my = 0, mz = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const CMatrix u = haar_unitary(2, rng);
    const CVector psi = u.col(0);  // U|0>
    const Complex a = psi(0), b = psi(1);
    mx += 2.0 * (std::conj(a) * b).real();
    my += 2.0 * (std::conj(a) * b).imag();
    mz += std::norm(a) - std::norm(b);
  }
  CHECK(std::abs(mx / n) < 0.02);
  CHECK(std::abs(my / n) < 0.02);
  CHECK(std::abs(mz / n) < 0.02);
}

TEST_CASE("ma_mixed_state") {
  RngStream rng(2, 0);
  SECTION("single component is pure") {
    for (int t = 0; t < 20; ++t)
      CHECK(purity(ma_mixed_state(8, 1, 1.0, rng)) == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("weights form a probability vector") {
    const auto w = rng.dirichlet(50, 1.0);
    double sum = 0.0;
    for (double x : w) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("purity decreases in beta on average, approaching 1/8") {
    double p_low = 0.0, p_high = 0.0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
      p_low += purity(ma_mixed_state(8, 50, 1.0, rng));
      p_high += purity(ma_mixed_state(8, 50, 100.0, rng));
    }
    p_low /= trials;
    p_high /= trials;
    CHECK(p_high < p_low);
    CHECK(p_high > 0.125);
    CHECK(p_high < 0.16);
  }
  SECTION("component count is validated") {
    CHECK_THROWS_AS(ma_mixed_state(8, 0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(ma_mixed_state(8, 51, 1.0, rng), std::invalid_argument);
  }
}

TEST_CASE("product_state factorizes its Pauli correlators") {
  RngStream rng(3, 0);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = product_state(rng);
    const RVector f = features_of(rho);
    auto get = [&](int i, int j, int k) {
      const int n = 16 * i + 4 * j + k;
      return n == 0 ? 1.0 : f(n - 1);
    };
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          if (i == 0 && j == 0 && k == 0) continue;
          CHECK(get(i, j, k) ==
                Catch::Approx(get(i, 0, 0) * get(0, j, 0) * get(0, 0, k)).margin(1e-10));
        }
  }
}

TEST_CASE("separable states pass PPT on every bipartition", "[heavy]") {
  RngStream rng(4, 0);
  for (int t = 0; t < 10000; ++t) {
    const DensityMatrix rho = separable_state(rng);
    for (Subsystem s : {Subsystem::A, Subsystem::B, Subsystem::C}) CHECK(ppt_check(rho, s).is_ppt);
  }
}

TEST_CASE("two_qubit_entangled meets its acceptance condition") {
  RngStream rng(5, 0);
  for (int t = 0; t < 200; ++t) {
    const DensityMatrix rho = two_qubit_entangled(rng);
    CHECK(min_eigenvalue(partial_transpose(rho, Subsystem::B)) < kNptThreshold);
  }
}

TEST_CASE("biseparable embedding has the expected PT signature") {
  // single term on the A|BC cut with a Bell pair on BC: PPT along A|BC,
  // NPT along B|AC and C|AB
  RngStream rng(6, 0);
  CVector bell = CVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const CMatrix single = haar_pure_state(2, rng).mat();
  const DensityMatrix rho =
      DensityMatrix::validated(tensor_product(single, projector(bell)));
  CHECK(ppt_check(rho, Subsystem::A).is_ppt);
  CHECK_FALSE(ppt_check(rho, Subsystem::B).is_ppt);
  CHECK_FALSE(ppt_check(rho, Subsystem::C).is_ppt);
}

TEST_CASE("biseparable and classB states respect the witness hierarchy", "[heavy]") {
  RngStream rng(7, 0);
  for (int t = 0; t < 2000; ++t) {
    const DensityMatrix bs = biseparable_state(rng);
    CHECK(witness_value(bs, Witness::GHZ) >= -1e-9);
    CHECK(witness_value(bs, Witness::W) >= -1e-9);
    const DensityMatrix cb = classB_state(rng);
    CHECK(witness_value(cb, Witness::W) >= -1e-9);
  }
}

TEST_CASE("rotated_class_state preserves spectrum and purity") {
  RngStream rng(8, 0);
  const DensityMatrix w = DensityMatrix::validated(projector(w_ket()));
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rot = rotated_class_state(w, rng);
    CHECK(purity(rot) == Catch::Approx(1.0).margin(1e-10));
  }
  const DensityMatrix mixed = ma_mixed_state(8, 12, 1.0, rng);
  Eigen::SelfAdjointEigenSolver<CMatrix> es1(mixed.mat(), Eigen::EigenvaluesOnly);
  const DensityMatrix rot = rotated_class_state(mixed, rng);
  Eigen::SelfAdjointEigenSolver<CMatrix> es2(rot.mat(), Eigen::EigenvaluesOnly);
  CHECK((es1.eigenvalues() - es2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("werner_w_state labels flip exactly at alpha_c = 3/7") {
  CHECK(werner_w_state(0.0).second == 0);
  CHECK(werner_w_state(3.0 / 7.0).second == 0);
  CHECK(werner_w_state(3.0 / 7.0 - 1e-6).second == 0);
  CHECK(werner_w_state(3.0 / 7.0 + 1e-6).second == 1);
  CHECK(werner_w_state(0.9).second == 1);
  CHECK(werner_w_state(1.0).second == 1);
  CHECK_THROWS_AS(werner_w_state(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(werner_w_state(1.1), std::invalid_argument);

  // alpha = 0 is the maximally mixed state
  const auto [rho, label] = werner_w_state(0.0);
  CHECK((rho.mat() - CMatrix::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(label == 0);
}

TEST_CASE("ghz_w_mixture labels flip exactly at eps_c = 0.708") {
  CHECK(ghz_w_mixture(0.0).second == 1);
  CHECK(ghz_w_mixture(0.708 - 1e-6).second == 1);
  CHECK(ghz_w_mixture(0.708).second == 0);
  CHECK(ghz_w_mixture(1.0).second == 0);
  CHECK_THROWS_AS(ghz_w_mixture(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(ghz_w_mixture(1.1), std::invalid_argument);

  const auto [pure_ghz, l1] = ghz_w_mixture(0.0);
  CHECK((pure_ghz.mat() - projector(ghz_ket())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(l1 == 1);
  const auto [pure_w, l0] = ghz_w_mixture(1.0);
  CHECK((pure_w.mat() - projector(w_ket())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(l0 == 0);
}

TEST_CASE("build_dataset is deterministic, balanced and schema-correct") {
  const LabeledDataset a = build_dataset(DatasetKind::B, 100, 7);
  const LabeledDataset b = build_dataset(DatasetKind::B, 100, 7, 2);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.features.cols() == 63);
  CHECK(a.rows() == 100);
  CHECK(a.meta.class_counts.at(0) == 50);
  CHECK(a.meta.class_counts.at(1) == 50);

  const LabeledDataset c = build_dataset(DatasetKind::Cascade4, 401, 9);
  long counts[4] = {0, 0, 0, 0};
  for (int l : c.labels) counts[l]++;
  for (int k = 0; k < 4; ++k) CHECK(std::abs(counts[k] - 100) <= 1);

  CHECK_THROWS_AS(build_dataset(DatasetKind::B, 1, 7), std::invalid_argument);
}

TEST_CASE("dataset rows decode back to valid states") {
  for (DatasetKind kind : {DatasetKind::B, DatasetKind::W, DatasetKind::GHZ}) {
    const LabeledDataset ds = build_dataset(kind, 40, 11);
    for (long i = 0; i < ds.rows(); ++i)
      CHECK_NOTHROW(DensityMatrix::validated(state_of_features(ds.features.row(i).transpose())));
  }
}

TEST_CASE("dataset GHZ label-0 rows stay inside the W class", "[heavy]") {
  // witness check on the class-W side of the GHZ dataset
  const LabeledDataset ds = build_dataset(DatasetKind::GHZ, 2000, 13, 2);
  for (long i = 0; i < ds.rows(); ++i) {
    if (ds.labels[i] != 0) continue;
    const DensityMatrix rho =
        DensityMatrix::validated(state_of_features(ds.features.row(i).transpose()));
    CHECK(witness_value(rho, Witness::GHZ) >= -1e-9);
  }
}

TEST_CASE("RngStream streams are reproducible and independent") {
  RngStream a(42, make_stream(StreamDomain::DatasetB, 5));
  RngStream b(42, make_stream(StreamDomain::DatasetB, 5));
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  RngStream c(42, make_stream(StreamDomain::DatasetB, 6));
  bool all_equal = true;
  RngStream a2(42, make_stream(StreamDomain::DatasetB, 5));
  for (int i = 0; i < 16; ++i) all_equal = all_equal && (a2.uniform() == c.uniform());
  CHECK_FALSE(all_equal);
}

#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace qent {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Feature/sample matrices are row-major: one row per state, contiguous.
using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kNumFeatures = 63;
inline constexpr const char* kGeneratorVersion = "1";

// Four-class labels of the nested hierarchy S ⊆ B ⊆ W ⊆ GHZ.
enum class EntClass : int { S = 0, BminusS = 1, WminusB = 2, GHZminusW = 3 };

inline const char* ent_class_name(EntClass c) {
  switch (c) {
    case EntClass::S: return "S";
    case EntClass::BminusS: return "B\\S";
    case EntClass::WminusB: return "W\\B";
    case EntClass::GHZminusW: return "GHZ\\W";
  }
  return "?";
}

}  // namespace qent

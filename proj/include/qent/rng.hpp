#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "qent/types.hpp"

namespace qent {

// A root seed plus a stream id. Every independent consumer of randomness
// (dataset row, split shuffle, importance repeat, ...) owns its own stream,
// so any part of an experiment can be regenerated without replaying the rest.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Stream ids are laid out as (domain << 48) | index. The domain tags below
// are the complete list used by the pipeline; indices are row numbers,
// grid-cell numbers, or (feature * 1024 + repeat) for importance runs.
enum class StreamDomain : std::uint64_t {
  DatasetB = 1,
  DatasetW = 2,
  DatasetGHZ = 3,
  Dataset4 = 4,
  Split = 5,
  Trainer = 6,
  Importance = 7,
  Ood = 8,
  Tune = 9,
  Noise = 10,
  Misc = 11,
};

inline std::uint64_t make_stream(StreamDomain d, std::uint64_t index) {
  return (static_cast<std::uint64_t>(d) << 48) | (index & 0xFFFFFFFFFFFFull);
}

// splitmix64 finalizer; decorrelates (seed, stream) pairs before feeding
// the engine so that neighboring stream ids give unrelated sequences.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 0x632BE59BD9B4E019ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  explicit RngStream(RngSeed s) : eng_(mix_seed(s.seed, s.stream)) {}
  RngStream(std::uint64_t seed, std::uint64_t stream) : RngStream(RngSeed{seed, stream}) {}

  double uniform() {  // [0, 1)
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  // Inclusive on both ends.
  long uniform_int(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(eng_);
  }
  bool coin() { return uniform_int(0, 1) == 1; }
  double normal() {
    return std::normal_distribution<double>(0.0, 1.0)(eng_);
  }
  double gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(eng_);
  }

  // Symmetric Dirichlet(beta, ..., beta) on the (n-1)-simplex.
  std::vector<double> dirichlet(int n, double beta) {
    if (n < 1 || beta <= 0.0) throw std::invalid_argument("dirichlet: need n >= 1, beta > 0");
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& x : w) {
      x = gamma(beta);
      sum += x;
    }
    if (sum <= 0.0) {  // all-underflow corner; fall back to uniform weights
      for (auto& x : w) x = 1.0 / n;
      return w;
    }
    for (auto& x : w) x /= sum;
    return w;
  }

  // Standard complex Gaussian vector (Ginibre column).
  CVector complex_gaussian(int d) {
    CVector v(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(normal(), normal()) / std::sqrt(2.0);
    return v;
  }

  // In-place Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<long>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qent

#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace llv::rng {

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream tags keep weight, data and basis randomness disjoint.
enum class Tag : std::uint64_t {
  LinearWeights = 1,
  ToyWeights = 2,
  Concept = 3,
  ConceptSplit = 4,
  OperatingSplit = 5,
  EvalSplit = 6,
  RandomBasis = 7,
  KrylovPadding = 8,
  Baseline = 9,
  Task = 10,
};

constexpr std::uint64_t derive(std::uint64_t seed, Tag tag, std::uint64_t index = 0) noexcept {
  return mix(mix(mix(seed) ^ static_cast<std::uint64_t>(tag)) ^ index);
}

inline std::mt19937_64 engine(std::uint64_t seed, Tag tag, std::uint64_t index = 0) {
  return std::mt19937_64(derive(seed, tag, index));
}

inline Eigen::MatrixXd gaussian(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                                double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  // Fill row-major so the draw order does not depend on Eigen's storage order.
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scale * dist(gen);
  return m;
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * dist(gen);
  return v;
}

}  // namespace llv::rng

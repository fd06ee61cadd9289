#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "llv/plant.hpp"

namespace llv {

struct LabeledPrompt {
  Eigen::MatrixXd embedding;  // T x H
  int label = 0;              // 0 or 1
};

using PromptSet = std::vector<LabeledPrompt>;

/// Per-class prompt counts for each split.
struct SplitSizes {
  std::size_t n_concept = 400;
  std::size_t n_operating = 200;
  std::size_t n_eval = 200;

  bool operator==(const SplitSizes&) const = default;
};

/// Three disjoint, exactly class-balanced prompt splits with a planted concept.
struct PromptBundle {
  PromptSet concept_split;
  PromptSet operating_split;
  PromptSet eval_split;
  SplitSizes sizes;
  std::uint64_t seed = 0;
  Eigen::VectorXd planted;  // unit concept vector s
};

/// Seeded Gaussian T x H prompts. Label-1 prompts get +strength * s added to the
/// last row, label-0 prompts get -strength * s. Labels alternate 1, 0, 1, 0, ...
PromptBundle generate_bundle(const PlantSpec& spec, const SplitSizes& sizes,
                             double signal_strength, std::uint64_t seed);

/// The planted unit vector for a given (width, seed), without generating prompts.
Eigen::VectorXd planted_concept(std::size_t hidden_width, std::uint64_t seed);

std::vector<Eigen::MatrixXd> embeddings(const PromptSet& set);
std::vector<int> labels(const PromptSet& set);

}  // namespace llv

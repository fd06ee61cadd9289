#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "llv/localdyn.hpp"
#include "llv/plant.hpp"
#include "llv/taskgen.hpp"

namespace llv {

/// Unit concept directions v_0..v_L, one per depth. Each v_l points from the
/// class-0 mean toward the class-1 mean of readout states at depth l.
struct ConceptDirections {
  std::vector<Eigen::VectorXd> dirs;

  std::size_t depth() const noexcept { return dirs.empty() ? 0 : dirs.size() - 1; }
  const Eigen::VectorXd& at(std::size_t depth) const { return dirs.at(depth); }

  /// (L + 1) x H matrix, one direction per row.
  Eigen::MatrixXd as_matrix() const;
};

/// Below this mean-difference norm a depth is reported as degenerate.
inline constexpr double kDegenerateConceptNorm = 1e-10;

/// Normalized class-mean differences from precomputed trajectories.
ConceptDirections estimate_directions(std::span<const OperatingTrajectory> trajs,
                                      std::span<const int> labels);

/// Runs every concept prompt once and estimates the directions.
ConceptDirections estimate_directions(const Plant& plant, const PromptSet& concept_split);

/// y = v_L . x_L
double concept_score(const Eigen::VectorXd& final_state, const ConceptDirections& dirs);
double concept_score(const Plant& plant, const Eigen::MatrixXd& prompt, const ConceptDirections& dirs);

}  // namespace llv

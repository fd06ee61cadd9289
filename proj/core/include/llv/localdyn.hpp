#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "llv/plant.hpp"

namespace llv {

/// Unperturbed depth trajectory h_0..h_L for one prompt, plus the readout-row
/// states x_0..x_L extracted from it.
struct OperatingTrajectory {
  std::vector<Eigen::MatrixXd> states;       // L + 1 matrices, T x H
  std::vector<Eigen::VectorXd> last_states;  // L + 1 vectors, length H
  Eigen::Index last_index = 0;

  std::size_t depth() const noexcept { return states.empty() ? 0 : states.size() - 1; }
};

struct FdConfig {
  double step = 2e-3;
  void validate() const;
};

OperatingTrajectory run_trajectory(const Plant& plant, const Eigen::MatrixXd& prompt);

/// Runs trajectories for many prompts, in parallel when workers are configured.
std::vector<OperatingTrajectory> run_trajectories(const Plant& plant,
                                                  std::span<const Eigen::MatrixXd> prompts);

/// Frozen-context map at `layer`: the block is applied to the operating hidden
/// matrix with only its readout row replaced by `x`; returns the new readout row.
Eigen::VectorXd frozen_step(const Plant& plant, const OperatingTrajectory& traj, std::size_t layer,
                            const Eigen::VectorXd& x);

/// Central-difference approximation of A_layer * w, with the step applied
/// along w / |w| and the result rescaled by |w|.
Eigen::VectorXd jacobian_action(const Plant& plant, const OperatingTrajectory& traj,
                                std::size_t layer, const Eigen::VectorXd& w, const FdConfig& fd);

/// Mean of jacobian_action over the given trajectories.
Eigen::VectorXd mean_jacobian_action(const Plant& plant, std::span<const OperatingTrajectory> trajs,
                                     std::size_t layer, const Eigen::VectorXd& w,
                                     const FdConfig& fd);

}  // namespace llv

#include "llv/localdyn.hpp"

#include <string>

#include "llv/error.hpp"
#include "llv/parallel.hpp"

namespace llv {

void FdConfig::validate() const {
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
}

OperatingTrajectory run_trajectory(const Plant& plant, const Eigen::MatrixXd& prompt) {
  plant.check_shape(prompt);
  OperatingTrajectory traj;
  traj.last_index = plant.last_index();
  traj.states.reserve(plant.depth() + 1);
  traj.states.push_back(prompt);
  for (std::size_t l = 0; l < plant.depth(); ++l)
    traj.states.push_back(plant.forward_block(l, traj.states.back()));
  traj.last_states.reserve(traj.states.size());
  for (const auto& h : traj.states) traj.last_states.push_back(h.row(traj.last_index).transpose());
  return traj;
}

std::vector<OperatingTrajectory> run_trajectories(const Plant& plant,
                                                  std::span<const Eigen::MatrixXd> prompts) {
  std::vector<OperatingTrajectory> out(prompts.size());
  parallel_for(prompts.size(), [&](std::size_t i) { out[i] = run_trajectory(plant, prompts[i]); });
  return out;
}

Eigen::VectorXd frozen_step(const Plant& plant, const OperatingTrajectory& traj, std::size_t layer,
                            const Eigen::VectorXd& x) {
  if (layer >= traj.depth() || layer >= plant.depth())
    throw InvalidArgument("frozen_step layer " + std::to_string(layer) + " out of range");
  if (x.size() != static_cast<Eigen::Index>(plant.width()))
    throw InvalidArgument("frozen_step state has wrong width");
  Eigen::MatrixXd h = traj.states[layer];
  h.row(traj.last_index) = x.transpose();
  return plant.forward_block(layer, h).row(traj.last_index).transpose();
}

Eigen::VectorXd jacobian_action(const Plant& plant, const OperatingTrajectory& traj,
                                std::size_t layer, const Eigen::VectorXd& w, const FdConfig& fd) {
  fd.validate();
  const double norm = w.norm();
  if (!(norm > 0.0)) throw InvalidArgument("jacobian_action needs a nonzero direction");
  const Eigen::VectorXd unit = w / norm;
  const Eigen::VectorXd& x = traj.last_states.at(layer);
  const Eigen::VectorXd plus = frozen_step(plant, traj, layer, x + fd.step * unit);
  const Eigen::VectorXd minus = frozen_step(plant, traj, layer, x - fd.step * unit);
  return (plus - minus) / (2.0 * fd.step) * norm;
}

Eigen::VectorXd mean_jacobian_action(const Plant& plant, std::span<const OperatingTrajectory> trajs,
                                     std::size_t layer, const Eigen::VectorXd& w,
                                     const FdConfig& fd) {
  if (trajs.empty()) throw InvalidArgument("mean_jacobian_action over an empty prompt set");
  std::vector<Eigen::VectorXd> actions(trajs.size());
  parallel_for(trajs.size(),
               [&](std::size_t i) { actions[i] = jacobian_action(plant, trajs[i], layer, w, fd); });
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(w.size());
  for (const auto& a : actions) sum += a;
  return sum / static_cast<double>(trajs.size());
}

}  // namespace llv

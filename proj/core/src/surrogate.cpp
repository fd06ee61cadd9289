#include "llv/surrogate.hpp"

#include <algorithm>

#include "llv/error.hpp"
#include "llv/parallel.hpp"

namespace llv {

namespace {

bool column_is(const Eigen::MatrixXd& p, const Eigen::VectorXd& v) {
  return p.cols() > 0 && p.col(0).size() == v.size() &&
         std::equal(v.data(), v.data() + v.size(), p.col(0).data());
}

}  // namespace

PromptReducedModel identify(const Plant& plant, const OperatingTrajectory& traj,
                            const ReducedBasis& basis, const ConceptDirections& dirs,
                            const FdConfig& fd) {
  const std::size_t L = plant.depth();
  if (basis.depth() != L || traj.depth() != L || dirs.depth() != L)
    throw InvalidArgument("basis, trajectory and directions must share the plant depth");

  PromptReducedModel model;
  model.a_bars.reserve(L);
  model.b_bars.reserve(L);
  for (std::size_t l = 0; l < L; ++l) {
    const Eigen::MatrixXd& p_in = basis.mats[l];
    const Eigen::MatrixXd& p_out = basis.mats[l + 1];
    if (p_in.rows() != static_cast<Eigen::Index>(plant.width()))
      throw InvalidArgument("basis width does not match plant");
    Eigen::MatrixXd a_bar(p_out.cols(), p_in.cols());
    for (Eigen::Index j = 0; j < p_in.cols(); ++j)
      a_bar.col(j) = p_out.transpose() * jacobian_action(plant, traj, l, p_in.col(j), fd);
    if (column_is(p_in, dirs.at(l))) {
      model.b_bars.push_back(a_bar.col(0));
    } else {
      model.b_bars.push_back(p_out.transpose() * jacobian_action(plant, traj, l, dirs.at(l), fd));
    }
    model.a_bars.push_back(std::move(a_bar));
  }
  return model;
}

LlvSurrogate identify_surrogate(const Plant& plant, std::span<const OperatingTrajectory> operating,
                                const ReducedBasis& basis, const ConceptDirections& dirs,
                                const FdConfig& fd) {
  LlvSurrogate s;
  s.reduced_dim = basis.reduced_dim;
  s.readout = basis.mats.back().transpose() * dirs.dirs.back();
  s.prompts.resize(operating.size());
  parallel_for(operating.size(),
               [&](std::size_t i) { s.prompts[i] = identify(plant, operating[i], basis, dirs, fd); });
  return s;
}

Eigen::VectorXd prompt_gains(const PromptReducedModel& model, const Eigen::VectorXd& readout) {
  const std::size_t L = model.b_bars.size();
  Eigen::VectorXd gains(static_cast<Eigen::Index>(L));
  Eigen::VectorXd w = readout;
  for (std::size_t k = L; k-- > 0;) {
    gains(static_cast<Eigen::Index>(k)) = w.dot(model.b_bars[k]);
    w = model.a_bars[k].transpose() * w;
  }
  return gains;
}

GainProfile predict_gains(const LlvSurrogate& surrogate) {
  if (surrogate.prompts.empty()) throw InvalidArgument("surrogate has no identified prompts");
  const auto n = static_cast<Eigen::Index>(surrogate.prompts.size());
  const auto L = static_cast<Eigen::Index>(surrogate.prompts.front().b_bars.size());
  GainProfile profile;
  profile.per_prompt_predicted.resize(n, L);
  for (Eigen::Index i = 0; i < n; ++i)
    profile.per_prompt_predicted.row(i) =
        prompt_gains(surrogate.prompts[static_cast<std::size_t>(i)], surrogate.readout).transpose();
  profile.predicted = profile.per_prompt_predicted.colwise().mean().transpose();
  return profile;
}

}  // namespace llv

#include "llv/concept.hpp"

#include <string>

#include "llv/error.hpp"

namespace llv {

namespace {

// Recursive halving keeps the sum of a list repeated twice exactly 2x the sum of
// the list, so duplicated concept splits give bit-identical means.
Eigen::VectorXd pairwise_sum(std::span<const Eigen::VectorXd* const> xs) {
  if (xs.size() == 1) return *xs.front();
  const std::size_t mid = xs.size() / 2;
  return pairwise_sum(xs.first(mid)) + pairwise_sum(xs.subspan(mid));
}

}  // namespace

Eigen::MatrixXd ConceptDirections::as_matrix() const {
  if (dirs.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dirs.size()), dirs.front().size());
  for (std::size_t l = 0; l < dirs.size(); ++l) m.row(static_cast<Eigen::Index>(l)) = dirs[l].transpose();
  return m;
}

ConceptDirections estimate_directions(std::span<const OperatingTrajectory> trajs,
                                      std::span<const int> labels) {
  if (trajs.empty()) throw InvalidArgument("concept split is empty");
  if (trajs.size() != labels.size()) throw InvalidArgument("trajectory/label count mismatch");

  const std::size_t depth_count = trajs.front().last_states.size();
  const Eigen::Index H = trajs.front().last_states.front().size();
  std::size_t n1 = 0;
  std::size_t n0 = 0;
  for (int y : labels) {
    if (y == 1) ++n1;
    else if (y == 0) ++n0;
    else throw InvalidArgument("labels must be 0 or 1");
  }
  if (n1 == 0 || n0 == 0) throw InvalidArgument("concept split needs both classes");

  ConceptDirections out;
  out.dirs.reserve(depth_count);
  for (std::size_t l = 0; l < depth_count; ++l) {
    std::vector<const Eigen::VectorXd*> class1;
    std::vector<const Eigen::VectorXd*> class0;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      const auto& x = trajs[i].last_states[l];
      if (x.size() != H) throw InvalidArgument("concept states have mixed widths");
      (labels[i] == 1 ? class1 : class0).push_back(&x);
    }
    const Eigen::VectorXd diff = pairwise_sum(class1) / static_cast<double>(n1) -
                                 pairwise_sum(class0) / static_cast<double>(n0);
    const double norm = diff.norm();
    if (!(norm >= kDegenerateConceptNorm))
      throw DegenerateConcept(l, "degenerate concept direction at depth " + std::to_string(l));
    out.dirs.push_back(diff / norm);
  }
  return out;
}

ConceptDirections estimate_directions(const Plant& plant, const PromptSet& concept_split) {
  const auto prompts = embeddings(concept_split);
  const auto trajs = run_trajectories(plant, prompts);
  const auto ys = labels(concept_split);
  return estimate_directions(trajs, ys);
}

double concept_score(const Eigen::VectorXd& final_state, const ConceptDirections& dirs) {
  return dirs.dirs.back().dot(final_state);
}

double concept_score(const Plant& plant, const Eigen::MatrixXd& prompt, const ConceptDirections& dirs) {
  return concept_score(run_trajectory(plant, prompt).last_states.back(), dirs);
}

}  // namespace llv

#include <gtest/gtest.h>

#include <algorithm>

#include "llv/concept.hpp"
#include "llv/error.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace llv {
namespace {

using test::spec;

OperatingTrajectory fake_trajectory(std::vector<Eigen::VectorXd> last_states) {
  OperatingTrajectory t;
  for (const auto& x : last_states) {
    t.states.push_back(x.transpose());
    t.last_states.push_back(x);
  }
  return t;
}

TEST(ConceptTest, TwoPromptDirectionIsNormalizedDifference) {
  const Eigen::VectorXd a = test::random_vector(6, 1), b = test::random_vector(6, 2);
  const Eigen::VectorXd c = test::random_vector(6, 3), d = test::random_vector(6, 4);
  const std::vector<OperatingTrajectory> trajs{fake_trajectory({a, c}), fake_trajectory({b, d})};
  const std::vector<int> labels{1, 0};
  const auto dirs = estimate_directions(trajs, labels);
  ASSERT_EQ(dirs.dirs.size(), 2u);
  EXPECT_LT((dirs.at(0) - (a - b) / (a - b).norm()).norm(), 1e-15);
  EXPECT_LT((dirs.at(1) - (c - d) / (c - d).norm()).norm(), 1e-15);
}

TEST(ConceptTest, RecoversPlantedSignalOnLinearPlant) {
  const auto s = spec(PlantKind::Linear, 4, 16, 1, 3);
  const Plant plant = build_plant(s);
  const auto bundle = generate_bundle(s, {400, 4, 4}, 1.0, 11);
  const auto dirs = estimate_directions(plant, bundle.concept_split);
  EXPECT_GE(dirs.at(0).dot(bundle.planted), 0.9);
}

TEST(ConceptTest, DuplicatingPromptsLeavesDirectionsUnchanged) {
  const auto s = spec(PlantKind::ToyTransformer, 3, 8, 3, 1);
  const Plant plant = build_plant(s);
  const auto bundle = generate_bundle(s, {6, 4, 4}, 1.0, 2);
  PromptSet doubled = bundle.concept_split;
  doubled.insert(doubled.end(), bundle.concept_split.begin(), bundle.concept_split.end());
  const auto once = estimate_directions(plant, bundle.concept_split);
  const auto twice = estimate_directions(plant, doubled);
  for (std::size_t l = 0; l < once.dirs.size(); ++l) EXPECT_EQ(once.at(l), twice.at(l)) << "depth " << l;
}

TEST(ConceptTest, UnitNormSignConventionAndPermutationInvariance) {
  const auto s = spec(PlantKind::Blend, 4, 8, 2, 5, 0.5);
  const Plant plant = build_plant(s);
  const auto bundle = generate_bundle(s, {10, 4, 4}, 0.8, 6);
  const auto dirs = estimate_directions(plant, bundle.concept_split);

  PromptSet shuffled = bundle.concept_split;
  std::mt19937_64 gen(3);
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const auto permuted = estimate_directions(plant, shuffled);

  for (std::size_t l = 0; l < dirs.dirs.size(); ++l) {
    EXPECT_NEAR(dirs.at(l).norm(), 1.0, 1e-12);
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(8), m0 = Eigen::VectorXd::Zero(8);
    for (const auto& p : bundle.concept_split) {
      const auto x = run_trajectory(plant, p.embedding).last_states[l];
      (p.label == 1 ? m1 : m0) += x;
    }
    EXPECT_GE((m1 - m0).dot(dirs.at(l)), 0.0);
    EXPECT_LT((permuted.at(l) - dirs.at(l)).norm(), 1e-12);
  }
}

TEST(ConceptTest, DegenerateDirectionNamesDepth) {
  const Eigen::VectorXd a = test::random_vector(4, 1), b = test::random_vector(4, 2);
  const std::vector<OperatingTrajectory> trajs{fake_trajectory({a, b}), fake_trajectory({b, b})};
  const std::vector<int> labels{1, 0};
  try {
    estimate_directions(trajs, labels);
    FAIL() << "expected DegenerateConcept";
  } catch (const DegenerateConcept& e) {
    EXPECT_EQ(e.depth(), 1u);
  }
}

TEST(ConceptTest, RejectsMissingClassOrEmptySplit) {
  const std::vector<OperatingTrajectory> trajs{fake_trajectory({test::random_vector(4, 1)})};
  const std::vector<int> labels{1};
  EXPECT_THROW(estimate_directions(trajs, labels), InvalidArgument);
  EXPECT_THROW(estimate_directions(std::span<const OperatingTrajectory>{}, std::span<const int>{}), InvalidArgument);
}

TEST(ConceptTest, ScoreIsProjectionOnFinalDirection) {
  ConceptDirections dirs;
  Eigen::VectorXd v = test::random_vector(5, 1);
  v.normalize();
  dirs.dirs = {v, v};
  EXPECT_NEAR(concept_score(v, dirs), 1.0, 1e-15);
  Eigen::VectorXd orth = test::random_vector(5, 2);
  orth -= orth.dot(v) * v;
  EXPECT_NEAR(concept_score(orth, dirs), 0.0, 1e-15);
  const Eigen::VectorXd x = test::random_vector(5, 3), delta = test::random_vector(5, 4);
  EXPECT_NEAR(concept_score(x + delta, dirs) - concept_score(x, dirs), v.dot(delta), 1e-14);
}

TEST(ConceptTest, ScoreMatchesOracleForwardPass) {
  const auto s = spec(PlantKind::Linear, 3, 8, 2, 4);
  const Plant plant = build_plant(s);
  const auto bundle = generate_bundle(s, {8, 4, 4}, 1.0, 1);
  const auto dirs = estimate_directions(plant, bundle.concept_split);
  const auto& prompt = bundle.eval_split[0].embedding;
  const Eigen::MatrixXd final_h = oracle::forward(plant, prompt);
  EXPECT_NEAR(concept_score(plant, prompt, dirs), dirs.dirs.back().dot(final_h.row(1).transpose()), 1e-12);
}

}  // namespace
}  // namespace llv

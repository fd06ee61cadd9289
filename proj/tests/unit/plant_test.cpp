#include <gtest/gtest.h>

#include "llv/error.hpp"
#include "llv/plant.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace llv {
namespace {

using test::random_matrix;
using test::spec;

TEST(PlantTest, EqualSpecsBuildIdenticalPlants) {
  const auto s = spec(PlantKind::Linear, 4, 8, 1, 7);
  const Plant a = build_plant(s), b = build_plant(s);
  const auto x = random_matrix(1, 8, 1);
  for (std::size_t l = 0; l < 4; ++l) EXPECT_EQ(a.forward_block(l, x), b.forward_block(l, x));

  const auto t = spec(PlantKind::ToyTransformer, 3, 8, 4, 11);
  const Plant c = build_plant(t), d = build_plant(t);
  const auto y = random_matrix(4, 8, 2);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(c.forward_block(l, y), d.forward_block(l, y));
}

TEST(PlantTest, BlendAtGammaZeroIsTheLinearPlant) {
  const Plant lin = build_plant(spec(PlantKind::Linear, 3, 8, 3, 5));
  const Plant blend = build_plant(spec(PlantKind::Blend, 3, 8, 3, 5, 0.0));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto x = random_matrix(3, 8, s);
    for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(blend.forward_block(l, x), lin.forward_block(l, x));
  }
}

TEST(PlantTest, BlendAtGammaOneIsTheToyPlant) {
  const Plant toy = build_plant(spec(PlantKind::ToyTransformer, 3, 8, 3, 5));
  const Plant blend = build_plant(spec(PlantKind::Blend, 3, 8, 3, 5, 1.0));
  const auto x = random_matrix(3, 8, 9);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(blend.forward_block(l, x), toy.forward_block(l, x));
}

TEST(PlantTest, BlendIsContinuousInGamma) {
  const auto x = random_matrix(3, 8, 4);
  const Plant at = build_plant(spec(PlantKind::Blend, 2, 8, 3, 1, 0.3));
  const Plant near = build_plant(spec(PlantKind::Blend, 2, 8, 3, 1, 0.3 + 1e-9));
  EXPECT_LT((at.forward_block(0, x) - near.forward_block(0, x)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(PlantTest, ToyForwardMatchesStraightLineOracle) {
  const Plant plant = build_plant(spec(PlantKind::ToyTransformer, 2, 8, 3, 0));
  const auto x = random_matrix(3, 8, 123);
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < 2; ++l) h = plant.forward_block(l, h);
  EXPECT_LT(test::max_rel_diff(h, oracle::forward(plant, x)), 1e-12);
}

TEST(PlantTest, BlendForwardMatchesStraightLineOracle) {
  const Plant plant = build_plant(spec(PlantKind::Blend, 3, 8, 4, 2, 0.4));
  const auto x = random_matrix(4, 8, 5);
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < 3; ++l) h = plant.forward_block(l, h);
  EXPECT_LT(test::max_rel_diff(h, oracle::forward(plant, x)), 1e-12);
}

TEST(PlantTest, LinearBlockOfZeroIsZero) {
  const Plant plant = build_plant(spec(PlantKind::Linear, 2, 8, 2, 3));
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 8);
  EXPECT_EQ(plant.forward_block(0, zero), zero);
}

TEST(PlantTest, LinearBlockIsAffine) {
  const Plant plant = build_plant(spec(PlantKind::Linear, 2, 8, 2, 3));
  const auto a = random_matrix(2, 8, 1), b = random_matrix(2, 8, 2);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 8);
  const Eigen::MatrixXd lhs = plant.forward_block(1, a + b);
  const Eigen::MatrixXd rhs = plant.forward_block(1, a) + plant.forward_block(1, b) - plant.forward_block(1, zero);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PlantTest, ForwardBlockIsPure) {
  const Plant plant = build_plant(spec(PlantKind::ToyTransformer, 2, 8, 4, 3));
  const auto x = random_matrix(4, 8, 8);
  const auto first = plant.forward_block(1, x);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(plant.forward_block(1, x), first);
}

class CausalityTest : public ::testing::TestWithParam<PlantKind> {};

// Perturbing row j may only change output rows >= j.
TEST_P(CausalityTest, PerturbingRowOnlyAffectsLaterRows) {
  const Plant plant = build_plant(spec(GetParam(), 2, 8, 4, 17, 0.5));
  const auto x = random_matrix(4, 8, 21);
  for (std::size_t l = 0; l < 2; ++l) {
    const Eigen::MatrixXd base = plant.forward_block(l, x);
    for (Eigen::Index j = 0; j < 4; ++j) {
      Eigen::MatrixXd xp = x;
      xp.row(j) += random_matrix(1, 8, 100 + j);
      const Eigen::MatrixXd out = plant.forward_block(l, xp);
      for (Eigen::Index r = 0; r < j; ++r) EXPECT_EQ(out.row(r), base.row(r)) << "row " << r << " pert " << j;
      EXPECT_NE(out.row(j), base.row(j));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, CausalityTest,
                         ::testing::Values(PlantKind::Linear, PlantKind::ToyTransformer, PlantKind::Blend));

TEST(PlantTest, RejectsBadSpecs) {
  EXPECT_THROW(build_plant(spec(PlantKind::Linear, 1, 8, 1, 0)), InvalidArgument);
  EXPECT_THROW(build_plant(spec(PlantKind::Linear, 2, 3, 1, 0)), InvalidArgument);
  EXPECT_THROW(build_plant(spec(PlantKind::Linear, 2, 8, 0, 0)), InvalidArgument);
  EXPECT_THROW(build_plant(spec(PlantKind::Blend, 2, 8, 1, 0, -0.1)), InvalidArgument);
  EXPECT_THROW(build_plant(spec(PlantKind::Blend, 2, 8, 1, 0, 1.5)), InvalidArgument);
}

TEST(PlantTest, RejectsBadLayerAndShape) {
  const Plant plant = build_plant(spec(PlantKind::Linear, 2, 8, 2, 0));
  EXPECT_THROW(plant.forward_block(2, random_matrix(2, 8, 0)), InvalidArgument);
  EXPECT_THROW(plant.forward_block(0, random_matrix(3, 8, 0)), InvalidArgument);
  EXPECT_THROW(plant.forward_block(0, random_matrix(2, 7, 0)), InvalidArgument);
}

TEST(PlantTest, HiddenStateOverloadKeepsLastIndex) {
  const Plant plant = build_plant(spec(PlantKind::Linear, 2, 8, 3, 0));
  const HiddenState s{random_matrix(3, 8, 1), plant.last_index()};
  const HiddenState out = plant.forward_block(0, s);
  EXPECT_EQ(out.last_index, 2);
  EXPECT_EQ(out.rows, plant.forward_block(0, s.rows));
}

TEST(PlantTest, SpecHashAndLabel) {
  const auto a = spec(PlantKind::Blend, 8, 32, 4, 0, 0.5);
  auto b = a;
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 1;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.label(), "blend-g0.5_L8_H32_T4");
  EXPECT_EQ(parse_plant_kind("toy"), PlantKind::ToyTransformer);
  EXPECT_THROW(parse_plant_kind("gpt2"), InvalidArgument);
}

}  // namespace
}  // namespace llv

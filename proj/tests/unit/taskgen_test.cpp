#include <gtest/gtest.h>

#include <sstream>

#include "llv/concept.hpp"
#include "llv/error.hpp"
#include "llv/matrix_io.hpp"
#include "llv/taskgen.hpp"
#include "test_support.hpp"

namespace llv {
namespace {

using test::spec;

std::size_t count_label(const PromptSet& set, int label) {
  return static_cast<std::size_t>(std::count_if(set.begin(), set.end(), [&](const auto& p) { return p.label == label; }));
}

TEST(TaskgenTest, SplitsAreExactlyBalanced) {
  const auto b = generate_bundle(spec(PlantKind::Linear, 2, 8, 3, 0), {5, 6, 7}, 1.0, 3);
  EXPECT_EQ(count_label(b.concept_split, 1), 5u);
  EXPECT_EQ(count_label(b.concept_split, 0), 5u);
  EXPECT_EQ(count_label(b.operating_split, 1), 6u);
  EXPECT_EQ(count_label(b.operating_split, 0), 6u);
  EXPECT_EQ(count_label(b.eval_split, 1), 7u);
  EXPECT_EQ(count_label(b.eval_split, 0), 7u);
}

TEST(TaskgenTest, SplitsAreDisjoint) {
  const auto b = generate_bundle(spec(PlantKind::Linear, 2, 8, 2, 0), {4, 4, 4}, 1.0, 1);
  const PromptSet* splits[] = {&b.concept_split, &b.operating_split, &b.eval_split};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      for (const auto& p : *splits[i])
        for (const auto& q : *splits[j]) EXPECT_NE(p.embedding, q.embedding);
}

TEST(TaskgenTest, SameSeedReproducesBundle) {
  const auto s = spec(PlantKind::ToyTransformer, 2, 8, 3, 0);
  const auto a = generate_bundle(s, {4, 4, 4}, 0.7, 42);
  const auto b = generate_bundle(s, {4, 4, 4}, 0.7, 42);
  ASSERT_EQ(a.eval_split.size(), b.eval_split.size());
  for (std::size_t i = 0; i < a.eval_split.size(); ++i) EXPECT_EQ(a.eval_split[i].embedding, b.eval_split[i].embedding);
  EXPECT_EQ(a.planted, b.planted);
  const auto c = generate_bundle(s, {4, 4, 4}, 0.7, 43);
  EXPECT_NE(a.eval_split[0].embedding, c.eval_split[0].embedding);
}

TEST(TaskgenTest, DefaultSizesAreAccepted) {
  const auto b = generate_bundle(spec(PlantKind::Linear, 2, 4, 1, 0), {400, 200, 200}, 1.0, 0);
  EXPECT_EQ(b.concept_split.size(), 800u);
  EXPECT_EQ(b.operating_split.size(), 400u);
  EXPECT_EQ(b.eval_split.size(), 400u);
}

TEST(TaskgenTest, RejectsBadArguments) {
  const auto s = spec(PlantKind::Linear, 2, 8, 1, 0);
  EXPECT_THROW(generate_bundle(s, {4, 4, 4}, 0.0, 0), InvalidArgument);
  EXPECT_THROW(generate_bundle(s, {4, 4, 4}, -1.0, 0), InvalidArgument);
  EXPECT_THROW(generate_bundle(s, {3, 4, 4}, 1.0, 0), InvalidArgument);
  EXPECT_THROW(generate_bundle(s, {4, 4, 0}, 1.0, 0), InvalidArgument);
}

// Class-mean difference of depth-0 last rows, computed directly from the prompts.
Eigen::VectorXd last_row_mean_difference(const PromptSet& set) {
  const Eigen::Index H = set.front().embedding.cols();
  const Eigen::Index last = set.front().embedding.rows() - 1;
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(H), m0 = Eigen::VectorXd::Zero(H);
  double n1 = 0, n0 = 0;
  for (const auto& p : set) {
    if (p.label == 1) {
      m1 += p.embedding.row(last).transpose();
      ++n1;
    } else {
      m0 += p.embedding.row(last).transpose();
      ++n0;
    }
  }
  return m1 / n1 - m0 / n0;
}

TEST(TaskgenTest, MeanDifferenceIsTwiceThePlantedSignal) {
  const double strength = 1.5;
  const auto b = generate_bundle(spec(PlantKind::Linear, 2, 8, 2, 0), {4, 4, 4}, strength, 5);
  const Eigen::VectorXd diff = last_row_mean_difference(b.concept_split);
  const double tol = 4.0 / std::sqrt(4.0);
  EXPECT_LT((diff - 2.0 * strength * b.planted).cwiseAbs().maxCoeff(), tol);
  EXPECT_NEAR(b.planted.norm(), 1.0, 1e-15);
}

TEST(TaskgenTest, MeanDifferenceVanishesWithSignal) {
  // Same seed means same noise, so the difference shrinks to the noise-only part.
  const auto s = spec(PlantKind::Linear, 2, 8, 1, 0);
  const auto strong = generate_bundle(s, {64, 4, 4}, 1.0, 9);
  const auto weak = generate_bundle(s, {64, 4, 4}, 1e-9, 9);
  const Eigen::VectorXd noise_only = last_row_mean_difference(strong.concept_split) - 2.0 * strong.planted;
  EXPECT_LT((last_row_mean_difference(weak.concept_split) - noise_only).norm(), 1e-8);
}

TEST(TaskgenTest, RecoveredDirectionSharpensWithSignalStrength) {
  const auto s = spec(PlantKind::Linear, 3, 16, 2, 0);
  const Plant plant = build_plant(s);
  double previous = -1.0;
  for (double strength : {0.1, 0.5, 2.0}) {
    const auto b = generate_bundle(s, {32, 4, 4}, strength, 77);
    const auto dirs = estimate_directions(plant, b.concept_split);
    const double cosine = dirs.at(0).dot(b.planted);
    EXPECT_GT(cosine, previous) << "strength " << strength;
    previous = cosine;
  }
}

TEST(TaskgenTest, PromptFilesRoundTrip) {
  const auto s = spec(PlantKind::Blend, 2, 6, 3, 4, 0.25);
  for (std::uint64_t seed : {0ull, 1ull, 123456789ull}) {
    const auto b = generate_bundle(s, {4, 5, 4}, 0.3, seed);
    std::stringstream buf;
    io::write_prompts(buf, b.operating_split, b.seed, s.hash());
    io::PromptFileHeader header;
    const PromptSet back = io::read_prompts(buf, &header);
    EXPECT_EQ(header.seed, seed);
    EXPECT_EQ(header.spec_hash, s.hash());
    EXPECT_EQ(header.seq_len, 3u);
    EXPECT_EQ(header.hidden_width, 6u);
    ASSERT_EQ(back.size(), b.operating_split.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      EXPECT_EQ(back[i].label, b.operating_split[i].label);
      EXPECT_EQ(back[i].embedding, b.operating_split[i].embedding);
    }
  }
}

TEST(MatrixIoTest, MatrixRoundTripAndTruncation) {
  const Eigen::MatrixXd m = test::random_matrix(3, 5, 8) * 1e-7;
  std::stringstream buf;
  io::write_matrix(buf, m);
  EXPECT_EQ(io::read_matrix(buf), m);
  std::stringstream bad("2 2\n1 2\n3");
  EXPECT_THROW(io::read_matrix(bad), InvalidArgument);
}

}  // namespace
}  // namespace llv

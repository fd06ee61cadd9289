#include <gtest/gtest.h>

#include "llv/config.hpp"
#include "llv/error.hpp"

namespace llv {
namespace {

TEST(ConfigTest, DefaultsRoundTripThroughIni) {
  const ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(parse_config(to_ini(c)), c);
}

TEST(ConfigTest, ParsesAllSections) {
  const auto c = parse_config(R"(
[plant]
kind = linear
depth = 6
hidden_width = 16
seq_len = 3
seeds = 4, 5
width_ladder = 8, 16

[bundle]
n_concept = 10
n_operating = 6
n_eval = 5
signal_strength = 0.5
tasks = 2

[identification]
reduced_dim = 4
complement = random
n_basis_prompts = 12
fd_step = 0.001
export_matrices = true

[evaluation]
epsilons = 0.05, 0.2
main_epsilon = 0.2
eval_batch = 8
topk = 3

[control]
targets = 0.1
tol = 1e-6
max_iter = 80
max_amplitude = 10

[output]
dir = /tmp/out
)");
  EXPECT_EQ(c.plant.kind, PlantKind::Linear);
  EXPECT_EQ(c.plant.depth, 6u);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_EQ(c.width_ladder, (std::vector<std::size_t>{8, 16}));
  EXPECT_EQ(c.sizes.n_operating, 6u);
  EXPECT_EQ(c.tasks, 2u);
  EXPECT_EQ(c.complement, ComplementKind::Random);
  EXPECT_TRUE(c.export_matrices);
  EXPECT_EQ(c.epsilons, (std::vector<double>{0.05, 0.2}));
  EXPECT_EQ(c.bisection_tol, 1e-6);
  EXPECT_EQ(c.max_iter, 80);
  EXPECT_EQ(c.output_dir, "/tmp/out");
  EXPECT_EQ(c.plant_for(5).seed, 5u);
  EXPECT_EQ(c.plant_for(5, 8).hidden_width, 8u);
  EXPECT_EQ(parse_config(to_ini(c)), c);
}

TEST(ConfigTest, OverridesApplyAndValidate) {
  ExperimentConfig c;
  apply_override(c, "plant.depth=5");
  apply_override(c, "evaluation.epsilons = 0.1,0.3");
  apply_override(c, "output.dir=elsewhere");
  EXPECT_EQ(c.plant.depth, 5u);
  EXPECT_EQ(c.epsilons, (std::vector<double>{0.1, 0.3}));
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_THROW(apply_override(c, "plant.colour=red"), InvalidArgument);
  EXPECT_THROW(apply_override(c, "depth=5"), InvalidArgument);
  EXPECT_THROW(apply_override(c, "plant.depth=five"), InvalidArgument);
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config("[plant]\nwidth = 3\n"), InvalidArgument);
  EXPECT_THROW(parse_config("[extras]\nx = 1\n"), InvalidArgument);
  EXPECT_THROW(parse_config("[plant]\nkind = lstm\n"), InvalidArgument);

  ExperimentConfig c;
  c.main_epsilon = 0.3;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.reduced_dim = 65;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.n_basis_prompts = 401;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.targets = {0.1, -0.1};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.seeds.clear();
  EXPECT_THROW(c.validate(), InvalidArgument);
}

}  // namespace
}  // namespace llv

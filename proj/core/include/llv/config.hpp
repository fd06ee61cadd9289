#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "llv/plant.hpp"
#include "llv/reduction.hpp"
#include "llv/taskgen.hpp"

namespace llv {

/// One experiment: a plant family, data sizes, identification and evaluation
/// settings, and the seeds to run. Stored as an INI file with sections
/// [plant], [bundle], [identification], [evaluation], [control], [output].
struct ExperimentConfig {
  // [plant]; plant.seed is replaced per run by each entry of `seeds`.
  PlantSpec plant{PlantKind::Blend, 12, 64, 8, 0, 0.5};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::vector<std::size_t> width_ladder;  // scaling only

  // [bundle]
  SplitSizes sizes{400, 200, 200};
  double signal_strength = 1.0;
  std::size_t tasks = 1;

  // [identification]
  std::size_t reduced_dim = 32;
  ComplementKind complement = ComplementKind::Krylov;
  std::size_t n_basis_prompts = 128;
  double fd_step = 2e-3;
  bool export_matrices = false;

  // [evaluation]
  std::vector<double> epsilons{0.05, 0.1};
  double main_epsilon = 0.1;
  std::size_t eval_batch = 64;
  std::size_t topk = 5;

  // [control]
  std::vector<double> targets{0.05, 0.1, 0.15, 0.2};
  double bisection_tol = 1e-3;
  int max_iter = 60;
  double max_amplitude = 1e3;

  // [output]
  std::filesystem::path output_dir = "runs";

  /// Throws InvalidArgument naming the offending key.
  void validate() const;

  PlantSpec plant_for(std::uint64_t seed) const;
  PlantSpec plant_for(std::uint64_t seed, std::size_t hidden_width) const;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(std::string_view ini_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical INI text; parse_config(to_ini(c)) == c.
std::string to_ini(const ExperimentConfig& config);

/// Applies one "section.key=value" override.
void apply_override(ExperimentConfig& config, std::string_view assignment);

}  // namespace llv

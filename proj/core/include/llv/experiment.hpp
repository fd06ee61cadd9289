#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "llv/concept.hpp"
#include "llv/config.hpp"
#include "llv/empirics.hpp"
#include "llv/error.hpp"
#include "llv/metrics.hpp"
#include "llv/reduction.hpp"
#include "llv/surrogate.hpp"
#include "llv/taskgen.hpp"

namespace llv {

/// A module error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Seed of the prompt bundle for one (run seed, task instance).
std::uint64_t task_seed(std::uint64_t seed, std::size_t task);

/// Everything identified for one task instance on one plant.
struct TaskRun {
  std::size_t task = 0;
  PromptBundle bundle;
  ConceptDirections dirs;
  ReducedBasis basis;
  GainProfile profile;
  std::vector<std::pair<double, Eigen::VectorXd>> empirical;  // one curve per epsilon
};

/// bundle -> trajectories -> concept directions -> basis -> surrogate -> predicted gains.
TaskRun identify_task(const Plant& plant, const ExperimentConfig& config, std::uint64_t seed,
                      std::size_t task);

/// Empirical gain curves on the eval split for every configured epsilon.
void measure_empirical(const Plant& plant, const ExperimentConfig& config, TaskRun& run);

struct ControlRow {
  std::size_t task = 0;
  std::string method;
  double target = 0.0;
  AmplitudeResult result;
  std::string status;  // ok, unreachable, uncontrollable, flat-response, orientation-failure
  double energy_ratio = 0.0;  // energy / LLV-optimal energy at the same target
};

struct ControlOutcome {
  std::vector<ControlRow> rows;
  Eigen::VectorXd llv_direction;  // empty when the gains were uncontrollable
  std::string llv_error;
};

/// Synthesizes the LLV-optimal direction from `gains`, then searches the
/// minimum amplitude of it and of every baseline at every configured target.
/// Per-method failures become rows with a non-ok status.
ControlOutcome run_control(const Plant& plant, const ExperimentConfig& config, std::uint64_t seed,
                           std::size_t task, const PromptBundle& bundle, const ConceptDirections& dirs,
                           const Eigen::VectorXd& gains);

/// output_dir / <plant label> / <seed>
std::filesystem::path cell_dir(const ExperimentConfig& config, const PlantSpec& spec);

void cmd_gen_data(const ExperimentConfig& config);
void cmd_gains(const ExperimentConfig& config);
void cmd_control(const ExperimentConfig& config);
ScalingSummary cmd_scaling(const ExperimentConfig& config);
/// Aggregates every cell under output_dir; writes report.json and returns a text table.
std::string cmd_report(const ExperimentConfig& config);

}  // namespace llv

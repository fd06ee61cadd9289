#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "llv/concept.hpp"
#include "llv/localdyn.hpp"
#include "llv/plant.hpp"

namespace llv {

/// Coefficients u_k on v_k, injected into the readout row before block k.
struct InjectionSchedule {
  Eigen::VectorXd coeffs;

  double energy() const { return coeffs.squaredNorm(); }
  static InjectionSchedule zero(std::size_t depth) {
    return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(depth))};
  }
  static InjectionSchedule single(std::size_t depth, std::size_t layer, double coeff) {
    auto s = zero(depth);
    s.coeffs(static_cast<Eigen::Index>(layer)) = coeff;
    return s;
  }
};

struct EmpiricalGainConfig {
  std::vector<double> epsilons{0.05, 0.1};
  std::size_t eval_batch = 64;
  void validate() const;
};

/// Full (unfrozen) forward pass with injections; returns the final concept score.
double steered_score(const Plant& plant, const Eigen::MatrixXd& prompt, const ConceptDirections& dirs,
                     const InjectionSchedule& schedule);

/// Same as steered_score, but resumes from the operating state at depth
/// `start` and applies only coefficients at layers >= start. Bit-identical to
/// the full pass when earlier coefficients are zero.
double steered_score_from(const Plant& plant, const OperatingTrajectory& traj, std::size_t start,
                          const ConceptDirections& dirs, const InjectionSchedule& schedule);

/// g_k = (mean y(+eps at k) - mean y(-eps at k)) / (2 eps) for every layer k.
Eigen::VectorXd empirical_gain_curve(const Plant& plant, std::span<const Eigen::MatrixXd> eval,
                                     const ConceptDirections& dirs, double epsilon);

/// Caches unsteered trajectories and scores of a prompt set so that repeated
/// realized-shift evaluations only pay for the steered passes.
class ShiftEvaluator {
 public:
  ShiftEvaluator(const Plant& plant, std::span<const Eigen::MatrixXd> prompts,
                 const ConceptDirections& dirs);

  /// Mean over prompts of steered_score(schedule) - steered_score(zero).
  double shift(const InjectionSchedule& schedule) const;

  const Plant& plant() const noexcept { return *plant_; }
  std::size_t depth() const noexcept { return plant_->depth(); }

 private:
  const Plant* plant_;
  const ConceptDirections* dirs_;
  std::vector<OperatingTrajectory> trajs_;
  std::vector<double> base_scores_;
};

double realized_shift(const Plant& plant, std::span<const Eigen::MatrixXd> eval,
                      const ConceptDirections& dirs, const InjectionSchedule& schedule);

struct AmplitudeSearch {
  double start = 1e-3;
  double max_amplitude = 1e3;
  double tol = 1e-3;  // relative amplitude tolerance
  int max_iter = 60;
};

struct AmplitudeResult {
  double alpha = 0.0;           // smallest amplitude found reaching the target
  double energy = 0.0;          // |alpha * direction|^2
  double realized_shift = 0.0;  // shift at alpha (best shift found if unreachable)
  bool reachable = false;
  bool monotone_verified = true;  // false if any evaluated shift contradicted monotonicity
  int iterations = 0;
};

/// Doubling bracket from search.start, then bisection on amplitude. Throws
/// OrientationFailure if the shift at search.start is not positive.
AmplitudeResult min_amplitude(const ShiftEvaluator& evaluator, const InjectionSchedule& direction,
                              double target, const AmplitudeSearch& search = {});

AmplitudeResult min_amplitude(const Plant& plant, std::span<const Eigen::MatrixXd> eval,
                              const ConceptDirections& dirs, const InjectionSchedule& direction,
                              double target, const AmplitudeSearch& search = {});

}  // namespace llv

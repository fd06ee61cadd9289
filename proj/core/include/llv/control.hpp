#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "llv/empirics.hpp"

namespace llv {

/// ||h||^2 at or below this is treated as "no layer has predicted influence".
inline constexpr double kUncontrollableGainNorm2 = 1e-12;
/// Amplitude of the sign-orientation probe.
inline constexpr double kOrientationProbe = 1e-3;

/// u* = (target / ||h||^2) h, the least-norm u with h.u = target.
InjectionSchedule min_energy_schedule(const Eigen::VectorXd& gains, double target);

/// h / ||h||, without orientation.
InjectionSchedule unit_direction(const Eigen::VectorXd& gains);

/// Flips `direction` if needed so that a probe of amplitude 1e-3 raises the
/// score in the full plant. Throws FlatResponse if the probe shift is ~0.
InjectionSchedule orient(const InjectionSchedule& direction, const ShiftEvaluator& evaluator);

/// Unit, probe-oriented control direction proportional to h.
InjectionSchedule control_direction(const Eigen::VectorXd& gains, const ShiftEvaluator& evaluator);

struct NamedSchedule {
  std::string name;
  InjectionSchedule schedule;
  std::size_t layer = 0;  // for single-layer baselines
};

/// uniform-all, last-only, middle-only, early-only and random-single unit
/// schedules (unoriented). Requires depth >= 4.
std::vector<NamedSchedule> baseline_schedules(std::size_t depth, std::uint64_t seed);

}  // namespace llv

#include "llv/control.hpp"

#include <cmath>
#include <random>

#include "llv/error.hpp"
#include "llv/rng.hpp"

namespace llv {

InjectionSchedule min_energy_schedule(const Eigen::VectorXd& gains, double target) {
  const double n2 = gains.squaredNorm();
  if (!(n2 > kUncontrollableGainNorm2))
    throw UncontrollableConcept("predicted gain vector is ~0: no layer influences the concept score");
  return {(target / n2) * gains};
}

InjectionSchedule unit_direction(const Eigen::VectorXd& gains) {
  if (!(gains.squaredNorm() > kUncontrollableGainNorm2))
    throw UncontrollableConcept("predicted gain vector is ~0: no layer influences the concept score");
  return {gains / gains.norm()};
}

InjectionSchedule orient(const InjectionSchedule& direction, const ShiftEvaluator& evaluator) {
  const double probe = evaluator.shift({kOrientationProbe * direction.coeffs});
  if (!(std::abs(probe) >= 1e-12)) throw FlatResponse("orientation probe produced no measurable shift");
  return probe > 0.0 ? direction : InjectionSchedule{-direction.coeffs};
}

InjectionSchedule control_direction(const Eigen::VectorXd& gains, const ShiftEvaluator& evaluator) {
  return orient(unit_direction(gains), evaluator);
}

std::vector<NamedSchedule> baseline_schedules(std::size_t depth, std::uint64_t seed) {
  if (depth < 4) throw InvalidArgument("baseline schedules need depth >= 4");
  const auto L = static_cast<Eigen::Index>(depth);
  std::vector<NamedSchedule> out;
  out.push_back({"uniform-all", {Eigen::VectorXd::Constant(L, 1.0 / std::sqrt(static_cast<double>(L)))}, 0});
  out.push_back({"last-only", InjectionSchedule::single(depth, depth - 1, 1.0), depth - 1});
  out.push_back({"middle-only", InjectionSchedule::single(depth, depth / 2, 1.0), depth / 2});
  out.push_back({"early-only", InjectionSchedule::single(depth, 1, 1.0), 1});
  auto gen = rng::engine(seed, rng::Tag::Baseline);
  const auto j = static_cast<std::size_t>(std::uniform_int_distribution<std::uint64_t>(0, depth - 1)(gen));
  out.push_back({"random-single", InjectionSchedule::single(depth, j, 1.0), j});
  return out;
}

}  // namespace llv

#include "llv/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "llv/error.hpp"
#include "llv/parallel.hpp"

namespace llv {

void EmpiricalGainConfig::validate() const {
  if (epsilons.empty()) throw InvalidArgument("at least one epsilon is required");
  for (double e : epsilons)
    if (!(e > 0.0)) throw InvalidArgument("epsilon values must be positive");
  if (eval_batch < 1) throw InvalidArgument("eval_batch must be >= 1");
}

namespace {

void check_schedule(const Plant& plant, const InjectionSchedule& schedule) {
  if (schedule.coeffs.size() != static_cast<Eigen::Index>(plant.depth()))
    throw InvalidArgument("schedule length " + std::to_string(schedule.coeffs.size()) +
                          " does not match plant depth " + std::to_string(plant.depth()));
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double run_from(const Plant& plant, Eigen::MatrixXd h, Eigen::Index last, std::size_t start,
                const ConceptDirections& dirs, const InjectionSchedule& schedule) {
  for (std::size_t k = start; k < plant.depth(); ++k) {
    const double u = schedule.coeffs(static_cast<Eigen::Index>(k));
    if (u != 0.0) h.row(last) += u * dirs.at(k).transpose();
    h = plant.forward_block(k, h);
  }
  // Contiguous copy so the score matches concept_score bit for bit.
  const Eigen::VectorXd x = h.row(last).transpose();
  return concept_score(x, dirs);
}

}  // namespace

double steered_score(const Plant& plant, const Eigen::MatrixXd& prompt, const ConceptDirections& dirs,
                     const InjectionSchedule& schedule) {
  plant.check_shape(prompt);
  check_schedule(plant, schedule);
  return run_from(plant, prompt, plant.last_index(), 0, dirs, schedule);
}

double steered_score_from(const Plant& plant, const OperatingTrajectory& traj, std::size_t start,
                          const ConceptDirections& dirs, const InjectionSchedule& schedule) {
  check_schedule(plant, schedule);
  if (start > plant.depth()) throw InvalidArgument("start depth out of range");
  return run_from(plant, traj.states.at(start), traj.last_index, start, dirs, schedule);
}

Eigen::VectorXd empirical_gain_curve(const Plant& plant, std::span<const Eigen::MatrixXd> eval,
                                     const ConceptDirections& dirs, double epsilon) {
  if (eval.empty()) throw InvalidArgument("empty evaluation split");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const std::size_t L = plant.depth();
  const std::size_t n = eval.size();
  std::vector<std::vector<double>> plus(L, std::vector<double>(n));
  std::vector<std::vector<double>> minus(L, std::vector<double>(n));
  parallel_for(n, [&](std::size_t i) {
    const auto traj = run_trajectory(plant, eval[i]);
    for (std::size_t k = 0; k < L; ++k) {
      plus[k][i] = steered_score_from(plant, traj, k, dirs, InjectionSchedule::single(L, k, epsilon));
      minus[k][i] = steered_score_from(plant, traj, k, dirs, InjectionSchedule::single(L, k, -epsilon));
    }
  });
  Eigen::VectorXd g(static_cast<Eigen::Index>(L));
  for (std::size_t k = 0; k < L; ++k)
    g(static_cast<Eigen::Index>(k)) = (mean(plus[k]) - mean(minus[k])) / (2.0 * epsilon);
  return g;
}

ShiftEvaluator::ShiftEvaluator(const Plant& plant, std::span<const Eigen::MatrixXd> prompts,
                               const ConceptDirections& dirs)
    : plant_(&plant), dirs_(&dirs) {
  if (prompts.empty()) throw InvalidArgument("empty evaluation split");
  trajs_ = run_trajectories(plant, prompts);
  base_scores_.reserve(trajs_.size());
  for (const auto& t : trajs_) base_scores_.push_back(concept_score(t.last_states.back(), dirs));
}

double ShiftEvaluator::shift(const InjectionSchedule& schedule) const {
  check_schedule(*plant_, schedule);
  std::size_t first = 0;
  while (first < depth() && schedule.coeffs(static_cast<Eigen::Index>(first)) == 0.0) ++first;
  std::vector<double> deltas(trajs_.size());
  parallel_for(trajs_.size(), [&](std::size_t i) {
    deltas[i] = steered_score_from(*plant_, trajs_[i], first, *dirs_, schedule) - base_scores_[i];
  });
  return mean(deltas);
}

double realized_shift(const Plant& plant, std::span<const Eigen::MatrixXd> eval,
                      const ConceptDirections& dirs, const InjectionSchedule& schedule) {
  return ShiftEvaluator(plant, eval, dirs).shift(schedule);
}

AmplitudeResult min_amplitude(const ShiftEvaluator& evaluator, const InjectionSchedule& direction,
                              double target, const AmplitudeSearch& search) {
  if (!(target > 0.0)) throw InvalidArgument("target shift must be positive");
  if (!(search.tol > 0.0) || search.max_iter < 1) throw InvalidArgument("bad bisection settings");

  std::map<double, double> seen;  // amplitude -> shift, for the monotonicity audit
  auto eval_at = [&](double alpha) {
    InjectionSchedule s{alpha * direction.coeffs};
    const double y = evaluator.shift(s);
    seen.emplace(alpha, y);
    return y;
  };

  AmplitudeResult r;
  double lo = 0.0;
  double hi = search.start;
  double y_hi = eval_at(hi);
  if (!(y_hi > 0.0))
    throw OrientationFailure("realized shift at probe amplitude is not positive");

  double best = y_hi;
  while (y_hi < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > search.max_amplitude) {
      r.alpha = lo;
      r.realized_shift = best;
      r.energy = (lo * direction.coeffs).squaredNorm();
      r.reachable = false;
      break;
    }
    y_hi = eval_at(hi);
    best = std::max(best, y_hi);
  }

  if (hi <= search.max_amplitude) {
    r.reachable = true;
    while (hi - lo > search.tol * hi && r.iterations < search.max_iter) {
      const double mid = 0.5 * (lo + hi);
      const double y = eval_at(mid);
      ++r.iterations;
      if (y >= target) {
        hi = mid;
        y_hi = y;
      } else {
        lo = mid;
      }
    }
    r.alpha = hi;
    r.realized_shift = y_hi;
    r.energy = (hi * direction.coeffs).squaredNorm();
  }

  double prev = -HUGE_VAL;
  for (const auto& [alpha, y] : seen) {
    if (y < prev) r.monotone_verified = false;
    prev = y;
  }
  return r;
}

AmplitudeResult min_amplitude(const Plant& plant, std::span<const Eigen::MatrixXd> eval,
                              const ConceptDirections& dirs, const InjectionSchedule& direction,
                              double target, const AmplitudeSearch& search) {
  return min_amplitude(ShiftEvaluator(plant, eval, dirs), direction, target, search);
}

}  // namespace llv

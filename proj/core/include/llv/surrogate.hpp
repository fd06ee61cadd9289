#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "llv/concept.hpp"
#include "llv/localdyn.hpp"
#include "llv/reduction.hpp"

namespace llv {

/// Reduced LLV matrices for one operating prompt:
///   A_bar_l = P_{l+1}^T A_l P_l,  B_bar_l = P_{l+1}^T A_l v_l.
struct PromptReducedModel {
  std::vector<Eigen::MatrixXd> a_bars;  // L matrices, d x d
  std::vector<Eigen::VectorXd> b_bars;  // L vectors, length d
};

struct LlvSurrogate {
  std::vector<PromptReducedModel> prompts;
  Eigen::VectorXd readout;  // c = P_L^T v_L
  std::size_t reduced_dim = 0;
};

struct GainProfile {
  Eigen::VectorXd predicted;             // L
  Eigen::VectorXd empirical;             // L, empty until measured
  Eigen::MatrixXd per_prompt_predicted;  // n_prompts x L
};

/// Identifies the reduced model of one prompt with d (concept-anchored basis)
/// or d + 1 Jacobian actions per layer.
PromptReducedModel identify(const Plant& plant, const OperatingTrajectory& traj,
                            const ReducedBasis& basis, const ConceptDirections& dirs,
                            const FdConfig& fd);

LlvSurrogate identify_surrogate(const Plant& plant, std::span<const OperatingTrajectory> operating,
                                const ReducedBasis& basis, const ConceptDirections& dirs,
                                const FdConfig& fd);

/// Single-prompt gain curve by backward accumulation:
/// w <- c; for l = L-1..0: g_l = w . B_bar_l; w <- A_bar_l^T w.
Eigen::VectorXd prompt_gains(const PromptReducedModel& model, const Eigen::VectorXd& readout);

/// Per-prompt gain curves and their mean. Curves are averaged, never matrices.
GainProfile predict_gains(const LlvSurrogate& surrogate);

}  // namespace llv

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "llv/concept.hpp"
#include "llv/localdyn.hpp"
#include "llv/plant.hpp"

namespace llv {

enum class ComplementKind { Krylov, Random };

std::string_view to_string(ComplementKind kind);
ComplementKind parse_complement_kind(std::string_view text);

/// Per-depth orthonormal bases P_0..P_L (H x d). Column 0 of P_l is a verbatim
/// copy of v_l; the remaining d - 1 columns span the complement.
struct ReducedBasis {
  std::vector<Eigen::MatrixXd> mats;
  std::size_t reduced_dim = 0;
  ComplementKind complement_kind = ComplementKind::Krylov;

  std::size_t depth() const noexcept { return mats.empty() ? 0 : mats.size() - 1; }
};

/// Candidates whose residual (relative to their own norm) falls below this are dropped.
inline constexpr double kBasisDropTolerance = 1e-8;

/// Reachability-informed basis. For each depth l the post-injection seed
/// mean_p A_l(p) v_l is propagated forward with mean Jacobian actions; the
/// vector reaching depth m is a candidate for P_m. Each depth keeps its d - 1
/// nearest sources (m - 1, m - 2, ...), projected off v_m and orthonormalized
/// with modified Gram-Schmidt. Shortfalls are padded with seeded random vectors.
ReducedBasis build_krylov_basis(const Plant& plant, std::span<const OperatingTrajectory> operating,
                                const ConceptDirections& dirs, std::size_t reduced_dim,
                                std::size_t n_basis_prompts, const FdConfig& fd,
                                std::uint64_t padding_seed = 0);

/// Concept direction plus a seeded Gaussian complement.
ReducedBasis build_random_basis(const ConceptDirections& dirs, std::size_t reduced_dim,
                                std::uint64_t seed);

/// Builds an H x d orthonormal matrix whose first column is `anchor` (copied
/// bit-exactly) followed by the surviving `candidates` in order and then by
/// random padding from `gen`. Exposed for testing.
Eigen::MatrixXd anchored_orthonormal_basis(const Eigen::VectorXd& anchor,
                                           std::span<const Eigen::VectorXd> candidates,
                                           std::size_t reduced_dim, std::mt19937_64& gen);

}  // namespace llv

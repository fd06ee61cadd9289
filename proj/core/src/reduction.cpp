#include "llv/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "llv/error.hpp"
#include "llv/rng.hpp"

namespace llv {

std::string_view to_string(ComplementKind kind) {
  return kind == ComplementKind::Krylov ? "krylov" : "random";
}

ComplementKind parse_complement_kind(std::string_view text) {
  if (text == "krylov") return ComplementKind::Krylov;
  if (text == "random") return ComplementKind::Random;
  throw InvalidArgument("unknown complement kind '" + std::string(text) + "'");
}

namespace {

void check_dim(std::size_t reduced_dim, Eigen::Index width) {
  if (reduced_dim < 1) throw InvalidArgument("reduced dimension must be >= 1");
  if (reduced_dim > static_cast<std::size_t>(width))
    throw InvalidArgument("reduced dimension " + std::to_string(reduced_dim) +
                          " exceeds hidden width " + std::to_string(width));
}

// Orthogonalizes `x` (unit norm on entry) against the first `count` columns
// with two MGS sweeps. Returns the residual norm.
double orthogonalize(Eigen::VectorXd& x, const Eigen::MatrixXd& q, Eigen::Index count) {
  for (int sweep = 0; sweep < 2; ++sweep)
    for (Eigen::Index j = 0; j < count; ++j) x -= q.col(j).dot(x) * q.col(j);
  return x.norm();
}

}  // namespace

Eigen::MatrixXd anchored_orthonormal_basis(const Eigen::VectorXd& anchor,
                                           std::span<const Eigen::VectorXd> candidates,
                                           std::size_t reduced_dim, std::mt19937_64& gen) {
  const Eigen::Index H = anchor.size();
  check_dim(reduced_dim, H);
  const auto d = static_cast<Eigen::Index>(reduced_dim);
  Eigen::MatrixXd q(H, d);
  q.col(0) = anchor;
  Eigen::Index accepted = 1;

  auto try_accept = [&](const Eigen::VectorXd& raw) {
    const double n = raw.norm();
    if (!(n > 0.0) || !std::isfinite(n)) return;
    Eigen::VectorXd x = raw / n;
    const double residual = orthogonalize(x, q, accepted);
    if (residual < kBasisDropTolerance) return;
    q.col(accepted++) = x / residual;
  };

  for (const auto& c : candidates) {
    if (accepted == d) break;
    try_accept(c);
  }
  while (accepted < d) try_accept(rng::gaussian_vector(gen, H));
  return q;
}

ReducedBasis build_random_basis(const ConceptDirections& dirs, std::size_t reduced_dim,
                                std::uint64_t seed) {
  if (dirs.dirs.empty()) throw InvalidArgument("no concept directions");
  check_dim(reduced_dim, dirs.dirs.front().size());
  ReducedBasis basis;
  basis.reduced_dim = reduced_dim;
  basis.complement_kind = ComplementKind::Random;
  for (std::size_t l = 0; l < dirs.dirs.size(); ++l) {
    auto gen = rng::engine(seed, rng::Tag::RandomBasis, l);
    basis.mats.push_back(anchored_orthonormal_basis(dirs.dirs[l], {}, reduced_dim, gen));
  }
  return basis;
}

ReducedBasis build_krylov_basis(const Plant& plant, std::span<const OperatingTrajectory> operating,
                                const ConceptDirections& dirs, std::size_t reduced_dim,
                                std::size_t n_basis_prompts, const FdConfig& fd,
                                std::uint64_t padding_seed) {
  if (operating.empty()) throw InvalidArgument("Krylov basis needs operating prompts");
  if (n_basis_prompts < 1 || n_basis_prompts > operating.size())
    throw InvalidArgument("n_basis_prompts must lie in [1, " + std::to_string(operating.size()) + "]");
  check_dim(reduced_dim, static_cast<Eigen::Index>(plant.width()));
  const std::size_t L = plant.depth();
  if (dirs.depth() != L) throw InvalidArgument("concept directions do not match plant depth");

  const auto subset = operating.first(n_basis_prompts);
  const std::size_t window = reduced_dim - 1;

  // candidates[m][j]: seed from source depth m - 1 - j propagated to depth m.
  std::vector<std::vector<Eigen::VectorXd>> candidates(L + 1);
  if (window > 0) {
    for (std::size_t source = 0; source < L; ++source) {
      Eigen::VectorXd w = mean_jacobian_action(plant, subset, source, dirs.at(source), fd);
      for (std::size_t target = source + 1;; ++target) {
        const double n = w.norm();
        if (!(n > 0.0) || !std::isfinite(n)) break;
        w /= n;
        candidates[target].push_back(w);
        if (target == L || target - source >= window) break;
        w = mean_jacobian_action(plant, subset, target, w, fd);
      }
    }
  }

  ReducedBasis basis;
  basis.reduced_dim = reduced_dim;
  basis.complement_kind = ComplementKind::Krylov;
  for (std::size_t m = 0; m <= L; ++m) {
    // Sources were pushed in ascending order; nearest source goes first.
    std::vector<Eigen::VectorXd> ordered(candidates[m].rbegin(), candidates[m].rend());
    for (auto& c : ordered) c -= dirs.at(m).dot(c) * dirs.at(m);
    auto gen = rng::engine(padding_seed, rng::Tag::KrylovPadding, m);
    basis.mats.push_back(anchored_orthonormal_basis(dirs.at(m), ordered, reduced_dim, gen));
  }
  return basis;
}

}  // namespace llv

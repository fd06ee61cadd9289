#include "llv/taskgen.hpp"

#include <string>

#include "llv/error.hpp"
#include "llv/rng.hpp"

namespace llv {

namespace {

PromptSet draw_split(const PlantSpec& spec, std::size_t per_class, const Eigen::VectorXd& planted,
                     double strength, std::mt19937_64 gen) {
  const auto T = static_cast<Eigen::Index>(spec.seq_len);
  const auto H = static_cast<Eigen::Index>(spec.hidden_width);
  PromptSet out;
  out.reserve(2 * per_class);
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    LabeledPrompt p;
    p.label = (i % 2 == 0) ? 1 : 0;
    p.embedding = rng::gaussian(gen, T, H);
    const double sign = p.label == 1 ? 1.0 : -1.0;
    p.embedding.row(T - 1) += sign * strength * planted.transpose();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

Eigen::VectorXd planted_concept(std::size_t hidden_width, std::uint64_t seed) {
  auto gen = rng::engine(seed, rng::Tag::Concept);
  Eigen::VectorXd s = rng::gaussian_vector(gen, static_cast<Eigen::Index>(hidden_width));
  return s / s.norm();
}

PromptBundle generate_bundle(const PlantSpec& spec, const SplitSizes& sizes,
                             double signal_strength, std::uint64_t seed) {
  spec.validate();
  if (sizes.n_concept < 4 || sizes.n_operating < 4 || sizes.n_eval < 4)
    throw InvalidArgument("each split needs at least 4 prompts per class");
  if (!(signal_strength > 0.0)) throw InvalidArgument("signal_strength must be positive");

  PromptBundle b;
  b.sizes = sizes;
  b.seed = seed;
  b.planted = planted_concept(spec.hidden_width, seed);
  b.concept_split = draw_split(spec, sizes.n_concept, b.planted, signal_strength,
                               rng::engine(seed, rng::Tag::ConceptSplit));
  b.operating_split = draw_split(spec, sizes.n_operating, b.planted, signal_strength,
                                 rng::engine(seed, rng::Tag::OperatingSplit));
  b.eval_split = draw_split(spec, sizes.n_eval, b.planted, signal_strength,
                            rng::engine(seed, rng::Tag::EvalSplit));
  return b;
}

std::vector<Eigen::MatrixXd> embeddings(const PromptSet& set) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(set.size());
  for (const auto& p : set) out.push_back(p.embedding);
  return out;
}

std::vector<int> labels(const PromptSet& set) {
  std::vector<int> out;
  out.reserve(set.size());
  for (const auto& p : set) out.push_back(p.label);
  return out;
}

}  // namespace llv

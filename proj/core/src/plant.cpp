#include "llv/plant.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "llv/error.hpp"
#include "llv/format.hpp"
#include "llv/rng.hpp"

namespace llv {

std::string_view to_string(PlantKind kind) {
  switch (kind) {
    case PlantKind::Linear: return "linear";
    case PlantKind::ToyTransformer: return "toy";
    case PlantKind::Blend: return "blend";
  }
  return "unknown";
}

PlantKind parse_plant_kind(std::string_view text) {
  if (text == "linear") return PlantKind::Linear;
  if (text == "toy" || text == "toytransformer") return PlantKind::ToyTransformer;
  if (text == "blend") return PlantKind::Blend;
  throw InvalidArgument("unknown plant kind '" + std::string(text) + "'");
}

void PlantSpec::validate() const {
  if (depth < 2) throw InvalidArgument("plant depth must be >= 2");
  if (hidden_width < 4) throw InvalidArgument("plant hidden width must be >= 4");
  if (seq_len < 1) throw InvalidArgument("plant sequence length must be >= 1");
  if (!(blend_gamma >= 0.0 && blend_gamma <= 1.0))
    throw InvalidArgument("blend_gamma must lie in [0, 1]");
}

std::uint64_t PlantSpec::hash() const {
  std::uint64_t h = rng::mix(static_cast<std::uint64_t>(kind));
  h = rng::mix(h ^ depth);
  h = rng::mix(h ^ hidden_width);
  h = rng::mix(h ^ seq_len);
  h = rng::mix(h ^ seed);
  std::uint64_t gamma_bits = 0;
  static_assert(sizeof gamma_bits == sizeof blend_gamma);
  std::memcpy(&gamma_bits, &blend_gamma, sizeof gamma_bits);
  return rng::mix(h ^ gamma_bits);
}

std::string PlantSpec::label() const {
  std::string out(to_string(kind));
  if (kind == PlantKind::Blend) out += "-g" + format_double(blend_gamma);
  out += "_L" + std::to_string(depth) + "_H" + std::to_string(hidden_width) + "_T" +
         std::to_string(seq_len);
  return out;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

Eigen::MatrixXd layer_norm_rows(const Eigen::MatrixXd& h) {
  constexpr double kEps = 1e-5;
  Eigen::MatrixXd out(h.rows(), h.cols());
  const double n = static_cast<double>(h.cols());
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    const double mean = h.row(r).sum() / n;
    const double var = (h.row(r).array() - mean).square().sum() / n;
    out.row(r) = (h.row(r).array() - mean) / std::sqrt(var + kEps);
  }
  return out;
}

Plant::Plant(const PlantSpec& spec) : spec_(spec) {
  spec_.validate();
  const auto H = static_cast<Eigen::Index>(spec_.hidden_width);
  const double inv_sqrt_h = 1.0 / std::sqrt(static_cast<double>(H));
  const bool want_linear = spec_.kind != PlantKind::ToyTransformer;
  const bool want_toy = spec_.kind != PlantKind::Linear;

  for (std::size_t l = 0; l < spec_.depth; ++l) {
    if (want_linear) {
      auto gen = rng::engine(spec_.seed, rng::Tag::LinearWeights, l);
      linear_.push_back({rng::gaussian(gen, H, H, 0.5 * inv_sqrt_h)});
    }
    if (want_toy) {
      auto gen = rng::engine(spec_.seed, rng::Tag::ToyWeights, l);
      ToyBlockWeights w;
      w.wq = rng::gaussian(gen, H, H, inv_sqrt_h);
      w.wk = rng::gaussian(gen, H, H, inv_sqrt_h);
      w.wv = rng::gaussian(gen, H, H, inv_sqrt_h);
      w.wo = rng::gaussian(gen, H, H, inv_sqrt_h);
      w.w1 = rng::gaussian(gen, H, H, inv_sqrt_h);
      w.w2 = rng::gaussian(gen, H, H, inv_sqrt_h);
      toy_.push_back(std::move(w));
    }
  }
}

void Plant::check_shape(const Eigen::MatrixXd& h) const {
  if (h.rows() != static_cast<Eigen::Index>(spec_.seq_len) ||
      h.cols() != static_cast<Eigen::Index>(spec_.hidden_width)) {
    throw InvalidArgument("hidden matrix is " + std::to_string(h.rows()) + "x" +
                          std::to_string(h.cols()) + ", plant expects " +
                          std::to_string(spec_.seq_len) + "x" + std::to_string(spec_.hidden_width));
  }
}

const LinearBlockWeights& Plant::linear_weights(std::size_t layer) const {
  if (layer >= linear_.size()) throw InvalidArgument("plant has no linear weights for this layer");
  return linear_[layer];
}

const ToyBlockWeights& Plant::toy_weights(std::size_t layer) const {
  if (layer >= toy_.size()) throw InvalidArgument("plant has no attention weights for this layer");
  return toy_[layer];
}

Eigen::MatrixXd Plant::linear_block(std::size_t layer, const Eigen::MatrixXd& h) const {
  return h + h * linear_[layer].w;
}

Eigen::MatrixXd Plant::toy_block(std::size_t layer, const Eigen::MatrixXd& h) const {
  const auto& w = toy_[layer];
  const Eigen::Index T = h.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(h.cols()));

  const Eigen::MatrixXd a = layer_norm_rows(h);
  const Eigen::MatrixXd q = a * w.wq;
  const Eigen::MatrixXd k = a * w.wk;
  const Eigen::MatrixXd v = a * w.wv;

  // Causal softmax attention: row i attends to rows 0..i.
  Eigen::MatrixXd mixed = Eigen::MatrixXd::Zero(T, h.cols());
  for (Eigen::Index i = 0; i < T; ++i) {
    Eigen::VectorXd scores = (k.topRows(i + 1) * q.row(i).transpose()) * scale;
    const double peak = scores.maxCoeff();
    scores = (scores.array() - peak).exp();
    scores /= scores.sum();
    mixed.row(i) = scores.transpose() * v.topRows(i + 1);
  }
  const Eigen::MatrixXd h1 = h + mixed * w.wo;

  const Eigen::MatrixXd hidden = (layer_norm_rows(h1) * w.w1).unaryExpr([](double x) { return gelu(x); });
  return h1 + hidden * w.w2;
}

Eigen::MatrixXd Plant::forward_block(std::size_t layer, const Eigen::MatrixXd& h) const {
  if (layer >= spec_.depth)
    throw InvalidArgument("layer " + std::to_string(layer) + " out of range [0, " +
                          std::to_string(spec_.depth) + ")");
  check_shape(h);
  switch (spec_.kind) {
    case PlantKind::Linear: return linear_block(layer, h);
    case PlantKind::ToyTransformer: return toy_block(layer, h);
    case PlantKind::Blend: {
      const double g = spec_.blend_gamma;
      return (1.0 - g) * linear_block(layer, h) + g * toy_block(layer, h);
    }
  }
  throw InvalidArgument("unknown plant kind");
}

HiddenState Plant::forward_block(std::size_t layer, const HiddenState& state) const {
  return {forward_block(layer, state.rows), state.last_index};
}

Plant build_plant(const PlantSpec& spec) { return Plant(spec); }

}  // namespace llv

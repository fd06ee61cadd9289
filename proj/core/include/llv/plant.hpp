#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace llv {

enum class PlantKind { Linear, ToyTransformer, Blend };

std::string_view to_string(PlantKind kind);
PlantKind parse_plant_kind(std::string_view text);

/// Shape and seed of a reference plant. Equal specs build bit-identical plants.
struct PlantSpec {
  PlantKind kind = PlantKind::Linear;
  std::size_t depth = 4;         // number of blocks L
  std::size_t hidden_width = 8;  // H
  std::size_t seq_len = 1;       // T
  std::uint64_t seed = 0;
  double blend_gamma = 0.0;  // Blend only; 0 is fully linear

  /// Throws InvalidArgument unless L >= 2, H >= 4, T >= 1 and gamma in [0, 1].
  void validate() const;

  /// Stable 64-bit digest of every field; keys dumped bundles.
  std::uint64_t hash() const;

  /// Directory-safe label, e.g. "blend-g0.5_L8_H32_T4".
  std::string label() const;

  bool operator==(const PlantSpec&) const = default;
};

/// Hidden matrix at one depth (T x H) plus the row index of the readout token.
struct HiddenState {
  Eigen::MatrixXd rows;
  Eigen::Index last_index = 0;
};

struct LinearBlockWeights {
  Eigen::MatrixXd w;  // H x H, applied as h + h * w
};

/// Pre-norm single-head causal attention followed by a gelu MLP.
struct ToyBlockWeights {
  Eigen::MatrixXd wq, wk, wv, wo;  // H x H
  Eigen::MatrixXd w1;              // H x F
  Eigen::MatrixXd w2;              // F x H
};

/// An immutable layered residual system. forward_block is pure and reentrant,
/// so one plant may be shared read-only across threads.
class Plant {
 public:
  explicit Plant(const PlantSpec& spec);

  const PlantSpec& spec() const noexcept { return spec_; }
  std::size_t depth() const noexcept { return spec_.depth; }
  std::size_t width() const noexcept { return spec_.hidden_width; }
  std::size_t seq_len() const noexcept { return spec_.seq_len; }
  Eigen::Index last_index() const noexcept { return static_cast<Eigen::Index>(spec_.seq_len) - 1; }

  /// Applies block `layer` to a full T x H hidden matrix.
  Eigen::MatrixXd forward_block(std::size_t layer, const Eigen::MatrixXd& h) const;
  HiddenState forward_block(std::size_t layer, const HiddenState& state) const;

  /// Throws InvalidArgument if `h` is not T x H.
  void check_shape(const Eigen::MatrixXd& h) const;

  /// Weight access for oracles and diagnostics. Empty for kinds that lack them.
  const LinearBlockWeights& linear_weights(std::size_t layer) const;
  const ToyBlockWeights& toy_weights(std::size_t layer) const;

 private:
  Eigen::MatrixXd linear_block(std::size_t layer, const Eigen::MatrixXd& h) const;
  Eigen::MatrixXd toy_block(std::size_t layer, const Eigen::MatrixXd& h) const;

  PlantSpec spec_;
  std::vector<LinearBlockWeights> linear_;
  std::vector<ToyBlockWeights> toy_;
};

Plant build_plant(const PlantSpec& spec);

/// Exact gelu, 0.5 x (1 + erf(x / sqrt 2)).
double gelu(double x);

/// Row-wise layer norm without affine parameters (eps = 1e-5).
Eigen::MatrixXd layer_norm_rows(const Eigen::MatrixXd& h);

}  // namespace llv

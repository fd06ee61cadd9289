#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace llv {

/// Sample Pearson correlation. NaN when either input has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of fractional (average-on-ties) ranks.
double spearman(std::span<const double> a, std::span<const double> b);

/// 1-based fractional ranks; tied values share the mean of their positions.
std::vector<double> fractional_ranks(std::span<const double> x);

/// |topk(a) & topk(b)| / k. Ties at the cutoff go to the lower index.
double topk_overlap(std::span<const double> a, std::span<const double> b, std::size_t k);

/// Indices of the k largest values, ties broken by lower index.
std::vector<std::size_t> topk_indices(std::span<const double> x, std::size_t k);

struct AgreementReport {
  double spearman = 0.0;
  double pearson = 0.0;
  std::map<std::size_t, double> topk_overlap;
};

AgreementReport agreement(std::span<const double> predicted, std::span<const double> empirical,
                          std::span<const std::size_t> ks);

struct ScalingRow {
  std::string size;
  std::uint64_t seed = 0;
  std::string task;
  double spearman = 0.0;
  double pearson = 0.0;
};

struct SeedSummary {
  std::string size;
  std::uint64_t seed = 0;
  std::size_t tasks = 0;
  double mean_spearman = 0.0;
  double mean_pearson = 0.0;
};

struct SizeSummary {
  std::string size;
  std::size_t seeds = 0;
  double mean_spearman = 0.0;
  double median_spearman = 0.0;
  double mean_pearson = 0.0;
  double median_pearson = 0.0;
};

struct ScalingSummary {
  std::vector<SeedSummary> per_seed;  // sorted by (size, seed)
  std::vector<SizeSummary> per_size;  // sorted by size label
  std::vector<ScalingRow> by_task;    // input rows, sorted by (size, seed, task)
};

/// Tasks are averaged within each (size, seed) first; mean and median are then
/// taken across seeds. NaN correlations are skipped; an all-NaN group stays NaN.
ScalingSummary aggregate_scaling(std::span<const ScalingRow> rows);

}  // namespace llv

#include "llv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "llv/error.hpp"

namespace llv {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("correlation inputs differ in length");
}

double mean_skip_nan(const std::vector<double>& xs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : xs)
    if (!std::isnan(x)) {
      sum += x;
      ++n;
    }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

double median_skip_nan(std::vector<double> xs) {
  std::erase_if(xs, [](double x) { return std::isnan(x); });
  if (xs.empty()) return std::nan("");
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const std::size_t n = a.size();
  if (n < 2) return std::nan("");
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nan("");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  std::vector<double> ranks(x.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && x[order[end]] == x[order[start]]) ++end;
    // positions start..end-1 hold equal values; 1-based mean rank
    const double rank = 0.5 * static_cast<double>(start + end + 1);
    for (std::size_t p = start; p < end; ++p) ranks[order[p]] = rank;
    start = end;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const auto ra = fractional_ranks(a);
  const auto rb = fractional_ranks(b);
  return pearson(ra, rb);
}

std::vector<std::size_t> topk_indices(std::span<const double> x, std::size_t k) {
  if (k < 1 || k > x.size()) throw InvalidArgument("top-k: k out of range");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] > x[j]; });
  order.resize(k);
  return order;
}

double topk_overlap(std::span<const double> a, std::span<const double> b, std::size_t k) {
  check_pair(a, b);
  auto ta = topk_indices(a, k);
  auto tb = topk_indices(b, k);
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  std::vector<std::size_t> common;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(k);
}

AgreementReport agreement(std::span<const double> predicted, std::span<const double> empirical,
                          std::span<const std::size_t> ks) {
  AgreementReport r;
  r.spearman = spearman(predicted, empirical);
  r.pearson = pearson(predicted, empirical);
  for (std::size_t k : ks)
    if (k >= 1 && k <= predicted.size()) r.topk_overlap[k] = topk_overlap(predicted, empirical, k);
  return r;
}

ScalingSummary aggregate_scaling(std::span<const ScalingRow> rows) {
  if (rows.empty()) throw InvalidArgument("no scaling rows to aggregate");
  ScalingSummary out;
  out.by_task.assign(rows.begin(), rows.end());
  std::sort(out.by_task.begin(), out.by_task.end(), [](const ScalingRow& x, const ScalingRow& y) {
    return std::tie(x.size, x.seed, x.task) < std::tie(y.size, y.seed, y.task);
  });

  // Tasks within each (size, seed).
  for (std::size_t i = 0; i < out.by_task.size();) {
    std::size_t j = i;
    std::vector<double> sp, pe;
    while (j < out.by_task.size() && out.by_task[j].size == out.by_task[i].size &&
           out.by_task[j].seed == out.by_task[i].seed) {
      sp.push_back(out.by_task[j].spearman);
      pe.push_back(out.by_task[j].pearson);
      ++j;
    }
    out.per_seed.push_back({out.by_task[i].size, out.by_task[i].seed, j - i, mean_skip_nan(sp),
                            mean_skip_nan(pe)});
    i = j;
  }

  // Seeds within each size.
  for (std::size_t i = 0; i < out.per_seed.size();) {
    std::size_t j = i;
    std::vector<double> sp, pe;
    while (j < out.per_seed.size() && out.per_seed[j].size == out.per_seed[i].size) {
      sp.push_back(out.per_seed[j].mean_spearman);
      pe.push_back(out.per_seed[j].mean_pearson);
      ++j;
    }
    out.per_size.push_back({out.per_seed[i].size, j - i, mean_skip_nan(sp), median_skip_nan(sp),
                            mean_skip_nan(pe), median_skip_nan(pe)});
    i = j;
  }
  return out;
}

}  // namespace llv

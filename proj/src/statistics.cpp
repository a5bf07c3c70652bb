#include "gibbslab/statistics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gibbslab {

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty series");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double integrated_autocorrelation_time(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return 1.0;
  const double m = mean(x);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return 1.0;
  double tau = 1.0;
  for (std::size_t t = 1; t < n / 2; ++t) {
    double ct = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) ct += (x[i] - m) * (x[i + t] - m);
    ct /= static_cast<double>(n);
    tau += 2.0 * ct / c0;
    if (static_cast<double>(t) >= 5.0 * tau) break;
  }
  return std::max(tau, 1.0 / static_cast<double>(n));
}

double effective_sample_size(const ChainSeries& series) {
  double ess = 0.0;
  for (const auto& chain : series)
    if (!chain.empty()) ess += static_cast<double>(chain.size()) / integrated_autocorrelation_time(chain);
  return ess;
}

std::vector<double> pooled(const ChainSeries& series) {
  std::vector<double> all;
  for (const auto& c : series) all.insert(all.end(), c.begin(), c.end());
  return all;
}

BatchEstimate batch_statistic(const ChainSeries& series, const std::function<double(std::span<const double>)>& stat,
                              std::size_t batches_per_chain) {
  BatchEstimate out;
  const auto all = pooled(series);
  if (all.empty()) throw std::invalid_argument("batch statistic of empty series");
  out.n = all.size();
  out.value = stat(all);
  out.ess = effective_sample_size(series);

  std::vector<double> per_batch;
  for (const auto& chain : series) {
    const std::size_t len = chain.size() / batches_per_chain;
    if (len == 0) continue;
    for (std::size_t b = 0; b < batches_per_chain; ++b)
      per_batch.push_back(stat(std::span<const double>(chain).subspan(b * len, len)));
  }
  out.batches = per_batch.size();
  out.std_error = per_batch.size() >= 2 ? std::sqrt(sample_variance(per_batch) / static_cast<double>(per_batch.size()))
                                     : std::numeric_limits<double>::infinity();
  return out;
}

BatchEstimate batch_means(const ChainSeries& series, std::size_t batches_per_chain) {
  return batch_statistic(series, [](std::span<const double> x) { return mean(x); }, batches_per_chain);
}

}  // namespace gibbslab

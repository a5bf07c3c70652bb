#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gibbslab {

/// One time series per chain.
using ChainSeries = std::vector<std::vector<double>>;

double mean(std::span<const double> x);
/// Unbiased sample variance.
double sample_variance(std::span<const double> x);

/// Integrated autocorrelation time 1 + 2 sum_t rho(t), with Sokal's self-consistent window
/// (stop at the first W >= c * tau(W), c = 5).
double integrated_autocorrelation_time(std::span<const double> x);

/// Sum over chains of N_c / tau_c.
double effective_sample_size(const ChainSeries& series);

struct BatchEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t batches = 0;
  std::size_t n = 0;
  double ess = 0.0;
};

/// Number of batches each chain is split into.
inline constexpr std::size_t kBatchesPerChain = 20;

/// Batch-means estimate of the mean.
BatchEstimate batch_means(const ChainSeries& series, std::size_t batches_per_chain = kBatchesPerChain);

/// Batch-means error for a general statistic: `stat` is evaluated on all data (value) and on each
/// batch separately (spread -> std_error).
BatchEstimate batch_statistic(const ChainSeries& series,
                              const std::function<double(std::span<const double>)>& stat,
                              std::size_t batches_per_chain = kBatchesPerChain);

/// Concatenation of all chains in chain order.
std::vector<double> pooled(const ChainSeries& series);

}  // namespace gibbslab

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gibbslab/lattice.hpp"
#include "gibbslab/pattern_distribution.hpp"
#include "gibbslab/potential.hpp"

namespace gibbslab {

/// Largest state space enumerated exactly.
inline constexpr std::uint64_t kEnumerationCap = std::uint64_t{1} << 26;

class EnumerationCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Exact finite-volume Gibbs measure: probability of every configuration of the window,
/// indexed by the configuration's pattern code (site 0 most significant).
struct FiniteGibbsMeasure {
  Window window;
  std::optional<Boundary> boundary;
  Potential potential;
  std::vector<double> probs;
  double log_z = 0.0;

  std::vector<Symbol> configuration(std::uint64_t code) const;
  Configuration configuration_at(std::uint64_t code) const;
  PatternDistribution as_distribution() const;
  /// E[F] for F given on the full spin array.
  double expectation(const std::function<double(std::span<const Symbol>)>& f) const;
};

/// Number of configurations of `window`, checked against `cap`.
std::uint64_t state_count(const Window& window, std::uint64_t cap = kEnumerationCap);

/// -H(omega | eta) for every configuration code. Parallel over fixed code chunks.
std::vector<double> enumerate_log_weights(const CompiledHamiltonian& h, std::uint64_t cap = kEnumerationCap);
/// Single-threaded reference for enumerate_log_weights.
std::vector<double> enumerate_log_weights_serial(const CompiledHamiltonian& h, std::uint64_t cap = kEnumerationCap);

/// log(sum exp(v)) with max-shift, reduced chunk by chunk in a thread-count independent order.
double log_sum_exp(std::span<const double> v);

double partition_function(const Potential& potential, const Window& window, const std::optional<Boundary>& boundary,
                          std::uint64_t cap = kEnumerationCap);

FiniteGibbsMeasure gibbs_kernel(const Potential& potential, const Window& window,
                                const std::optional<Boundary>& boundary, std::uint64_t cap = kEnumerationCap);

/// Single-site specification kernel gamma_{x}(. | rest of `spins`), written into `out` (size |S|).
/// This is the one code path shared by enumeration checks, the heat-bath sampler and the
/// Dobrushin interdependence computation.
void single_site_kernel(const CompiledHamiltonian& h, std::span<const Symbol> spins, std::size_t site,
                        std::span<double> out);
std::vector<double> single_site_kernel(const CompiledHamiltonian& h, std::span<const Symbol> spins, std::size_t site);

/// Maximal DLR violation over cylinder events of the centered sub-box of side `sub_side`
/// (and their refinements by the pattern outside it). Requires a collar >= range inside the window.
double dlr_check(const FiniteGibbsMeasure& mu, int sub_side);

/// Marginal on an arbitrary list of window site indices (pattern in the given order).
std::vector<double> marginalize(const FiniteGibbsMeasure& mu, std::span<const std::size_t> sites);

/// Marginal on Lambda_k (centered windows only).
PatternDistribution exact_marginal(const FiniteGibbsMeasure& mu, int k);

/// Window indices of Lambda_k inside a centered window, lexicographic.
std::vector<std::size_t> cube_indices(const Window& window, int k);

}  // namespace gibbslab

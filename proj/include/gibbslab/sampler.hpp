#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"
#include "gibbslab/philox.hpp"
#include "gibbslab/potential.hpp"
#include "gibbslab/statistics.hpp"

namespace gibbslab {

enum class UpdateKernel { HeatBath, Metropolis };
enum class SweepOrder { Lexicographic, Random };
enum class InitialState { Random, Uniform };

std::string_view to_string(UpdateKernel k);
UpdateKernel parse_kernel(std::string_view text);

class ResourceCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Default budget in single-site updates over all chains.
inline constexpr double kSiteUpdateCap = 5e10;

struct ChainConfig {
  ChainConfig(Window w, std::optional<Boundary> b, Potential p) : window(std::move(w)), boundary(std::move(b)), potential(std::move(p)) {}

  Window window;
  std::optional<Boundary> boundary;
  Potential potential;
  UpdateKernel kernel = UpdateKernel::HeatBath;
  SweepOrder order = SweepOrder::Lexicographic;
  InitialState init = InitialState::Random;
  Symbol init_symbol = 0;
  std::uint64_t burnin = 1000;
  std::uint64_t between = 1;
  std::uint64_t samples = 1000;
  std::uint64_t chains = 1;
  std::uint64_t seed = 0;
  double site_update_cap = kSiteUpdateCap;

  /// Throws std::invalid_argument on bad counts and ResourceCapExceeded on budget overrun.
  void validate() const;
  double site_updates() const;
};

struct SampleSet {
  ChainConfig config;
  std::vector<Configuration> samples;
  /// chain index of each sample
  std::vector<std::uint32_t> chain_of;
};

/// One sweep over all sites (lexicographic, or |Lambda| uniformly chosen sites) resampling each
/// visited site from its single-site kernel. `sweep` indexes the random stream.
void heat_bath_sweep(std::span<Symbol> spins, const CompiledHamiltonian& h, const ChainRng& rng, std::uint64_t sweep,
                     SweepOrder order = SweepOrder::Lexicographic);
void metropolis_sweep(std::span<Symbol> spins, const CompiledHamiltonian& h, const ChainRng& rng, std::uint64_t sweep,
                      SweepOrder order = SweepOrder::Lexicographic);

/// Value-semantics convenience wrapper around heat_bath_sweep.
Configuration heat_bath_sweep(const Configuration& omega, const Potential& potential, const ChainRng& rng,
                              std::uint64_t sweep, SweepOrder order = SweepOrder::Lexicographic);

/// Parallel over chains; merged by chain index.
SampleSet run_chains(const ChainConfig& cfg);
/// Chains run one after another; identical output to run_chains.
SampleSet run_chains_serial(const ChainConfig& cfg);

/// Observables evaluated on every sample without storing configurations.
/// Result is indexed [observable][chain][sample].
using ObservableFn = std::function<void(std::span<const Symbol> spins, std::span<double> out)>;
std::vector<ChainSeries> sample_observables(const ChainConfig& cfg, std::size_t n_observables, const ObservableFn& f);
std::vector<ChainSeries> sample_observables_serial(const ChainConfig& cfg, std::size_t n_observables,
                                                   const ObservableFn& f);

struct EventEstimate {
  double p = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;
  /// One-sided 95% bound 3/n reported when no sample hits the event.
  std::optional<double> upper_bound;
};

EventEstimate estimate_event_probability(const ChainConfig& cfg,
                                         const std::function<bool(const Configuration&)>& event);
EventEstimate estimate_from_indicators(const ChainSeries& indicators);

}  // namespace gibbslab

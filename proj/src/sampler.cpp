#include "gibbslab/sampler.hpp"

#include <omp.h>

#include <cmath>

#include "gibbslab/specification.hpp"

namespace gibbslab {
namespace {

std::size_t choose_site(const ChainRng& rng, std::uint64_t sweep, std::uint64_t step, std::size_t n, SweepOrder order) {
  if (order == SweepOrder::Lexicographic) return static_cast<std::size_t>(step);
  const auto u = rng.block(sweep, step, ChainRng::kSiteChoice)[0];
  return static_cast<std::size_t>((static_cast<unsigned __int128>(u) * n) >> 64);
}

Symbol draw(std::span<const double> probs, double u) {
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < probs.size(); ++s) {
    acc += probs[s];
    if (u < acc) return static_cast<Symbol>(s);
  }
  return static_cast<Symbol>(probs.size() - 1);
}

void initialise(std::span<Symbol> spins, const ChainConfig& cfg, const ChainRng& rng) {
  const auto a = static_cast<std::uint64_t>(cfg.window.alphabet());
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (cfg.init == InitialState::Uniform) {
      spins[i] = cfg.init_symbol;
    } else {
      const auto u = rng.block(0, i, ChainRng::kInit)[0];
      spins[i] = static_cast<Symbol>((static_cast<unsigned __int128>(u) * a) >> 64);
    }
  }
}

void sweep_once(std::span<Symbol> spins, const CompiledHamiltonian& h, const ChainRng& rng, std::uint64_t sweep,
                const ChainConfig& cfg) {
  if (cfg.kernel == UpdateKernel::HeatBath)
    heat_bath_sweep(spins, h, rng, sweep, cfg.order);
  else
    metropolis_sweep(spins, h, rng, sweep, cfg.order);
}

// Runs one chain and hands every recorded sample to `record`.
template <class Record>
void run_one_chain(const ChainConfig& cfg, const CompiledHamiltonian& h, std::uint64_t chain, Record&& record) {
  const ChainRng rng(cfg.seed, chain);
  std::vector<Symbol> spins(cfg.window.size());
  initialise(spins, cfg, rng);
  std::uint64_t sweep = 0;
  for (std::uint64_t t = 0; t < cfg.burnin; ++t) sweep_once(spins, h, rng, sweep++, cfg);
  for (std::uint64_t s = 0; s < cfg.samples; ++s) {
    for (std::uint64_t t = 0; t < cfg.between; ++t) sweep_once(spins, h, rng, sweep++, cfg);
    record(s, std::span<const Symbol>(spins));
  }
}

SampleSet collect(const ChainConfig& cfg, bool parallel) {
  cfg.validate();
  const CompiledHamiltonian h(cfg.potential, cfg.window, cfg.boundary);
  std::vector<std::vector<std::vector<Symbol>>> per_chain(cfg.chains);
  const auto n = static_cast<std::int64_t>(cfg.chains);
  auto body = [&](std::int64_t c) {
    auto& out = per_chain[static_cast<std::size_t>(c)];
    out.reserve(cfg.samples);
    run_one_chain(cfg, h, static_cast<std::uint64_t>(c),
                  [&](std::uint64_t, std::span<const Symbol> s) { out.emplace_back(s.begin(), s.end()); });
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < n; ++c) body(c);
  } else {
    for (std::int64_t c = 0; c < n; ++c) body(c);
  }
  SampleSet set{cfg, {}, {}};
  set.samples.reserve(cfg.chains * cfg.samples);
  for (std::size_t c = 0; c < per_chain.size(); ++c)
    for (auto& s : per_chain[c]) {
      set.samples.emplace_back(cfg.window, std::move(s), cfg.boundary);
      set.chain_of.push_back(static_cast<std::uint32_t>(c));
    }
  return set;
}

std::vector<ChainSeries> observe(const ChainConfig& cfg, std::size_t n_obs, const ObservableFn& f, bool parallel) {
  cfg.validate();
  const CompiledHamiltonian h(cfg.potential, cfg.window, cfg.boundary);
  std::vector<ChainSeries> out(n_obs, ChainSeries(cfg.chains, std::vector<double>(cfg.samples)));
  const auto n = static_cast<std::int64_t>(cfg.chains);
  auto body = [&](std::int64_t c) {
    const auto ci = static_cast<std::size_t>(c);
    std::vector<double> values(n_obs);
    run_one_chain(cfg, h, static_cast<std::uint64_t>(c), [&](std::uint64_t s, std::span<const Symbol> spins) {
      f(spins, values);
      for (std::size_t k = 0; k < n_obs; ++k) out[k][ci][s] = values[k];
    });
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < n; ++c) body(c);
  } else {
    for (std::int64_t c = 0; c < n; ++c) body(c);
  }
  return out;
}

}  // namespace

std::string_view to_string(UpdateKernel k) { return k == UpdateKernel::HeatBath ? "heat-bath" : "metropolis"; }

UpdateKernel parse_kernel(std::string_view text) {
  if (text == "heat-bath" || text == "heatbath" || text == "glauber") return UpdateKernel::HeatBath;
  if (text == "metropolis") return UpdateKernel::Metropolis;
  throw std::invalid_argument("unknown update kernel '" + std::string(text) + "'");
}

double ChainConfig::site_updates() const {
  return static_cast<double>(window.size()) *
         (static_cast<double>(burnin) + static_cast<double>(samples) * static_cast<double>(between)) *
         static_cast<double>(chains);
}

void ChainConfig::validate() const {
  if (burnin < 1 || between < 1 || samples < 1 || chains < 1)
    throw std::invalid_argument("chain counts (burn-in, spacing, samples, chains) must all be >= 1");
  if (potential.dim() != window.dim() || potential.alphabet() != window.alphabet())
    throw std::invalid_argument("potential does not match the window");
  if ((window.geometry() == Geometry::FixedBoundary) != boundary.has_value())
    throw std::invalid_argument("boundary spins must be given exactly for fixed-boundary windows");
  if (init == InitialState::Uniform && init_symbol >= window.alphabet())
    throw std::invalid_argument("initial symbol out of alphabet");
  if (site_updates() > site_update_cap) throw ResourceCapExceeded("sampling budget exceeds the site-update cap");
}

void heat_bath_sweep(std::span<Symbol> spins, const CompiledHamiltonian& h, const ChainRng& rng, std::uint64_t sweep,
                     SweepOrder order) {
  const std::size_t n = spins.size();
  double probs[256];
  const std::span<double> p(probs, static_cast<std::size_t>(h.alphabet()));
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t site = choose_site(rng, sweep, step, n, order);
    single_site_kernel(h, spins, site, p);
    spins[site] = draw(p, rng.uniform(sweep, step));
  }
}

void metropolis_sweep(std::span<Symbol> spins, const CompiledHamiltonian& h, const ChainRng& rng, std::uint64_t sweep,
                      SweepOrder order) {
  const std::size_t n = spins.size();
  const auto a = static_cast<std::uint64_t>(h.alphabet());
  double energies[256];
  const std::span<double> e(energies, a);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t site = choose_site(rng, sweep, step, n, order);
    const auto block = rng.block(sweep, step, ChainRng::kUpdate);
    // Uniform proposal among the |S| - 1 other symbols.
    auto proposal = static_cast<Symbol>((static_cast<unsigned __int128>(block[0]) * (a - 1)) >> 64);
    if (proposal >= spins[site]) ++proposal;
    h.local_energies(spins, site, e);
    const double delta = e[proposal] - e[spins[site]];
    if (delta <= 0.0 || to_unit(block[1]) < std::exp(-delta)) spins[site] = proposal;
  }
}

Configuration heat_bath_sweep(const Configuration& omega, const Potential& potential, const ChainRng& rng,
                              std::uint64_t sweep, SweepOrder order) {
  const CompiledHamiltonian h(potential, omega.window(), omega.boundary());
  std::vector<Symbol> spins(omega.spins().begin(), omega.spins().end());
  heat_bath_sweep(spins, h, rng, sweep, order);
  return Configuration(omega.window(), std::move(spins), omega.boundary());
}

SampleSet run_chains(const ChainConfig& cfg) { return collect(cfg, true); }
SampleSet run_chains_serial(const ChainConfig& cfg) { return collect(cfg, false); }

std::vector<ChainSeries> sample_observables(const ChainConfig& cfg, std::size_t n_observables, const ObservableFn& f) {
  return observe(cfg, n_observables, f, true);
}

std::vector<ChainSeries> sample_observables_serial(const ChainConfig& cfg, std::size_t n_observables,
                                                   const ObservableFn& f) {
  return observe(cfg, n_observables, f, false);
}

EventEstimate estimate_from_indicators(const ChainSeries& indicators) {
  EventEstimate est;
  for (const auto& c : indicators)
    for (double v : c) {
      ++est.n;
      est.hits += v != 0.0;
    }
  if (est.n == 0) throw std::invalid_argument("no samples");
  if (est.hits == 0) {
    est.upper_bound = 3.0 / static_cast<double>(est.n);
    est.ess = static_cast<double>(est.n);
    return est;
  }
  if (est.hits == est.n) {
    est.p = 1.0;
    est.ess = static_cast<double>(est.n);
    return est;
  }
  const auto bm = batch_means(indicators);
  est.p = bm.value;
  est.std_error = bm.std_error;
  est.ess = bm.ess;
  return est;
}

EventEstimate estimate_event_probability(const ChainConfig& cfg,
                                         const std::function<bool(const Configuration&)>& event) {
  auto series = sample_observables(cfg, 1, [&](std::span<const Symbol> spins, std::span<double> out) {
    const Configuration omega(cfg.window, std::vector<Symbol>(spins.begin(), spins.end()), cfg.boundary);
    out[0] = event(omega) ? 1.0 : 0.0;
  });
  return estimate_from_indicators(series[0]);
}

}  // namespace gibbslab

#include "gibbslab/specification.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbslab/parallel.hpp"

namespace gibbslab {
namespace {

// Advances a base-|S| odometer whose last entry is least significant.
void increment(std::vector<Symbol>& spins, int alphabet) {
  for (std::size_t i = spins.size(); i-- > 0;) {
    if (++spins[i] < alphabet) return;
    spins[i] = 0;
  }
}

void fill_chunk(const CompiledHamiltonian& h, std::uint64_t chunk, std::uint64_t total, std::vector<Symbol>& spins,
                std::vector<double>& out) {
  const std::uint64_t begin = chunk * kReductionChunk;
  const std::uint64_t end = std::min(total, begin + kReductionChunk);
  decode_symbols(begin, h.alphabet(), spins);
  for (std::uint64_t c = begin; c < end; ++c) {
    out[c] = -h.energy(spins);
    increment(spins, h.alphabet());
  }
}

std::vector<std::uint64_t> site_weights(const Window& w) {
  std::vector<std::uint64_t> weight(w.size());
  std::uint64_t v = 1;
  for (std::size_t i = w.size(); i-- > 0;) {
    weight[i] = v;
    v *= static_cast<std::uint64_t>(w.alphabet());
  }
  return weight;
}

}  // namespace

std::uint64_t state_count(const Window& window, std::uint64_t cap) {
  if (!code_fits(window.alphabet(), window.size()) || pattern_space_size(window.alphabet(), window.size()) > cap)
    throw EnumerationCapExceeded("state space |S|^|Lambda| exceeds the enumeration cap");
  return pattern_space_size(window.alphabet(), window.size());
}

std::vector<double> enumerate_log_weights(const CompiledHamiltonian& h, std::uint64_t cap) {
  const std::uint64_t total = state_count(h.window(), cap);
  std::vector<double> out(total);
  const auto chunks = static_cast<std::int64_t>(chunk_count(total));
#pragma omp parallel
  {
    std::vector<Symbol> spins(h.window().size());
#pragma omp for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) fill_chunk(h, static_cast<std::uint64_t>(c), total, spins, out);
  }
  return out;
}

std::vector<double> enumerate_log_weights_serial(const CompiledHamiltonian& h, std::uint64_t cap) {
  const std::uint64_t total = state_count(h.window(), cap);
  std::vector<double> out(total);
  std::vector<Symbol> spins(h.window().size());
  decode_symbols(0, h.alphabet(), spins);
  for (std::uint64_t c = 0; c < total; ++c) {
    out[c] = -h.energy(spins);
    increment(spins, h.alphabet());
  }
  return out;
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  const std::uint64_t n = v.size();
  const auto chunks = static_cast<std::int64_t>(chunk_count(n));
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kReductionChunk;
    const std::uint64_t end = std::min(n, begin + kReductionChunk);
    double s = 0.0;
    for (std::uint64_t i = begin; i < end; ++i) s += std::exp(v[i] - m);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return m + std::log(s);
}

double partition_function(const Potential& potential, const Window& window, const std::optional<Boundary>& boundary,
                          std::uint64_t cap) {
  state_count(window, cap);
  const CompiledHamiltonian h(potential, window, boundary);
  const auto lw = enumerate_log_weights(h, cap);
  return log_sum_exp(lw);
}

FiniteGibbsMeasure gibbs_kernel(const Potential& potential, const Window& window,
                                const std::optional<Boundary>& boundary, std::uint64_t cap) {
  state_count(window, cap);
  const CompiledHamiltonian h(potential, window, boundary);
  auto probs = enumerate_log_weights(h, cap);
  const double log_z = log_sum_exp(probs);
  const auto n = static_cast<std::int64_t>(probs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) probs[static_cast<std::size_t>(i)] = std::exp(probs[static_cast<std::size_t>(i)] - log_z);
  return FiniteGibbsMeasure{window, boundary, potential, std::move(probs), log_z};
}

std::vector<Symbol> FiniteGibbsMeasure::configuration(std::uint64_t code) const {
  return decode_symbols(code, window.size(), window.alphabet());
}

Configuration FiniteGibbsMeasure::configuration_at(std::uint64_t code) const {
  return Configuration(window, configuration(code), boundary);
}

PatternDistribution FiniteGibbsMeasure::as_distribution() const {
  return PatternDistribution::from_dense(window.alphabet(), window.size(), window.is_centered() ? window.radius() : -1,
                                         probs);
}

double FiniteGibbsMeasure::expectation(const std::function<double(std::span<const Symbol>)>& f) const {
  std::vector<Symbol> spins(window.size());
  double e = 0.0;
  for (std::uint64_t c = 0; c < probs.size(); ++c) {
    decode_symbols(c, window.alphabet(), spins);
    e += probs[c] * f(spins);
  }
  return e;
}

void single_site_kernel(const CompiledHamiltonian& h, std::span<const Symbol> spins, std::size_t site,
                        std::span<double> out) {
  h.local_energies(spins, site, out);
  double lo = out[0];
  for (double e : out) lo = std::min(lo, e);
  double z = 0.0;
  for (double& e : out) {
    e = std::exp(lo - e);
    z += e;
  }
  for (double& e : out) e /= z;
}

std::vector<double> single_site_kernel(const CompiledHamiltonian& h, std::span<const Symbol> spins, std::size_t site) {
  std::vector<double> out(static_cast<std::size_t>(h.alphabet()));
  single_site_kernel(h, spins, site, out);
  return out;
}

std::vector<double> marginalize(const FiniteGibbsMeasure& mu, std::span<const std::size_t> sites) {
  const int a = mu.window.alphabet();
  std::vector<double> out(pattern_space_size(a, sites.size()), 0.0);
  std::vector<Symbol> spins(mu.window.size());
  std::vector<Symbol> sub(sites.size());
  for (std::uint64_t c = 0; c < mu.probs.size(); ++c) {
    decode_symbols(c, a, spins);
    for (std::size_t i = 0; i < sites.size(); ++i) sub[i] = spins[sites[i]];
    out[encode_symbols(sub, a)] += mu.probs[c];
  }
  return out;
}

std::vector<std::size_t> cube_indices(const Window& window, int k) {
  if (!window.is_centered()) throw std::invalid_argument("sub-cube of an even-sided window");
  if (k < 0 || k > window.radius()) throw std::out_of_range("sub-cube radius larger than the window");
  std::vector<std::size_t> idx;
  for (const Site& s : box_sites(window.dim(), k)) idx.push_back(window.index_of(s));
  return idx;
}

PatternDistribution exact_marginal(const FiniteGibbsMeasure& mu, int k) {
  const auto idx = cube_indices(mu.window, k);
  return PatternDistribution::from_dense(mu.window.alphabet(), idx.size(), k, marginalize(mu, idx));
}

double dlr_check(const FiniteGibbsMeasure& mu, int sub_side) {
  const Window& w = mu.window;
  if (sub_side < 1 || sub_side > w.side() || (w.side() - sub_side) % 2 != 0)
    throw std::invalid_argument("sub-window must be a centered box inside the window");
  const int collar = (w.side() - sub_side) / 2;
  const int range = mu.potential.range();
  if (collar < range) throw std::invalid_argument("collar between sub-window and window is thinner than the range");

  const Window sub(w.dim(), sub_side, Geometry::FixedBoundary, w.alphabet());
  std::vector<std::size_t> inner, outer;
  for (std::size_t i = 0; i < w.size(); ++i) (sub.contains(w.site_at(i)) ? inner : outer).push_back(i);
  const auto collar_pos = collar_sites(sub, range);
  std::vector<std::size_t> collar_idx;
  for (const auto& s : collar_pos) collar_idx.push_back(w.index_of(s));

  const auto weight = site_weights(w);
  const int a = w.alphabet();
  const std::uint64_t n_in = pattern_space_size(a, inner.size());
  const std::uint64_t n_out = pattern_space_size(a, outer.size());

  std::vector<double> cylinder_lhs(n_in, 0.0), cylinder_rhs(n_in, 0.0);
  double worst = 0.0;
  std::vector<Symbol> in_sym(inner.size()), out_sym(outer.size()), full(w.size()), collar_vals(collar_idx.size());
  for (std::uint64_t b = 0; b < n_out; ++b) {
    decode_symbols(b, a, out_sym);
    std::uint64_t base = 0;
    for (std::size_t i = 0; i < outer.size(); ++i) {
      full[outer[i]] = out_sym[i];
      base += weight[outer[i]] * out_sym[i];
    }
    for (std::size_t i = 0; i < collar_idx.size(); ++i) collar_vals[i] = full[collar_idx[i]];

    // gamma_{sub}( . | exterior pattern b), from the sub-window's own Hamiltonian.
    const CompiledHamiltonian hs(mu.potential, sub, Boundary::collar(sub, range, collar_vals));
    auto gamma = enumerate_log_weights_serial(hs);
    const double lz = log_sum_exp(gamma);
    for (double& g : gamma) g = std::exp(g - lz);

    std::vector<double> joint(n_in);
    double mu_b = 0.0;
    for (std::uint64_t ai = 0; ai < n_in; ++ai) {
      decode_symbols(ai, a, in_sym);
      std::uint64_t code = base;
      for (std::size_t i = 0; i < inner.size(); ++i) code += weight[inner[i]] * in_sym[i];
      joint[ai] = mu.probs[code];
      mu_b += joint[ai];
    }
    for (std::uint64_t ai = 0; ai < n_in; ++ai) {
      worst = std::max(worst, std::abs(joint[ai] - mu_b * gamma[ai]));
      cylinder_lhs[ai] += joint[ai];
      cylinder_rhs[ai] += mu_b * gamma[ai];
    }
  }
  for (std::uint64_t ai = 0; ai < n_in; ++ai) worst = std::max(worst, std::abs(cylinder_lhs[ai] - cylinder_rhs[ai]));
  return worst;
}

}  // namespace gibbslab

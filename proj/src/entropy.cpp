#include "gibbslab/entropy.hpp"

#include <cmath>

#include "gibbslab/defaults.hpp"

namespace gibbslab {
namespace {

std::string describe_pattern(const std::vector<Symbol>& p) {
  std::string s;
  for (Symbol x : p) s += std::to_string(static_cast<int>(x));
  return s;
}

std::uint64_t code_or_zero(const std::vector<Symbol>& p, int alphabet) {
  return code_fits(alphabet, p.size()) ? encode_symbols(p, alphabet) : 0;
}

}  // namespace

AbsoluteContinuityError::AbsoluteContinuityError(std::vector<Symbol> pattern, int alphabet)
    : std::domain_error("nu is not absolutely continuous w.r.t. mu: pattern " + describe_pattern(pattern) +
                        " (code " + std::to_string(code_or_zero(pattern, alphabet)) + ") has mu = 0 < nu"),
      pattern_(std::move(pattern)),
      code_(code_or_zero(pattern_, alphabet)) {}

double relative_entropy(const PatternDistribution& nu, const PatternDistribution& mu) {
  if (!nu.same_shape(mu)) throw std::invalid_argument("relative entropy needs distributions over the same patterns");
  double h = 0.0;
  nu.for_each([&](std::span<const Symbol> p, double v) {
    const double q = mu.probability(p);
    if (q <= 0.0) throw AbsoluteContinuityError(std::vector<Symbol>(p.begin(), p.end()), nu.alphabet());
    h += v * std::log(v / q);
  });
  return h > 0.0 ? h : 0.0;
}

InequalityCheck abs_entropy_bound_check(const PatternDistribution& nu, const PatternDistribution& mu) {
  InequalityCheck c;
  const double h = relative_entropy(nu, mu);
  nu.for_each([&](std::span<const Symbol> p, double v) { c.lhs += v * std::abs(std::log(v / mu.probability(p))); });
  c.rhs = h + defaults::kAbsEntropySlack;
  c.ok = c.lhs <= c.rhs + 1e-12;
  return c;
}

EntropyReport per_site_entropy_sequence(const Potential& nu_potential, const Potential& mu_potential,
                                        const std::vector<int>& sides, const BoundaryCondition& nu_boundary,
                                        const BoundaryCondition& mu_boundary, std::uint64_t cap) {
  if (nu_potential.dim() != mu_potential.dim() || nu_potential.alphabet() != mu_potential.alphabet())
    throw std::invalid_argument("entropy probe needs potentials on the same lattice and alphabet");
  EntropyReport r;
  for (int side : sides) {
    const Window wn(nu_potential.dim(), side, nu_boundary.geometry, nu_potential.alphabet());
    const Window wm(mu_potential.dim(), side, mu_boundary.geometry, mu_potential.alphabet());
    // dense tables over the same code space; large windows never go through the sparse map
    const auto nu = gibbs_kernel(nu_potential, wn, nu_boundary.boundary, cap).probs;
    const auto mu = gibbs_kernel(mu_potential, wm, mu_boundary.boundary, cap).probs;
    double h = 0.0;
    for (std::uint64_t c = 0; c < nu.size(); ++c) {
      if (nu[c] == 0.0) continue;
      if (mu[c] <= 0.0) throw AbsoluteContinuityError(decode_symbols(c, wn.size(), wn.alphabet()), wn.alphabet());
      h += nu[c] * std::log(nu[c] / mu[c]);
    }
    h = h > 0.0 ? h : 0.0;
    r.sides.push_back(side);
    r.volumes.push_back(wn.size());
    r.H.push_back(h);
    r.per_site.push_back(h / static_cast<double>(wn.size()));
  }
  const std::size_t m = r.per_site.size();
  r.decreasing = m >= 2;
  r.nonincreasing = true;
  for (std::size_t i = 1; i < m; ++i) {
    if (!(r.per_site[i] < r.per_site[i - 1])) r.decreasing = false;
    if (r.per_site[i] > r.per_site[i - 1]) r.nonincreasing = false;
  }
  if (m > 0) {
    double lo = r.per_site[0], hi = r.per_site[0];
    for (double v : r.per_site) lo = std::min(lo, v), hi = std::max(hi, v);
    r.spread = hi - lo;
  }
  if (m >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = r.sides[i], y = r.per_site[i];
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double den = static_cast<double>(m) * sxx - sx * sx;
    r.slope = den != 0.0 ? (static_cast<double>(m) * sxy - sx * sy) / den : 0.0;
  }
  return r;
}

}  // namespace gibbslab

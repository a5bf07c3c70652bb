#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gibbslab/observables.hpp"
#include "gibbslab/pattern_distribution.hpp"
#include "gibbslab/potential.hpp"
#include "gibbslab/specification.hpp"

namespace gibbslab {

/// nu charges a pattern that mu does not.
class AbsoluteContinuityError : public std::domain_error {
 public:
  AbsoluteContinuityError(std::vector<Symbol> pattern, int alphabet);
  const std::vector<Symbol>& pattern() const { return pattern_; }
  /// Pattern code when it fits 63 bits.
  std::uint64_t code() const { return code_; }

 private:
  std::vector<Symbol> pattern_;
  std::uint64_t code_ = 0;
};

/// sum nu log(nu / mu), natural log, 0 log 0 = 0. Throws AbsoluteContinuityError.
double relative_entropy(const PatternDistribution& nu, const PatternDistribution& mu);

/// sum nu |log(nu / mu)| against H(nu|mu) + 2/e.
InequalityCheck abs_entropy_bound_check(const PatternDistribution& nu, const PatternDistribution& mu);

struct EntropyReport {
  std::vector<int> sides;
  std::vector<std::size_t> volumes;
  std::vector<double> H;
  std::vector<double> per_site;
  bool decreasing = false;
  bool nonincreasing = false;
  /// least-squares slope of per_site against side
  double slope = 0.0;
  /// largest per-site value minus smallest
  double spread = 0.0;
};

/// H(nu_Lambda | mu_Lambda) / |Lambda| over boxes of the given sides, with both measures the exact
/// finite-volume measures of their potentials and boundary conditions.
EntropyReport per_site_entropy_sequence(const Potential& nu_potential, const Potential& mu_potential,
                                        const std::vector<int>& sides, const BoundaryCondition& nu_boundary,
                                        const BoundaryCondition& mu_boundary,
                                        std::uint64_t cap = kEnumerationCap);

}  // namespace gibbslab

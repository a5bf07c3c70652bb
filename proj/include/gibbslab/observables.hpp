#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"
#include "gibbslab/pattern_distribution.hpp"

namespace gibbslab {

/// Largest dependence set a table-backed local function may have.
inline constexpr std::size_t kMaxTableSites = 20;

class DependenceTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Real function of the spins on a finite dependence set.
///
/// Two representations: a dense table over S^dep (indexed by encode_symbols in dependence-set
/// order), or an additive form sum_i g_i(omega_{x_i}) + c whose oscillations are known in closed
/// form. The additive form is what makes magnetizations of large windows usable.
class LocalFunction {
 public:
  static LocalFunction table(std::string name, int dim, std::vector<Site> dependence, int alphabet,
                             std::vector<double> values);
  static LocalFunction from_callable(std::string name, int dim, std::vector<Site> dependence, int alphabet,
                                     const std::function<double(std::span<const Symbol>)>& fn);
  /// per_site[i][s] is the contribution of symbol s at dependence[i].
  static LocalFunction additive(std::string name, int dim, std::vector<Site> dependence, int alphabet,
                                std::vector<std::vector<double>> per_site, double constant = 0.0);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int alphabet() const { return alphabet_; }
  const std::vector<Site>& dependence() const { return dependence_; }
  bool is_table() const { return !table_.empty(); }
  bool is_additive() const { return table_.empty(); }
  const std::vector<double>& values() const { return table_; }
  const std::vector<std::vector<double>>& per_site() const { return per_site_; }
  double constant() const { return constant_; }

  /// Value on symbols listed in dependence-set order.
  double evaluate(std::span<const Symbol> restricted) const;
  /// F(theta_shift omega): reads omega at dependence + shift (boundary or torus wrap as needed).
  double operator()(const Configuration& omega, const Site& shift) const;
  double operator()(const Configuration& omega) const;

  /// Additive form of a single-site table or an additive function; nullopt otherwise.
  std::optional<LocalFunction> as_additive() const;
  LocalFunction scaled(double factor, std::string name) const;

 private:
  LocalFunction() = default;
  std::string name_;
  int dim_ = 1;
  int alphabet_ = 2;
  std::vector<Site> dependence_;
  std::vector<double> table_;
  std::vector<std::vector<double>> per_site_;
  double constant_ = 0.0;
};

/// Evaluator of a local function on raw spin arrays of one window (boundary spins read once).
class BoundFunction {
 public:
  BoundFunction(const LocalFunction& f, const Window& window, const std::optional<Boundary>& boundary,
                const Site& shift = Site{});
  double operator()(std::span<const Symbol> spins) const;

 private:
  const LocalFunction* f_;
  // window index per dependence site, or -1 with the fixed symbol in fixed_
  std::vector<std::int64_t> index_;
  std::vector<Symbol> fixed_;
};

/// omega_x in the +-1 presentation (|S| = 2).
LocalFunction site_spin(int dim, const Site& x);
LocalFunction site_spin(int dim);
/// prod_i omega_{x_i}.
LocalFunction spin_product(int dim, std::vector<Site> sites);
LocalFunction constant_function(int dim, int alphabet, double c);
/// sum of +-1 spins over the sites (|S| = 2), optionally divided by the site count.
LocalFunction magnetization(int dim, const std::vector<Site>& sites, bool normalized = false);
/// 1{omega restricted to the sites equals the pattern}.
LocalFunction pattern_indicator(int dim, int alphabet, std::vector<Site> sites, std::vector<Symbol> pattern);

struct OscillationVector {
  std::vector<Site> sites;
  std::vector<double> delta;
  double l1 = 0.0;
  double l2sq = 0.0;
  double at(const Site& x) const;
};

/// delta_x(F) = sup |F(omega) - F(omega')| over pairs differing only at x, by brute force over the
/// table (closed form for the additive representation). Parallel over sites.
OscillationVector oscillation_vector(const LocalFunction& f);
OscillationVector oscillation_vector_serial(const LocalFunction& f);

/// S_Lambda f = sum_{x in Lambda} f o theta_x with dependence set Lambda + dep(f).
/// On a torus window the translated sites are wrapped back into the window.
LocalFunction block_sum(const LocalFunction& f, const Window& lambda);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

/// ||delta(S_Lambda f)||_2^2 against |Lambda| ||delta(f)||_1^2.
InequalityCheck young_bound_check(const LocalFunction& f, const Window& lambda);

/// f_{n,k}(omega; .) with anchors x in Lambda_{n-k} reading Lambda_k + x. Centered windows only.
PatternDistribution empirical_frequency(const Configuration& omega, int k);

/// (1/2) sum over patterns |p - q|.
double tv_distance(const PatternDistribution& p, const PatternDistribution& q);

struct ShieldsCheck {
  double tv = 0.0;
  double bound = 0.0;
  bool ok = false;
  std::size_t hamming = 0;
  int n_breve = 0;
  double epsilon = 0.0;
  double rho = 0.0;
  /// n >= N-breve and hamming <= rho (2n+1)^d
  bool lemma_applies = false;
  /// tv <= epsilon / 2 (only meaningful when lemma_applies)
  bool lemma_ok = true;
};

/// Smallest n > k with ((2n+1)/(2(n-k)+1))^d <= 5/4.
int n_breve(int d, int k);
double shields_rho(double epsilon, int d, int k);

/// Frequency-difference bound for two configurations of one window. Without an epsilon the
/// smallest epsilon for which the Hamming condition holds is used.
ShieldsCheck shields_bound_check(const Configuration& omega, const Configuration& eta, int k,
                                 std::optional<double> epsilon = std::nullopt);

}  // namespace gibbslab

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gibbslab/lattice.hpp"

namespace gibbslab {

/// Probability table over S^A for a fixed site set A (usually Lambda_k).
/// Dense below 2^20 entries, sparse map keyed by the symbol array above.
class PatternDistribution {
 public:
  enum class Kind { Exact, Empirical };

  static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 20;

  PatternDistribution(int alphabet, std::size_t pattern_sites, int radius, Kind kind, std::uint64_t samples = 0);

  /// Exact distribution over a dense probability vector indexed by pattern code.
  static PatternDistribution from_dense(int alphabet, std::size_t pattern_sites, int radius,
                                        std::vector<double> probs, Kind kind = Kind::Exact,
                                        std::uint64_t samples = 0);

  int alphabet() const { return alphabet_; }
  std::size_t pattern_sites() const { return sites_; }
  /// Radius k of Lambda_k, or -1 when the shape is not a centered cube.
  int radius() const { return radius_; }
  Kind kind() const { return kind_; }
  std::uint64_t samples() const { return samples_; }
  bool is_dense() const { return !dense_.empty(); }

  double probability(std::span<const Symbol> pattern) const;
  double probability(std::uint64_t code) const;
  void add(std::span<const Symbol> pattern, double mass);

  double total() const;
  void scale(double factor);

  /// Visits every pattern with nonzero mass in increasing code / lexicographic order.
  void for_each(const std::function<void(std::span<const Symbol>, double)>& fn) const;

  bool same_shape(const PatternDistribution& other) const;

  /// Dense probability vector (throws when the pattern space is too large).
  const std::vector<double>& dense() const;

 private:
  int alphabet_;
  std::size_t sites_;
  int radius_;
  Kind kind_;
  std::uint64_t samples_;
  std::vector<double> dense_;
  std::map<std::vector<Symbol>, double> sparse_;
};

}  // namespace gibbslab

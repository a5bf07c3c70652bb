#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/observables.hpp"
#include "gibbslab/potential.hpp"
#include "gibbslab/sampler.hpp"
#include "gibbslab/specification.hpp"
#include "gibbslab/statistics.hpp"

namespace gibbslab {

enum class Verdict { Pass, Fail, Inconclusive };
std::string_view to_string(Verdict v);
/// Fail dominates, then inconclusive.
Verdict combine(Verdict a, Verdict b);

/// Three-valued comparison of an estimate lhs +- std_error against an upper bound rhs (3 sigma).
Verdict compare_upper(double lhs, double std_error, double rhs);

/// {+-0.1, +-0.25, +-0.5, +-1, +-2} / ||delta F||_2, dropping points with |lambda| ||delta F||_1 > 20.
/// A function without oscillation gets the unscaled grid.
std::vector<double> default_lambda_grid(const OscillationVector& osc);

struct GcbPoint {
  double lambda = 0.0;
  /// log E exp(lambda (F - E F))
  double lhs = 0.0;
  double std_error = 0.0;
  /// D lambda^2 ||delta F||_2^2
  double rhs = 0.0;
  Verdict verdict = Verdict::Pass;
};

struct GcbTestReport {
  std::optional<double> D;
  bool exact = true;
  double delta_l1 = 0.0;
  double delta_l2sq = 0.0;
  double mean = 0.0;
  std::vector<double> lambda_grid;
  std::vector<GcbPoint> points;
  Verdict verdict = Verdict::Pass;
  std::uint64_t n = 0;
  double ess = 0.0;
};

/// Exact mode: the MGF is enumerated under the finite-volume measure.
GcbTestReport gcb_test(const FiniteGibbsMeasure& mu, const LocalFunction& F, double D,
                       std::optional<std::vector<double>> grid = std::nullopt);
/// Empirical mode on an observed series of F values, with batch-means errors.
GcbTestReport gcb_test(const ChainSeries& values, const OscillationVector& osc, double D,
                       std::optional<std::vector<double>> grid = std::nullopt);
/// Empirical mode driving the sampler.
GcbTestReport gcb_test(const ChainConfig& cfg, const LocalFunction& F, double D,
                       std::optional<std::vector<double>> grid = std::nullopt);

/// exp(-u^2 / (4 D ||delta F||_2^2)).
double tail_bound(double D, double u, double delta_l2sq);
double two_sided_tail_bound(double D, double u, double delta_l2sq);

struct BoundCheck {
  double value = 0.0;
  double bound = 0.0;
  double std_error = 0.0;
  bool ok = false;
};

/// mu(F - E F >= u) against tail_bound, exactly.
BoundCheck tail_bound_check(const FiniteGibbsMeasure& mu, const LocalFunction& F, double D, double u);

/// Var(F) against 2 D ||delta F||_2^2.
BoundCheck variance_bound_check(const FiniteGibbsMeasure& mu, const LocalFunction& F, double D);
/// Empirical variance with batch-means error; ok when var - 3 sigma <= bound.
BoundCheck variance_bound_check(const ChainSeries& values, const OscillationVector& osc, double D);

/// Values of F on every configuration code of the measure's window.
std::vector<double> function_values(const FiniteGibbsMeasure& mu, const LocalFunction& F);

/// Largest configuration space handled by the exact blow-up machinery.
inline constexpr std::uint64_t kBlowupExactCap = std::uint64_t{1} << 22;
/// Largest C scanned per sample in sampled mode.
inline constexpr std::uint64_t kBlowupSampledSetCap = std::uint64_t{1} << 16;

inline constexpr std::uint16_t kUnreached = 0xFFFF;

/// Hamming distance from every configuration code of `sites` sites to the set C, by
/// multi-source breadth-first search stopped after `max_level` levels (farther codes stay
/// kUnreached). Level-synchronous, parallel over codes.
std::vector<std::uint16_t> hamming_distance_to_set(std::size_t sites, int alphabet, const std::vector<std::uint64_t>& C,
                                                   int max_level = -1);
std::vector<std::uint16_t> hamming_distance_to_set_serial(std::size_t sites, int alphabet,
                                                          const std::vector<std::uint64_t>& C, int max_level = -1);

/// Codes omega with dbar(omega, C) < epsilon |Lambda|, sorted.
std::vector<std::uint64_t> blowup_set(const std::vector<std::uint64_t>& C, double epsilon, const Window& window);

/// epsilon > 2 sqrt(D log(1/mu[C]) / |Lambda|)
bool blowup_applicable(double mass_C, double epsilon, double D, std::size_t volume);
/// 1 - exp[-(|Lambda|/4D)(epsilon - 2 sqrt(D log(1/mu[C])) / sqrt|Lambda|)^2]
double blowup_bound(double mass_C, double epsilon, double D, std::size_t volume);

struct BlowupReport {
  std::size_t volume = 0;
  std::size_t set_size = 0;
  double epsilon = 0.0;
  double D = 0.0;
  double mass_C = 0.0;
  double mass_blowup = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool applicable = false;
  bool exact = true;
  /// vacuously true outside the applicable range
  bool ok = true;
};

BlowupReport blowup_bound_check(const FiniteGibbsMeasure& mu, const std::vector<std::uint64_t>& C, double epsilon,
                                double D);
/// Sampled mode: both masses estimated from the chains; membership by scanning C.
BlowupReport blowup_bound_check(const ChainConfig& cfg, const std::vector<std::uint64_t>& C, double epsilon,
                                double D);

enum class DeviationEvent {
  /// S f / |Lambda| >= E f + epsilon/3
  Upper,
  /// S f / |Lambda| in ]E f + 2 epsilon/3, E f + 4 epsilon/3[, a subset of Upper
  Interval,
  /// S f / |Lambda| <= threshold
  BlockMeanAtMost,
};
std::string_view to_string(DeviationEvent e);
DeviationEvent parse_deviation_event(std::string_view text);

struct DeviationOptions {
  DeviationEvent event = DeviationEvent::Upper;
  double threshold = 0.0;
  /// Certified constant; enables the per-site floor assertion.
  std::optional<double> D;
  /// Sampling parameters for windows beyond the enumeration cap.
  std::uint64_t burnin = 1000;
  std::uint64_t samples = 10000;
  std::uint64_t chains = 4;
  std::uint64_t seed = 0;
  std::uint64_t enumeration_cap = kEnumerationCap;
};

struct DeviationPoint {
  int side = 0;
  std::size_t volume = 0;
  bool exact = true;
  double mean = 0.0;
  double p = 0.0;
  double std_error = 0.0;
  /// mass of the interval event (Upper and Interval scans)
  double p_interval = 0.0;
  /// -log p / |Lambda|; +infinity when p = 0
  double rate = 0.0;
  std::optional<double> upper_bound;
  double ess = 0.0;
  /// every configuration in the interval event lies in the upper event
  bool inclusion_ok = true;
  bool above_floor = true;
};

struct DeviationScan {
  DeviationEvent event = DeviationEvent::Upper;
  double epsilon = 0.0;
  double threshold = 0.0;
  std::optional<double> D;
  double delta_l1 = 0.0;
  /// epsilon^2 / (36 D ||delta f||_1^2), when D is given
  std::optional<double> floor;
  std::vector<DeviationPoint> points;
  bool decreasing = false;
  bool ok = true;
};

/// Per-site deviation rates of the block average of f over windows of the given sides.
DeviationScan deviation_rate_scan(const Potential& potential, const BoundaryCondition& bc, const LocalFunction& f,
                                  double epsilon, const std::vector<int>& sides, const DeviationOptions& options = {});

}  // namespace gibbslab

#include "gibbslab/concentration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>

#include "gibbslab/defaults.hpp"
#include "gibbslab/parallel.hpp"

namespace gibbslab {
namespace {

constexpr double kTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// log mean exp(lambda (x - mean x)), max-shifted.
double centered_log_mgf(std::span<const double> x, double lambda) {
  const double m = mean(x);
  double top = -kInf;
  for (double v : x) top = std::max(top, lambda * (v - m));
  double s = 0.0;
  for (double v : x) s += std::exp(lambda * (v - m) - top);
  return top + std::log(s / static_cast<double>(x.size()));
}

/// `slack` absorbs floating-point rounding of an exactly enumerated lhs.
GcbPoint point_for(double lambda, double lhs, double se, double rhs, bool exact, double slack = 0.0) {
  GcbPoint p{lambda, lhs, se, rhs, Verdict::Pass};
  if (exact)
    p.verdict = lhs <= rhs * (1.0 + kTol) + slack ? Verdict::Pass : Verdict::Fail;
  else
    p.verdict = compare_upper(lhs, se, rhs);
  return p;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Pass;
}

Verdict compare_upper(double lhs, double std_error, double rhs) {
  const double k = defaults::kSigmaMultiplier;
  if (lhs > rhs + k * std_error) return Verdict::Fail;
  if (lhs + k * std_error <= rhs) return Verdict::Pass;
  return Verdict::Inconclusive;
}

std::vector<double> default_lambda_grid(const OscillationVector& osc) {
  const auto& base = defaults::kLambdaGrid;
  const double scale = osc.l2sq > 0.0 ? 1.0 / std::sqrt(osc.l2sq) : 1.0;
  std::vector<double> grid;
  for (auto it = base.rbegin(); it != base.rend(); ++it) grid.push_back(-*it * scale);
  for (double b : base) grid.push_back(b * scale);
  std::erase_if(grid, [&](double l) { return std::abs(l) * osc.l1 > defaults::kLambdaOscillationCap; });
  return grid;
}

std::vector<double> function_values(const FiniteGibbsMeasure& mu, const LocalFunction& F) {
  const BoundFunction bound(F, mu.window, mu.boundary);
  const auto size = static_cast<std::uint64_t>(mu.probs.size());
  std::vector<double> values(size);
  const auto chunks = static_cast<std::int64_t>(chunk_count(size));
  const int a = mu.window.alphabet();
#pragma omp parallel
  {
    std::vector<Symbol> buf(mu.window.size());
#pragma omp for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::uint64_t begin = static_cast<std::uint64_t>(c) * kReductionChunk;
      const std::uint64_t end = std::min(size, begin + kReductionChunk);
      for (std::uint64_t code = begin; code < end; ++code) {
        decode_symbols(code, a, buf);
        values[code] = bound(buf);
      }
    }
  }
  return values;
}

GcbTestReport gcb_test(const FiniteGibbsMeasure& mu, const LocalFunction& F, double D,
                       std::optional<std::vector<double>> grid) {
  const auto osc = oscillation_vector(F);
  GcbTestReport r;
  r.D = D;
  r.exact = true;
  r.delta_l1 = osc.l1;
  r.delta_l2sq = osc.l2sq;
  r.lambda_grid = grid ? *grid : default_lambda_grid(osc);
  r.n = mu.probs.size();
  const auto values = function_values(mu, F);
  double m = 0.0, mass = 0.0, spread = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += mu.probs[i] * values[i], mass += mu.probs[i];
  m /= mass;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (mu.probs[i] > 0.0) spread = std::max(spread, std::abs(values[i] - m));
  r.mean = m;
  const double eps = std::numeric_limits<double>::epsilon();
  const double terms = static_cast<double>(values.size());
  for (double lambda : r.lambda_grid) {
    double top = -kInf;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (mu.probs[i] > 0.0) top = std::max(top, lambda * (values[i] - m));
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (mu.probs[i] > 0.0) s += mu.probs[i] * std::exp(lambda * (values[i] - m) - top);
    const double lhs = top + std::log(s / mass);
    // summation error of the log-sum plus the error carried by the centring
    const double slack = 4.0 * eps * (terms + 1.0) + 4.0 * eps * std::abs(lambda) * (spread + std::abs(m));
    r.points.push_back(point_for(lambda, lhs, 0.0, D * lambda * lambda * osc.l2sq, true, slack));
    r.verdict = combine(r.verdict, r.points.back().verdict);
  }
  return r;
}

GcbTestReport gcb_test(const ChainSeries& values, const OscillationVector& osc, double D,
                       std::optional<std::vector<double>> grid) {
  GcbTestReport r;
  r.D = D;
  r.exact = false;
  r.delta_l1 = osc.l1;
  r.delta_l2sq = osc.l2sq;
  r.lambda_grid = grid ? *grid : default_lambda_grid(osc);
  const auto all = pooled(values);
  r.n = all.size();
  r.mean = mean(all);
  r.ess = effective_sample_size(values);
  for (double lambda : r.lambda_grid) {
    const auto est = batch_statistic(values, [lambda](std::span<const double> x) { return centered_log_mgf(x, lambda); });
    r.points.push_back(point_for(lambda, est.value, est.std_error, D * lambda * lambda * osc.l2sq, false));
    r.verdict = combine(r.verdict, r.points.back().verdict);
  }
  return r;
}

GcbTestReport gcb_test(const ChainConfig& cfg, const LocalFunction& F, double D,
                       std::optional<std::vector<double>> grid) {
  const BoundFunction bound(F, cfg.window, cfg.boundary);
  auto series = sample_observables(cfg, 1, [&](std::span<const Symbol> s, std::span<double> out) { out[0] = bound(s); });
  return gcb_test(series[0], oscillation_vector(F), D, std::move(grid));
}

double tail_bound(double D, double u, double delta_l2sq) {
  if (!(u > 0.0)) throw std::invalid_argument("tail bound needs u > 0");
  if (!(delta_l2sq > 0.0)) throw std::invalid_argument("tail bound needs a function with nonzero oscillation");
  if (!(D > 0.0)) throw std::invalid_argument("tail bound needs D > 0");
  return std::exp(-u * u / (4.0 * D * delta_l2sq));
}

double two_sided_tail_bound(double D, double u, double delta_l2sq) { return 2.0 * tail_bound(D, u, delta_l2sq); }

BoundCheck tail_bound_check(const FiniteGibbsMeasure& mu, const LocalFunction& F, double D, double u) {
  const auto osc = oscillation_vector(F);
  const auto values = function_values(mu, F);
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += mu.probs[i] * values[i];
  BoundCheck c;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] - m >= u) c.value += mu.probs[i];
  c.bound = tail_bound(D, u, osc.l2sq);
  c.ok = c.value <= c.bound * (1.0 + kTol);
  return c;
}

BoundCheck variance_bound_check(const FiniteGibbsMeasure& mu, const LocalFunction& F, double D) {
  const auto osc = oscillation_vector(F);
  const auto values = function_values(mu, F);
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += mu.probs[i] * values[i];
  BoundCheck c;
  for (std::size_t i = 0; i < values.size(); ++i) c.value += mu.probs[i] * (values[i] - m) * (values[i] - m);
  c.bound = 2.0 * D * osc.l2sq;
  c.ok = c.value <= c.bound * (1.0 + kTol) + kTol * 1e-3;
  return c;
}

BoundCheck variance_bound_check(const ChainSeries& values, const OscillationVector& osc, double D) {
  const auto est = batch_statistic(values, [](std::span<const double> x) { return sample_variance(x); });
  BoundCheck c;
  c.value = est.value;
  c.std_error = est.std_error;
  c.bound = 2.0 * D * osc.l2sq;
  c.ok = c.value - 3.0 * c.std_error <= c.bound;
  return c;
}

namespace {

void check_bfs_args(std::size_t sites, int alphabet, const std::vector<std::uint64_t>& C, std::uint64_t& size) {
  if (C.empty()) throw std::invalid_argument("blow-up of an empty set");
  if (sites >= kUnreached) throw std::invalid_argument("too many sites for Hamming search");
  if (!code_fits(alphabet, sites) || (size = pattern_space_size(alphabet, sites)) > kBlowupExactCap)
    throw EnumerationCapExceeded("exact Hamming search is capped at 2^22 configurations");
  for (auto c : C)
    if (c >= size) throw std::invalid_argument("configuration code out of range");
}

std::vector<std::uint64_t> place_values(std::size_t sites, int alphabet) {
  std::vector<std::uint64_t> w(sites);
  std::uint64_t p = 1;
  for (std::size_t i = sites; i-- > 0;) {
    w[i] = p;
    p *= static_cast<std::uint64_t>(alphabet);
  }
  return w;
}

}  // namespace

std::vector<std::uint16_t> hamming_distance_to_set(std::size_t sites, int alphabet, const std::vector<std::uint64_t>& C,
                                                   int max_level) {
  std::uint64_t size = 0;
  check_bfs_args(sites, alphabet, C, size);
  const auto w = place_values(sites, alphabet);
  const auto a = static_cast<std::uint64_t>(alphabet);
  std::vector<std::uint16_t> dist(size, kUnreached);
  std::vector<std::uint64_t> frontier;
  for (auto c : C)
    if (dist[c] == kUnreached) {
      dist[c] = 0;
      frontier.push_back(c);
    }
  const int last = max_level < 0 ? static_cast<int>(sites) : std::min<int>(max_level, static_cast<int>(sites));
  // Top-down frontier expansion; a code is claimed by whichever thread swaps it out of kUnreached
  // first, and every claimant writes the same level, so the result does not depend on scheduling.
  for (int level = 0; level < last && !frontier.empty(); ++level) {
    const auto next_level = static_cast<std::uint16_t>(level + 1);
    std::vector<std::uint64_t> next;
    const auto n = static_cast<std::int64_t>(frontier.size());
#pragma omp parallel
    {
      std::vector<std::uint64_t> local;
      auto claim = [&](std::uint64_t nb) {
        std::atomic_ref<std::uint16_t> slot(dist[nb]);
        std::uint16_t expected = kUnreached;
        if (slot.load(std::memory_order_relaxed) == kUnreached &&
            slot.compare_exchange_strong(expected, next_level, std::memory_order_relaxed))
          local.push_back(nb);
      };
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        const std::uint64_t code = frontier[static_cast<std::size_t>(i)];
        for (std::size_t s = 0; s < sites; ++s) {
          if (a == 2) {
            claim(code ^ w[s]);
            continue;
          }
          const std::uint64_t digit = (code / w[s]) % a;
          const std::uint64_t base = code - digit * w[s];
          for (std::uint64_t v = 0; v < a; ++v)
            if (v != digit) claim(base + v * w[s]);
        }
      }
#pragma omp critical(gibbslab_bfs_merge)
      next.insert(next.end(), local.begin(), local.end());
    }
    frontier.swap(next);
  }
  return dist;
}

std::vector<std::uint16_t> hamming_distance_to_set_serial(std::size_t sites, int alphabet,
                                                          const std::vector<std::uint64_t>& C, int max_level) {
  std::uint64_t size = 0;
  check_bfs_args(sites, alphabet, C, size);
  const auto w = place_values(sites, alphabet);
  const auto a = static_cast<std::uint64_t>(alphabet);
  std::vector<std::uint16_t> dist(size, kUnreached);
  std::deque<std::uint64_t> queue;
  for (auto c : C)
    if (dist[c] == kUnreached) {
      dist[c] = 0;
      queue.push_back(c);
    }
  const int last = max_level < 0 ? static_cast<int>(sites) : max_level;
  while (!queue.empty()) {
    const auto code = queue.front();
    queue.pop_front();
    if (dist[code] >= last) continue;
    for (std::size_t s = 0; s < sites; ++s) {
      const std::uint64_t digit = (code / w[s]) % a;
      const std::uint64_t base = code - digit * w[s];
      for (std::uint64_t v = 0; v < a; ++v) {
        const auto nb = base + v * w[s];
        if (dist[nb] == kUnreached) {
          dist[nb] = static_cast<std::uint16_t>(dist[code] + 1);
          queue.push_back(nb);
        }
      }
    }
  }
  return dist;
}

std::vector<std::uint64_t> blowup_set(const std::vector<std::uint64_t>& C, double epsilon, const Window& window) {
  if (C.empty()) throw std::invalid_argument("blow-up of an empty set");
  if (epsilon <= 0.0) return {};
  const double radius = epsilon * static_cast<double>(window.size());
  // largest integer distance strictly below epsilon |Lambda|
  const int max_level = static_cast<int>(std::min(std::ceil(radius) - 1.0, static_cast<double>(window.size())));
  const auto dist = hamming_distance_to_set(window.size(), window.alphabet(), C, max_level);
  std::vector<std::uint64_t> out;
  for (std::uint64_t code = 0; code < dist.size(); ++code)
    if (dist[code] != kUnreached && static_cast<double>(dist[code]) < radius) out.push_back(code);
  return out;
}

bool blowup_applicable(double mass_C, double epsilon, double D, std::size_t volume) {
  if (!(mass_C > 0.0)) throw std::invalid_argument("blow-up bound needs mu([C]) > 0");
  return epsilon > 2.0 * std::sqrt(D * std::log(1.0 / mass_C) / static_cast<double>(volume));
}

double blowup_bound(double mass_C, double epsilon, double D, std::size_t volume) {
  if (!(mass_C > 0.0)) throw std::invalid_argument("blow-up bound needs mu([C]) > 0");
  const double vol = static_cast<double>(volume);
  const double gap = epsilon - 2.0 * std::sqrt(D * std::log(1.0 / mass_C)) / std::sqrt(vol);
  return 1.0 - std::exp(-(vol / (4.0 * D)) * gap * gap);
}

BlowupReport blowup_bound_check(const FiniteGibbsMeasure& mu, const std::vector<std::uint64_t>& C, double epsilon,
                                double D) {
  BlowupReport r;
  r.volume = mu.window.size();
  r.set_size = C.size();
  r.epsilon = epsilon;
  r.D = D;
  for (auto c : C) {
    if (c >= mu.probs.size()) throw std::invalid_argument("configuration code out of range");
    r.mass_C += mu.probs[c];
  }
  if (!(r.mass_C > 0.0)) throw std::invalid_argument("blow-up bound needs mu([C]) > 0");
  for (auto code : blowup_set(C, epsilon, mu.window)) r.mass_blowup += mu.probs[code];
  r.applicable = blowup_applicable(r.mass_C, epsilon, D, r.volume);
  r.bound = blowup_bound(r.mass_C, epsilon, D, r.volume);
  r.ok = !r.applicable || r.mass_blowup >= r.bound - kTol;
  return r;
}

BlowupReport blowup_bound_check(const ChainConfig& cfg, const std::vector<std::uint64_t>& C, double epsilon,
                                double D) {
  if (C.empty()) throw std::invalid_argument("blow-up of an empty set");
  if (C.size() > kBlowupSampledSetCap) throw std::length_error("sampled blow-up scans at most 2^16 codes of C");
  const std::size_t m = cfg.window.size();
  const int a = cfg.window.alphabet();
  if (!code_fits(a, m)) throw std::length_error("window too large for configuration codes");
  std::vector<std::vector<Symbol>> members;
  for (auto c : C) members.push_back(decode_symbols(c, m, a));
  const double radius = epsilon * static_cast<double>(m);
  auto series = sample_observables(cfg, 2, [&](std::span<const Symbol> s, std::span<double> out) {
    std::size_t best = m + 1;
    for (const auto& c : members) {
      best = std::min(best, hamming_distance(s, c));
      if (best == 0) break;
    }
    out[0] = best == 0 ? 1.0 : 0.0;
    out[1] = static_cast<double>(best) < radius ? 1.0 : 0.0;
  });
  const auto in_c = estimate_from_indicators(series[0]);
  const auto in_blowup = estimate_from_indicators(series[1]);
  BlowupReport r;
  r.exact = false;
  r.volume = m;
  r.set_size = C.size();
  r.epsilon = epsilon;
  r.D = D;
  r.mass_C = in_c.p;
  if (in_c.hits == 0) throw std::invalid_argument("no sample hit C; its mass cannot be estimated");
  r.mass_blowup = in_blowup.p;
  r.std_error = in_blowup.std_error;
  r.applicable = blowup_applicable(r.mass_C, epsilon, D, m);
  r.bound = blowup_bound(r.mass_C, epsilon, D, m);
  r.ok = !r.applicable || r.mass_blowup >= r.bound - 3.0 * r.std_error;
  return r;
}

std::string_view to_string(DeviationEvent e) {
  switch (e) {
    case DeviationEvent::Upper: return "upper";
    case DeviationEvent::Interval: return "interval";
    case DeviationEvent::BlockMeanAtMost: return "block-mean-at-most";
  }
  return "?";
}

DeviationEvent parse_deviation_event(std::string_view text) {
  if (text == "upper") return DeviationEvent::Upper;
  if (text == "interval") return DeviationEvent::Interval;
  if (text == "block-mean-at-most") return DeviationEvent::BlockMeanAtMost;
  throw std::invalid_argument("unknown deviation event '" + std::string(text) + "'");
}

namespace {

struct EventTest {
  DeviationEvent event;
  double mean;
  double epsilon;
  double threshold;
  double margin() const { return epsilon * defaults::kEventMarginFraction; }
  bool upper(double a) const { return a >= mean + margin() - kTol; }
  bool interval(double a) const {
    return a > mean + epsilon - margin() + kTol && a < mean + epsilon + margin() - kTol;
  }
  bool primary(double a) const {
    switch (event) {
      case DeviationEvent::Upper: return upper(a);
      case DeviationEvent::Interval: return interval(a);
      case DeviationEvent::BlockMeanAtMost: return a <= threshold + kTol;
    }
    return false;
  }
};

}  // namespace

DeviationScan deviation_rate_scan(const Potential& potential, const BoundaryCondition& bc, const LocalFunction& f,
                                  double epsilon, const std::vector<int>& sides, const DeviationOptions& options) {
  if (sides.empty()) throw std::invalid_argument("deviation scan needs at least one window size");
  if (options.event != DeviationEvent::BlockMeanAtMost && !(epsilon > 0.0))
    throw std::invalid_argument("deviation scan needs epsilon > 0");
  DeviationScan scan;
  scan.event = options.event;
  scan.epsilon = epsilon;
  scan.threshold = options.threshold;
  scan.D = options.D;
  scan.delta_l1 = oscillation_vector(f).l1;
  const bool floored = options.D && options.event != DeviationEvent::BlockMeanAtMost && scan.delta_l1 > 0.0;
  if (floored) scan.floor = epsilon * epsilon / (defaults::kDeviationDenominator * *options.D * scan.delta_l1 * scan.delta_l1);

  for (int side : sides) {
    const Window window(potential.dim(), side, bc.geometry, potential.alphabet());
    const auto S = block_sum(f, window);
    const BoundFunction sum(S, window, bc.boundary);
    const double vol = static_cast<double>(window.size());
    DeviationPoint pt;
    pt.side = side;
    pt.volume = window.size();

    bool enumerable = true;
    try {
      state_count(window, options.enumeration_cap);
    } catch (const EnumerationCapExceeded&) {
      enumerable = false;
    }

    if (enumerable) {
      const auto mu = gibbs_kernel(potential, window, bc.boundary, options.enumeration_cap);
      const auto values = function_values(mu, S);
      double m = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) m += mu.probs[i] * values[i] / vol;
      const EventTest test{options.event, m, epsilon, options.threshold};
      pt.mean = m;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double avg = values[i] / vol;
        if (test.primary(avg)) pt.p += mu.probs[i];
        if (options.event != DeviationEvent::BlockMeanAtMost && test.interval(avg)) {
          pt.p_interval += mu.probs[i];
          if (!test.upper(avg)) pt.inclusion_ok = false;
        }
      }
      pt.exact = true;
      pt.ess = kInf;
      pt.rate = pt.p > 0.0 ? -std::log(pt.p) / vol : kInf;
      if (floored) pt.above_floor = pt.rate >= *scan.floor * (1.0 - kTol);
    } else {
      ChainConfig cfg(window, bc.boundary, potential);
      cfg.burnin = options.burnin;
      cfg.samples = options.samples;
      cfg.chains = options.chains;
      cfg.seed = mix_seed(options.seed, static_cast<std::uint64_t>(side));
      auto series = sample_observables(cfg, 1, [&](std::span<const Symbol> s, std::span<double> out) { out[0] = sum(s) / vol; });
      const double m = mean(pooled(series[0]));
      const EventTest test{options.event, m, epsilon, options.threshold};
      ChainSeries hits = series[0], inner = series[0];
      for (std::size_t c = 0; c < hits.size(); ++c)
        for (std::size_t t = 0; t < hits[c].size(); ++t) {
          const double avg = series[0][c][t];
          hits[c][t] = test.primary(avg) ? 1.0 : 0.0;
          const bool in_interval = options.event != DeviationEvent::BlockMeanAtMost && test.interval(avg);
          inner[c][t] = in_interval ? 1.0 : 0.0;
          if (in_interval && !test.upper(avg)) pt.inclusion_ok = false;
        }
      const auto est = estimate_from_indicators(hits);
      pt.exact = false;
      pt.mean = m;
      pt.p = est.p;
      pt.std_error = est.std_error;
      pt.ess = est.ess;
      pt.upper_bound = est.upper_bound;
      if (options.event != DeviationEvent::BlockMeanAtMost) pt.p_interval = estimate_from_indicators(inner).p;
      pt.rate = est.hits > 0 ? -std::log(est.p) / vol : -std::log(*est.upper_bound) / vol;
      if (floored && est.hits > 0)
        pt.above_floor = -std::log(std::min(1.0, est.p + 3.0 * est.std_error)) / vol >= *scan.floor;
    }
    scan.ok = scan.ok && pt.inclusion_ok && pt.above_floor;
    scan.points.push_back(pt);
  }
  scan.decreasing = scan.points.size() >= 2;
  for (std::size_t i = 1; i < scan.points.size(); ++i)
    if (!(std::isfinite(scan.points[i - 1].rate) && scan.points[i].rate < scan.points[i - 1].rate))
      scan.decreasing = false;
  return scan;
}

}  // namespace gibbslab

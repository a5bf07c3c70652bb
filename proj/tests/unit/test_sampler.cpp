#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "gibbslab/parallel.hpp"
#include "gibbslab/sampler.hpp"
#include "gibbslab/specification.hpp"
#include "gibbslab/statistics.hpp"

using namespace gibbslab;

namespace {

std::uint64_t draw(std::mt19937_64& rng, const std::vector<double>& cdf) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return static_cast<std::uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) c[i] = (s += p[i]);
  c.back() = 1.0;
  return c;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("philox known answers") {
    // Random123 vectors, cross-checked against numpy.random.Philox
    using P = Philox4x64;
    const std::uint64_t m = ~std::uint64_t{0};
    CHECK(P::generate({0, 0, 0, 0}, {0, 0}) ==
          P::Counter{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL});
    CHECK(P::generate({m, m, m, m}, {m, m}) ==
          P::Counter{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL, 0xa09caebf594f0ba0ULL});
    CHECK(P::generate({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                      {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}) ==
          P::Counter{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL, 0x57bd43b5e52b7fe6ULL});
    CHECK(P::generate({7, 3, 1, 0}, {42, 5}) ==
          P::Counter{0x619369551fbf1ff3ULL, 0xef268def2d9658abULL, 0x05b9fbe0c55b4d8cULL, 0x2d864e3d461bb800ULL});
    CHECK(to_unit(0) == 0.0);
    CHECK(to_unit(m) < 1.0);
  }

  TEST_CASE("infinite temperature sweep forgets its input") {
    const Window w(1, 3, Geometry::Free, 2);
    const CompiledHamiltonian h(ising_potential(1, 0.0), w, std::nullopt);
    const ChainRng rng(17, 0);
    const std::uint64_t n = 40000;
    std::vector<double> counts(8, 0.0);
    for (std::uint64_t t = 0; t < n; ++t) {
      std::vector<Symbol> s{1, 0, 1};
      heat_bath_sweep(s, h, rng, t);
      counts[encode_symbols(s, 2)] += 1.0;
    }
    const double p = 1.0 / 8.0, sigma = std::sqrt(p * (1 - p) / n);
    for (double c : counts) CHECK(std::abs(c / n - p) <= 3 * sigma);
  }

  TEST_CASE("one sweep of a single site samples the kernel") {
    const auto pot = ising_potential(1, 0.8, 0.1);
    const Window w(1, 1, Geometry::FixedBoundary, 2);
    const auto mu = gibbs_kernel(pot, w, Boundary::uniform(1));
    const CompiledHamiltonian h(pot, w, Boundary::uniform(1));
    const ChainRng rng(3, 0);
    const std::uint64_t n = 100000;
    double plus = 0.0;
    for (std::uint64_t t = 0; t < n; ++t) {
      std::vector<Symbol> s{0};
      heat_bath_sweep(s, h, rng, t);
      plus += s[0];
    }
    const double p = mu.probs[1];
    CHECK(std::abs(plus / n - p) <= 3 * std::sqrt(p * (1 - p) / n));
  }

  TEST_CASE("random-order sweeps satisfy detailed balance") {
    const auto pot = ising_potential(1, 0.6, 0.2);
    const Window w(1, 2, Geometry::Free, 2);
    const auto mu = gibbs_kernel(pot, w, std::nullopt);
    const CompiledHamiltonian h(pot, w, std::nullopt);
    const ChainRng rng(99, 0);
    const std::uint64_t n = 50000;
    std::vector<std::vector<double>> P(4, std::vector<double>(4, 0.0));
    std::uint64_t sweep = 0;
    for (std::uint64_t a = 0; a < 4; ++a)
      for (std::uint64_t t = 0; t < n; ++t) {
        auto s = decode_symbols(a, 2, 2);
        heat_bath_sweep(s, h, rng, sweep++, SweepOrder::Random);
        P[a][encode_symbols(s, 2)] += 1.0 / n;
      }
    for (std::uint64_t a = 0; a < 4; ++a)
      for (std::uint64_t b = a + 1; b < 4; ++b) {
        const double pa = mu.probs[a], pb = mu.probs[b];
        const double sigma =
            std::sqrt(pa * pa * P[a][b] * (1 - P[a][b]) / n + pb * pb * P[b][a] * (1 - P[b][a]) / n);
        CHECK(std::abs(pa * P[a][b] - pb * P[b][a]) <= 3 * sigma + 1e-15);
      }
  }

  TEST_CASE("sweeps preserve the exact measure") {
    for (auto kernel : {UpdateKernel::HeatBath, UpdateKernel::Metropolis}) {
      const auto pot = ising_potential(1, 0.5, 0.2);
      const Window w(1, 5, Geometry::FixedBoundary, 2);
      const Boundary b = Boundary::uniform(1);
      const auto mu = gibbs_kernel(pot, w, b);
      const auto cdf = cumulative(mu.probs);
      const CompiledHamiltonian h(pot, w, b);
      const ChainRng rng(5, 1);
      std::mt19937_64 start(8);
      const std::uint64_t n = 200000;
      std::vector<double> counts(mu.probs.size(), 0.0);
      for (std::uint64_t t = 0; t < n; ++t) {
        auto s = decode_symbols(draw(start, cdf), w.size(), 2);
        if (kernel == UpdateKernel::HeatBath)
          heat_bath_sweep(s, h, rng, t);
        else
          metropolis_sweep(s, h, rng, t);
        counts[encode_symbols(s, 2)] += 1.0;
      }
      double chi2 = 0.0;
      for (std::size_t c = 0; c < counts.size(); ++c) {
        const double e = n * mu.probs[c];
        chi2 += (counts[c] - e) * (counts[c] - e) / e;
      }
      const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
      CHECK(chi2 < boost::math::quantile(dist, 0.999));
    }
  }

  TEST_CASE("chains are reproducible across runs and thread counts") {
    ChainConfig cfg(Window(2, 6, Geometry::Torus, 3), std::nullopt, potts_potential(2, 0.7, 3));
    cfg.burnin = 20;
    cfg.samples = 30;
    cfg.chains = 5;
    cfg.seed = 1234;
    cfg.order = SweepOrder::Random;
    const auto a = run_chains(cfg);
    const auto b = run_chains(cfg);
    const auto c = run_chains_serial(cfg);
    SampleSet d = [&] {
      ThreadLimit limit(3);
      return run_chains(cfg);
    }();
    CHECK(a.samples == b.samples);
    CHECK(a.samples == c.samples);
    CHECK(a.samples == d.samples);
    CHECK(a.chain_of == c.chain_of);
    cfg.seed = 1235;
    CHECK_FALSE(run_chains(cfg).samples == a.samples);
  }

  TEST_CASE("observable series match between parallel and serial runners") {
    ChainConfig cfg(Window(2, 5, Geometry::FixedBoundary, 2), Boundary::uniform(1), ising_potential(2, 0.3));
    cfg.burnin = 10;
    cfg.samples = 50;
    cfg.chains = 3;
    cfg.kernel = UpdateKernel::Metropolis;
    auto m = [](std::span<const Symbol> s, std::span<double> out) {
      out[0] = 0;
      for (Symbol x : s) out[0] += ising_value(x);
      out[1] = s[0];
    };
    CHECK(sample_observables(cfg, 2, m) == sample_observables_serial(cfg, 2, m));
  }

  TEST_CASE("infinite temperature magnetization is centred") {
    ChainConfig cfg(Window(2, 8, Geometry::Torus, 2), std::nullopt, ising_potential(2, 0.0));
    cfg.burnin = 10;
    cfg.samples = 10000;
    cfg.chains = 2;
    const auto series = sample_observables(cfg, 1, [](std::span<const Symbol> s, std::span<double> out) {
      out[0] = 0;
      for (Symbol x : s) out[0] += ising_value(x);
    });
    const auto est = batch_means(series[0]);
    CHECK(std::abs(est.value) <= 3 * est.std_error);
    CHECK(est.ess > 10000);
  }

  TEST_CASE("sampled block marginal matches exact enumeration") {
    const auto pot = ising_potential(2, 0.2);
    const Window w(2, 4, Geometry::Torus, 2);
    const auto mu = gibbs_kernel(pot, w, std::nullopt);
    const std::vector<std::size_t> block{w.index_of(Site{0, 0}), w.index_of(Site{0, 1}), w.index_of(Site{1, 0}),
                                         w.index_of(Site{1, 1})};
    const auto exact = marginalize(mu, block);
    ChainConfig cfg(w, std::nullopt, pot);
    cfg.burnin = 100;
    cfg.samples = 20000;
    cfg.chains = 2;
    cfg.seed = 4;
    const auto series = sample_observables(cfg, 1, [&](std::span<const Symbol> s, std::span<double> out) {
      std::vector<Symbol> p;
      for (auto i : block) p.push_back(s[i]);
      out[0] = static_cast<double>(encode_symbols(p, 2));
    });
    std::vector<double> freq(16, 0.0);
    const auto all = pooled(series[0]);
    for (double c : all) freq[static_cast<std::size_t>(c)] += 1.0 / static_cast<double>(all.size());
    double tv = 0.0;
    for (std::size_t c = 0; c < 16; ++c) tv += 0.5 * std::abs(freq[c] - exact[c]);
    CHECK(tv < 0.02);
  }

  TEST_CASE("event probabilities") {
    ChainConfig hot(Window(2, 4, Geometry::Torus, 2), std::nullopt, ising_potential(2, 0.0));
    hot.burnin = 10;
    hot.samples = 5000;
    hot.chains = 2;
    const auto always = estimate_event_probability(hot, [](const Configuration&) { return true; });
    CHECK(always.p == 1.0);
    CHECK(always.std_error == 0.0);
    const auto centre = estimate_event_probability(hot, [](const Configuration& c) { return c.at(Site{0, 0}) == 1; });
    CHECK(std::abs(centre.p - 0.5) <= 3 * centre.std_error);
    const auto never = estimate_event_probability(hot, [](const Configuration&) { return false; });
    CHECK(never.p == 0.0);
    REQUIRE(never.upper_bound.has_value());
    CHECK(*never.upper_bound == doctest::Approx(3.0 / 10000.0));

    const auto pot = ising_potential(2, 0.5);
    const Window w(2, 3, Geometry::FixedBoundary, 2);
    const auto mu = gibbs_kernel(pot, w, Boundary::uniform(1));
    double exact = 0.0;
    for (std::uint64_t c = 0; c < mu.probs.size(); ++c) {
      int m = 0;
      for (Symbol x : mu.configuration(c)) m += x ? 1 : -1;
      if (m <= 0) exact += mu.probs[c];
    }
    ChainConfig cfg(w, Boundary::uniform(1), pot);
    cfg.burnin = 1000;
    cfg.samples = 50000;
    cfg.chains = 4;
    cfg.seed = 21;
    const auto est = estimate_event_probability(cfg, [](const Configuration& c) {
      int m = 0;
      for (Symbol x : c.spins()) m += x ? 1 : -1;
      return m <= 0;
    });
    CHECK(est.hits > 0);
    CHECK(std::abs(est.p - exact) <= 3 * est.std_error);
  }

  TEST_CASE("configuration validation") {
    ChainConfig cfg(Window(2, 4, Geometry::FixedBoundary, 2), std::nullopt, ising_potential(2, 0.1));
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    ChainConfig big(Window(2, 64, Geometry::Torus, 2), std::nullopt, ising_potential(2, 0.1));
    big.samples = 1000000;
    big.chains = 100;
    CHECK_THROWS_AS(big.validate(), ResourceCapExceeded);
    ChainConfig zero(Window(1, 4, Geometry::Torus, 2), std::nullopt, ising_potential(1, 0.1));
    zero.samples = 0;
    CHECK_THROWS_AS(zero.validate(), std::invalid_argument);
    CHECK(parse_kernel("metropolis") == UpdateKernel::Metropolis);
    CHECK_THROWS(parse_kernel("swendsen-wang"));
  }
}

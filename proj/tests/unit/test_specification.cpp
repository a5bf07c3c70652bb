#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "gibbslab/parallel.hpp"
#include "gibbslab/specification.hpp"

using namespace gibbslab;

namespace {

/// Sum a Lambda_k table down to Lambda_j (j < k).
std::vector<double> shrink(const PatternDistribution& p, int d, int k, int j) {
  const Window wk(d, 2 * k + 1, Geometry::Free, p.alphabet());
  const auto idx = cube_indices(wk, j);
  std::vector<double> out(pattern_space_size(p.alphabet(), idx.size()), 0.0);
  std::vector<Symbol> sub(idx.size());
  p.for_each([&](std::span<const Symbol> pat, double v) {
    for (std::size_t i = 0; i < idx.size(); ++i) sub[i] = pat[idx[i]];
    out[encode_symbols(sub, p.alphabet())] += v;
  });
  return out;
}

}  // namespace

TEST_SUITE("specification") {
  TEST_CASE("partition function anchors") {
    for (int q : {2, 3}) {
      const auto pot = q == 2 ? ising_potential(2, 0.0) : potts_potential(2, 0.0, 3);
      const Window w(2, 3, Geometry::Free, q);
      CHECK(partition_function(pot, w, std::nullopt) == doctest::Approx(9.0 * std::log(q)).epsilon(1e-13));
    }
    const Window w0(1, 1, Geometry::FixedBoundary, 2);
    CHECK(partition_function(ising_potential(1, 1.0), w0, Boundary::uniform(1)) ==
          doctest::Approx(std::log(std::exp(2.0) + std::exp(-2.0))).epsilon(1e-14));
  }

  TEST_CASE("log Z is flip invariant at zero field") {
    const auto pot = ising_potential(2, 0.45);
    const Window w(2, 3, Geometry::FixedBoundary, 2);
    std::mt19937_64 rng(3);
    const auto cs = collar_sites(w, 1);
    for (int t = 0; t < 5; ++t) {
      std::vector<Symbol> v(cs.size());
      for (auto& x : v) x = static_cast<Symbol>(rng() % 2);
      const auto b = Boundary::collar(w, 1, v);
      const std::vector<Symbol> perm{1, 0};
      CHECK(partition_function(pot, w, b) == doctest::Approx(partition_function(pot, w, b.relabeled(perm))).epsilon(1e-13));
    }
  }

  TEST_CASE("gibbs kernel anchors") {
    const auto mu0 = gibbs_kernel(ising_potential(1, 0.0), Window(1, 5, Geometry::Free, 2), std::nullopt);
    for (double p : mu0.probs) CHECK(p == doctest::Approx(1.0 / 32.0).epsilon(1e-14));
    for (double beta : {0.1, 0.7, 1.5}) {
      const auto mu = gibbs_kernel(ising_potential(1, beta), Window(1, 1, Geometry::FixedBoundary, 2), Boundary::uniform(1));
      const double expected = std::exp(2 * beta) / (std::exp(2 * beta) + std::exp(-2 * beta));
      CHECK(mu.probs[1] == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  TEST_CASE("serial and parallel enumeration agree bitwise") {
    const auto pot = potts_potential(2, 0.8, 3);
    const Window w(2, 3, Geometry::Torus, 3);
    const CompiledHamiltonian h(pot, w, std::nullopt);
    const auto a = enumerate_log_weights(h);
    const auto b = enumerate_log_weights_serial(h);
    CHECK(a == b);
    std::vector<double> logz;
    for (int t : {1, 2, 4}) {
      ThreadLimit limit(t);
      logz.push_back(partition_function(pot, w, std::nullopt));
    }
    CHECK(logz[0] == logz[1]);
    CHECK(logz[0] == logz[2]);
  }

  TEST_CASE("enumeration cap") {
    CHECK_THROWS_AS(state_count(Window(2, 6, Geometry::Free, 2)), EnumerationCapExceeded);
    CHECK(state_count(Window(2, 5, Geometry::Free, 2)) == (std::uint64_t{1} << 25));
  }

  TEST_CASE("DLR consistency") {
    const auto mu0 = gibbs_kernel(ising_potential(1, 0.0), Window(1, 5, Geometry::Free, 2), std::nullopt);
    CHECK(dlr_check(mu0, 3) <= 1e-15);
    const auto mu = gibbs_kernel(ising_potential(1, 0.7), Window(1, 7, Geometry::FixedBoundary, 2), Boundary::uniform(1));
    CHECK(dlr_check(mu, 3) <= 1e-10);
    auto bad = mu;
    bad.probs[5] += 1e-3;
    const double s = std::accumulate(bad.probs.begin(), bad.probs.end(), 0.0);
    for (double& p : bad.probs) p /= s;
    CHECK(dlr_check(bad, 3) > 1e-5);
  }

  TEST_CASE("DLR holds on every admissible sub-window") {
    struct Case {
      Potential pot;
      int side;
      BoundaryCondition bc;
    };
    std::vector<Case> cases{
        {ising_potential(1, 0.9, 0.3), 7, BoundaryCondition::fixed(Boundary::uniform(0))},
        {ising_potential(2, 0.6), 3, BoundaryCondition::fixed(Boundary::uniform(1))},
        {ising_potential(2, 0.4), 4, BoundaryCondition::periodic()},
        {potts_potential(1, 1.1, 3), 5, BoundaryCondition::fixed(Boundary::uniform(2))},
        {potts_potential(2, 0.5, 3), 3, BoundaryCondition::free()},
        {dyson_truncated_potential(1, 0.8, 2.0, 2), 9, BoundaryCondition::fixed(Boundary::uniform(1))},
    };
    for (const auto& c : cases) {
      const Window w(c.pot.dim(), c.side, c.bc.geometry, c.pot.alphabet());
      const auto mu = gibbs_kernel(c.pot, w, c.bc.boundary);
      for (int sub = c.side - 2 * c.pot.range(); sub >= 1; sub -= 2) CHECK(dlr_check(mu, sub) <= 1e-10);
    }
  }

  TEST_CASE("exact marginal anchors") {
    const auto pot = ising_potential(1, 0.5);
    const Window w(1, 5, Geometry::FixedBoundary, 2);
    const auto mu = gibbs_kernel(pot, w, Boundary::uniform(1));
    const auto full = exact_marginal(mu, 2);
    for (std::uint64_t c = 0; c < 32; ++c) CHECK(full.probability(c) == mu.probs[c]);

    // oracle: weights exp(beta sum of bonds) over the chain + s1..s5 +
    double z = 0.0, plus = 0.0;
    for (int c = 0; c < 32; ++c) {
      int s[7] = {1, 0, 0, 0, 0, 0, 1};
      for (int i = 0; i < 5; ++i) s[i + 1] = (c >> (4 - i)) & 1 ? 1 : -1;
      int bonds = 0;
      for (int i = 0; i < 6; ++i) bonds += s[i] * s[i + 1];
      const double wgt = std::exp(0.5 * bonds);
      z += wgt;
      if (s[3] == 1) plus += wgt;
    }
    const auto centre = exact_marginal(mu, 0);
    CHECK(centre.probability(std::uint64_t{1}) == doctest::Approx(plus / z).epsilon(1e-13));

    const auto mu0 = gibbs_kernel(ising_potential(2, 0.0), Window(2, 5, Geometry::Free, 2), std::nullopt);
    const auto m1 = exact_marginal(mu0, 1);
    for (std::uint64_t c = 0; c < 512; ++c) CHECK(m1.probability(c) == doctest::Approx(1.0 / 512).epsilon(1e-12));
  }

  TEST_CASE("marginals form a projective family") {
    const auto mu = gibbs_kernel(potts_potential(1, 0.9, 3), Window(1, 7, Geometry::FixedBoundary, 3), Boundary::uniform(0));
    for (int k = 1; k <= 3; ++k)
      for (int j = 0; j < k; ++j) {
        const auto direct = exact_marginal(mu, j);
        const auto via = shrink(exact_marginal(mu, k), 1, k, j);
        for (std::uint64_t c = 0; c < via.size(); ++c) CHECK(via[c] == doctest::Approx(direct.probability(c)).epsilon(1e-13));
      }
  }

  TEST_CASE("spin-flip covariance") {
    for (int d : {1, 2}) {
      const Window w(d, 3, Geometry::FixedBoundary, 2);
      const auto pot = ising_potential(d, 0.6);
      const auto plus = gibbs_kernel(pot, w, Boundary::uniform(1));
      const auto minus = gibbs_kernel(pot, w, Boundary::uniform(0));
      const std::uint64_t top = plus.probs.size() - 1;
      for (std::uint64_t c = 0; c <= top; ++c) CHECK(plus.probs[c] == doctest::Approx(minus.probs[top - c]).epsilon(1e-13));
    }
  }
}

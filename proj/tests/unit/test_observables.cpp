#include <cmath>
#include <random>

#include "doctest.h"
#include "gibbslab/defaults.hpp"
#include "gibbslab/observables.hpp"

using namespace gibbslab;

namespace {

PatternDistribution dist(std::vector<double> p) {
  const int q = static_cast<int>(p.size());
  return PatternDistribution::from_dense(q, 1, 0, std::move(p));
}

Configuration ising_config(const Window& w, const std::vector<int>& pm) {
  std::vector<Symbol> s;
  for (int v : pm) s.push_back(v > 0 ? 1 : 0);
  return Configuration(w, s);
}

}  // namespace

TEST_SUITE("observables") {
  TEST_CASE("oscillation examples") {
    const auto a = oscillation_vector(site_spin(1));
    REQUIRE(a.sites.size() == 1);
    CHECK(a.at(Site{0}) == 2.0);
    CHECK(a.at(Site{1}) == 0.0);
    const auto b = oscillation_vector(spin_product(1, {Site{0}, Site{1}}));
    CHECK(b.at(Site{0}) == 2.0);
    CHECK(b.at(Site{1}) == 2.0);
    CHECK(b.l1 == 4.0);
    CHECK(b.l2sq == 8.0);
    const auto c = oscillation_vector(constant_function(2, 2, 3.5));
    CHECK(c.l1 == 0.0);
    CHECK(c.l2sq == 0.0);
  }

  TEST_CASE("table and additive oscillations agree with brute force") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
      const int q = 2 + static_cast<int>(rng() % 2);
      const std::vector<Site> dep{Site{0, 0}, Site{0, 1}, Site{1, -1}};
      std::vector<double> values(pattern_space_size(q, dep.size()));
      for (auto& v : values) v = std::uniform_real_distribution<double>(-1, 1)(rng);
      const auto f = LocalFunction::table("rand", 2, dep, q, values);
      const auto osc = oscillation_vector(f);
      const auto ser = oscillation_vector_serial(f);
      CHECK(osc.delta == ser.delta);
      // brute force over every pair differing at one site
      for (std::size_t i = 0; i < dep.size(); ++i) {
        double best = 0.0;
        for (std::uint64_t c = 0; c < values.size(); ++c) {
          auto s = decode_symbols(c, dep.size(), q);
          for (int t = 0; t < q; ++t) {
            auto u = s;
            u[i] = static_cast<Symbol>(t);
            best = std::max(best, std::abs(values[c] - values[encode_symbols(u, q)]));
          }
        }
        CHECK(osc.at(dep[i]) == best);
      }
    }
    const auto m = magnetization(2, box_sites(2, 3));
    const auto om = oscillation_vector(m);
    CHECK(om.l1 == doctest::Approx(2.0 * 49));
    CHECK(om.l2sq == doctest::Approx(4.0 * 49));
  }

  TEST_CASE("block sum of a site spin") {
    const auto S = block_sum(site_spin(1), Window(1, 3, Geometry::Free, 2));
    CHECK(S.dependence() == box_sites(1, 1));
    for (std::uint64_t c = 0; c < 8; ++c) {
      const auto s = decode_symbols(c, 3, 2);
      CHECK(S.evaluate(s) == ising_value(s[0]) + ising_value(s[1]) + ising_value(s[2]));
    }
    const auto osc = oscillation_vector(S);
    for (double d : osc.delta) CHECK(d == 2.0);
    CHECK(osc.l2sq == 12.0);
    const auto cst = block_sum(constant_function(2, 2, 1.5), Window(2, 5, Geometry::Free, 2));
    CHECK(cst.evaluate(std::vector<Symbol>{}) == doctest::Approx(25 * 1.5));
  }

  TEST_CASE("block sum agrees with summing shifted evaluations") {
    std::mt19937_64 rng(6);
    const auto f = spin_product(1, {Site{0}, Site{1}});
    const Window lambda(1, 5, Geometry::Free, 2);
    const auto S = block_sum(f, lambda);
    CHECK(S.dependence().size() == 6);
    const Window big(1, 9, Geometry::Free, 2);
    for (int t = 0; t < 50; ++t) {
      std::vector<Symbol> s(big.size());
      for (auto& x : s) x = static_cast<Symbol>(rng() % 2);
      const Configuration omega(big, s);
      double direct = 0.0;
      for (const Site& x : lambda.sites()) direct += f(omega, x);
      std::vector<Symbol> restricted;
      for (const Site& y : S.dependence()) restricted.push_back(omega.at(y));
      CHECK(S.evaluate(restricted) == doctest::Approx(direct));
    }
    // torus wrap folds the translated dependence sets back into the window
    const Window torus(1, 4, Geometry::Torus, 2);
    const auto St = block_sum(f, torus);
    CHECK(St.dependence().size() == 4);
    for (std::uint64_t c = 0; c < 16; ++c) {
      const Configuration omega(torus, decode_symbols(c, 4, 2));
      double direct = 0.0;
      for (const Site& x : torus.sites()) direct += f(omega, x);
      std::vector<Symbol> restricted;
      for (const Site& y : St.dependence()) restricted.push_back(omega.at(y));
      CHECK(St.evaluate(restricted) == doctest::Approx(direct));
    }
  }

  TEST_CASE("young bound") {
    const auto eq = young_bound_check(site_spin(1), Window(1, 3, Geometry::Free, 2));
    CHECK(eq.lhs == 12.0);
    CHECK(eq.rhs == 12.0);
    CHECK(eq.ok);
    const auto strict = young_bound_check(spin_product(1, {Site{0}, Site{1}}), Window(1, 5, Geometry::Free, 2));
    CHECK(strict.ok);
    CHECK(strict.lhs < strict.rhs);
    const auto zero = young_bound_check(constant_function(1, 2, 2.0), Window(1, 5, Geometry::Free, 2));
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.ok);
    CHECK_THROWS_AS(block_sum(LocalFunction::table("wide", 1, box_sites(1, 5), 2, std::vector<double>(2048, 0.0)),
                              Window(1, 11, Geometry::Free, 2)),
                    DependenceTooLarge);
  }

  TEST_CASE("empirical frequency examples") {
    const auto f0 = empirical_frequency(ising_config(Window(1, 3, Geometry::Free, 2), {1, -1, 1}), 0);
    CHECK(f0.probability(std::uint64_t{1}) == doctest::Approx(2.0 / 3.0));
    CHECK(f0.probability(std::uint64_t{0}) == doctest::Approx(1.0 / 3.0));
    CHECK(f0.samples() == 3);
    const auto flat = empirical_frequency(Configuration::filled(Window(2, 5, Geometry::Free, 3), 2), 1);
    CHECK(flat.probability(std::vector<Symbol>(9, 2)) == 1.0);
    const auto f1 = empirical_frequency(ising_config(Window(1, 5, Geometry::Free, 2), {1, 1, -1, 1, 1}), 1);
    CHECK(f1.probability(std::vector<Symbol>{1, 1, 0}) == doctest::Approx(1.0 / 3.0));
    CHECK(f1.probability(std::vector<Symbol>{1, 0, 1}) == doctest::Approx(1.0 / 3.0));
    CHECK(f1.probability(std::vector<Symbol>{0, 1, 1}) == doctest::Approx(1.0 / 3.0));
    CHECK(f1.total() == doctest::Approx(1.0));
    CHECK_THROWS(empirical_frequency(Configuration::filled(Window(1, 4, Geometry::Free, 2), 0), 0));
    CHECK_THROWS(empirical_frequency(Configuration::filled(Window(1, 3, Geometry::Free, 2), 0), 1));
  }

  TEST_CASE("empirical frequencies of product samples approach the marginal") {
    std::mt19937_64 rng(12);
    const double p = 0.7;
    // exact Lambda_1 marginal of the product measure
    std::vector<double> truth(8);
    for (std::uint64_t c = 0; c < 8; ++c) {
      truth[c] = 1.0;
      for (Symbol s : decode_symbols(c, 3, 2)) truth[c] *= s ? p : 1 - p;
    }
    const auto exact = PatternDistribution::from_dense(2, 3, 1, truth);
    double prev = 1.0;
    for (int n : {4, 8, 16}) {
      const Window w(1, 2 * n + 1, Geometry::Free, 2);
      double avg = 0.0;
      const int runs = 400;
      for (int r = 0; r < runs; ++r) {
        std::vector<Symbol> s(w.size());
        for (auto& x : s) x = std::bernoulli_distribution(p)(rng) ? 1 : 0;
        avg += tv_distance(empirical_frequency(Configuration(w, s), 1), exact) / runs;
      }
      CHECK(avg < prev);
      prev = avg;
    }
  }

  TEST_CASE("total variation") {
    CHECK(tv_distance(dist({0.3, 0.7}), dist({0.3, 0.7})) == 0.0);
    CHECK(tv_distance(dist({1.0, 0.0}), dist({0.0, 1.0})) == 1.0);
    CHECK(tv_distance(dist({0.75, 0.25}), dist({0.5, 0.5})) == doctest::Approx(0.25));
    CHECK_THROWS(tv_distance(dist({0.5, 0.5}), dist({0.2, 0.3, 0.5})));
    std::mt19937_64 rng(4);
    auto random_dist = [&] {
      std::vector<double> v(6);
      double s = 0;
      for (auto& x : v) s += (x = std::exponential_distribution<double>(1.0)(rng));
      for (auto& x : v) x /= s;
      return dist(v);
    };
    for (int t = 0; t < 300; ++t) {
      const auto a = random_dist(), b = random_dist(), c = random_dist();
      CHECK(tv_distance(a, b) == doctest::Approx(tv_distance(b, a)));
      CHECK(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-15);
      CHECK(tv_distance(a, b) > 0.0);
    }
  }

  TEST_CASE("N-breve and rho") {
    CHECK(n_breve(1, 1) == 5);
    CHECK(n_breve(2, 0) == 1);
    for (int d : {1, 2, 3})
      for (int k : {1, 2, 3}) {
        int n = k + 1;
        while (std::pow((2.0 * n + 1) / (2.0 * (n - k) + 1), d) > 1.25) ++n;
        CHECK(n_breve(d, k) == n);
      }
    CHECK(shields_rho(0.5, 2, 1) == doctest::Approx(2 * 0.5 / (5 * 9.0)));
  }

  TEST_CASE("frequency bound") {
    const Window w(1, 7, Geometry::Free, 2);
    const auto omega = Configuration::filled(w, 1);
    const auto same = shields_bound_check(omega, omega, 1);
    CHECK(same.tv == 0.0);
    CHECK(same.bound == 0.0);
    CHECK(same.ok);
    std::uint64_t applies = 0;
    for (std::uint64_t a = 0; a < 128; ++a)
      for (std::uint64_t b = 0; b < 128; ++b) {
        const auto c = shields_bound_check(Configuration(w, decode_symbols(a, 7, 2)), Configuration(w, decode_symbols(b, 7, 2)), 1);
        CHECK(c.ok);
        CHECK(c.tv <= c.bound + 1e-12);
        applies += c.lemma_applies;
      }
    CHECK(applies == 0);  // n = 3 is below N-breve = 5
    // past N-breve the lemma itself is exercised
    const Window big(1, 11, Geometry::Free, 2);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 2000; ++t) {
      std::vector<Symbol> s(big.size());
      for (auto& x : s) x = static_cast<Symbol>(rng() % 2);
      auto u = s;
      u[rng() % u.size()] ^= 1;
      const auto c = shields_bound_check(Configuration(big, s), Configuration(big, u), 1, 0.5);
      CHECK(c.ok);
    }
  }

  TEST_CASE("bound functions read boundary spins") {
    const Window w(1, 3, Geometry::FixedBoundary, 2);
    const auto f = spin_product(1, {Site{1}, Site{2}});
    const BoundFunction bf(f, w, Boundary::uniform(0));
    CHECK(bf(std::vector<Symbol>{1, 1, 1}) == -1.0);
    CHECK(bf(std::vector<Symbol>{1, 1, 0}) == 1.0);
    CHECK_THROWS_AS(BoundFunction(f, w.with_geometry(Geometry::Free), std::nullopt), std::out_of_range);
  }
}

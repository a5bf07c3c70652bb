#include <cmath>
#include <algorithm>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "gibbslab/potential.hpp"
#include "gibbslab/specification.hpp"

using namespace gibbslab;

namespace {

/// Energy by walking every translate of every shape near the window and asking Potential::term.
double naive_energy(const Potential& pot, const Configuration& omega) {
  const Window& w = omega.window();
  const int r = pot.range();
  double e = 0.0;
  for (const auto& shape : pot.shapes()) {
    for (const Site& a : box_sites(w.dim(), w.lo() - r, w.hi() + r)) {
      std::vector<Site> sites;
      bool inside = false, outside = false;
      for (const Site& o : shape.offsets) {
        sites.push_back(o + a);
        (w.contains(sites.back()) ? inside : outside) = true;
      }
      if (w.geometry() == Geometry::Torus) {
        if (!w.contains(a)) continue;  // one translate per anchor on the torus
      } else if (!inside || (outside && w.geometry() == Geometry::Free)) {
        continue;
      }
      std::vector<Symbol> sym;
      for (const Site& s : sites) sym.push_back(omega.at(s));
      e += pot.term(sites, sym);
    }
  }
  return e;
}

Configuration random_configuration(std::mt19937_64& rng, const Window& w, std::optional<Boundary> b = std::nullopt) {
  std::vector<Symbol> s(w.size());
  for (auto& x : s) x = static_cast<Symbol>(rng() % static_cast<unsigned>(w.alphabet()));
  return Configuration(w, s, std::move(b));
}

}  // namespace

TEST_SUITE("potential") {
  TEST_CASE("ising terms") {
    const auto pot = ising_potential(1, 1.0);
    const std::vector<Site> pair{Site{0}, Site{1}};
    CHECK(pot.term(pair, std::vector<Symbol>{1, 1}) == -1.0);
    CHECK(pot.term(pair, std::vector<Symbol>{1, 0}) == 1.0);
    const auto half = ising_potential(1, 0.5);
    CHECK(half.term(std::vector<Site>{Site{0}, Site{2}}, std::vector<Symbol>{1, 1}) == 0.0);
  }

  TEST_CASE("potts terms") {
    const auto pot = potts_potential(2, 1.0, 3);
    const std::vector<Site> pair{Site{0, 0}, Site{0, 1}};
    CHECK(pot.term(pair, std::vector<Symbol>{2, 2}) == -1.0);
    CHECK(pot.term(pair, std::vector<Symbol>{2, 0}) == 0.0);
  }

  TEST_CASE("two-colour potts matches ising at twice the temperature parameter") {
    const double beta_ising = 0.37;
    const auto ising = ising_potential(2, beta_ising);
    const auto potts = potts_potential(2, 2.0 * beta_ising, 2);
    const Window w(2, 1, Geometry::FixedBoundary, 2);
    const auto collar = collar_sites(w, 1);
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << collar.size()); ++c) {
      const auto values = decode_symbols(c, collar.size(), 2);
      const auto b = Boundary::collar(w, 1, values);
      const CompiledHamiltonian hi(ising, w, b), hp(potts, w, b);
      const std::vector<Symbol> spins{0};
      const auto ki = single_site_kernel(hi, spins, 0);
      const auto kp = single_site_kernel(hp, spins, 0);
      CHECK(ki[0] == doctest::Approx(kp[0]).epsilon(1e-14));
      CHECK(ki[1] == doctest::Approx(kp[1]).epsilon(1e-14));
    }
  }

  TEST_CASE("dyson terms and norm") {
    const auto pot = dyson_truncated_potential(1, 1.0, 2.0, 4);
    CHECK(pot.term(std::vector<Site>{Site{0}, Site{2}}, std::vector<Symbol>{1, 1}) == doctest::Approx(-0.25));
    CHECK(pot.term(std::vector<Site>{Site{0}, Site{5}}, std::vector<Symbol>{1, 1}) == 0.0);
    CHECK(pot.summability_norm() == doctest::Approx(2.0 * (1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0)).epsilon(1e-14));
    CHECK(pot.range() == 4);
    // the dropped tail: sum_{r>4} r^-2 = pi^2/6 - (1 + 1/4 + 1/9 + 1/16)
    CHECK(dyson_truncation_tail(2.0, 4) ==
          doctest::Approx(M_PI * M_PI / 6.0 - (1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0)).epsilon(1e-12));
  }

  TEST_CASE("summability norm") {
    CHECK(ising_potential(1, 1.0).summability_norm() == doctest::Approx(2.0));
    CHECK(ising_potential(2, 1.0).summability_norm() == doctest::Approx(4.0));
    CHECK(ising_potential(2, 0.0).summability_norm() == 0.0);
  }

  TEST_CASE("hamiltonian examples") {
    const auto pot = ising_potential(1, 1.0);
    const Window w(1, 3, Geometry::FixedBoundary, 2);
    const auto plus = Configuration::filled(w, 1, Boundary::uniform(1));
    CHECK(hamiltonian(pot, plus) == doctest::Approx(-4.0));
    const auto free = Configuration::filled(w.with_geometry(Geometry::Free), 1);
    CHECK(hamiltonian(pot, free) == doctest::Approx(-2.0));
    const auto flipped = Configuration::filled(w, 0, Boundary::uniform(0));
    CHECK(hamiltonian(pot, flipped) == doctest::Approx(-4.0));
  }

  TEST_CASE("compiled energy agrees with a naive term walk") {
    std::mt19937_64 rng(11);
    const std::vector<Potential> pots{ising_potential(2, 0.4, 0.3, 0.8), potts_potential(2, 0.7, 3),
                                      dyson_truncated_potential(1, 0.9, 1.5, 3), ising_potential(1, 0.2, -0.5)};
    for (const auto& pot : pots) {
      for (Geometry g : {Geometry::Free, Geometry::FixedBoundary, Geometry::Torus}) {
        const int side = 2 * pot.range() + 3;
        const Window w(pot.dim(), side, g, pot.alphabet());
        for (int trial = 0; trial < 10; ++trial) {
          std::optional<Boundary> b;
          if (g == Geometry::FixedBoundary) {
            const auto cs = collar_sites(w, pot.range());
            std::vector<Symbol> v(cs.size());
            for (auto& x : v) x = static_cast<Symbol>(rng() % static_cast<unsigned>(pot.alphabet()));
            b = Boundary::collar(w, pot.range(), v);
          }
          const auto omega = random_configuration(rng, w, b);
          CHECK(hamiltonian(pot, omega) == doctest::Approx(naive_energy(pot, omega)).epsilon(1e-12));
          // the explicit term list sums to the same energy
          const CompiledHamiltonian h(pot, w, b);
          double sum = 0.0;
          for (const auto& [sites, e] : h.term_energies(omega.spins())) sum += e;
          CHECK(sum == doctest::Approx(h.energy(omega.spins())).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("torus energy is translation invariant") {
    std::mt19937_64 rng(5);
    for (const auto& pot : {ising_potential(2, 0.6, 0.2), potts_potential(2, 0.5, 4)}) {
      const Window w(2, 5, Geometry::Torus, pot.alphabet());
      for (int trial = 0; trial < 20; ++trial) {
        const auto omega = random_configuration(rng, w);
        const Site t{static_cast<int>(rng() % 5), static_cast<int>(rng() % 5)};
        std::vector<Symbol> shifted(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) shifted[*w.resolve(w.site_at(i) + t)] = omega[i];
        CHECK(hamiltonian(pot, Configuration(w, shifted)) == doctest::Approx(hamiltonian(pot, omega)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("global symmetries leave the energy unchanged") {
    std::mt19937_64 rng(9);
    const Window w(2, 3, Geometry::FixedBoundary, 2);
    const auto ising = ising_potential(2, 0.8);
    for (int trial = 0; trial < 20; ++trial) {
      const auto cs = collar_sites(w, 1);
      std::vector<Symbol> v(cs.size());
      for (auto& x : v) x = static_cast<Symbol>(rng() % 2);
      const auto omega = random_configuration(rng, w, Boundary::collar(w, 1, v));
      std::vector<Symbol> flip(omega.spins().begin(), omega.spins().end());
      for (auto& x : flip) x = static_cast<Symbol>(1 - x);
      const std::vector<Symbol> perm{1, 0};
      const Configuration flipped(w, flip, omega.boundary()->relabeled(perm));
      CHECK(hamiltonian(ising, flipped) == doctest::Approx(hamiltonian(ising, omega)).epsilon(1e-12));
    }
    const Window w3(2, 3, Geometry::FixedBoundary, 3);
    const auto potts = potts_potential(2, 0.9, 3);
    const std::vector<Symbol> perm{2, 0, 1};
    for (int trial = 0; trial < 20; ++trial) {
      const auto cs = collar_sites(w3, 1);
      std::vector<Symbol> v(cs.size());
      for (auto& x : v) x = static_cast<Symbol>(rng() % 3);
      const auto omega = random_configuration(rng, w3, Boundary::collar(w3, 1, v));
      std::vector<Symbol> p(omega.spins().begin(), omega.spins().end());
      for (auto& x : p) x = perm[x];
      const Configuration permuted(w3, p, omega.boundary()->relabeled(perm));
      CHECK(hamiltonian(potts, permuted) == doctest::Approx(hamiltonian(potts, omega)).epsilon(1e-12));
    }
  }

  TEST_CASE("boundary parsing") {
    CHECK(parse_boundary("plus", 2).boundary->uniform_symbol() == Symbol{1});
    CHECK(parse_boundary("minus", 2).boundary->uniform_symbol() == Symbol{0});
    CHECK(parse_boundary("periodic", 2).geometry == Geometry::Torus);
    CHECK(parse_boundary("free", 3).geometry == Geometry::Free);
    CHECK(parse_boundary("symbol:2", 3).boundary->uniform_symbol() == Symbol{2});
    CHECK_THROWS(parse_boundary("symbol:3", 3));
    CHECK_THROWS(parse_boundary("sideways", 2));
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(ising_potential(2, -1.0), std::invalid_argument);
    CHECK_THROWS(potts_potential(2, 1.0, 1));
  }
}

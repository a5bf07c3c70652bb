#include <algorithm>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "gibbslab/lattice.hpp"

using namespace gibbslab;

TEST_SUITE("lattice") {
  TEST_CASE("box sites are lexicographic") {
    CHECK(box_sites(1, 0) == std::vector<Site>{Site{0}});
    CHECK(box_sites(1, 1) == std::vector<Site>{Site{-1}, Site{0}, Site{1}});
    const auto b = box_sites(2, 1);
    REQUIRE(b.size() == 9);
    CHECK(b.front() == Site{-1, -1});
    CHECK(b.back() == Site{1, 1});
    CHECK(b[1] == Site{-1, 0});
  }

  TEST_CASE("window indexing round-trips") {
    for (int side : {1, 2, 3, 4, 5}) {
      const Window w(2, side, Geometry::Free, 2);
      CHECK(w.lo() == -(side / 2));
      for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.index_of(w.site_at(i)) == i);
      CHECK(w.sites() == box_sites(2, w.lo(), w.hi()));
    }
  }

  TEST_CASE("shift window reads and wraps") {
    const Window w(1, 3, Geometry::Free, 3);
    const Configuration omega(w, {0, 1, 2});
    CHECK(shift_window(omega, Site{0}, 0).symbols == std::vector<Symbol>{1});
    CHECK(shift_window(omega, Site{1}, 0).symbols == std::vector<Symbol>{2});
    CHECK_THROWS_AS(shift_window(omega, Site{2}, 0), std::out_of_range);
    const Configuration torus(w.with_geometry(Geometry::Torus), {0, 1, 2});
    CHECK(shift_window(torus, Site{2}, 0).symbols == std::vector<Symbol>{0});
  }

  TEST_CASE("torus shift by the side is the identity") {
    for (int d : {1, 2, 3}) {
      const Window w(d, 5, Geometry::Torus, 2);
      for (const Site& x : w.sites())
        for (int axis = 0; axis < d; ++axis) {
          Site s = x;
          s.coords[static_cast<std::size_t>(axis)] += 5;
          CHECK(w.resolve(s) == w.resolve(x));
          s.coords[static_cast<std::size_t>(axis)] -= 10;
          CHECK(w.resolve(s) == w.resolve(x));
        }
    }
  }

  TEST_CASE("hamming distance examples") {
    const Window w1(1, 3, Geometry::Free, 2);
    const auto plus = Configuration::filled(w1, 1);
    const auto minus = Configuration::filled(w1, 0);
    CHECK(hamming_distance(plus, plus) == 0);
    CHECK(hamming_distance(plus, minus) == 3);
    const Window w2(2, 3, Geometry::Free, 2);
    auto a = Configuration::filled(w2, 1);
    auto b = a;
    for (const Site& c : {Site{-1, -1}, Site{-1, 1}, Site{1, -1}, Site{1, 1}}) b.set(w2.index_of(c), 0);
    CHECK(hamming_distance(a, b) == 4);
  }

  TEST_CASE("hamming distance is a metric") {
    for (int side : {1, 3, 5}) {
      const Window w(1, side, Geometry::Free, 2);
      const auto total = pattern_space_size(2, w.size());
      std::vector<std::vector<Symbol>> all;
      for (std::uint64_t c = 0; c < total; ++c) all.push_back(decode_symbols(c, w.size(), 2));
      for (const auto& a : all)
        for (const auto& b : all) {
          const auto dab = hamming_distance(a, b);
          CHECK((dab == 0) == (a == b));
          CHECK(dab == hamming_distance(b, a));
          for (const auto& c : all) CHECK(hamming_distance(a, c) <= dab + hamming_distance(b, c));
        }
    }
  }

  TEST_CASE("pattern codes") {
    CHECK(pattern_code(Pattern{1, 0, 2, {1}}) == 1);
    CHECK(pattern_code(Pattern{1, 1, 2, {1, 0, 1}}) == 5);
    // independent positional oracle
    for (std::uint64_t c = 0; c < 8; ++c) {
      const auto p = pattern_decode(c, 1, 1, 2);
      std::uint64_t v = 0;
      for (Symbol s : p.symbols) v = 2 * v + s;
      CHECK(v == c);
      CHECK(pattern_code(p) == c);
    }
  }

  TEST_CASE("pattern encoding is a bijection") {
    struct Shape {
      int alphabet, d, k;
    };
    for (auto [q, d, k] : {Shape{2, 2, 1}, Shape{2, 1, 3}, Shape{3, 1, 2}, Shape{4, 2, 0}, Shape{16, 1, 2}}) {
      const std::size_t sites = box_sites(d, k).size();
      const auto total = pattern_space_size(q, sites);
      REQUIRE(total <= (std::uint64_t{1} << 20));
      std::vector<bool> seen(total, false);
      for (std::uint64_t c = 0; c < total; ++c) {
        const auto p = pattern_decode(c, d, k, q);
        CHECK(pattern_code(p) == c);
        seen[static_cast<std::size_t>(encode_symbols(p.symbols, q))] = true;
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    }
  }

  TEST_CASE("code space limits") {
    CHECK(code_fits(2, 62));
    CHECK(code_fits(2, 63) == false);
    CHECK_THROWS_AS(pattern_space_size(2, 64), std::overflow_error);
  }

  TEST_CASE("text format round-trips") {
    std::mt19937_64 rng(7);
    for (int side : {3, 4}) {
      const Window w(2, side, Geometry::FixedBoundary, 3);
      std::vector<Symbol> s(w.size());
      for (auto& x : s) x = static_cast<Symbol>(rng() % 3);
      const Configuration omega(w, s, Boundary::uniform(2));
      const auto back = configuration_from_text(to_text(omega));
      CHECK(back == omega);
    }
    const Window w(1, 5, Geometry::Torus, 2);
    const Configuration t(w, {0, 1, 1, 0, 1});
    CHECK(configuration_from_text(to_text(t)) == t);
  }

  TEST_CASE("boundary reads outside the window") {
    const Window w(1, 3, Geometry::FixedBoundary, 2);
    const Configuration omega(w, {0, 0, 0}, Boundary::uniform(1));
    CHECK(omega.at(Site{5}) == 1);
    CHECK(omega.at(Site{0}) == 0);
    const Configuration free(w.with_geometry(Geometry::Free), {0, 0, 0});
    CHECK_THROWS_AS(free.at(Site{2}), std::out_of_range);
  }
}

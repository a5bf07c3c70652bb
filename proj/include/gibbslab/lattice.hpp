#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gibbslab {

/// Symbol index in [0, |S|). For |S| = 2 the Ising presentation maps 0 -> -1 and 1 -> +1.
using Symbol = std::uint8_t;

inline double ising_value(Symbol s) { return s == 0 ? -1.0 : 1.0; }

/// A point of Z^d.
struct Site {
  std::vector<int> coords;

  Site() = default;
  explicit Site(std::vector<int> c) : coords(std::move(c)) {}
  Site(std::initializer_list<int> c) : coords(c) {}

  int dim() const { return static_cast<int>(coords.size()); }
  int operator[](std::size_t i) const { return coords[i]; }

  Site operator+(const Site& other) const;
  Site operator-(const Site& other) const;
  Site operator-() const;

  /// Sup norm.
  int linf() const;
  /// Taxicab norm.
  int l1() const;

  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;
};

Site origin(int dim);
Site unit_vector(int dim, int axis);
std::string to_string(const Site& s);

enum class Geometry { FixedBoundary, Free, Torus };

std::string_view to_string(Geometry g);
Geometry parse_geometry(std::string_view text);

/// A box of side L in Z^d with coordinates in [lo, lo + L - 1], lo = -floor(L/2).
/// Odd sides are the centered cubes Lambda_n with L = 2n + 1.
class Window {
 public:
  Window(int dim, int side, Geometry geometry, int alphabet);

  static Window cube(int dim, int radius, Geometry geometry, int alphabet);

  int dim() const { return dim_; }
  int side() const { return side_; }
  Geometry geometry() const { return geometry_; }
  int alphabet() const { return alphabet_; }
  int lo() const { return -(side_ / 2); }
  int hi() const { return lo() + side_ - 1; }

  bool is_centered() const { return side_ % 2 == 1; }
  /// Radius n of Lambda_n; throws for even sides.
  int radius() const;

  std::size_t size() const { return size_; }

  bool contains(const Site& x) const;
  std::size_t index_of(const Site& x) const;
  Site site_at(std::size_t index) const;
  std::vector<Site> sites() const;

  /// Index of x, wrapping coordinates on a torus; nullopt when x is outside a non-torus window.
  std::optional<std::size_t> resolve(const Site& x) const;
  Site wrap(const Site& x) const;

  Window with_geometry(Geometry g) const { return Window(dim_, side_, g, alphabet_); }

  friend bool operator==(const Window&, const Window&) = default;

 private:
  int dim_;
  int side_;
  Geometry geometry_;
  int alphabet_;
  std::size_t size_;
};

/// Lambda_n in lexicographic order.
std::vector<Site> box_sites(int dim, int radius);
/// All sites of the box [lo, hi]^d in lexicographic order.
std::vector<Site> box_sites(int dim, int lo, int hi);

/// Exterior spins for a fixed-boundary window: a uniform symbol or an explicit collar.
class Boundary {
 public:
  static Boundary uniform(Symbol s);
  /// values are given in lexicographic order over the collar sites of width `width` around `window`.
  static Boundary collar(const Window& window, int width, std::span<const Symbol> values);

  bool is_uniform() const { return uniform_.has_value(); }
  std::optional<Symbol> uniform_symbol() const { return uniform_; }
  /// Width of the explicit collar; unbounded for uniform boundaries.
  int width() const;
  Symbol at(const Site& x) const;
  /// Collar values in lexicographic order (explicit boundaries only).
  std::vector<Symbol> collar_values() const;

  /// Global relabeling of the exterior (e.g. a spin flip).
  Boundary relabeled(std::span<const Symbol> perm) const;

  friend bool operator==(const Boundary&, const Boundary&) = default;

 private:
  std::optional<Symbol> uniform_;
  int width_ = 0;
  std::map<Site, Symbol> values_;
};

/// Collar sites of width w around the window, lexicographic.
std::vector<Site> collar_sites(const Window& window, int width);

class Configuration {
 public:
  Configuration(Window window, std::vector<Symbol> spins, std::optional<Boundary> boundary = std::nullopt);

  static Configuration filled(const Window& window, Symbol s, std::optional<Boundary> boundary = std::nullopt);

  const Window& window() const { return window_; }
  std::span<const Symbol> spins() const { return spins_; }
  Symbol operator[](std::size_t i) const { return spins_[i]; }
  const std::optional<Boundary>& boundary() const { return boundary_; }

  void set(std::size_t i, Symbol s);
  std::vector<Symbol>& mutable_spins() { return spins_; }

  /// Symbol at an arbitrary site: interior spin, torus wrap, or boundary spin.
  /// Throws std::out_of_range for sites outside a free window.
  Symbol at(const Site& x) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  Window window_;
  std::vector<Symbol> spins_;
  std::optional<Boundary> boundary_;
};

/// A pattern on Lambda_k.
struct Pattern {
  int dim = 1;
  int radius = 0;
  int alphabet = 2;
  std::vector<Symbol> symbols;

  std::uint64_t code() const;
  static Pattern decode(std::uint64_t code, int dim, int radius, int alphabet);

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// True when alphabet^sites fits a signed 63-bit code.
bool code_fits(int alphabet, std::size_t sites);
/// Number of patterns alphabet^sites; throws std::overflow_error beyond 2^63 - 1.
std::uint64_t pattern_space_size(int alphabet, std::size_t sites);

/// Base-|S| positional code, first symbol most significant.
std::uint64_t encode_symbols(std::span<const Symbol> symbols, int alphabet);
void decode_symbols(std::uint64_t code, int alphabet, std::span<Symbol> out);
std::vector<Symbol> decode_symbols(std::uint64_t code, std::size_t count, int alphabet);

std::uint64_t pattern_code(const Pattern& p);
Pattern pattern_decode(std::uint64_t code, int dim, int radius, int alphabet);

/// Pattern read off Lambda_k + x.
Pattern shift_window(const Configuration& omega, const Site& x, int k);

std::size_t hamming_distance(const Configuration& omega, const Configuration& eta);
std::size_t hamming_distance(std::span<const Symbol> a, std::span<const Symbol> b);

/// Flat text format: "d n geometry |S| [side]" header, spin line, optional boundary line.
std::string to_text(const Configuration& omega);
Configuration configuration_from_text(std::string_view text);

}  // namespace gibbslab

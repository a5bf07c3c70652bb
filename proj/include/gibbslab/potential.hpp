#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"

namespace gibbslab {

/// One translation class of interaction terms. Offsets are sorted lexicographically and the
/// first offset is the origin; `energy` is indexed by encode_symbols over the offsets.
struct TermShape {
  std::vector<Site> offsets;
  std::vector<double> energy;
};

enum class ModelKind { Ising, Potts, Dyson };

/// Model descriptor as read from a config file.
struct ModelParams {
  ModelKind model = ModelKind::Ising;
  int d = 1;
  double beta = 0.0;
  double h = 0.0;
  /// Ising pair coupling; 0 gives a pure field (product) measure.
  double J = 1.0;
  int N = 2;
  double alpha = 2.0;
  int R = 1;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

std::string_view to_string(ModelKind kind);

/// Finite-range shift-invariant potential. Inverse temperature is folded into the energies.
class Potential {
 public:
  Potential(std::string name, int dim, int alphabet, std::vector<TermShape> shapes);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int alphabet() const { return alphabet_; }
  /// Largest sup-norm distance between two sites of one term.
  int range() const { return range_; }
  const std::vector<TermShape>& shapes() const { return shapes_; }

  /// Phi(sites, omega restricted to sites); zero unless `sites` is a translate of a shape.
  double term(std::span<const Site> sites, std::span<const Symbol> symbols) const;

  /// Sum over term shapes through the origin of the sup norm of the term.
  double summability_norm() const;

  /// Tail of the interaction dropped by truncation, when the potential is a truncated one.
  std::optional<double> truncation_tail() const { return truncation_tail_; }
  void set_truncation_tail(double tail) { truncation_tail_ = tail; }

  const std::optional<ModelParams>& params() const { return params_; }
  void set_params(const ModelParams& p) { params_ = p; }

 private:
  std::string name_;
  int dim_;
  int alphabet_;
  int range_ = 0;
  std::vector<TermShape> shapes_;
  std::optional<double> truncation_tail_;
  std::optional<ModelParams> params_;
};

/// Nearest-neighbour Ising: pair energy -beta*J*s_x*s_y, singleton -beta*h*s_x.
Potential ising_potential(int dim, double beta, double h = 0.0, double J = 1.0);
/// Ferromagnetic Potts: pair energy -beta * 1{s_x == s_y}.
Potential potts_potential(int dim, double beta, int colors);
/// Dyson chain truncated at range R: pair energy -beta*s_x*s_y/|x-y|^alpha, 1 <= |x-y| <= R.
Potential dyson_truncated_potential(int dim, double beta, double alpha, int R);
Potential make_potential(const ModelParams& params);

/// Sum_{r > R} r^-alpha, the part of the Dyson interaction that truncation drops.
double dyson_truncation_tail(double alpha, int R);

/// How a window's exterior is specified: fixed spins, dropped terms, or periodic wrap.
struct BoundaryCondition {
  Geometry geometry = Geometry::Free;
  std::optional<Boundary> boundary;

  static BoundaryCondition fixed(Boundary b) { return {Geometry::FixedBoundary, std::move(b)}; }
  static BoundaryCondition free() { return {Geometry::Free, std::nullopt}; }
  static BoundaryCondition periodic() { return {Geometry::Torus, std::nullopt}; }
};

/// Parses "plus", "minus", "free", "periodic", or "symbol:k".
BoundaryCondition parse_boundary(std::string_view text, int alphabet);
std::string describe(const BoundaryCondition& bc);

/// Hamiltonian bound to a window and its exterior, with terms flattened for fast evaluation.
class CompiledHamiltonian {
 public:
  CompiledHamiltonian(const Potential& potential, const Window& window, const std::optional<Boundary>& boundary);

  const Window& window() const { return window_; }
  int alphabet() const { return alphabet_; }
  std::size_t term_count() const { return terms_.size(); }

  double energy(std::span<const Symbol> spins) const;

  /// out[s] = energy of the terms containing `site` with that site set to s.
  void local_energies(std::span<const Symbol> spins, std::size_t site, std::span<double> out) const;

  /// Sites sharing at least one term with `site`.
  std::vector<std::size_t> neighbours(std::size_t site) const;

  /// Explicit term list: (interior site indices, energy) for a given configuration.
  std::vector<std::pair<std::vector<std::size_t>, double>> term_energies(std::span<const Symbol> spins) const;

 private:
  struct Slot {
    std::uint32_t site;
    std::uint64_t weight;
  };
  struct Term {
    std::uint32_t shape;
    std::uint64_t base;
    std::uint32_t first_slot;
    std::uint32_t slot_count;
  };

  double term_energy(const Term& t, std::span<const Symbol> spins) const;

  Window window_;
  int alphabet_;
  std::vector<TermShape> shapes_;
  std::vector<Slot> slots_;
  std::vector<Term> terms_;
  std::vector<std::vector<std::uint32_t>> incident_;
};

/// H_Lambda(omega | eta) for the configuration's own window and boundary.
double hamiltonian(const Potential& potential, const Configuration& omega);

}  // namespace gibbslab

#include "gibbslab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/zeta.hpp>

namespace gibbslab {
namespace {

std::uint64_t ipow(int base, std::size_t exp) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) v *= static_cast<std::uint64_t>(base);
  return v;
}

// Sorts the offsets, translates the first to the origin and permutes the energy table to match.
TermShape normalize(TermShape shape, int alphabet) {
  const std::size_t m = shape.offsets.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return shape.offsets[a] < shape.offsets[b]; });
  for (std::size_t i = 1; i < m; ++i)
    if (shape.offsets[order[i]] == shape.offsets[order[i - 1]])
      throw std::invalid_argument("term shape has repeated sites");

  TermShape out;
  const Site anchor = shape.offsets[order[0]];
  for (auto i : order) out.offsets.push_back(shape.offsets[i] - anchor);
  out.energy.assign(shape.energy.size(), 0.0);
  std::vector<Symbol> old_sym(m), new_sym(m);
  for (std::uint64_t code = 0; code < shape.energy.size(); ++code) {
    decode_symbols(code, alphabet, old_sym);
    for (std::size_t i = 0; i < m; ++i) new_sym[i] = old_sym[order[i]];
    out.energy[encode_symbols(new_sym, alphabet)] = shape.energy[code];
  }
  return out;
}

TermShape pair_shape(const Site& offset, int alphabet, auto&& energy) {
  TermShape s;
  s.offsets = {origin(offset.dim()), offset};
  s.energy.resize(static_cast<std::size_t>(alphabet * alphabet));
  for (int a = 0; a < alphabet; ++a)
    for (int b = 0; b < alphabet; ++b)
      s.energy[static_cast<std::size_t>(a * alphabet + b)] = energy(static_cast<Symbol>(a), static_cast<Symbol>(b));
  return s;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ising: return "ising";
    case ModelKind::Potts: return "potts";
    case ModelKind::Dyson: return "dyson";
  }
  return "?";
}

Potential::Potential(std::string name, int dim, int alphabet, std::vector<TermShape> shapes)
    : name_(std::move(name)), dim_(dim), alphabet_(alphabet) {
  if (dim < 1) throw std::invalid_argument("potential dimension must be >= 1");
  if (alphabet < 2 || alphabet > 255) throw std::invalid_argument("alphabet size must be in [2, 255]");
  for (auto& s : shapes) {
    if (s.offsets.empty()) throw std::invalid_argument("empty term shape");
    for (const auto& o : s.offsets)
      if (o.dim() != dim) throw std::invalid_argument("term shape dimension mismatch");
    if (s.energy.size() != ipow(alphabet, s.offsets.size()))
      throw std::invalid_argument("term energy table has the wrong size");
    shapes_.push_back(normalize(std::move(s), alphabet));
  }
  for (const auto& s : shapes_)
    for (const auto& a : s.offsets)
      for (const auto& b : s.offsets) range_ = std::max(range_, (a - b).linf());
}

double Potential::term(std::span<const Site> sites, std::span<const Symbol> symbols) const {
  if (sites.size() != symbols.size()) throw std::invalid_argument("term: sites and symbols differ in length");
  if (sites.empty()) return 0.0;
  std::vector<std::size_t> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sites[a] < sites[b]; });
  const Site anchor = sites[order[0]];
  std::vector<Site> rel;
  std::vector<Symbol> sym;
  for (auto i : order) {
    rel.push_back(sites[i] - anchor);
    sym.push_back(symbols[i]);
  }
  double e = 0.0;
  for (const auto& s : shapes_)
    if (s.offsets == rel) e += s.energy[encode_symbols(sym, alphabet_)];
  return e;
}

double Potential::summability_norm() const {
  // A shape with m distinct sites has exactly m translates through the origin.
  double norm = 0.0;
  for (const auto& s : shapes_) {
    double sup = 0.0;
    for (double e : s.energy) sup = std::max(sup, std::abs(e));
    norm += static_cast<double>(s.offsets.size()) * sup;
  }
  return norm;
}

Potential ising_potential(int dim, double beta, double h, double J) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  std::vector<TermShape> shapes;
  for (int axis = 0; axis < dim; ++axis)
    shapes.push_back(pair_shape(unit_vector(dim, axis), 2, [&](Symbol a, Symbol b) {
      return -beta * J * ising_value(a) * ising_value(b);
    }));
  if (h != 0.0) shapes.push_back(TermShape{{origin(dim)}, {beta * h, -beta * h}});
  Potential p("ising", dim, 2, std::move(shapes));
  p.set_params(ModelParams{ModelKind::Ising, dim, beta, h, J, 2, 2.0, 1});
  return p;
}

Potential potts_potential(int dim, double beta, int colors) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (colors < 2) throw std::invalid_argument("Potts model needs N >= 2 colors");
  std::vector<TermShape> shapes;
  for (int axis = 0; axis < dim; ++axis)
    shapes.push_back(pair_shape(unit_vector(dim, axis), colors, [&](Symbol a, Symbol b) {
      return a == b ? -beta : 0.0;
    }));
  Potential p("potts", dim, colors, std::move(shapes));
  p.set_params(ModelParams{ModelKind::Potts, dim, beta, 0.0, 1.0, colors, 2.0, 1});
  return p;
}

double dyson_truncation_tail(double alpha, int R) {
  double head = 0.0;
  for (int r = 1; r <= R; ++r) head += std::pow(static_cast<double>(r), -alpha);
  return boost::math::zeta(alpha) - head;
}

Potential dyson_truncated_potential(int dim, double beta, double alpha, int R) {
  if (dim != 1) throw std::invalid_argument("the Dyson model is defined for d = 1 only");
  if (!(alpha > 1.0)) throw std::invalid_argument("Dyson exponent alpha must be > 1");
  if (R < 1) throw std::invalid_argument("Dyson truncation radius must be >= 1");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  std::vector<TermShape> shapes;
  for (int r = 1; r <= R; ++r) {
    const double w = std::pow(static_cast<double>(r), -alpha);
    shapes.push_back(pair_shape(Site{r}, 2, [&](Symbol a, Symbol b) {
      return -beta * w * ising_value(a) * ising_value(b);
    }));
  }
  Potential p("dyson", 1, 2, std::move(shapes));
  p.set_truncation_tail(dyson_truncation_tail(alpha, R));
  p.set_params(ModelParams{ModelKind::Dyson, 1, beta, 0.0, 1.0, 2, alpha, R});
  return p;
}

Potential make_potential(const ModelParams& params) {
  switch (params.model) {
    case ModelKind::Ising: return ising_potential(params.d, params.beta, params.h, params.J);
    case ModelKind::Potts: return potts_potential(params.d, params.beta, params.N);
    case ModelKind::Dyson: return dyson_truncated_potential(params.d, params.beta, params.alpha, params.R);
  }
  throw std::invalid_argument("unknown model");
}

BoundaryCondition parse_boundary(std::string_view text, int alphabet) {
  if (text == "plus") return BoundaryCondition::fixed(Boundary::uniform(static_cast<Symbol>(alphabet - 1)));
  if (text == "minus") return BoundaryCondition::fixed(Boundary::uniform(0));
  if (text == "free") return BoundaryCondition::free();
  if (text == "periodic") return BoundaryCondition::periodic();
  if (text.starts_with("symbol:")) {
    const int s = std::stoi(std::string(text.substr(7)));
    if (s < 0 || s >= alphabet) throw std::invalid_argument("boundary symbol out of alphabet");
    return BoundaryCondition::fixed(Boundary::uniform(static_cast<Symbol>(s)));
  }
  throw std::invalid_argument("unknown boundary '" + std::string(text) + "'");
}

std::string describe(const BoundaryCondition& bc) {
  switch (bc.geometry) {
    case Geometry::Free: return "free";
    case Geometry::Torus: return "periodic";
    case Geometry::FixedBoundary:
      if (bc.boundary && bc.boundary->is_uniform())
        return "symbol:" + std::to_string(static_cast<int>(*bc.boundary->uniform_symbol()));
      return "collar";
  }
  return "?";
}

CompiledHamiltonian::CompiledHamiltonian(const Potential& potential, const Window& window,
                                         const std::optional<Boundary>& boundary)
    : window_(window), alphabet_(potential.alphabet()), shapes_(potential.shapes()) {
  if (potential.dim() != window.dim()) throw std::invalid_argument("potential and window dimensions differ");
  if (potential.alphabet() != window.alphabet()) throw std::invalid_argument("potential and window alphabets differ");
  if (window.size() > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("window too large");
  const Geometry geom = window.geometry();
  if (geom == Geometry::FixedBoundary) {
    if (!boundary) throw std::invalid_argument("fixed-boundary window requires boundary spins");
    if (boundary->width() < potential.range())
      throw std::invalid_argument("boundary collar narrower than the interaction range");
  }

  incident_.resize(window.size());
  const int r = potential.range();
  for (std::uint32_t si = 0; si < shapes_.size(); ++si) {
    const auto& shape = shapes_[si];
    const std::size_t m = shape.offsets.size();
    std::vector<Site> anchors = geom == Geometry::Torus ? window.sites()
                                                        : box_sites(window.dim(), window.lo() - r, window.hi() + r);
    for (const Site& x : anchors) {
      Term t{si, 0, static_cast<std::uint32_t>(slots_.size()), 0};
      bool touches = false;
      bool dropped = false;
      std::vector<Slot> local;
      std::vector<std::pair<Site, std::uint64_t>> outside;
      for (std::size_t j = 0; j < m; ++j) {
        const std::uint64_t weight = ipow(alphabet_, m - 1 - j);
        const Site y = x + shape.offsets[j];
        if (auto idx = window.resolve(y)) {
          touches = true;
          local.push_back(Slot{static_cast<std::uint32_t>(*idx), weight});
        } else if (geom == Geometry::Free) {
          dropped = true;
        } else {
          outside.emplace_back(y, weight);
        }
      }
      if (!touches || dropped) continue;
      // boundary spins are read only for terms that reach into the window
      for (const auto& [y, weight] : outside) t.base += weight * boundary->at(y);
      t.slot_count = static_cast<std::uint32_t>(local.size());
      const auto term_index = static_cast<std::uint32_t>(terms_.size());
      for (const auto& s : local) {
        slots_.push_back(s);
        auto& inc = incident_[s.site];
        if (inc.empty() || inc.back() != term_index) inc.push_back(term_index);
      }
      terms_.push_back(t);
    }
  }
}

double CompiledHamiltonian::term_energy(const Term& t, std::span<const Symbol> spins) const {
  std::uint64_t code = t.base;
  for (std::uint32_t k = 0; k < t.slot_count; ++k) {
    const Slot& s = slots_[t.first_slot + k];
    code += s.weight * spins[s.site];
  }
  return shapes_[t.shape].energy[code];
}

double CompiledHamiltonian::energy(std::span<const Symbol> spins) const {
  double e = 0.0;
  for (const auto& t : terms_) e += term_energy(t, spins);
  return e;
}

void CompiledHamiltonian::local_energies(std::span<const Symbol> spins, std::size_t site,
                                         std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::uint32_t ti : incident_[site]) {
    const Term& t = terms_[ti];
    std::uint64_t rest = t.base;
    std::uint64_t self_weight = 0;
    for (std::uint32_t k = 0; k < t.slot_count; ++k) {
      const Slot& s = slots_[t.first_slot + k];
      if (s.site == site)
        self_weight += s.weight;
      else
        rest += s.weight * spins[s.site];
    }
    const auto& table = shapes_[t.shape].energy;
    for (int a = 0; a < alphabet_; ++a) out[static_cast<std::size_t>(a)] += table[rest + self_weight * static_cast<std::uint64_t>(a)];
  }
}

std::vector<std::size_t> CompiledHamiltonian::neighbours(std::size_t site) const {
  std::vector<std::size_t> out;
  for (std::uint32_t ti : incident_[site]) {
    const Term& t = terms_[ti];
    for (std::uint32_t k = 0; k < t.slot_count; ++k) {
      const auto other = slots_[t.first_slot + k].site;
      if (other != site) out.push_back(other);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::pair<std::vector<std::size_t>, double>> CompiledHamiltonian::term_energies(
    std::span<const Symbol> spins) const {
  std::vector<std::pair<std::vector<std::size_t>, double>> out;
  for (const auto& t : terms_) {
    std::vector<std::size_t> sites;
    for (std::uint32_t k = 0; k < t.slot_count; ++k) sites.push_back(slots_[t.first_slot + k].site);
    out.emplace_back(std::move(sites), term_energy(t, spins));
  }
  return out;
}

double hamiltonian(const Potential& potential, const Configuration& omega) {
  return CompiledHamiltonian(potential, omega.window(), omega.boundary()).energy(omega.spins());
}

}  // namespace gibbslab

#include "gibbslab/dobrushin.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gibbslab/specification.hpp"

namespace gibbslab {
namespace {

// Single-site kernels at the origin are evaluated inside a free box of radius `range`: every
// term containing the origin fits in that box, so the local energies are exactly those of the
// infinite-volume specification.
struct OriginNeighbourhood {
  Window box;
  CompiledHamiltonian h;
  std::size_t center;
  std::vector<std::size_t> neighbours;

  explicit OriginNeighbourhood(const Potential& p)
      : box(Window::cube(p.dim(), std::max(p.range(), 1), Geometry::Free, p.alphabet())),
        h(p, box, std::nullopt),
        center(box.index_of(origin(p.dim()))),
        neighbours(h.neighbours(center)) {}
};

double entry_for(const OriginNeighbourhood& nb, std::size_t y_index) {
  const auto pos = std::find(nb.neighbours.begin(), nb.neighbours.end(), y_index);
  if (pos == nb.neighbours.end()) return 0.0;
  const auto y_slot = static_cast<std::size_t>(pos - nb.neighbours.begin());
  const int a = nb.box.alphabet();
  const std::uint64_t states = state_count(Window(1, static_cast<int>(nb.neighbours.size()), Geometry::Free, a));

  std::vector<Symbol> spins(nb.box.size(), 0), eta(nb.neighbours.size());
  std::vector<double> p(static_cast<std::size_t>(a)), q(static_cast<std::size_t>(a));
  double worst = 0.0;
  for (std::uint64_t code = 0; code < states; ++code) {
    decode_symbols(code, a, eta);
    // Each unordered pair (eta, eta') is visited once: eta' has a larger symbol at y.
    for (std::size_t i = 0; i < eta.size(); ++i) spins[nb.neighbours[i]] = eta[i];
    single_site_kernel(nb.h, spins, nb.center, p);
    for (int b = eta[y_slot] + 1; b < a; ++b) {
      spins[y_index] = static_cast<Symbol>(b);
      single_site_kernel(nb.h, spins, nb.center, q);
      double tv = 0.0;
      for (int s = 0; s < a; ++s) tv += std::abs(p[static_cast<std::size_t>(s)] - q[static_cast<std::size_t>(s)]);
      worst = std::max(worst, 0.5 * tv);
    }
    spins[y_index] = eta[y_slot];
  }
  return std::min(worst, 1.0);
}

std::vector<Site> row_sites(const Potential& p) {
  std::vector<Site> out;
  for (auto& s : box_sites(p.dim(), std::max(p.range(), 1)))
    if (s != origin(p.dim())) out.push_back(std::move(s));
  return out;
}

}  // namespace

double gcb_constant(double c) {
  if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("Dobrushin constant must lie in [0, 1)");
  return 1.0 / (2.0 * (1.0 - c) * (1.0 - c));
}

std::vector<InterdependenceEntry> interdependence_row(const Potential& potential) {
  const OriginNeighbourhood nb(potential);
  const auto ys = row_sites(potential);
  std::vector<InterdependenceEntry> row(ys.size());
  const auto n = static_cast<std::int64_t>(ys.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    row[k] = {ys[k], entry_for(nb, nb.box.index_of(ys[k]))};
  }
  return row;
}

std::vector<InterdependenceEntry> interdependence_row_serial(const Potential& potential) {
  const OriginNeighbourhood nb(potential);
  std::vector<InterdependenceEntry> row;
  for (const Site& y : row_sites(potential)) row.push_back({y, entry_for(nb, nb.box.index_of(y))});
  return row;
}

double dobrushin_constant(const Potential& potential) {
  double c = 0.0;
  for (const auto& e : interdependence_row(potential)) c += e.value;
  return c;
}

DobrushinReport gcb_certificate(const Potential& potential) {
  DobrushinReport r;
  r.row = interdependence_row(potential);
  for (const auto& e : r.row) r.c += e.value;
  r.satisfied = r.c < 1.0;
  if (r.satisfied) r.D = gcb_constant(r.c);
  return r;
}

DobrushinReport certificate_from_constant(double c) {
  if (!(c >= 0.0)) throw std::domain_error("Dobrushin constant must be >= 0");
  DobrushinReport r;
  r.c = c;
  r.satisfied = c < 1.0;
  if (r.satisfied) r.D = gcb_constant(c);
  return r;
}

}  // namespace gibbslab

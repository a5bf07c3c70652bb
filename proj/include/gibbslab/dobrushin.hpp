#pragma once

#include <optional>
#include <vector>

#include "gibbslab/lattice.hpp"
#include "gibbslab/potential.hpp"

namespace gibbslab {

struct InterdependenceEntry {
  Site y;
  double value = 0.0;
};

struct DobrushinReport {
  double c = 0.0;
  std::vector<InterdependenceEntry> row;
  bool satisfied = false;
  /// Certified Gaussian concentration constant 1 / (2 (1 - c)^2), present iff c < 1.
  std::optional<double> D;
};

/// 1 / (2 (1 - c)^2); requires c < 1.
double gcb_constant(double c);

/// C(0, y) for every y != 0 with |y|_inf <= range: the largest total-variation distance between
/// single-site kernels at the origin whose boundaries differ only at y, maximized exhaustively.
/// Parallel over y.
std::vector<InterdependenceEntry> interdependence_row(const Potential& potential);
std::vector<InterdependenceEntry> interdependence_row_serial(const Potential& potential);

double dobrushin_constant(const Potential& potential);

DobrushinReport gcb_certificate(const Potential& potential);
/// Report for a given constant (no row), used to pin the c -> D map.
DobrushinReport certificate_from_constant(double c);

}  // namespace gibbslab

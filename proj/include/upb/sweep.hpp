#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "upb/lattice.hpp"
#include "upb/weakdrive.hpp"

namespace upb::sweep {

/// Evenly spaced axis, endpoints included.
struct Range {
  double min = 0.0;
  double max = 1.0;
  std::size_t count = 2;

  double at(std::size_t i) const;
  double step() const;
};

/// Grid over the z-plane: E = Re z along one axis, gamma = -2 Im z along the other.
struct GridSpec {
  Range energy{-0.5, 0.5, 201};
  Range gamma{1.0 / 201.0, 1.0, 201};
  LatticeSpec fixed;  // onsite_energy and loss are overwritten per point
  std::optional<std::size_t> signal_site;

  void validate() const;
  std::size_t signal() const;
  LatticeSpec at(std::size_t ie, std::size_t ig) const;
};

struct Singularity {
  cplx z;
  int winding = 0;  // counterclockwise in the z-plane
};

/// Signal amplitude <s,s|psi2> and g2 on a grid, row-major in E then gamma.
/// Points at a pole hold NaN.
struct ZMap {
  GridSpec grid;
  weakdrive::Method method = weakdrive::Method::perturbative;
  std::vector<cplx> amplitude;
  std::vector<double> g2;
  std::vector<Singularity> singularities;

  std::size_t index(std::size_t ie, std::size_t ig) const { return ie * grid.gamma.count + ig; }
  bool is_gap(std::size_t ie, std::size_t ig) const;
};

ZMap z_grid_map(const GridSpec& grid, weakdrive::Method method = weakdrive::Method::perturbative);

/// Signal amplitude of the weak-drive solution at complex energy z.
cplx signal_amplitude_at(const GridSpec& grid, weakdrive::Method method, cplx z);

/// Complex field sampled on axes x (Re z) and y (Im z), row-major in x.
/// Either axis may decrease. NaN values mark gaps.
struct FieldGrid {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<cplx> values;
};

using FieldFunction = std::function<cplx(cplx)>;

/// Flags every gap-free plaquette whose wrapped phase differences sum to
/// +-2pi. With `refine`, each flagged plaquette is split once into four and
/// the position moves to the centre of the sub-plaquette carrying the
/// winding. Throws GridTooCoarseError when a plaquette winds more than once.
std::vector<Singularity> locate_singularities(const FieldGrid& field, const FieldFunction& refine = {});

/// Singularities of a z-map's signal amplitude, refined with the map's solver.
std::vector<Singularity> find_phase_singularities(const ZMap& map);

/// Net winding of `values` sampled counterclockwise around a closed loop.
int contour_winding(const std::vector<cplx>& values);

/// Winding of `f` around a circle of `radius` about `center` from `samples` points.
int circle_winding(const FieldFunction& f, cplx center, double radius, std::size_t samples = 512);

struct AlphaScanOptions {
  double f1 = 1.0;
  weakdrive::Method method = weakdrive::Method::exact;
  std::size_t coarse_points = 64;
  double rel_tol = 1e-4;
  std::optional<std::size_t> signal_site;
};

/// Minimizes |<s,s|psi2>| over alpha in [lo, hi] at z = E_opt(gamma) - i gamma/2
/// by a logarithmic coarse scan followed by golden-section search. Throws
/// NoBracketedMinimumError when the minimum sits on the bracket edge.
double optimal_alpha_scan(std::size_t n_sites, double intercell, double gamma, double lo, double hi,
                          const AlphaScanOptions& opts = {});

}  // namespace upb::sweep

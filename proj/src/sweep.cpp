#include "upb/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "upb/analytics.hpp"
#include "upb/error.hpp"
#include "upb/parallel.hpp"

namespace upb::sweep {
namespace {

const char* kModule = "sweep";
const double kNaN = std::numeric_limits<double>::quiet_NaN();
const cplx kGap{kNaN, kNaN};

bool is_nan(cplx v) { return std::isnan(v.real()) || std::isnan(v.imag()); }

// Sum of shortest-arc phase steps around a closed loop, in turns.
double loop_turns(const cplx* v, std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += std::arg(v[(k + 1) % n] / v[k]);
  return sum / (2.0 * std::numbers::pi);
}

// Winding of the plaquette with corners (x0,y0),(x1,y0),(x1,y1),(x0,y1),
// reported counterclockwise in the z-plane. Zero when a corner is a gap or
// an exact zero.
int plaquette_winding(const std::array<cplx, 4>& corners, double dx, double dy) {
  for (const cplx& c : corners) {
    if (is_nan(c) || c == cplx{}) return 0;
  }
  const auto w = static_cast<int>(std::lround(loop_turns(corners.data(), 4)));
  return (dx * dy > 0.0) ? w : -w;
}

std::optional<Singularity> refine_plaquette(const FieldFunction& f, double x0, double x1, double y0, double y1,
                                            const std::array<cplx, 4>& c, int winding) {
  const double xm = 0.5 * (x0 + x1);
  const double ym = 0.5 * (y0 + y1);
  // 3x3 sub-grid, corners reused.
  std::array<std::array<cplx, 3>, 3> g;
  const std::array<double, 3> xs{x0, xm, x1};
  const std::array<double, 3> ys{y0, ym, y1};
  g[0][0] = c[0];
  g[2][0] = c[1];
  g[2][2] = c[2];
  g[0][2] = c[3];
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if ((i == 1) || (j == 1)) {
        try {
          g[i][j] = f({xs[i], ys[j]});
        } catch (const PoleError&) {
          g[i][j] = kGap;
        }
      }
    }
  }
  std::optional<Singularity> found;
  int total = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const std::array<cplx, 4> sub{g[i][j], g[i + 1][j], g[i + 1][j + 1], g[i][j + 1]};
      const int w = plaquette_winding(sub, xs[i + 1] - xs[i], ys[j + 1] - ys[j]);
      total += w;
      if (w != 0 && w == winding && !found) {
        found = Singularity{{0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])}, w};
      }
    }
  }
  if (std::abs(total) > 1) {
    std::ostringstream os;
    os << "plaquette at z = (" << xm << ", " << ym << ") holds net winding " << total
       << " after refinement; refine the grid";
    throw GridTooCoarseError(kModule, os.str());
  }
  return found;
}

double golden_section(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > rel_tol * std::abs(0.5 * (a + b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double Range::at(std::size_t i) const {
  if (i + 1 == count) return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

double Range::step() const { return (max - min) / static_cast<double>(count - 1); }

void GridSpec::validate() const {
  if (energy.count < 2 || gamma.count < 2) throw ValidationError(kModule, "grid counts must be >= 2");
  if (!(gamma.min > 0.0) || !(gamma.max > gamma.min)) {
    throw ValidationError(kModule, "gamma range must satisfy 0 < min < max");
  }
  if (!(energy.max > energy.min)) throw ValidationError(kModule, "energy range must satisfy min < max");
  LatticeSpec probe = fixed;
  probe.loss = gamma.min;
  probe.validate();
  signal();
}

std::size_t GridSpec::signal() const {
  const std::size_t s = signal_site.value_or(weakdrive::default_signal_site(fixed.n_sites));
  if (s >= fixed.n_sites) throw ValidationError(kModule, "signal site out of range");
  return s;
}

LatticeSpec GridSpec::at(std::size_t ie, std::size_t ig) const {
  LatticeSpec s = fixed;
  s.onsite_energy = energy.at(ie);
  s.loss = gamma.at(ig);
  return s;
}

bool ZMap::is_gap(std::size_t ie, std::size_t ig) const { return is_nan(amplitude[index(ie, ig)]); }

ZMap z_grid_map(const GridSpec& grid, weakdrive::Method method) {
  grid.validate();
  ZMap map;
  map.grid = grid;
  map.method = method;
  const std::size_t ne = grid.energy.count;
  const std::size_t ng = grid.gamma.count;
  map.amplitude.assign(ne * ng, kGap);
  map.g2.assign(ne * ng, kNaN);
  const SingleParticleSpectrum spectrum = eigendecompose(build_hamiltonian(grid.fixed));
  const std::size_t s = grid.signal();
  parallel_for(ne, [&](std::size_t ie) {
    for (std::size_t ig = 0; ig < ng; ++ig) {
      const std::size_t k = map.index(ie, ig);
      try {
        const auto sol = weakdrive::solve(grid.at(ie, ig), method, spectrum);
        map.amplitude[k] = weakdrive::signal_amplitude(sol, s);
        map.g2[k] = sol.g2_per_site(static_cast<Eigen::Index>(s));
      } catch (const PoleError&) {
        // gap
      }
    }
  });
  return map;
}

cplx signal_amplitude_at(const GridSpec& grid, weakdrive::Method method, cplx z) {
  LatticeSpec spec = grid.fixed;
  spec.onsite_energy = z.real();
  spec.loss = -2.0 * z.imag();
  return weakdrive::signal_amplitude(weakdrive::solve(spec, method), grid.signal());
}

std::vector<Singularity> locate_singularities(const FieldGrid& field, const FieldFunction& refine) {
  const std::size_t nx = field.x.size();
  const std::size_t ny = field.y.size();
  if (nx < 2 || ny < 2 || field.values.size() != nx * ny) {
    throw ValidationError(kModule, "field grid shape mismatch");
  }
  auto at = [&](std::size_t i, std::size_t j) { return field.values[i * ny + j]; };
  std::vector<Singularity> out;
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      const std::array<cplx, 4> c{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      const double x0 = field.x[i], x1 = field.x[i + 1];
      const double y0 = field.y[j], y1 = field.y[j + 1];
      const int w = plaquette_winding(c, x1 - x0, y1 - y0);
      if (w == 0) continue;
      if (std::abs(w) > 1) {
        std::ostringstream os;
        os << "plaquette at z = (" << 0.5 * (x0 + x1) << ", " << 0.5 * (y0 + y1) << ") winds " << w
           << " times; refine the grid";
        throw GridTooCoarseError(kModule, os.str());
      }
      std::optional<Singularity> fine;
      if (refine) fine = refine_plaquette(refine, x0, x1, y0, y1, c, w);
      out.push_back(fine.value_or(Singularity{{0.5 * (x0 + x1), 0.5 * (y0 + y1)}, w}));
    }
  }
  return out;
}

std::vector<Singularity> find_phase_singularities(const ZMap& map) {
  FieldGrid field;
  for (std::size_t i = 0; i < map.grid.energy.count; ++i) field.x.push_back(map.grid.energy.at(i));
  for (std::size_t j = 0; j < map.grid.gamma.count; ++j) field.y.push_back(-0.5 * map.grid.gamma.at(j));
  field.values = map.amplitude;
  const GridSpec grid = map.grid;
  const weakdrive::Method method = map.method;
  return locate_singularities(field, [grid, method](cplx z) { return signal_amplitude_at(grid, method, z); });
}

int contour_winding(const std::vector<cplx>& values) {
  if (values.size() < 3) throw ValidationError(kModule, "contour needs at least 3 points");
  for (const cplx& v : values) {
    if (is_nan(v) || v == cplx{}) throw ValidationError(kModule, "field vanishes or is undefined on the contour");
  }
  return static_cast<int>(std::lround(loop_turns(values.data(), values.size())));
}

int circle_winding(const FieldFunction& f, cplx center, double radius, std::size_t samples) {
  std::vector<cplx> v(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
    v[k] = f(center + std::polar(radius, phi));
  }
  return contour_winding(v);
}

double optimal_alpha_scan(std::size_t n_sites, double intercell, double gamma, double lo, double hi,
                          const AlphaScanOptions& opts) {
  if (!(lo > 0.0) || !(hi > lo)) throw ValidationError(kModule, "alpha bracket must satisfy 0 < lo < hi");
  if (opts.coarse_points < 3) throw ValidationError(kModule, "coarse scan needs at least 3 points");
  const double energy = analytics::optimal_point(n_sites, gamma).energy;
  LatticeSpec spec = LatticeSpec::driven_first_site(n_sites, intercell, energy, gamma, 0.0, opts.f1);
  spec.validate();
  const std::size_t s = opts.signal_site.value_or(weakdrive::default_signal_site(n_sites));
  const SingleParticleSpectrum spectrum = eigendecompose(build_hamiltonian(spec));
  auto objective = [&](double alpha) {
    LatticeSpec p = spec;
    p.kerr = alpha;
    return std::abs(weakdrive::signal_amplitude(weakdrive::solve(p, opts.method, spectrum), s));
  };

  const std::size_t n = opts.coarse_points;
  std::vector<double> alphas(n), values(n);
  for (std::size_t k = 0; k < n; ++k) {
    alphas[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
    values[k] = objective(alphas[k]);
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  if (best == 0 || best + 1 == n) {
    std::ostringstream os;
    os << "no interior minimum of the signal amplitude in alpha bracket [" << lo << ", " << hi << "]";
    throw NoBracketedMinimumError(kModule, os.str());
  }
  return golden_section(objective, alphas[best - 1], alphas[best + 1], opts.rel_tol);
}

}  // namespace upb::sweep

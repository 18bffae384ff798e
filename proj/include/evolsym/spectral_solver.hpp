#pragma once

// Periodic-box Cauchy solver: u^(t, xi) = exp(t A(xi)) u^0(xi) per Fourier mode,
// discrete kernels S_t, and propagation-cone estimates for hyperbolic systems.
//
// Grid conventions
//   physical:  x_i = i h for i < N/2, (i - N) h otherwise   (box [-L/2, L/2), origin at index 0)
//   frequency: xi_k = 2 pi k / L with the same wrap, k in {-N/2, ..., N/2 - 1}
//   forward transform sum_x u(x) e^{-i x.xi}, inverse carries 1 / prod N_j
//   storage:   row-major over axes (axis 0 slowest), components interleaved per point

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fftw3.h>
#include <nlohmann/json.hpp>

#include "evolsym/classifier.hpp"
#include "evolsym/errors.hpp"
#include "evolsym/json_io.hpp"
#include "evolsym/matrix_analysis.hpp"
#include "evolsym/operator.hpp"
#include "evolsym/sampling.hpp"

namespace evolsym {

struct GridSpec {
  std::vector<double> box_lengths;
  std::vector<std::size_t> points_per_axis;

  static constexpr std::size_t default_max_points = std::size_t{1} << 24;

  GridSpec() = default;
  GridSpec(std::vector<double> lengths, std::vector<std::size_t> points,
           std::size_t max_points = default_max_points)
      : box_lengths(std::move(lengths)), points_per_axis(std::move(points)) {
    if (box_lengths.empty() || box_lengths.size() != points_per_axis.size())
      throw DimensionError("grid needs one box length and one point count per axis");
    for (double l : box_lengths)
      if (!(l > 0.0) || !std::isfinite(l)) throw PreconditionError("box lengths must be positive");
    for (std::size_t p : points_per_axis)
      if (p == 0 || p % 2 != 0) throw PreconditionError("points per axis must be positive and even");
    if (total_points() > max_points) throw SizeCapError("grid exceeds the point budget");
  }

  /// Same length and point count on all n axes.
  static GridSpec cube(std::size_t n, double length, std::size_t points) {
    return GridSpec(std::vector<double>(n, length), std::vector<std::size_t>(n, points));
  }

  std::size_t n() const noexcept { return box_lengths.size(); }

  std::size_t total_points() const noexcept {
    std::size_t t = 1;
    for (std::size_t p : points_per_axis) t *= p;
    return t;
  }

  double spacing(std::size_t axis) const { return box_lengths[axis] / static_cast<double>(points_per_axis[axis]); }

  double max_spacing() const {
    double h = 0.0;
    for (std::size_t a = 0; a < n(); ++a) h = std::max(h, spacing(a));
    return h;
  }

  double cell_volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < n(); ++a) v *= spacing(a);
    return v;
  }

  /// Signed wrapped index in [-N/2, N/2).
  std::ptrdiff_t wrapped(std::size_t axis, std::size_t i) const {
    const auto np = static_cast<std::ptrdiff_t>(points_per_axis[axis]);
    const auto s = static_cast<std::ptrdiff_t>(i);
    return s < np / 2 ? s : s - np;
  }

  double coordinate(std::size_t axis, std::size_t i) const {
    return static_cast<double>(wrapped(axis, i)) * spacing(axis);
  }

  double frequency(std::size_t axis, std::size_t k) const {
    return 2.0 * std::numbers::pi * static_cast<double>(wrapped(axis, k)) / box_lengths[axis];
  }

  /// Per-axis indices of a flat point index.
  std::vector<std::size_t> unflatten(std::size_t flat) const {
    std::vector<std::size_t> idx(n());
    for (std::size_t a = n(); a-- > 0;) {
      idx[a] = flat % points_per_axis[a];
      flat /= points_per_axis[a];
    }
    return idx;
  }

  std::size_t flatten(const std::vector<std::size_t>& idx) const {
    std::size_t f = 0;
    for (std::size_t a = 0; a < n(); ++a) f = f * points_per_axis[a] + idx[a];
    return f;
  }

  std::vector<double> point(std::size_t flat) const {
    const auto idx = unflatten(flat);
    std::vector<double> x(n());
    for (std::size_t a = 0; a < n(); ++a) x[a] = coordinate(a, idx[a]);
    return x;
  }

  std::vector<double> frequency_point(std::size_t flat) const {
    const auto idx = unflatten(flat);
    std::vector<double> xi(n());
    for (std::size_t a = 0; a < n(); ++a) xi[a] = frequency(a, idx[a]);
    return xi;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class Representation { physical, frequency };

inline const char* to_string(Representation r) { return r == Representation::physical ? "physical" : "frequency"; }

/// C^m-valued gridded field.
struct FieldState {
  GridSpec grid;
  std::size_t m = 1;
  Representation representation = Representation::physical;
  std::vector<complex> data;  ///< size total_points * m, point-major
  double time_label = 0.0;

  FieldState() = default;
  FieldState(GridSpec g, std::size_t components, Representation rep = Representation::physical)
      : grid(std::move(g)), m(components), representation(rep), data(grid.total_points() * components) {}

  complex& at(std::size_t point, std::size_t component) { return data[point * m + component]; }
  const complex& at(std::size_t point, std::size_t component) const { return data[point * m + component]; }

  /// Discrete l2 norm of the raw samples.
  double l2_norm() const {
    double s = 0.0;
    for (const auto& v : data) s += std::norm(v);
    return std::sqrt(s);
  }
};

/// m x m matrix-valued gridded kernel (a density: the t = 0 kernel is 1/cell_volume at the origin).
struct KernelField {
  GridSpec grid;
  std::size_t m = 1;
  std::vector<complex> data;  ///< size total_points * m * m, entry (r, c) at point * m*m + r*m + c
  double time_label = 0.0;
  double mollifier_cells = 0.0;

  complex& at(std::size_t point, std::size_t r, std::size_t c) { return data[(point * m + r) * m + c]; }
  const complex& at(std::size_t point, std::size_t r, std::size_t c) const { return data[(point * m + r) * m + c]; }

  ComplexMatrix matrix_at(std::size_t point) const {
    ComplexMatrix a(m, m);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) a(r, c) = at(point, r, c);
    return a;
  }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

// In-place multi-dimensional DFT of `howmany` interleaved fields.
inline void fft_interleaved(std::vector<complex>& data, const GridSpec& grid, std::size_t howmany, int sign) {
  std::vector<int> dims(grid.points_per_axis.begin(), grid.points_per_axis.end());
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), static_cast<int>(howmany), ptr, nullptr,
                              static_cast<int>(howmany), 1, ptr, nullptr, static_cast<int>(howmany), 1, sign,
                              FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalFailure("FFTW could not create a plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace detail

inline FieldState forward_fft(const FieldState& u) {
  if (u.representation != Representation::physical) throw PreconditionError("forward_fft expects a physical field");
  FieldState r = u;
  detail::fft_interleaved(r.data, r.grid, r.m, FFTW_FORWARD);
  r.representation = Representation::frequency;
  return r;
}

inline FieldState inverse_fft(const FieldState& u) {
  if (u.representation != Representation::frequency) throw PreconditionError("inverse_fft expects a frequency field");
  FieldState r = u;
  detail::fft_interleaved(r.data, r.grid, r.m, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(r.grid.total_points());
  for (auto& v : r.data) v *= scale;
  r.representation = Representation::physical;
  return r;
}

struct PropagateOptions {
  bool force = false;
  std::optional<Petrovskii> verdict;  ///< classifier verdict, when known
};

namespace detail {

inline void check_propagation(const PolyMatrixOperator& g, const GridSpec& grid, double t,
                              const PropagateOptions& opts) {
  if (grid.n() != g.n()) throw DimensionError("grid dimension does not match operator n");
  if (!(t >= 0.0) || !std::isfinite(t)) throw PreconditionError("propagation time must be finite and >= 0");
  if (opts.verdict == Petrovskii::violated && !opts.force)
    throw PreconditionError("operator violates the Petrovskii condition; propagation refused without force");
}

// exp(t A(xi)) at one grid frequency; overflow errors carry the frequency.
inline ComplexMatrix propagator_at(const PolyMatrixOperator& g, const std::vector<double>& xi, double t) {
  try {
    return matrix_exp(t * symbol_at(g, xi));
  } catch (const OverflowError& e) {
    std::ostringstream os;
    os << "propagator overflows at xi = (";
    for (std::size_t a = 0; a < xi.size(); ++a) os << (a ? ", " : "") << xi[a];
    os << "), t = " << t;
    throw OverflowError(os.str(), e.norm(), xi);
  }
}

}  // namespace detail

/// Solution at time u0.time_label + t, in physical representation.
inline FieldState propagate(const PolyMatrixOperator& g, const FieldState& u0, double t,
                            const PropagateOptions& opts = {}) {
  detail::check_propagation(g, u0.grid, t, opts);
  if (u0.m != g.m()) throw DimensionError("field component count does not match operator m");
  FieldState hat = u0.representation == Representation::physical ? forward_fft(u0) : u0;
  const std::size_t m = g.m();
  Eigen::VectorXcd v(m);
  for (std::size_t p = 0; p < hat.grid.total_points(); ++p) {
    const ComplexMatrix e = detail::propagator_at(g, hat.grid.frequency_point(p), t);
    for (std::size_t c = 0; c < m; ++c) v(c) = hat.at(p, c);
    v = e * v;
    for (std::size_t c = 0; c < m; ++c) hat.at(p, c) = v(c);
  }
  FieldState out = inverse_fft(hat);
  out.time_label = u0.time_label + t;
  return out;
}

struct KernelOptions {
  bool force = false;
  std::optional<Petrovskii> verdict;
  /// Gaussian mollifier width in grid cells (0 = none): multiplies exp(tA(xi)) by e^{-|sigma xi|^2 / 2}.
  double mollifier_cells = 0.0;
};

/// Discrete (periodized) S_t: inverse transform of xi -> exp(t A(xi)), as a density.
inline KernelField kernel(const PolyMatrixOperator& g, double t, const GridSpec& grid, const KernelOptions& opts = {}) {
  detail::check_propagation(g, grid, t, {opts.force, opts.verdict});
  const std::size_t m = g.m(), mm = m * m;
  KernelField k;
  k.grid = grid;
  k.m = m;
  k.time_label = t;
  k.mollifier_cells = opts.mollifier_cells;
  k.data.resize(grid.total_points() * mm);
  std::vector<double> sigma(grid.n());
  for (std::size_t a = 0; a < grid.n(); ++a) sigma[a] = opts.mollifier_cells * grid.spacing(a);
  for (std::size_t p = 0; p < grid.total_points(); ++p) {
    const auto xi = grid.frequency_point(p);
    const ComplexMatrix e = detail::propagator_at(g, xi, t);
    double damp = 0.0;
    for (std::size_t a = 0; a < grid.n(); ++a) damp += (sigma[a] * xi[a]) * (sigma[a] * xi[a]);
    const double w = opts.mollifier_cells > 0.0 ? std::exp(-0.5 * damp) : 1.0;
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) k.at(p, r, c) = w * e(r, c);
  }
  detail::fft_interleaved(k.data, grid, mm, FFTW_BACKWARD);
  const double scale = 1.0 / (static_cast<double>(grid.total_points()) * grid.cell_volume());
  for (auto& v : k.data) v *= scale;
  return k;
}

/// Relative l2 distance between propagate(propagate(u0, s), t) and propagate(u0, s + t).
inline double semigroup_residual(const PolyMatrixOperator& g, double s, double t, const FieldState& u0,
                                 const PropagateOptions& opts = {}) {
  const FieldState two = propagate(g, propagate(g, u0, s, opts), t, opts);
  const FieldState one = propagate(g, u0, s + t, opts);
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < one.data.size(); ++i) {
    diff += std::norm(two.data[i] - one.data[i]);
    ref += std::norm(one.data[i]);
  }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

/// Pointwise operator 2-norm of a kernel field.
inline std::vector<double> kernel_norms(const KernelField& k) {
  std::vector<double> out(k.grid.total_points());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = k.m == 1 ? std::abs(k.data[p]) : norm2(k.matrix_at(p));
  return out;
}

namespace detail {

inline double support_radius_from_norms(const GridSpec& grid, const std::vector<double>& norms,
                                        const Direction& dir, double threshold) {
  const double mx = *std::max_element(norms.begin(), norms.end());
  const double cut = threshold * mx;
  bool any = false;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < norms.size(); ++p) {
    if (!(norms[p] > cut)) continue;
    const auto x = grid.point(p);
    double proj = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) proj += x[a] * dir[a];
    best = std::max(best, proj);
    any = true;
  }
  return any ? best : 0.0;
}

}  // namespace detail

/// Largest x.direction over points whose kernel norm exceeds threshold * (max norm); 0 if none.
inline double support_radius(const KernelField& k, const Direction& direction, double threshold = 1e-8) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw PreconditionError("threshold must lie in (0, 1)");
  if (direction.size() != k.grid.n()) throw DimensionError("direction length does not match grid dimension");
  return detail::support_radius_from_norms(k.grid, kernel_norms(k), direction, threshold);
}

struct ConeOptions {
  double mollifier_cells = 3.0;
  double resolved_cells = 2.0;  ///< radii below this many cells count as unresolved
  std::optional<Classification> classification;
  SamplingConfig sampling;  ///< used when no classification is supplied
};

struct ConeEstimate {
  std::vector<double> times;
  std::vector<Direction> directions;
  std::vector<std::vector<double>> radii;  ///< radii[direction][time], >= 0
  std::vector<double> speeds;              ///< least-squares radius / t per direction
  std::vector<double> mollifier_radii;     ///< support radius of the mollified delta per direction
  double scaled_radii_spread = 0.0;        ///< max over directions of (max - min) / mean of radius / t
  double min_resolved_radius = 0.0;        ///< smallest radius entering the spread
  double cell_size = 0.0;
  double threshold = 0.0;

  /// Bound "2 cells relative" for the spread.
  double spread_tolerance(double cells = 2.0) const {
    return min_resolved_radius > 0.0 ? cells * cell_size / min_resolved_radius : 0.0;
  }

  /// Support-function offset x.dir - t speed(dir) maximized over directions.
  double excess(double t, const std::vector<double>& x) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < directions.size(); ++d) {
      double proj = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) proj += x[a] * directions[d][a];
      worst = std::max(worst, proj - t * speeds[d]);
    }
    return worst;
  }
};

/// Per-direction support radii of S_t (mollified, mollifier width subtracted) over several times.
inline ConeEstimate cone_estimate(const PolyMatrixOperator& g, const std::vector<double>& times, const GridSpec& grid,
                                  const std::vector<Direction>& directions, double threshold = 1e-8,
                                  const ConeOptions& opts = {}) {
  if (times.empty()) throw PreconditionError("cone estimate needs at least one time");
  for (double t : times)
    if (!(t > 0.0)) throw PreconditionError("cone times must be positive");
  if (directions.empty()) throw PreconditionError("cone estimate needs at least one direction");
  for (const auto& d : directions)
    if (d.size() != g.n()) throw DimensionError("direction length does not match operator n");
  const Classification cls = opts.classification ? *opts.classification : classify(g, opts.sampling);
  if (!cls.hyperbolic)
    throw PreconditionError("operator is not hyperbolic: supp S_t is unbounded and no propagation cone exists");

  ConeEstimate est;
  est.times = times;
  est.directions = directions;
  est.cell_size = grid.max_spacing();
  est.threshold = threshold;
  KernelOptions kopts;
  kopts.mollifier_cells = opts.mollifier_cells;
  kopts.verdict = cls.petrovskii;

  const auto base = kernel_norms(kernel(g, 0.0, grid, kopts));
  for (const auto& d : directions) est.mollifier_radii.push_back(detail::support_radius_from_norms(grid, base, d, threshold));

  est.radii.assign(directions.size(), std::vector<double>(times.size(), 0.0));
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const auto norms = kernel_norms(kernel(g, times[ti], grid, kopts));
    for (std::size_t d = 0; d < directions.size(); ++d) {
      const double r = detail::support_radius_from_norms(grid, norms, directions[d], threshold);
      est.radii[d][ti] = std::max(0.0, r - est.mollifier_radii[d]);
      // the box must contain the whole support with a margin, or periodization wraps it
      double half = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < grid.n(); ++a)
        if (directions[d][a] != 0.0) half = std::min(half, grid.box_lengths[a] / (2.0 * std::abs(directions[d][a])));
      if (r + 3.0 * est.cell_size >= half)
        throw PreconditionError("box too small: kernel support reaches the periodic boundary at t = " +
                                std::to_string(times[ti]));
    }
  }

  const double resolved = opts.resolved_cells * est.cell_size;
  est.min_resolved_radius = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < directions.size(); ++d) {
    double num = 0.0, den = 0.0;
    std::vector<double> ratios;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      num += est.radii[d][ti] * times[ti];
      den += times[ti] * times[ti];
      if (est.radii[d][ti] >= resolved) {
        ratios.push_back(est.radii[d][ti] / times[ti]);
        est.min_resolved_radius = std::min(est.min_resolved_radius, est.radii[d][ti]);
      }
    }
    est.speeds.push_back(num / den);
    if (!ratios.empty() && ratios.size() < times.size())
      throw PreconditionError("times too small for grid resolution: some radii are below " +
                              std::to_string(opts.resolved_cells) + " cells");
    if (ratios.size() >= 2) {
      const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
      double mean = 0.0;
      for (double r : ratios) mean += r;
      mean /= static_cast<double>(ratios.size());
      est.scaled_radii_spread = std::max(est.scaled_radii_spread, (*hi - *lo) / mean);
    }
  }
  if (!std::isfinite(est.min_resolved_radius)) est.min_resolved_radius = 0.0;
  return est;
}

/// Fraction of sum |u|^2 lying outside the cone at u.time_label, dilated by data_radius + margin.
inline double mass_outside_cone(const FieldState& u, const ConeEstimate& cone, double data_radius, double margin) {
  if (u.representation != Representation::physical) throw PreconditionError("mass_outside_cone needs a physical field");
  double outside = 0.0, total = 0.0;
  for (std::size_t p = 0; p < u.grid.total_points(); ++p) {
    double w = 0.0;
    for (std::size_t c = 0; c < u.m; ++c) w += std::norm(u.at(p, c));
    total += w;
    if (cone.excess(u.time_label, u.grid.point(p)) > data_radius + margin) outside += w;
  }
  return total > 0.0 ? outside / total : 0.0;
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

/// Smooth compactly supported bump exp(-1 / (1 - |x|^2 / R^2)) in component 0, centred at the origin.
inline FieldState bump_field(const GridSpec& grid, std::size_t m, double radius) {
  FieldState u(grid, m);
  for (std::size_t p = 0; p < grid.total_points(); ++p) {
    const auto x = grid.point(p);
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    r2 /= radius * radius;
    if (r2 < 1.0) u.at(p, 0) = std::exp(-1.0 / (1.0 - r2));
  }
  return u;
}

/// Single Fourier mode e^{i xi_k . x} in component 0; k holds signed wave numbers per axis.
inline FieldState mode_field(const GridSpec& grid, std::size_t m, const std::vector<long>& k) {
  if (k.size() != grid.n()) throw DimensionError("mode needs one wave number per axis");
  FieldState u(grid, m);
  for (std::size_t p = 0; p < grid.total_points(); ++p) {
    const auto idx = grid.unflatten(p);
    double phase = 0.0;
    for (std::size_t a = 0; a < grid.n(); ++a) {
      // reduce k * i modulo N so the phase stays exact on the grid
      const auto np = static_cast<long>(grid.points_per_axis[a]);
      const long prod = ((k[a] % np) * static_cast<long>(idx[a])) % np;
      phase += 2.0 * std::numbers::pi * static_cast<double>(prod) / static_cast<double>(np);
    }
    u.at(p, 0) = std::polar(1.0, phase);
  }
  return u;
}

/// Complex white noise with standard normal real and imaginary parts in every component.
inline FieldState random_field(const GridSpec& grid, std::size_t m, std::uint64_t seed) {
  FieldState u(grid, m);
  NormalStream rng(seed);
  for (auto& v : u.data) {
    const double re = rng.next();
    v = complex(re, rng.next());
  }
  return u;
}

// ---------------------------------------------------------------------------
// CSV and JSON
// ---------------------------------------------------------------------------

namespace detail {

inline std::string grid_header(const GridSpec& grid) {
  std::ostringstream os;
  os << std::setprecision(17) << "n=" << grid.n() << " L=";
  for (std::size_t a = 0; a < grid.n(); ++a) os << (a ? "," : "") << grid.box_lengths[a];
  os << " N=";
  for (std::size_t a = 0; a < grid.n(); ++a) os << (a ? "," : "") << grid.points_per_axis[a];
  return os.str();
}

inline void write_coordinates(std::ostream& os, const GridSpec& grid, std::size_t p, Representation rep) {
  const auto c = rep == Representation::physical ? grid.point(p) : grid.frequency_point(p);
  for (std::size_t a = 0; a < c.size(); ++a) os << (a ? "," : "") << c[a];
}

}  // namespace detail

/// Header line "# evolsym field ...", column line, then one row per grid point in storage order.
inline void write_csv(std::ostream& os, const FieldState& u) {
  os << std::setprecision(17);
  os << "# evolsym field schema=" << report_schema << ' ' << detail::grid_header(u.grid) << " m=" << u.m
     << " t=" << u.time_label << " representation=" << to_string(u.representation) << '\n';
  const char* axis = u.representation == Representation::physical ? "x" : "xi";
  for (std::size_t a = 0; a < u.grid.n(); ++a) os << (a ? "," : "") << axis << a;
  for (std::size_t c = 0; c < u.m; ++c) os << ",re_" << c << ",im_" << c;
  os << '\n';
  for (std::size_t p = 0; p < u.grid.total_points(); ++p) {
    detail::write_coordinates(os, u.grid, p, u.representation);
    for (std::size_t c = 0; c < u.m; ++c) os << ',' << u.at(p, c).real() << ',' << u.at(p, c).imag();
    os << '\n';
  }
}

inline void write_csv(std::ostream& os, const KernelField& k) {
  os << std::setprecision(17);
  os << "# evolsym kernel schema=" << report_schema << ' ' << detail::grid_header(k.grid) << " m=" << k.m
     << " t=" << k.time_label << " representation=physical\n";
  for (std::size_t a = 0; a < k.grid.n(); ++a) os << (a ? "," : "") << "x" << a;
  for (std::size_t r = 0; r < k.m; ++r)
    for (std::size_t c = 0; c < k.m; ++c) os << ",re_" << r << '_' << c << ",im_" << r << '_' << c;
  os << '\n';
  for (std::size_t p = 0; p < k.grid.total_points(); ++p) {
    detail::write_coordinates(os, k.grid, p, Representation::physical);
    for (std::size_t r = 0; r < k.m; ++r)
      for (std::size_t c = 0; c < k.m; ++c) os << ',' << k.at(p, r, c).real() << ',' << k.at(p, r, c).imag();
    os << '\n';
  }
}

/// Reads a field written by write_csv.
inline FieldState read_field_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# evolsym field", 0) != 0)
    throw ParseError("missing '# evolsym field' header line");
  std::istringstream hs(header.substr(2));
  std::string tok;
  std::vector<double> lengths;
  std::vector<std::size_t> points;
  std::size_t m = 0;
  double t = 0.0;
  Representation rep = Representation::physical;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
  };
  try {
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "L")
        for (const auto& s : split(val)) lengths.push_back(std::stod(s));
      else if (key == "N")
        for (const auto& s : split(val)) points.push_back(std::stoul(s));
      else if (key == "m")
        m = std::stoul(val);
      else if (key == "t")
        t = std::stod(val);
      else if (key == "representation")
        rep = val == "frequency" ? Representation::frequency : Representation::physical;
    }
  } catch (const std::exception&) {
    throw ParseError("malformed field header: " + header);
  }
  if (m == 0) throw ParseError("field header lacks m");
  FieldState u(GridSpec(lengths, points), m, rep);
  u.time_label = t;
  std::string line;
  std::getline(is, line);  // column names
  const std::size_t n = u.grid.n();
  for (std::size_t p = 0; p < u.grid.total_points(); ++p) {
    if (!std::getline(is, line)) throw ParseError("field file ends after " + std::to_string(p) + " rows");
    const auto cols = split(line);
    if (cols.size() != n + 2 * m) throw ParseError("wrong column count in row " + std::to_string(p));
    try {
      for (std::size_t c = 0; c < m; ++c) u.at(p, c) = complex(std::stod(cols[n + 2 * c]), std::stod(cols[n + 2 * c + 1]));
    } catch (const std::exception&) {
      throw ParseError("non-numeric value in row " + std::to_string(p));
    }
    for (std::size_t c = 0; c < m; ++c)
      if (!std::isfinite(u.at(p, c).real()) || !std::isfinite(u.at(p, c).imag()))
        throw ParseError("non-finite value in row " + std::to_string(p));
  }
  return u;
}

inline nlohmann::json to_json(const GridSpec& g) {
  return {{"n", g.n()}, {"box_lengths", g.box_lengths}, {"points_per_axis", g.points_per_axis}};
}

inline nlohmann::json to_json(const ConeEstimate& c) {
  nlohmann::json dirs = nlohmann::json::array();
  for (std::size_t d = 0; d < c.directions.size(); ++d)
    dirs.push_back({{"direction", c.directions[d]},
                    {"radii", c.radii[d]},
                    {"speed", c.speeds[d]},
                    {"mollifier_radius", c.mollifier_radii[d]}});
  return {{"schema", report_schema},
          {"times", c.times},
          {"directions", std::move(dirs)},
          {"direction_count", c.directions.size()},
          {"scaled_radii_spread", json_real(c.scaled_radii_spread)},
          {"spread_tolerance_2_cells", json_real(c.spread_tolerance())},
          {"min_resolved_radius", c.min_resolved_radius},
          {"cell_size", c.cell_size},
          {"threshold", c.threshold}};
}

}  // namespace evolsym

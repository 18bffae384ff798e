#pragma once

// Sampled Petrovskii test, exact degree data, hyperbolicity verdict and the
// growth-bound consistency check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evolsym/errors.hpp"
#include "evolsym/json_io.hpp"
#include "evolsym/matrix_analysis.hpp"
#include "evolsym/operator.hpp"
#include "evolsym/rational.hpp"
#include "evolsym/sampling.hpp"

namespace evolsym {

struct SamplingConfig {
  int shells = 16;  ///< J: shells |xi| = 2^j for j = 0..J
  std::size_t low_discrepancy_directions = 64;
  std::size_t random_directions = 64;
  std::uint64_t seed = 0;
  std::optional<double> slope_threshold;  ///< default 10 * m * max(d, 1)
  int min_shells_for_verdict = 4;         ///< J below this is always inconclusive
  double violation_margin = 2.0;          ///< violated needs slope > margin * threshold
  double max_failure_fraction = 0.01;
};

struct ShellSample {
  double radius = 0.0;
  std::vector<Direction> directions;
  double abscissa_max = -std::numeric_limits<double>::infinity();  ///< over the sampled points only
  std::size_t argmax = 0;                                          ///< index into directions
};

struct SpectralReport {
  std::vector<ShellSample> shells;  ///< ordered by radius
  double origin_abscissa = 0.0;     ///< spectral abscissa of A(0)
  double s0_estimate = std::numeric_limits<double>::infinity();
  double log_fit_slope = 0.0;
  double slope_threshold = 0.0;
  double violation_margin = 2.0;
  int min_shells_for_verdict = 4;
  bool verdict_bounded = false;
  std::size_t sampled_points = 0;
  std::size_t failed_points = 0;

  int max_shell_index() const noexcept { return static_cast<int>(shells.size()) - 1; }
};

enum class Petrovskii { satisfied, violated, inconclusive };

inline const char* to_string(Petrovskii p) {
  switch (p) {
    case Petrovskii::satisfied: return "satisfied";
    case Petrovskii::violated: return "violated";
    case Petrovskii::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// Directions probed on shell j: 2n axes, the low-discrepancy set, and seeded random directions.
inline std::vector<Direction> shell_directions(std::size_t n, int shell, const SamplingConfig& cfg) {
  std::vector<Direction> dirs = axis_directions(n);
  auto ld = low_discrepancy_directions(n, cfg.low_discrepancy_directions);
  auto rnd = random_directions(n, cfg.random_directions, substream_seed(cfg.seed, static_cast<std::uint64_t>(shell)));
  dirs.insert(dirs.end(), ld.begin(), ld.end());
  dirs.insert(dirs.end(), rnd.begin(), rnd.end());
  return dirs;
}

namespace detail {

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double nx = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nx;
  my /= nx;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

inline double default_slope_threshold(const PolyMatrixOperator& g) {
  return 10.0 * static_cast<double>(g.m()) * static_cast<double>(std::max(1u, g.order()));
}

}  // namespace detail

/// Samples max Re sigma(A(xi)) at xi = 0 and on dyadic shells and fits its growth against log(1 + |xi|).
inline SpectralReport sample_spectral_bound(const PolyMatrixOperator& g, const SamplingConfig& cfg = {}) {
  if (cfg.shells < 0) throw PreconditionError("shell count must be non-negative");
  SpectralReport rep;
  rep.slope_threshold = cfg.slope_threshold.value_or(detail::default_slope_threshold(g));
  rep.violation_margin = cfg.violation_margin;
  rep.min_shells_for_verdict = cfg.min_shells_for_verdict;

  const std::size_t n = g.n();
  const std::vector<double> origin(n, 0.0);
  rep.origin_abscissa = spectral_abscissa(symbol_at(g, origin));
  rep.sampled_points = 1;

  std::vector<double> xi(n);
  for (int j = 0; j <= cfg.shells; ++j) {
    ShellSample shell;
    shell.radius = std::ldexp(1.0, j);
    shell.directions = shell_directions(n, j, cfg);
    for (std::size_t k = 0; k < shell.directions.size(); ++k) {
      for (std::size_t a = 0; a < n; ++a) xi[a] = shell.radius * shell.directions[k][a];
      ++rep.sampled_points;
      double s;
      try {
        s = spectral_abscissa(symbol_at(g, xi));
      } catch (const NumericalFailure&) {
        ++rep.failed_points;
        continue;
      }
      if (!std::isfinite(s)) {
        ++rep.failed_points;
        continue;
      }
      if (s > shell.abscissa_max) {
        shell.abscissa_max = s;
        shell.argmax = k;
      }
    }
    rep.shells.push_back(std::move(shell));
  }
  if (static_cast<double>(rep.failed_points) > cfg.max_failure_fraction * static_cast<double>(rep.sampled_points))
    throw NumericalFailure("eigenvalue computation failed at " + std::to_string(rep.failed_points) + " of " +
                           std::to_string(rep.sampled_points) + " sampled frequencies");

  std::vector<double> x, y;
  double global = rep.origin_abscissa;
  for (const auto& s : rep.shells) {
    if (!std::isfinite(s.abscissa_max)) continue;
    x.push_back(std::log1p(s.radius));
    y.push_back(s.abscissa_max);
    global = std::max(global, s.abscissa_max);
  }
  rep.log_fit_slope = x.size() >= 2 ? detail::least_squares_slope(x, y) : 0.0;
  const bool slope_ok = rep.log_fit_slope < rep.slope_threshold;
  rep.s0_estimate = slope_ok ? global : std::numeric_limits<double>::infinity();
  rep.verdict_bounded = slope_ok && cfg.shells >= cfg.min_shells_for_verdict;
  return rep;
}

/// Sampled verdict on sup Re sigma(A(xi)) < infinity.
///
/// Finitely many shells never prove the condition; the verdict is a heuristic
/// backed by the fact that for polynomial symbols logarithmic growth and
/// boundedness are equivalent.
inline Petrovskii petrovskii_verdict(const SpectralReport& rep) {
  if (rep.max_shell_index() < rep.min_shells_for_verdict) return Petrovskii::inconclusive;
  if (rep.verdict_bounded) return Petrovskii::satisfied;
  if (rep.log_fit_slope > rep.violation_margin * rep.slope_threshold) return Petrovskii::violated;
  return Petrovskii::inconclusive;
}

struct Classification {
  Petrovskii petrovskii = Petrovskii::inconclusive;
  int deg_P = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  unsigned d = 0;  ///< maximal order of the entries
  Rational p0;
  bool hyperbolic = false;
  std::string ehrenpreis_note;
  std::string confidence;
  SpectralReport spectral_report;
};

inline Classification classify(const PolyMatrixOperator& g, const SamplingConfig& cfg = {}) {
  Classification c;
  const auto q = char_poly_in_lambda(g);
  c.m = g.m();
  c.n = g.n();
  c.d = g.order();
  c.deg_P = total_degree(q);
  c.p0 = reduced_order(q);
  c.spectral_report = sample_spectral_bound(g, cfg);
  c.petrovskii = petrovskii_verdict(c.spectral_report);
  c.hyperbolic = c.petrovskii == Petrovskii::satisfied && c.deg_P == static_cast<int>(c.m);
  c.confidence = "degrees exact; spectral bound sampled on " + std::to_string(c.spectral_report.shells.size()) +
                 " dyadic shells (heuristic, not a certificate)";
  c.ehrenpreis_note =
      c.hyperbolic ? "hyperbolic in the Garding sense, which implies the Ehrenpreis cone estimate; not re-verified "
                     "over complex zeta"
                   : "not Garding-hyperbolic; no Ehrenpreis cone estimate is inferred";
  return c;
}

struct GrowthConfig {
  double epsilon = 0.1;
  double t_max = 10.0;
  double t_step = 0.5;
  int shells = 8;
  std::size_t low_discrepancy_directions = 64;
  std::size_t random_directions = 64;
  std::uint64_t seed = 0;
  std::optional<int> k_cap;            ///< default 2 * m * d
  double growth_ratio_tolerance = 1.5;  ///< allowed sup ratio between consecutive tail shells
  int tail_shells = 3;
};

struct GrowthBoundReport {
  bool found = false;
  int k = -1;
  int k_cap = 0;
  double s0 = 0.0;
  double epsilon = 0.0;
  double sup = std::numeric_limits<double>::infinity();  ///< achieved sup for the reported k
  double origin_value = 0.0;                             ///< sup over t at xi = 0
  std::vector<double> shell_sups;                        ///< per-shell sups for the reported k
  bool sup_at_horizon = false;  ///< the sup was attained at t = t_max
  std::string message;
};

/// Smallest k with sup e^{-(s0+eps)t} (1+|xi|)^{-k} ||exp(t A(xi))|| empirically finite.
///
/// "Finite" means the per-shell sups stop growing: over the last `tail_shells`
/// dyadic shells each sup is at most `growth_ratio_tolerance` times its predecessor.
inline GrowthBoundReport growth_bound_check(const PolyMatrixOperator& g, double s0, const GrowthConfig& cfg = {}) {
  if (!std::isfinite(s0)) throw PreconditionError("growth_bound_check needs a finite spectral bound");
  GrowthBoundReport rep;
  rep.s0 = s0;
  rep.epsilon = cfg.epsilon;
  rep.k_cap = cfg.k_cap.value_or(static_cast<int>(2 * g.m() * g.order()));

  const std::size_t n = g.n();
  std::vector<double> times;
  for (int i = 0;; ++i) {
    const double t = i * cfg.t_step;
    if (t > cfg.t_max + 1e-12) break;
    times.push_back(t);
  }

  // sup over t and directions of the k = 0 quantity, per shell; whether it peaked at t_max
  auto sup_over_t = [&](const ComplexMatrix& a, bool& at_horizon) {
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      double v = std::numeric_limits<double>::infinity();
      try {
        v = std::exp(-(s0 + cfg.epsilon) * times[i]) * norm2(matrix_exp(times[i] * a));
      } catch (const OverflowError&) {
      }
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    at_horizon = best_i + 1 == times.size();
    return best;
  };

  bool horizon = false;
  rep.origin_value = sup_over_t(symbol_at(g, std::vector<double>(n, 0.0)), horizon);
  bool origin_horizon = horizon;

  SamplingConfig dir_cfg;
  dir_cfg.low_discrepancy_directions = cfg.low_discrepancy_directions;
  dir_cfg.random_directions = cfg.random_directions;
  dir_cfg.seed = cfg.seed;
  std::vector<double> raw(static_cast<std::size_t>(cfg.shells) + 1, 0.0), radius(raw.size());
  std::vector<bool> raw_horizon(raw.size(), false);
  std::vector<double> xi(n);
  for (int j = 0; j <= cfg.shells; ++j) {
    radius[j] = std::ldexp(1.0, j);
    for (const auto& d : shell_directions(n, j, dir_cfg)) {
      for (std::size_t a = 0; a < n; ++a) xi[a] = radius[j] * d[a];
      const double v = sup_over_t(symbol_at(g, xi), horizon);
      if (v > raw[j]) {
        raw[j] = v;
        raw_horizon[j] = horizon;
      }
    }
  }

  for (int k = 0; k <= rep.k_cap; ++k) {
    std::vector<double> sups(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) sups[j] = raw[j] / std::pow(1.0 + radius[j], k);
    bool bounded = std::all_of(sups.begin(), sups.end(), [](double v) { return std::isfinite(v); });
    const int first = std::max(1, static_cast<int>(sups.size()) - cfg.tail_shells);
    for (int j = first; j < static_cast<int>(sups.size()) && bounded; ++j)
      if (sups[j] > cfg.growth_ratio_tolerance * sups[j - 1]) bounded = false;
    if (!bounded) continue;
    rep.found = true;
    rep.k = k;
    rep.shell_sups = sups;
    rep.sup = rep.origin_value;
    rep.sup_at_horizon = origin_horizon;
    for (std::size_t j = 0; j < sups.size(); ++j)
      if (sups[j] > rep.sup) {
        rep.sup = sups[j];
        rep.sup_at_horizon = raw_horizon[j];
      }
    rep.message = "bounded with k = " + std::to_string(k);
    return rep;
  }
  rep.shell_sups = raw;
  rep.message = "no k <= " + std::to_string(rep.k_cap) +
                " keeps the weighted exponential bounded; inconsistent with growth bound = spectral bound";
  return rep;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const SpectralReport& r) {
  nlohmann::json shells = nlohmann::json::array();
  for (const auto& s : r.shells)
    shells.push_back({{"radius", s.radius},
                      {"abscissa_max", json_real(s.abscissa_max)},
                      {"argmax_direction", s.directions.empty() ? Direction{} : s.directions[s.argmax]},
                      {"directions", s.directions}});
  return {{"schema", report_schema},
          {"shells", std::move(shells)},
          {"origin_abscissa", json_real(r.origin_abscissa)},
          {"s0_estimate", json_real(r.s0_estimate)},
          {"log_fit_slope", json_real(r.log_fit_slope)},
          {"slope_threshold", json_real(r.slope_threshold)},
          {"verdict_bounded", r.verdict_bounded},
          {"sampled_points", r.sampled_points},
          {"failed_points", r.failed_points}};
}

inline nlohmann::json to_json(const Classification& c) {
  return {{"schema", report_schema},
          {"petrovskii", to_string(c.petrovskii)},
          {"deg_P", c.deg_P},
          {"m", c.m},
          {"n", c.n},
          {"d", c.d},
          {"p0", json_rational(c.p0)},
          {"hyperbolic", c.hyperbolic},
          {"ehrenpreis_note", c.ehrenpreis_note},
          {"confidence", c.confidence},
          {"s0_estimate", json_real(c.spectral_report.s0_estimate)},
          {"spectral_report", to_json(c.spectral_report)}};
}

inline nlohmann::json to_json(const GrowthBoundReport& r) {
  nlohmann::json sups = nlohmann::json::array();
  for (double v : r.shell_sups) sups.push_back(json_real(v));
  return {{"schema", report_schema},   {"found", r.found},   {"k", r.k},
          {"k_cap", r.k_cap},          {"s0", json_real(r.s0)}, {"epsilon", r.epsilon},
          {"sup", json_real(r.sup)},   {"origin_value", json_real(r.origin_value)},
          {"shell_sups", sups},        {"sup_at_horizon", r.sup_at_horizon},
          {"message", r.message}};
}

}  // namespace evolsym

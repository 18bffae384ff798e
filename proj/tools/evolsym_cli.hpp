#pragma once

// Command-line front end: analyze | classify | solve | cone | gallery.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "evolsym/evolsym.hpp"

namespace evolsym::cli {

struct RunConfig {
  std::string command;
  std::string operator_path;
  std::vector<std::size_t> points;  ///< --N
  std::vector<double> lengths;      ///< --L
  double t = 0.0;
  std::vector<double> times;
  int shells = 16;
  std::optional<std::size_t> dirs;
  std::uint64_t seed = 0;
  double threshold = 1e-8;
  bool force = false;
  std::string output_dir = ".";
  std::string ic = "preset:bump";
};

/// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_refused = 2;

inline PolyMatrixOperator load_operator(const std::string& arg) {
  if (arg.rfind("gallery:", 0) == 0) return gallery::make(arg.substr(8));
  std::ifstream in(arg);
  if (!in) throw ParseError("cannot open operator file '" + arg + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_operator(ss.str());
}

inline GridSpec make_grid(const RunConfig& cfg, std::size_t n, std::size_t default_points, double default_length) {
  auto widen = [n](auto values, auto fallback) {
    using T = typename decltype(values)::value_type;
    if (values.empty()) return std::vector<T>(n, static_cast<T>(fallback));
    if (values.size() == 1) return std::vector<T>(n, values[0]);
    if (values.size() != n) throw DimensionError("grid option needs 1 or n values");
    return values;
  };
  return GridSpec(widen(cfg.lengths, default_length), widen(cfg.points, default_points));
}

inline FieldState initial_field(const RunConfig& cfg, const GridSpec& grid, std::size_t m) {
  if (cfg.ic == "preset:bump") {
    double l = grid.box_lengths[0];
    for (double v : grid.box_lengths) l = std::min(l, v);
    return bump_field(grid, m, l / 16.0);
  }
  if (cfg.ic.rfind("preset:mode:", 0) == 0) {
    std::vector<long> k;
    std::stringstream ss(cfg.ic.substr(12));
    std::string item;
    try {
      while (std::getline(ss, item, ',')) k.push_back(std::stol(item));
    } catch (const std::exception&) {
      throw ParseError("bad mode specification '" + cfg.ic + "'");
    }
    if (k.size() == 1 && grid.n() > 1) k.resize(grid.n(), 0);
    return mode_field(grid, m, k);
  }
  std::ifstream in(cfg.ic);
  if (!in) throw ParseError("cannot open initial-condition file '" + cfg.ic + "'");
  FieldState u = read_field_csv(in);
  // a file supplies its own grid unless --N or --L asks for a specific one
  const bool grid_given = !cfg.points.empty() || !cfg.lengths.empty();
  if (grid_given && u.grid != grid) throw DimensionError("initial-condition grid differs from --N/--L grid");
  if (u.grid.n() != grid.n()) throw DimensionError("initial-condition dimension differs from operator n");
  if (u.m != m) throw DimensionError("initial-condition component count differs from operator m");
  return u;
}

inline SamplingConfig sampling_config(const RunConfig& cfg) {
  SamplingConfig s;
  s.shells = cfg.shells;
  if (cfg.dirs) s.low_discrepancy_directions = s.random_directions = *cfg.dirs;
  s.seed = cfg.seed;
  return s;
}

inline void emit(const RunConfig& cfg, const nlohmann::json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  out << text;
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream f(std::filesystem::path(cfg.output_dir) / (cfg.command + ".json"), std::ios::binary);
  if (!f) throw Error("cannot write report to '" + cfg.output_dir + "'");
  f << text;
}

inline nlohmann::json analyze(const RunConfig& cfg) {
  const auto g = load_operator(cfg.operator_path);
  const auto q = char_poly_in_lambda(g);
  nlohmann::json qs = nlohmann::json::array();
  for (const auto& p : q) qs.push_back({{"terms", evolsym::detail::terms_to_json(p)}});
  const auto rep = sample_spectral_bound(g, sampling_config(cfg));
  return {{"schema", report_schema},
          {"command", "analyze"},
          {"operator", cfg.operator_path},
          {"document", serialize_operator(g)},
          {"char_poly_Q", qs},
          {"deg_P", total_degree(q)},
          {"p0", json_rational(reduced_order(q))},
          {"petrovskii", to_string(petrovskii_verdict(rep))},
          {"spectral_report", to_json(rep)}};
}

inline nlohmann::json classify_command(const RunConfig& cfg) {
  const auto g = load_operator(cfg.operator_path);
  nlohmann::json j = to_json(classify(g, sampling_config(cfg)));
  j["command"] = "classify";
  j["operator"] = cfg.operator_path;
  return j;
}

/// Per-mode conservation check, applicable when A(xi) is skew-Hermitian on the whole grid.
inline nlohmann::json unitarity_check(const PolyMatrixOperator& g, const FieldState& u0, const FieldState& ut) {
  const GridSpec& grid = u0.grid;
  bool skew = true;
  for (std::size_t p = 0; p < grid.total_points() && skew; ++p) {
    const ComplexMatrix a = symbol_at(g, grid.frequency_point(p));
    const ComplexMatrix s = a + a.adjoint();
    if (s.cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) skew = false;
  }
  if (!skew) return {{"applicable", false}};
  const FieldState h0 = forward_fft(u0), ht = forward_fft(ut);
  double worst = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < grid.total_points(); ++p) {
    double a = 0.0, b = 0.0;
    for (std::size_t c = 0; c < u0.m; ++c) {
      a += std::norm(h0.at(p, c));
      b += std::norm(ht.at(p, c));
    }
    worst = std::max(worst, std::abs(std::sqrt(a) - std::sqrt(b)));
    scale = std::max(scale, std::sqrt(a));
  }
  const double rel = scale > 0.0 ? worst / scale : worst;
  return {{"applicable", true}, {"max_rel_deviation", rel}, {"tolerance", 1e-12}, {"passed", rel <= 1e-12}};
}

inline int solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto g = load_operator(cfg.operator_path);
  const auto cls = classify(g, sampling_config(cfg));
  if (cls.petrovskii == Petrovskii::violated && !cfg.force) {
    err << "refusing to solve: operator violates the Petrovskii condition (pass --force to override)\n";
    return exit_refused;
  }
  const GridSpec grid = make_grid(cfg, g.n(), 256, 20.0);
  const FieldState u0 = initial_field(cfg, grid, g.m());
  const GridSpec& used = u0.grid;
  PropagateOptions opts;
  opts.force = cfg.force;
  opts.verdict = cls.petrovskii;
  const FieldState ut = propagate(g, u0, cfg.t, opts);

  std::filesystem::create_directories(cfg.output_dir);
  const auto csv_path = std::filesystem::path(cfg.output_dir) / "field.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw Error("cannot write " + csv_path.string());
  write_csv(csv, ut);

  nlohmann::json report = {{"schema", report_schema},
                           {"command", "solve"},
                           {"operator", cfg.operator_path},
                           {"document", serialize_operator(g)},
                           {"grid", to_json(used)},
                           {"t", cfg.t},
                           {"ic", cfg.ic},
                           {"petrovskii", to_string(cls.petrovskii)},
                           {"forced", cfg.force},
                           {"l2_initial", u0.l2_norm()},
                           {"l2_final", ut.l2_norm()},
                           {"unitarity", unitarity_check(g, u0, ut)},
                           {"field_csv", "field.csv"}};
  emit(cfg, report, out);
  return exit_ok;
}

inline nlohmann::json cone(const RunConfig& cfg) {
  const auto g = load_operator(cfg.operator_path);
  const GridSpec grid = make_grid(cfg, g.n(), g.n() == 1 ? 4096 : 256, 40.0);
  std::vector<Direction> dirs = axis_directions(g.n());
  if (g.n() >= 2) {
    auto extra = low_discrepancy_directions(g.n(), cfg.dirs.value_or(16));
    dirs.insert(dirs.end(), extra.begin(), extra.end());
  }
  ConeOptions opts;
  opts.sampling = sampling_config(cfg);
  const std::vector<double> times = cfg.times.empty() ? std::vector<double>{0.5, 1.0, 2.0} : cfg.times;
  const ConeEstimate est = cone_estimate(g, times, grid, dirs, cfg.threshold, opts);

  // finite propagation of bump data against the estimated cone
  // at least 16 cells across, or its spectrum is cut off by the grid and leaks past the cone
  const double radius = std::max(grid.box_lengths[0] / 40.0, 16.0 * est.cell_size);
  const FieldState u0 = bump_field(grid, g.m(), radius);
  nlohmann::json mass = nlohmann::json::array();
  for (double t : times) {
    const FieldState ut = propagate(g, u0, t);
    mass.push_back({{"t", t}, {"fraction_outside", mass_outside_cone(ut, est, radius, 3.0 * est.cell_size)}});
  }
  nlohmann::json j = to_json(est);
  j["command"] = "cone";
  j["operator"] = cfg.operator_path;
  j["grid"] = to_json(grid);
  j["bump_radius"] = radius;
  j["mass_outside_cone_plus_3_cells"] = mass;
  return j;
}

inline nlohmann::json gallery_listing() {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : gallery::entries())
    list.push_back({{"name", e.name},
                    {"parameter", e.parameter},
                    {"description", e.description},
                    {"document", gallery::document(e.name)}});
  return {{"schema", report_schema}, {"command", "gallery"}, {"operators", list}};
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Symbol-based analysis of constant-coefficient evolution operators", "evolsym"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool needs_operator) {
    if (needs_operator)
      sub->add_option("operator", cfg.operator_path, "operator file or gallery:<name>[:param]")->required();
    sub->add_option("--shells", cfg.shells, "dyadic shells J")->check(CLI::NonNegativeNumber);
    sub->add_option("--dirs", cfg.dirs, "directions per shell (low-discrepancy and random each)");
    sub->add_option("--seed", cfg.seed, "seed for random directions");
    sub->add_option("--out", cfg.output_dir, "output directory");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--N", cfg.points, "points per axis (one value or one per axis)")->delimiter(',');
    sub->add_option("--L", cfg.lengths, "box length per axis (one value or one per axis)")->delimiter(',');
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "sampled spectral bound and exact degree data");
  add_common(analyze_cmd, true);
  auto* classify_cmd = app.add_subcommand("classify", "Petrovskii and hyperbolicity verdicts");
  add_common(classify_cmd, true);
  auto* solve_cmd = app.add_subcommand("solve", "propagate initial data with the Fourier multiplier");
  add_common(solve_cmd, true);
  add_grid(solve_cmd);
  solve_cmd->add_option("--t", cfg.t, "time")->required()->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--ic", cfg.ic, "initial condition: path | preset:bump | preset:mode:k[,k...]");
  solve_cmd->add_flag("--force", cfg.force, "solve even when the Petrovskii condition is violated");
  auto* cone_cmd = app.add_subcommand("cone", "propagation cone of a hyperbolic operator");
  add_common(cone_cmd, true);
  add_grid(cone_cmd);
  cone_cmd->add_option("--times", cfg.times, "comma-separated positive times")->delimiter(',');
  cone_cmd->add_option("--threshold", cfg.threshold, "relative support threshold in (0, 1)");
  auto* gallery_cmd = app.add_subcommand("gallery", "list built-in operators");
  add_common(gallery_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_error;
  }

  try {
    for (double t : cfg.times)
      if (t < 0.0) throw PreconditionError("times must be nonnegative");
    if (*analyze_cmd) {
      cfg.command = "analyze";
      emit(cfg, analyze(cfg), out);
    } else if (*classify_cmd) {
      cfg.command = "classify";
      emit(cfg, classify_command(cfg), out);
    } else if (*solve_cmd) {
      cfg.command = "solve";
      return solve(cfg, out, err);
    } else if (*cone_cmd) {
      cfg.command = "cone";
      emit(cfg, cone(cfg), out);
    } else if (*gallery_cmd) {
      cfg.command = "gallery";
      emit(cfg, gallery_listing(), out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
  return exit_ok;
}

}  // namespace evolsym::cli

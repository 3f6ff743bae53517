#pragma once
// The `lbnm` command-line front end.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lbnm/analytics.hpp"
#include "lbnm/harness.hpp"
#include "lbnm/io.hpp"
#include "lbnm/operator.hpp"

namespace lbnm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

/// Command-line values that replace config fields when given.
struct Overrides {
  std::optional<double> k;
  std::optional<double> alpha;
  std::optional<std::size_t> collocation;
  std::optional<std::size_t> sources;
  std::optional<double> source_radius;
  std::optional<std::size_t> grid_count;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::string> operator_path;

  void attach(CLI::App* app) {
    app->add_option("--k", k, "Wavenumber");
    app->add_option("--alpha", alpha, "Tikhonov parameter");
    app->add_option("--collocation", collocation, "Collocation point count N");
    app->add_option("--sources", sources, "Source point count M");
    app->add_option("--source-radius", source_radius, "Source circle radius R");
    app->add_option("--grid-count", grid_count, "Target query point count");
    app->add_option("--seed", seed, "Seed for randomised checks");
    app->add_option("--output-dir", output_dir, "Output directory");
  }

  void apply(harness::ExperimentConfig& cfg) const {
    harness::apply_environment(cfg);
    if (k) {
      cfg.problem.k = *k;
      cfg.field = retuned(cfg.field, *k);
    }
    if (alpha) cfg.problem.alpha = *alpha;
    if (collocation) cfg.problem.n = *collocation;
    if (sources) cfg.problem.m = *sources;
    if (source_radius) cfg.problem.source_radius = *source_radius;
    if (grid_count) cfg.grid.count = *grid_count;
    if (seed) cfg.seed = *seed;
    if (output_dir) cfg.output.dir = *output_dir;
    if (operator_path) cfg.operator_path = *operator_path;
    cfg.validate();
  }

 private:
  static op::ExactField retuned(const op::ExactField& field, double k) {
    return std::visit(
        [k](auto f) -> op::ExactField {
          f.k = k;
          return f;
        },
        field.variant());
  }
};

namespace detail {

inline ComplexVector read_complex_column(const io::CsvTable& table, const std::string& source) {
  const int re = table.column("re");
  const int im = table.column("im");
  if (re < 0 || im < 0) throw std::runtime_error(source + ": expected columns re and im");
  ComplexVector out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.emplace_back(io::parse_double(row[static_cast<std::size_t>(re)]),
                     io::parse_double(row[static_cast<std::size_t>(im)]));
  }
  return out;
}

inline std::string complex_csv(const geometry::PointSet& points, const ComplexVector& values) {
  std::string out = "x,y,re,im\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += io::format_double(points[i].x) + ',' + io::format_double(points[i].y) + ',' +
           io::format_double(values[i].real()) + ',' + io::format_double(values[i].imag()) + '\n';
  }
  return out;
}

inline double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace detail

inline int cli_main(int argc, char** argv) {
  CLI::App app{"Learned boundary-to-solution operators for the 2D Dirichlet Helmholtz problem"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;

  auto* learn = app.add_subcommand("learn", "Learn an operator bound to the config's query grid and save it");
  learn->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  std::string learn_out;
  learn->add_option("--out", learn_out, "Operator file (default: <output dir>/<output.operator>)");
  overrides.attach(learn);

  auto* trace = app.add_subcommand("trace", "Write the config field's boundary trace as x,y,re,im CSV");
  trace->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  std::string trace_out;
  trace->add_option("--out", trace_out, "Output CSV")->required();
  overrides.attach(trace);

  auto* solve = app.add_subcommand("solve", "Apply a saved operator to boundary data");
  std::string operator_file, boundary_file, queries_file, solve_out;
  solve->add_option("--operator", operator_file, "Saved operator")->required()->check(CLI::ExistingFile);
  solve->add_option("--boundary", boundary_file, "Boundary data CSV with columns re,im")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--queries", queries_file, "Query points CSV x,y (default: the bound query set)")
      ->check(CLI::ExistingFile);
  solve->add_option("--out", solve_out, "Output CSV x,y,re,im")->required();

  auto* run_case = app.add_subcommand("case", "Run one experiment");
  run_case->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  run_case->add_option("--operator", overrides.operator_path, "Load this operator instead of learning");
  overrides.attach(run_case);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--config", config_path, "Experiment config with a [sweep] section")
      ->required()
      ->check(CLI::ExistingFile);
  overrides.attach(sweep);

  auto* rho = app.add_subcommand("estimate-rho", "Estimate the continuation radius of a field on the unit circle");
  double rho_radius = 1.5, rho_angle = 0.0, rho_k = 2.0;
  std::size_t rho_count = 256;
  std::string rho_samples;
  rho->add_option("--radius", rho_radius, "Point source radius")->capture_default_str();
  rho->add_option("--angle", rho_angle, "Point source polar angle")->capture_default_str();
  rho->add_option("--k", rho_k, "Wavenumber")->capture_default_str();
  rho->add_option("--count", rho_count, "Sample count (power of two, at least 64)")->capture_default_str();
  rho->add_option("--samples", rho_samples, "CSV of samples with columns re,im instead of a point source")
      ->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench-mfs", "MFS convergence sweep on the unit disk");
  bench->add_option("--config", config_path, "Sweep config (default: built-in benchmark)")
      ->check(CLI::ExistingFile);
  overrides.attach(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    auto load = [&] {
      harness::ExperimentConfig cfg = harness::load_config(config_path);
      overrides.apply(cfg);
      return cfg;
    };

    if (*learn) {
      const auto cfg = load();
      const auto queries = harness::query_points(cfg);
      const op::LearnedOperator op = op::learn(cfg.problem, queries);
      const fs::path out = learn_out.empty() ? cfg.output.dir / cfg.output.operator_file : fs::path(learn_out);
      op::save_operator(op, out);
      std::cout << json{{"operator", out.string()},
                        {"collocation", op.collocation_count()},
                        {"sources", op.source_count()},
                        {"queries", queries.size()},
                        {"alpha", op.alpha},
                        {"learn_seconds", op.learn_seconds}}
                       .dump(2)
                << "\n";
    } else if (*trace) {
      const auto cfg = load();
      const auto collocation = cfg.problem.collocation();
      io::atomic_write(trace_out, detail::complex_csv(collocation, op::boundary_trace(cfg.field, collocation)));
    } else if (*solve) {
      auto t = std::chrono::steady_clock::now();
      const op::LearnedOperator op = op::load_operator(operator_file);
      const ComplexVector f = detail::read_complex_column(io::read_csv(boundary_file), boundary_file);
      const double load_seconds = detail::seconds_since(t);
      op::check_boundary_data(op, f);

      geometry::PointSet queries;
      ComplexVector u;
      t = std::chrono::steady_clock::now();
      if (queries_file.empty()) {
        if (!op.binding) throw std::invalid_argument("operator has no bound query set; pass --queries");
        u = op::apply_bound(op, f);
      } else {
        queries = geometry::read_point_set_csv(queries_file, geometry::PointRole::query);
        u = op::apply(op, f, queries);
      }
      const double apply_seconds = detail::seconds_since(t);
      io::atomic_write(solve_out, detail::complex_csv(queries_file.empty() ? op.binding->queries : queries, u));
      std::cout << json{{"points", u.size()}, {"load_seconds", load_seconds}, {"apply_seconds", apply_seconds}}.dump(2)
                << "\n";
    } else if (*run_case) {
      const auto cfg = load();
      const auto rec = harness::run_case(cfg);
      std::cout << json{{"report", rec.artifacts.at("report").string()},
                        {"two_norm", rec.report.two_norm},
                        {"inf_norm", rec.report.inf_norm},
                        {"learn_seconds", rec.report.learn_seconds},
                        {"apply_seconds", rec.report.apply_seconds}}
                       .dump(2)
                << "\n";
    } else if (*sweep || *bench) {
      harness::ExperimentConfig cfg;
      if (config_path.empty()) {
        cfg = harness::mfs_benchmark_config();
        overrides.apply(cfg);
      } else {
        cfg = load();
      }
      const auto result = harness::run_sweep(cfg);
      json out = {{"sweep", result.artifacts.at("sweep").string()}, {"summary", result.artifacts.at("summary").string()}};
      if (result.fit) {
        out["rate"] = result.fit->rate;
        out["r_squared"] = result.fit->r_squared;
      } else {
        out["fit_error"] = result.fit_error;
      }
      if (*bench && !result.rows.empty() && result.rows.front().coefficient_norm_sq) {
        json scaled = json::array();
        for (const auto& row : result.rows) scaled.push_back(row.param * *row.coefficient_norm_sq);
        out["m_times_coefficient_norm_sq"] = scaled;
      }
      std::cout << out.dump(2) << "\n";
    } else if (*rho) {
      ComplexVector samples;
      if (!rho_samples.empty()) {
        samples = detail::read_complex_column(io::read_csv(rho_samples), rho_samples);
      } else {
        const op::ExactField field =
            op::PointSource{{rho_radius * std::cos(rho_angle), rho_radius * std::sin(rho_angle)}, rho_k};
        samples = harness::unit_circle_samples(field, rho_count);
      }
      const auto est = analytics::estimate_rho(samples);
      std::cout << json{{"rho", est.rho},
                        {"rate", est.fit.rate},
                        {"intercept", est.fit.intercept},
                        {"r_squared", est.fit.r_squared},
                        {"window", {est.fit.window.first, est.fit.window.second}},
                        {"coefficients_used", est.fit.used}}
                       .dump(2)
                << "\n";
    }
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: dimension mismatch: " << e.what() << "\n";
    return exit_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_ok;
}

}  // namespace lbnm::cli

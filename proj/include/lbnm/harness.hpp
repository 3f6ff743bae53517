#pragma once
// Experiment configuration, single-case runs and parameter sweeps.

#include <json.hpp>
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lbnm/analytics.hpp"
#include "lbnm/geometry.hpp"
#include "lbnm/io.hpp"
#include "lbnm/operator.hpp"

namespace lbnm::harness {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* output_dir_env = "LBNM_OUTPUT_DIR";

enum class Method { lbnm, mfs };
enum class GridKind { interior, boundary };

struct GridSpec {
  GridKind kind = GridKind::interior;
  std::size_t count = 37500;
  double margin = 0.0;
};

struct SweepSpec {
  std::string param;  // M, N, R, alpha or source_radius
  std::vector<double> values;
  bool couple_n = false;  // an M sweep also sets N = M
};

struct OutputSpec {
  fs::path dir = "out";
  std::string report = "report.json";
  std::string fields = "fields.csv";
  std::string sweep = "sweep.csv";
  std::string operator_file = "operator.bin";
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string name = "experiment";
  op::WaveProblem problem;
  op::ExactField field = op::PlaneProduct{1.0};
  GridSpec grid;
  std::optional<SweepSpec> sweep;
  OutputSpec output;
  Method method = Method::lbnm;
  std::optional<fs::path> operator_path;  // load instead of learning
  std::uint64_t seed = 1;

  void validate() const {
    problem.validate();
    if (std::abs(field.wavenumber() - problem.k) > 1e-12 * problem.k) {
      throw ConfigError("field wavenumber differs from problem wavenumber");
    }
    if (grid.count == 0) throw ConfigError("grid count must be positive");
    if (sweep) {
      if (sweep->values.size() < 4) throw ConfigError("a sweep needs at least 4 values");
      for (std::size_t i = 1; i < sweep->values.size(); ++i) {
        if (!(sweep->values[i] > sweep->values[i - 1])) throw ConfigError("sweep values must be strictly increasing");
      }
      static const std::vector<std::string> known{"M", "N", "R", "alpha", "source_radius"};
      if (std::find(known.begin(), known.end(), sweep->param) == known.end()) {
        throw ConfigError("unknown sweep parameter '" + sweep->param + "'");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Config parsing (TOML subset, read through CLI11's config reader).

namespace detail {

class KeyValues {
 public:
  explicit KeyValues(std::istream& in) {
    CLI::ConfigTOML reader;
    for (const auto& item : reader.from_config(in)) {
      if (item.name == "++" || item.name == "--") continue;
      std::string key;
      for (const auto& p : item.parents) key += p + ".";
      key += item.name;
      values_[key] = item.inputs;
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key) const {
    const auto& v = at(key);
    if (v.size() != 1) throw ConfigError("'" + key + "' must be a single value");
    used_.insert(key);
    return v.front();
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }
  double number(const std::string& key) const {
    try {
      return io::parse_double(text(key));
    } catch (const std::runtime_error& e) {
      throw ConfigError("'" + key + "': " + e.what());
    }
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw ConfigError("'" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }
  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = text(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("'" + key + "' must be true or false");
  }
  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : at(key)) {
      try {
        out.push_back(io::parse_double(io::trim(s)));
      } catch (const std::runtime_error& e) {
        throw ConfigError("'" + key + "': " + e.what());
      }
    }
    used_.insert(key);
    return out;
  }

  void reject_unused() const {
    for (const auto& [key, v] : values_) {
      if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
  }

 private:
  const std::vector<std::string>& at(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
  }
  std::map<std::string, std::vector<std::string>> values_;
  mutable std::set<std::string> used_;
};

}  // namespace detail

/// Parses a config. Relative operator paths resolve against `base_dir`.
inline ExperimentConfig parse_config(std::istream& in, const fs::path& base_dir = {}) {
  const detail::KeyValues kv(in);
  ExperimentConfig cfg;
  cfg.name = kv.text("run.name", cfg.name);
  cfg.seed = kv.count("run.seed", cfg.seed);
  const std::string method = kv.text("run.method", "lbnm");
  if (method == "lbnm") {
    cfg.method = Method::lbnm;
  } else if (method == "mfs") {
    cfg.method = Method::mfs;
  } else {
    throw ConfigError("run.method must be lbnm or mfs");
  }
  if (kv.has("run.operator")) {
    fs::path p = kv.text("run.operator");
    cfg.operator_path = p.is_relative() ? base_dir / p : p;
  }

  auto& pb = cfg.problem;
  if (kv.has("problem.k")) {
    if (kv.has("problem.frequency") || kv.has("problem.sound_speed")) {
      throw ConfigError("give either problem.k or problem.frequency with problem.sound_speed");
    }
    pb.k = kv.number("problem.k");
  } else {
    const double freq = kv.number("problem.frequency");
    const double c = kv.number("problem.sound_speed");
    if (!(c > 0.0)) throw ConfigError("problem.sound_speed must be positive");
    pb.k = 2.0 * std::numbers::pi * freq / c;
  }
  const std::string curve = kv.text("problem.curve", "flower");
  if (curve == "flower") {
    const double petals = kv.number("problem.petals");
    if (petals != std::floor(petals)) throw ConfigError("problem.petals must be an integer");
    pb.curve = geometry::flower_curve(kv.number("problem.a"), kv.number("problem.b"), static_cast<int>(petals));
  } else if (curve == "circle") {
    pb.curve = geometry::BoundaryCurve::circle(kv.number("problem.radius", 1.0));
  } else {
    throw ConfigError("problem.curve must be flower or circle");
  }
  pb.n = kv.count("problem.collocation", pb.n);
  pb.m = kv.count("problem.sources", pb.m);
  pb.source_radius = kv.number("problem.source_radius", pb.source_radius);
  if (kv.has("problem.alpha")) pb.alpha = kv.number("problem.alpha");
  pb.min_alpha = kv.number("problem.alpha_floor", pb.min_alpha);
  const std::string spacing = kv.text("problem.spacing", "arclength");
  if (spacing == "arclength") {
    pb.spacing = geometry::Spacing::arclength;
  } else if (spacing == "parameter") {
    pb.spacing = geometry::Spacing::parameter;
  } else {
    throw ConfigError("problem.spacing must be arclength or parameter");
  }

  const std::string field = kv.text("field.kind", "plane_product");
  if (field == "plane_product") {
    cfg.field = op::PlaneProduct{pb.k};
  } else if (field == "point_source") {
    cfg.field = op::PointSource{{kv.number("field.x"), kv.number("field.y")}, pb.k};
  } else if (field == "dipole") {
    cfg.field = op::Dipole{{kv.number("field.x1"), kv.number("field.y1")},
                           {kv.number("field.x2"), kv.number("field.y2")}, pb.k};
  } else if (field == "plane_wave") {
    cfg.field = op::PlaneWave{{kv.number("field.dx"), kv.number("field.dy")}, pb.k};
  } else {
    throw ConfigError("unknown field.kind '" + field + "'");
  }

  const std::string grid = kv.text("grid.kind", "interior");
  if (grid == "interior") {
    cfg.grid.kind = GridKind::interior;
  } else if (grid == "boundary") {
    cfg.grid.kind = GridKind::boundary;
  } else {
    throw ConfigError("grid.kind must be interior or boundary");
  }
  cfg.grid.count = kv.count("grid.count", cfg.grid.count);
  cfg.grid.margin = kv.number("grid.margin", cfg.grid.margin);

  if (kv.has("sweep.param")) {
    SweepSpec s;
    s.param = kv.text("sweep.param");
    s.values = kv.numbers("sweep.values");
    s.couple_n = kv.flag("sweep.couple_n", false);
    cfg.sweep = std::move(s);
  }

  cfg.output.dir = kv.text("output.dir", cfg.output.dir.string());
  cfg.output.report = kv.text("output.report", cfg.output.report);
  cfg.output.fields = kv.text("output.fields", cfg.output.fields);
  cfg.output.sweep = kv.text("output.sweep", cfg.output.sweep);
  cfg.output.operator_file = kv.text("output.operator", cfg.output.operator_file);

  kv.reject_unused();
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  try {
    return parse_config(in, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// LBNM_OUTPUT_DIR, when set and non-empty, replaces output.dir.
inline void apply_environment(ExperimentConfig& cfg) {
  if (const char* dir = std::getenv(output_dir_env); dir != nullptr && *dir != '\0') cfg.output.dir = dir;
}

inline json field_to_json(const op::ExactField& field) {
  json j;
  j["kind"] = field.name();
  std::visit(
      [&j](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, op::PointSource>) {
          j["x"] = f.source.x;
          j["y"] = f.source.y;
        } else if constexpr (std::is_same_v<T, op::Dipole>) {
          j["x1"] = f.first.x;
          j["y1"] = f.first.y;
          j["x2"] = f.second.x;
          j["y2"] = f.second.y;
        } else if constexpr (std::is_same_v<T, op::PlaneWave>) {
          j["dx"] = f.direction.x;
          j["dy"] = f.direction.y;
        }
      },
      field.variant());
  return j;
}

inline json config_to_json(const ExperimentConfig& cfg) {
  const auto& pb = cfg.problem;
  json curve;
  if (pb.curve.kind() == geometry::CurveKind::circle) {
    curve = {{"kind", "circle"}, {"radius", pb.curve.a()}};
  } else {
    curve = {{"kind", "flower"}, {"a", pb.curve.a()}, {"b", pb.curve.b()}, {"petals", pb.curve.petals()}};
  }
  json j;
  j["name"] = cfg.name;
  j["method"] = cfg.method == Method::lbnm ? "lbnm" : "mfs";
  j["seed"] = cfg.seed;
  j["problem"] = {{"k", pb.k},
                  {"curve", curve},
                  {"collocation", pb.n},
                  {"sources", pb.m},
                  {"source_radius", pb.source_radius},
                  {"alpha", pb.effective_alpha()},
                  {"spacing", pb.spacing == geometry::Spacing::arclength ? "arclength" : "parameter"}};
  j["field"] = field_to_json(cfg.field);
  j["grid"] = {{"kind", cfg.grid.kind == GridKind::interior ? "interior" : "boundary"},
               {"count", cfg.grid.count},
               {"margin", cfg.grid.margin}};
  if (cfg.sweep) {
    j["sweep"] = {{"param", cfg.sweep->param}, {"values", cfg.sweep->values}, {"couple_n", cfg.sweep->couple_n}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Running.

inline geometry::PointSet query_points(const ExperimentConfig& cfg) {
  if (cfg.grid.kind == GridKind::boundary) {
    return geometry::collocation_points(cfg.problem.curve, cfg.grid.count, cfg.problem.spacing);
  }
  return geometry::interior_grid(cfg.problem.curve, cfg.grid.count, cfg.grid.margin);
}

struct RunOptions {
  bool write_artifacts = true;
  bool bind = true;  // precompute the query-set solution matrix while learning
};

struct RunRecord {
  json config;
  analytics::ErrorReport report;
  std::optional<double> boundary_l2;  // weighted, boundary grids only
  double pde_residual_ratio = 0.0;    // max |Delta_h u + k^2 u| / (k^2 max |u|)
  double boundary_data_norm = 0.0;    // ||f||_2
  double alpha = 0.0;
  std::optional<double> coefficient_norm_sq;  // ||mu||^2, MFS only
  std::map<std::string, double> timings;
  std::map<std::string, fs::path> artifacts;
  geometry::PointSet queries;
  ComplexVector numeric;
  ComplexVector exact;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

inline bool same_points(const geometry::PointSet& a, const geometry::PointSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].x != b[i].x || a[i].y != b[i].y) return false;
  }
  return true;
}

inline std::vector<Point2> residual_points(const ExperimentConfig& cfg, std::size_t count) {
  std::mt19937_64 rng(cfg.seed);
  const double r = cfg.problem.curve.max_radius();
  std::uniform_real_distribution<double> coord(-r, r);
  std::vector<Point2> pts;
  while (pts.size() < count) {
    const Point2 p{coord(rng), coord(rng)};
    if (cfg.problem.curve.contains(p, 0.05)) pts.push_back(p);
  }
  return pts;
}

inline std::string fields_csv(const RunRecord& rec) {
  std::string out = "x,y,re_num,im_num,re_exact,im_exact,abs_err\n";
  out.reserve(rec.numeric.size() * 130);
  for (std::size_t i = 0; i < rec.numeric.size(); ++i) {
    const Complex u = rec.numeric[i];
    const Complex e = rec.exact[i];
    out += io::format_double(rec.queries[i].x) + ',' + io::format_double(rec.queries[i].y) + ',' +
           io::format_double(u.real()) + ',' + io::format_double(u.imag()) + ',' + io::format_double(e.real()) +
           ',' + io::format_double(e.imag()) + ',' + io::format_double(std::abs(u - e)) + '\n';
  }
  return out;
}

}  // namespace detail

/// Learns (or loads) the operator a config describes, bound to `queries`
/// when `bind` is set.
inline op::LearnedOperator prepare_operator(const ExperimentConfig& cfg, const geometry::PointSet& queries,
                                            bool bind) {
  if (cfg.operator_path) {
    const auto start = detail::Clock::now();
    op::LearnedOperator loaded = op::load_operator(*cfg.operator_path);
    const auto& pb = cfg.problem;
    if (std::abs(loaded.k - pb.k) > 1e-12 * pb.k || loaded.collocation_count() != pb.n ||
        loaded.source_count() != pb.m) {
      throw ConfigError("operator file " + cfg.operator_path->string() + " does not match the configured problem");
    }
    if (bind && !(loaded.binding && detail::same_points(loaded.binding->queries, queries))) {
      loaded.binding = op::bind(loaded, queries);
    }
    loaded.learn_seconds = detail::since(start);
    return loaded;
  }
  return bind ? op::learn(cfg.problem, queries) : op::learn(cfg.problem);
}

/// One experiment: learn or fit, trace, apply, compare against the exact
/// field. `reuse`, when given, replaces learning.
inline RunRecord run_case(const ExperimentConfig& cfg, const RunOptions& options = {},
                          const op::LearnedOperator* reuse = nullptr) {
  cfg.validate();
  const auto total_start = detail::Clock::now();
  RunRecord rec;
  rec.config = config_to_json(cfg);
  rec.alpha = cfg.problem.effective_alpha();

  auto t = detail::Clock::now();
  rec.queries = query_points(cfg);
  rec.timings["grid_seconds"] = detail::since(t);

  const double k = cfg.problem.k;
  std::function<Complex(const Point2&)> evaluate;
  op::LearnedOperator learned;
  ComplexVector wf, mu;
  geometry::PointSet sources;

  if (cfg.method == Method::lbnm) {
    const op::LearnedOperator* active = reuse;
    if (active == nullptr) {
      learned = prepare_operator(cfg, rec.queries, options.bind);
      active = &learned;
    }
    rec.report.learn_seconds = reuse ? 0.0 : active->learn_seconds;

    t = detail::Clock::now();
    const ComplexVector f = op::boundary_trace(cfg.field, active->collocation);
    rec.timings["trace_seconds"] = detail::since(t);
    rec.boundary_data_norm = lintik::norm2(f);

    t = detail::Clock::now();
    if (active->binding && detail::same_points(active->binding->queries, rec.queries)) {
      rec.numeric = op::apply_bound(*active, f);
    } else {
      rec.numeric = op::apply(*active, f, rec.queries);
    }
    rec.report.apply_seconds = detail::since(t);

    wf = lintik::multiply(active->w, f);
    const op::LearnedOperator& ref = *active;
    evaluate = [&ref, &wf](const Point2& x) { return lintik::dot(op::evaluate_row(ref, x), wf); };
  } else {
    t = detail::Clock::now();
    const geometry::PointSet collocation = cfg.problem.collocation();
    sources = cfg.problem.sources();
    const ComplexVector f = op::boundary_trace(cfg.field, collocation);
    rec.boundary_data_norm = lintik::norm2(f);
    const auto v = op::assemble_training_matrix(collocation, sources, k);
    mu = lintik::tikhonov_primal(v, f, rec.alpha);
    rec.report.learn_seconds = detail::since(t);
    const double mn = lintik::norm2(mu);
    rec.coefficient_norm_sq = mn * mn;

    t = detail::Clock::now();
    rec.numeric = op::mfs_evaluate(sources, mu, k, rec.queries);
    rec.report.apply_seconds = detail::since(t);
    evaluate = [&sources, &mu, k](const Point2& x) {
      ComplexVector row(sources.size());
      for (std::size_t i = 0; i < sources.size(); ++i) row[i] = specfun::phi_2d(sources[i], x, k);
      return lintik::dot(row, mu);
    };
  }

  t = detail::Clock::now();
  rec.exact.reserve(rec.queries.size());
  for (const auto& x : rec.queries.points) rec.exact.push_back(cfg.field(x));
  rec.timings["exact_seconds"] = detail::since(t);

  const auto err = analytics::error_report(rec.exact, rec.numeric,
                                           {rec.report.learn_seconds, rec.report.apply_seconds});
  rec.report = err;
  if (cfg.grid.kind == GridKind::boundary) {
    rec.boundary_l2 = analytics::weighted_l2(rec.exact, rec.numeric, rec.queries.weights);
  }

  t = detail::Clock::now();
  double max_u = 0.0;
  for (const auto& u : rec.numeric) max_u = std::max(max_u, std::abs(u));
  double max_res = 0.0;
  for (const auto& x : detail::residual_points(cfg, 20)) {
    max_res = std::max(max_res, std::abs(analytics::helmholtz_residual(evaluate, x, k, 1e-4)));
  }
  rec.pde_residual_ratio = max_u > 0.0 ? max_res / (k * k * max_u) : max_res;
  rec.timings["residual_seconds"] = detail::since(t);

  rec.timings["learn_seconds"] = rec.report.learn_seconds;
  rec.timings["apply_seconds"] = rec.report.apply_seconds;
  rec.timings["total_seconds"] = detail::since(total_start);

  if (options.write_artifacts) {
    const fs::path dir = cfg.output.dir;
    const fs::path report_path = dir / cfg.output.report;
    fs::path timing_path = report_path;
    timing_path.replace_extension(".timing.json");
    rec.artifacts["fields"] = dir / cfg.output.fields;
    rec.artifacts["report"] = report_path;
    rec.artifacts["timing"] = timing_path;

    io::atomic_write(rec.artifacts["fields"], detail::fields_csv(rec));
    json results = {{"two_norm", rec.report.two_norm},
                     {"inf_norm", rec.report.inf_norm},
                     {"rms", rec.report.rms},
                     {"point_count", rec.report.point_count},
                     {"boundary_data_norm", rec.boundary_data_norm},
                     {"pde_residual_ratio", rec.pde_residual_ratio}};
    if (rec.boundary_l2) results["boundary_l2"] = *rec.boundary_l2;
    if (rec.coefficient_norm_sq) results["coefficient_norm_sq"] = *rec.coefficient_norm_sq;
    json report = {{"config", rec.config},
                   {"results", results},
                   {"artifacts", {{"fields", cfg.output.fields}, {"timing", timing_path.filename().string()}}}};
    io::atomic_write(report_path, report.dump(2) + "\n");
    io::atomic_write(timing_path, json(rec.timings).dump(2) + "\n");
  }
  return rec;
}

struct SweepRow {
  double param = 0.0;
  analytics::ErrorReport report;
  double alpha = 0.0;
  double boundary_data_norm = 0.0;
  std::optional<double> coefficient_norm_sq;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<analytics::DecayFit> fit;
  std::string fit_error;  // why no fit was produced
  std::map<std::string, fs::path> artifacts;
};

namespace detail {

inline std::size_t integral(double v, const std::string& name) {
  if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("sweep values for " + name + " must be positive integers");
  return static_cast<std::size_t>(v);
}

inline op::ExactField move_singularity(const op::ExactField& field, double radius) {
  const auto* ps = std::get_if<op::PointSource>(&field.variant());
  if (ps == nullptr) throw ConfigError("a source_radius sweep needs a point_source field");
  const double r0 = std::hypot(ps->source.x, ps->source.y);
  if (!(r0 > 0.0)) throw ConfigError("a source_radius sweep needs a point source away from the origin");
  return op::PointSource{{ps->source.x * radius / r0, ps->source.y * radius / r0}, ps->k};
}

}  // namespace detail

/// One run per sweep value, then a log-linear fit of two_norm against the
/// parameter (log10 alpha for alpha sweeps) over samples above the
/// regularisation floor 100 alpha ||f||.
inline SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.sweep) throw ConfigError("config has no [sweep] section");
  const SweepSpec& sweep = *cfg.sweep;
  SweepResult result;

  // Varying only the field leaves the operator unchanged, so learn it once.
  std::optional<op::LearnedOperator> shared;
  if (sweep.param == "source_radius" && cfg.method == Method::lbnm) {
    shared = prepare_operator(cfg, query_points(cfg), false);
  }

  std::string csv = "param,two_norm,inf_norm,learn_s,apply_s\n";
  json rows = json::array();
  for (double value : sweep.values) {
    ExperimentConfig run = cfg;
    run.sweep.reset();
    if (sweep.param == "M") {
      run.problem.m = detail::integral(value, "M");
      if (sweep.couple_n) run.problem.n = run.problem.m;
    } else if (sweep.param == "N") {
      run.problem.n = detail::integral(value, "N");
    } else if (sweep.param == "R") {
      run.problem.source_radius = value;
    } else if (sweep.param == "alpha") {
      run.problem.alpha = value;
    } else {
      run.field = detail::move_singularity(cfg.field, value);
    }
    if (sweep.param != "source_radius") run.operator_path.reset();
    const RunRecord rec = run_case(run, {.write_artifacts = false, .bind = false}, shared ? &*shared : nullptr);
    SweepRow row{value, rec.report, rec.alpha, rec.boundary_data_norm, rec.coefficient_norm_sq};
    if (shared) row.report.learn_seconds = shared->learn_seconds;
    csv += io::format_double(value) + ',' + io::format_double(row.report.two_norm) + ',' +
           io::format_double(row.report.inf_norm) + ',' + io::format_double(row.report.learn_seconds) + ',' +
           io::format_double(row.report.apply_seconds) + '\n';
    json jr = {{"param", value},
               {"two_norm", row.report.two_norm},
               {"inf_norm", row.report.inf_norm},
               {"alpha", row.alpha},
               {"boundary_data_norm", row.boundary_data_norm}};
    if (row.coefficient_norm_sq) jr["coefficient_norm_sq"] = *row.coefficient_norm_sq;
    rows.push_back(jr);
    result.rows.push_back(row);
  }

  // alpha spans decades, so its fit is per decade.
  const bool log_abscissa = sweep.param == "alpha";
  std::vector<std::pair<double, double>> samples;
  for (const auto& row : result.rows) {
    if (row.report.two_norm > 0.0 && row.report.two_norm >= 100.0 * row.alpha * row.boundary_data_norm) {
      samples.emplace_back(log_abscissa ? std::log10(row.param) : row.param, row.report.two_norm);
    }
  }
  try {
    result.fit = analytics::fit_decay(samples);
  } catch (const std::invalid_argument& e) {
    result.fit_error = e.what();
  }

  const fs::path csv_path = cfg.output.dir / cfg.output.sweep;
  fs::path summary_path = csv_path;
  summary_path.replace_extension(".json");
  json summary = {{"config", config_to_json(cfg)}, {"rows", rows}};
  if (result.fit) {
    summary["fit"] = {{"abscissa", log_abscissa ? "log10(" + sweep.param + ")" : sweep.param},
                      {"rate", result.fit->rate},
                      {"intercept", result.fit->intercept},
                      {"r_squared", result.fit->r_squared},
                      {"window", {result.fit->window.first, result.fit->window.second}},
                      {"used", result.fit->used}};
  } else {
    summary["fit_error"] = result.fit_error;
  }
  io::atomic_write(csv_path, csv);
  io::atomic_write(summary_path, summary.dump(2) + "\n");
  result.artifacts["sweep"] = csv_path;
  result.artifacts["summary"] = summary_path;
  return result;
}

/// Unit disk, k = 5, sources on R = 2, point source at radius 3, N = M
/// from 20 to 60, alpha = max(M N R^{-2M}, 1e-14), 1000 boundary queries.
inline ExperimentConfig mfs_benchmark_config() {
  ExperimentConfig cfg;
  cfg.name = "mfs_benchmark";
  cfg.method = Method::mfs;
  cfg.problem.k = 5.0;
  cfg.problem.curve = geometry::BoundaryCurve::circle(1.0);
  cfg.problem.source_radius = 2.0;
  cfg.problem.n = cfg.problem.m = 20;
  cfg.problem.min_alpha = 1e-14;
  cfg.problem.spacing = geometry::Spacing::parameter;
  cfg.field = op::PointSource{{3.0, 0.0}, 5.0};
  cfg.grid = {GridKind::boundary, 1000, 0.0};
  SweepSpec s;
  s.param = "M";
  s.couple_n = true;
  for (int m = 20; m <= 60; m += 4) s.values.push_back(m);
  cfg.sweep = s;
  cfg.output.dir = "out/mfs_benchmark";
  return cfg;
}

/// Samples `field` at `count` equal angles on the unit circle.
inline ComplexVector unit_circle_samples(const op::ExactField& field, std::size_t count) {
  ComplexVector out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = geometry::two_pi * static_cast<double>(j) / static_cast<double>(count);
    out.push_back(field(Point2{std::cos(t), std::sin(t)}));
  }
  return out;
}

}  // namespace lbnm::harness

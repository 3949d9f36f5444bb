#include "designforge/commands.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "designforge/io.hpp"

namespace designforge::cli {

namespace {

std::optional<QuadratureCache> open_cache(const Config& config, std::ostream& err) {
  const auto dir = resolve_cache_dir(config.cache_dir);
  if (!dir) return std::nullopt;
  return QuadratureCache(*dir, [&err](const std::string& msg) { err << "warning: " << msg << "\n"; });
}

std::string sphere(int ambient_dim) { return "S^" + std::to_string(ambient_dim - 1); }

void print_build_table(const BuildReport& report, std::ostream& out) {
  fmt::print(out, "{:>4}  {:>6}  {:>6}  {:>6}  {:>6}  {:>8}  {:>10}  {:>10}  {:<10}  {}\n", "node", "sphere", "K",
             "M", "N", "points", "quad_res", "residual", "method", "status");
  for (const NodeReport& n : report.nodes) {
    if (n.node < 0) continue;
    fmt::print(out, "{:>4}  {:>6}  {:>6}  {:>6}  {:>6}  {:>8}  {:>10.2e}  {:>10.2e}  {:<10}  {}\n", n.node,
               sphere(n.ambient_dim), n.leaf ? std::string("-") : std::to_string(n.K),
               n.leaf ? std::string("-") : std::to_string(n.M), n.leaf ? std::string("-") : std::to_string(n.N),
               n.cardinality, n.quadrature_residual, n.residual, n.method.empty() ? "-" : n.method,
               n.method.empty() ? "not reached" : (n.passed ? "ok" : "FAILED"));
  }
}

}  // namespace

void Config::validate() const {
  if (!(quad_tolerance > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (!(design_tolerance > 0.0)) throw std::invalid_argument("design tolerance must be positive");
  if (max_K < 1) throw std::invalid_argument("max K must be >= 1");
  if (max_iterations < 1) throw std::invalid_argument("max iterations must be >= 1");
}

SolverOptions Config::solver_options() const {
  SolverOptions opts;
  opts.tolerance = quad_tolerance;
  opts.max_iterations = max_iterations;
  opts.max_K = max_K;
  opts.seed = seed;
  return opts;
}

OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::kJson;
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "text" || name == "default") return OutputFormat::kDefault;
  throw std::invalid_argument("unknown format '" + name + "'");
}

std::optional<std::filesystem::path> resolve_cache_dir(const std::optional<std::filesystem::path>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("DESIGNFORGE_CACHE"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

SplitOverrides parse_overrides(std::string_view text) {
  const Json j = parse_json(text);
  if (!j.is_object()) throw ParseError("plan override: expected a JSON object", 1, 1);
  SplitOverrides overrides;
  for (const auto& [key, value] : j.items()) {
    int dim = 0;
    try {
      dim = std::stoi(key);
    } catch (const std::exception&) {
      throw std::invalid_argument("plan override: key '" + key + "' is not a dimension");
    }
    if (!value.is_array() || value.size() != 2) {
      throw std::invalid_argument("plan override: split for " + key + " must be [m, n]");
    }
    overrides[dim] = {value[0].get<int>(), value[1].get<int>()};
  }
  return overrides;
}

std::optional<std::size_t> cached_cardinality(const BuildPlan& plan, QuadratureCache& cache, double tol) {
  std::vector<std::size_t> sizes(plan.nodes.size());
  for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
    const PlanNode& node = plan.nodes[i];
    if (node.leaf()) {
      sizes[i] = node.ambient_dim == 1 ? 2 : static_cast<std::size_t>(plan.degree) + 1;
      continue;
    }
    const JacobiWeight w(plan.nodes[node.m_child].ambient_dim, plan.nodes[node.n_child].ambient_dim);
    const auto q = cache.lookup(w, plan.degree, tol);
    if (!q) return std::nullopt;
    sizes[i] = q->size() * sizes[node.m_child] * sizes[node.n_child];
  }
  return sizes[plan.root];
}

int cmd_bounds(int n, int t_max, const Config& config, bool build_missing, std::ostream& out, std::ostream& err) {
  if (n < 1 || t_max < 0) {
    err << "error: bounds requires n >= 1 and t_max >= 0\n";
    return 2;
  }
  config.validate();
  auto cache = open_cache(config, err);
  const std::int64_t a = a_sequence(n);

  struct Row {
    int t;
    std::uint64_t lower;
    double predicted;
    std::optional<std::size_t> achieved;
  };
  std::vector<Row> rows;
  int status = 0;
  for (int t = std::min(1, t_max); t <= t_max; ++t) {
    Row row{t, lower_bound(n, t), std::pow(static_cast<double>(t), static_cast<double>(a)), std::nullopt};
    const BuildPlan p = plan(n, t);
    if (cache) row.achieved = cached_cardinality(p, *cache, config.quad_tolerance);
    if (!row.achieved && build_missing) {
      BuildOptions opts;
      opts.solver = config.solver_options();
      opts.design_tolerance = config.design_tolerance;
      opts.phase = config.phase;
      opts.cache = cache ? &*cache : nullptr;
      try {
        row.achieved = build(p, opts).report.cardinality;
      } catch (const std::exception& e) {
        err << "warning: build of S^" << n << " at t=" << t << " failed: " << e.what() << "\n";
        status = 1;
      }
    }
    rows.push_back(row);
  }

  if (config.format == OutputFormat::kJson) {
    Json j;
    j["n"] = n;
    j["a_n"] = a;
    Json table = Json::array();
    for (const Row& r : rows) {
      Json jr;
      jr["t"] = r.t;
      jr["lower_bound"] = r.lower;
      jr["t_pow_a"] = r.predicted;
      jr["achieved"] = r.achieved ? Json(*r.achieved) : Json(nullptr);
      jr["ratio"] = r.achieved && r.predicted > 0 ? Json(static_cast<double>(*r.achieved) / r.predicted) : Json(nullptr);
      table.push_back(std::move(jr));
    }
    j["rows"] = std::move(table);
    out << j.dump(2) << "\n";
    return status;
  }
  fmt::print(out, "S^{}: a_{} = {}\n", n, n, a);
  fmt::print(out, "{:>4}  {:>12}  {:>14}  {:>12}  {:>14}\n", "t", "lower_bound", "t^a_n", "achieved", "achieved/t^a");
  for (const Row& r : rows) {
    const std::string achieved = r.achieved ? std::to_string(*r.achieved) : "-";
    const std::string ratio =
        r.achieved && r.predicted > 0 ? fmt::format("{:.4g}", static_cast<double>(*r.achieved) / r.predicted) : "-";
    fmt::print(out, "{:>4}  {:>12}  {:>14.6g}  {:>12}  {:>14}\n", r.t, r.lower, r.predicted, achieved, ratio);
  }
  return status;
}

int cmd_quadrature(int m, int n, int t, const Config& config, const std::filesystem::path& output, std::ostream& out,
                   std::ostream& err) {
  config.validate();
  const JacobiWeight w(m, n);
  if (t < 0) {
    err << "error: degree must be >= 0\n";
    return 2;
  }
  auto cache = open_cache(config, err);
  std::optional<Quadrature> q;
  QuadratureReport report;
  bool from_cache = false;
  if (cache) q = cache->lookup(w, t, config.quad_tolerance);
  if (q) {
    from_cache = true;
    report = certify(*q, config.quad_tolerance);
  } else {
    try {
      auto solved = solve_equal_weight(w, t, config.solver_options());
      q = std::move(solved.quadrature);
      report = std::move(solved.report);
      if (cache) cache->store(*q);
    } catch (const NoConvergence& e) {
      q = e.best().quadrature;
      report = e.best().report;
      err << "error: " << e.what() << "\n";
    }
  }
  write_file_atomic(output, to_json(*q, config.hex).dump(2) + "\n");
  if (config.format == OutputFormat::kJson) {
    Json j = to_json(report);
    j["cache_hit"] = from_cache;
    j["output"] = output.string();
    out << j.dump(2) << "\n";
  } else {
    fmt::print(out, "weight w({},{})  degree {}  K = {}  max|r| = {:.3e}  {}{}\n", m, n, t, q->size(),
               report.max_abs_residual, report.certified ? "certified" : "NOT certified",
               from_cache ? "  (cached)" : "");
  }
  return report.certified ? 0 : 1;
}

int cmd_build(int n, int t, const Config& config, const SplitOverrides& overrides,
              const std::filesystem::path& design_path, const std::optional<std::filesystem::path>& report_path,
              std::ostream& out, std::ostream& err) {
  config.validate();
  if (n < 1 || t < 0) {
    err << "error: build requires n >= 1 and t >= 0\n";
    return 2;
  }
  auto cache = open_cache(config, err);
  BuildOptions opts;
  opts.solver = config.solver_options();
  opts.design_tolerance = config.design_tolerance;
  opts.phase = config.phase;
  opts.cache = cache ? &*cache : nullptr;

  const BuildPlan p = plan(n, t, overrides);
  const auto write_report = [&](const BuildReport& report) {
    if (report_path) write_file_atomic(*report_path, to_json(report).dump(2) + "\n");
  };
  try {
    BuildResult result = build(p, opts);
    const std::string content = config.format == OutputFormat::kCsv ? design_to_csv(result.design)
                                                                    : to_json(result.design, config.hex).dump(2) + "\n";
    write_file_atomic(design_path, content);
    write_report(result.report);
    if (config.format == OutputFormat::kJson) {
      out << to_json(result.report).dump(2) << "\n";
    } else {
      print_build_table(result.report, out);
      fmt::print(out, "S^{} degree {}: {} points (lower bound {}, t^a_{} = {:.6g}), residual {:.3e}\n", n, t,
                 result.report.cardinality, result.report.lower_bound, n,
                 std::pow(static_cast<double>(t), static_cast<double>(result.report.predicted_exponent)),
                 result.report.residual);
    }
    return 0;
  } catch (const BuildFailed& e) {
    err << "error: " << e.what() << "\n";
    write_report(e.report());
    if (config.format != OutputFormat::kJson) print_build_table(e.report(), out);
    return 1;
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify(const std::filesystem::path& input, std::optional<int> t, double tol, VerifyMethod method,
               const Config& config, std::ostream& out, std::ostream& err) {
  config.validate();
  if (!(tol > 0.0)) {
    err << "error: tolerance must be positive\n";
    return 2;
  }
  std::optional<Design> design;
  try {
    design = parse_design(read_file(input));
  } catch (const ParseError& e) {
    err << "error: " << input.string() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << input.string() << ": " << e.what() << "\n";
    return 2;
  }
  const int degree = t.value_or(design->degree());
  VerificationReport report;
  try {
    report = verify(*design, degree, tol, method);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (config.format == OutputFormat::kJson) {
    out << to_json(report).dump(2) << "\n";
  } else {
    const auto line = [&out](const VerificationReport& r) {
      std::string worst;
      if (r.worst_monomial) {
        worst = "x^(";
        for (std::size_t i = 0; i < r.worst_monomial->size(); ++i) {
          worst += (i ? "," : "") + std::to_string((*r.worst_monomial)[i]);
        }
        worst += ")";
      } else if (r.worst_degree) {
        worst = "k=" + std::to_string(*r.worst_degree);
      }
      fmt::print(out, "{:<10}  degree {:>3}  max|r| = {:.3e}  tol {:.1e}  worst {:<14}  {}\n", r.method,
                 r.degree_checked, r.max_abs_residual, r.tolerance, worst.empty() ? "-" : worst,
                 r.passed ? "PASS" : "FAIL");
    };
    fmt::print(out, "{}: {} points on S^{}\n", input.string(), design->size(), design->ambient_dim() - 1);
    if (report.parts.empty()) {
      line(report);
    } else {
      for (const auto& part : report.parts) line(part);
    }
  }
  return report.passed ? 0 : 1;
}

}  // namespace designforge::cli

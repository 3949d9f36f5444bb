// Command-line front end: bounds, quadrature, build, verify.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "designforge/commands.hpp"
#include "designforge/io.hpp"

namespace cli = designforge::cli;

int main(int argc, char** argv) {
  CLI::App app{"designforge: spherical t-designs by recursive products of lower-dimensional designs"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::Config config;
  std::string cache_dir;
  std::string format = "text";
  app.add_option("--tol-quad", config.quad_tolerance, "Quadrature certification tolerance")->capture_default_str();
  app.add_option("--tol-design", config.design_tolerance, "Design certification tolerance")->capture_default_str();
  app.add_option("--max-k", config.max_K, "Largest quadrature size tried")->capture_default_str();
  app.add_option("--max-iter", config.max_iterations, "Solver iterations per trial size")->capture_default_str();
  app.add_option("--seed", config.seed, "Solver seed")->capture_default_str();
  app.add_option("--cache-dir", cache_dir, "Quadrature cache directory (overrides DESIGNFORGE_CACHE)");
  app.add_option("--format", format, "text | json | csv")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--phase", config.phase, "Phase of the S^1 base polygon")->capture_default_str();
  app.add_flag("--hex", config.hex, "Add hex-float fields to JSON outputs");

  auto* bounds = app.add_subcommand("bounds", "Lower bounds, exponent a_n and achieved sizes");
  int bounds_n = 1, bounds_t = 1;
  bool bounds_build = false;
  bounds->add_option("n", bounds_n, "Sphere dimension (S^n)")->required();
  bounds->add_option("t_max", bounds_t, "Largest degree")->required();
  bounds->add_flag("--build", bounds_build, "Build designs missing from the cache");

  auto* quad = app.add_subcommand("quadrature", "Solve an equal-weight Jacobi quadrature");
  int quad_m = 2, quad_n = 2, quad_t = 0;
  std::string quad_out = "quadrature.json";
  quad->add_option("m", quad_m, "First factor dimension")->required();
  quad->add_option("n", quad_n, "Second factor dimension")->required();
  quad->add_option("t", quad_t, "Degree")->required();
  quad->add_option("-o,--output", quad_out, "Node file")->capture_default_str();

  auto* build = app.add_subcommand("build", "Build and certify a design on S^n");
  int build_n = 2, build_t = 1;
  std::string design_out, report_out, plan_file;
  build->add_option("n", build_n, "Sphere dimension (S^n)")->required();
  build->add_option("t", build_t, "Degree")->required();
  build->add_option("-o,--output", design_out, "Design file (default design.json or design.csv)");
  build->add_option("--report", report_out, "Build report file");
  build->add_option("--plan", plan_file, "Split override file, e.g. {\"5\": [2, 3]}");

  auto* verify = app.add_subcommand("verify", "Check the t-design property of a point file");
  std::string verify_in, method = "auto";
  std::optional<int> verify_t;
  double verify_tol = -1.0;
  verify->add_option("file", verify_in, "Design file (JSON or CSV)")->required();
  verify->add_option("-t,--degree", verify_t, "Degree to check (default: the file's degree)");
  verify->add_option("--tol", verify_tol, "Tolerance (default: --tol-design)");
  verify->add_option("--method", method, "monomial | gegenbauer | both | auto")
      ->check(CLI::IsMember({"monomial", "gegenbauer", "both", "auto"}));

  CLI11_PARSE(app, argc, argv);

  try {
    config.format = cli::parse_format(format);
    if (!cache_dir.empty()) config.cache_dir = cache_dir;

    if (*bounds) return cli::cmd_bounds(bounds_n, bounds_t, config, bounds_build, std::cout, std::cerr);
    if (*quad) return cli::cmd_quadrature(quad_m, quad_n, quad_t, config, quad_out, std::cout, std::cerr);
    if (*build) {
      designforge::SplitOverrides overrides;
      if (!plan_file.empty()) overrides = cli::parse_overrides(designforge::read_file(plan_file));
      if (design_out.empty()) design_out = config.format == cli::OutputFormat::kCsv ? "design.csv" : "design.json";
      std::optional<std::filesystem::path> report;
      if (!report_out.empty()) report = report_out;
      return cli::cmd_build(build_n, build_t, config, overrides, design_out, report, std::cout, std::cerr);
    }
    if (*verify) {
      const double tol = verify_tol > 0.0 ? verify_tol : config.design_tolerance;
      return cli::cmd_verify(verify_in, verify_t, tol, designforge::parse_verify_method(method), config, std::cout,
                             std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "designforge/cache.hpp"
#include "designforge/construct.hpp"
#include "designforge/verify.hpp"

namespace designforge::cli {

// kDefault writes JSON files and plain-text tables; kJson also prints JSON to
// stdout; kCsv writes designs as CSV.
enum class OutputFormat { kDefault, kJson, kCsv };

struct Config {
  double quad_tolerance = 1e-12;
  double design_tolerance = 1e-9;
  std::size_t max_K = 4096;
  int max_iterations = 400;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> cache_dir;
  OutputFormat format = OutputFormat::kDefault;
  double phase = 0.0;
  bool hex = false;

  // Throws std::invalid_argument.
  void validate() const;
  SolverOptions solver_options() const;
};

OutputFormat parse_format(const std::string& name);

// The flag wins; otherwise DESIGNFORGE_CACHE; otherwise no cache.
std::optional<std::filesystem::path> resolve_cache_dir(const std::optional<std::filesystem::path>& flag);

// JSON object mapping ambient dimension to an [m, n] split, e.g. {"5": [2, 3]}.
SplitOverrides parse_overrides(std::string_view text);

// Cardinality the plan would produce from cached quadratures alone, or nullopt
// if some internal node's quadrature is not cached.
std::optional<std::size_t> cached_cardinality(const BuildPlan& plan, QuadratureCache& cache, double tol);

// Each command returns the process exit code: 0 when every requested
// certification passed, 1 when one failed, 2 on usage or input errors.
int cmd_bounds(int n, int t_max, const Config& config, bool build_missing, std::ostream& out, std::ostream& err);

int cmd_quadrature(int m, int n, int t, const Config& config, const std::filesystem::path& output,
                   std::ostream& out, std::ostream& err);

int cmd_build(int n, int t, const Config& config, const SplitOverrides& overrides,
              const std::filesystem::path& design_path, const std::optional<std::filesystem::path>& report_path,
              std::ostream& out, std::ostream& err);

int cmd_verify(const std::filesystem::path& input, std::optional<int> t, double tol, VerifyMethod method,
               const Config& config, std::ostream& out, std::ostream& err);

}  // namespace designforge::cli

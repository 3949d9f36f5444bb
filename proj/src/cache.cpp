#include "designforge/cache.hpp"

#include <cmath>

#include "designforge/io.hpp"

namespace designforge {

int tolerance_bucket(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance_bucket: tolerance must be positive");
  return static_cast<int>(std::floor(std::log10(tol) + 1e-9));
}

std::string cache_key(const JacobiWeight& w, int degree, double tol) {
  return "jacobi_m" + std::to_string(w.m) + "_n" + std::to_string(w.n) + "_t" + std::to_string(degree) + "_tol1e" +
         std::to_string(tolerance_bucket(tol));
}

QuadratureCache::QuadratureCache(std::filesystem::path directory, WarningSink warn)
    : directory_(std::move(directory)), warn_(std::move(warn)) {}

std::filesystem::path QuadratureCache::path_for(const JacobiWeight& w, int degree, double tol) const {
  return directory_ / (cache_key(w, degree, tol) + ".json");
}

std::optional<Quadrature> QuadratureCache::lookup(const JacobiWeight& w, int degree, double tol) {
  const auto path = path_for(w, degree, tol);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    Quadrature q = quadrature_from_json(parse_json(read_file(path)));
    if (!(q.weight() == w) || q.degree() != degree) {
      throw std::invalid_argument("entry does not match its key");
    }
    if (!certify(q, tol).certified) throw std::invalid_argument("entry does not certify");
    return q;
  } catch (const std::exception& err) {
    if (warn_) warn_("ignoring cache entry " + path.string() + ": " + err.what());
    return std::nullopt;
  }
}

void QuadratureCache::store(const Quadrature& q) {
  if (!q.certified()) return;
  const auto path = path_for(q.weight(), q.degree(), q.tolerance());
  const std::string content = to_json(q, true).dump(2) + "\n";
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    try {
      if (read_file(path) == content) return;
    } catch (const std::exception&) {
    }
  }
  write_file_atomic(path, content);
}

}  // namespace designforge

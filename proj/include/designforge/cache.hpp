#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "designforge/construct.hpp"
#include "designforge/quadrature.hpp"

namespace designforge {

// Tolerances are bucketed by decimal exponent: 1e-12 and 5e-12 share a key.
int tolerance_bucket(double tol);
std::string cache_key(const JacobiWeight& w, int degree, double tol);

// On-disk store of certified quadratures, one JSON file per key.
class QuadratureCache : public QuadratureStore {
 public:
  using WarningSink = std::function<void(const std::string&)>;

  explicit QuadratureCache(std::filesystem::path directory, WarningSink warn = {});

  const std::filesystem::path& directory() const { return directory_; }
  std::filesystem::path path_for(const JacobiWeight& w, int degree, double tol) const;

  // Entries are re-certified at `tol`; corrupt or uncertified entries are
  // reported to the warning sink and treated as misses.
  std::optional<Quadrature> lookup(const JacobiWeight& w, int degree, double tol) override;
  // Idempotent; uncertified quadratures are not stored.
  void store(const Quadrature& q) override;

 private:
  std::filesystem::path directory_;
  WarningSink warn_;
};

}  // namespace designforge

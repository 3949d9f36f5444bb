#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "designforge/construct.hpp"
#include "designforge/quadrature.hpp"
#include "designforge/verify.hpp"

namespace designforge {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// 17 significant digits, enough to round-trip a double.
std::string format_decimal(double value);
std::string format_hex(double value);
// Accepts decimal or hex-float text; throws std::invalid_argument.
double parse_number(std::string_view text);

Json to_json(const Quadrature& q, bool with_hex = false);
Json to_json(const Design& d, bool with_hex = false);
Json to_json(const BuildReport& r);
Json to_json(const VerificationReport& r);
Json to_json(const QuadratureReport& r);

Quadrature quadrature_from_json(const Json& j);
Design design_from_json(const Json& j);
BuildReport build_report_from_json(const Json& j);
VerificationReport verification_report_from_json(const Json& j);

std::string design_to_csv(const Design& d);
// One point per row; the degree is not stored in CSV.
Design design_from_csv(std::string_view text, int degree = 0);

// JSON if the first non-blank character is '{', CSV otherwise.
Design parse_design(std::string_view text);
Json parse_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace designforge

#include "designforge/io.hpp"

#include <cmath>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace designforge {

namespace {

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Json numbers_to_json(const Eigen::MatrixXd& points, bool hex) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      row.push_back(hex ? format_hex(points(i, c)) : format_decimal(points(i, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double number_field(const Json& value) {
  if (value.is_string()) return parse_number(value.get<std::string>());
  if (value.is_number()) return value.get<double>();
  throw std::invalid_argument("expected a number or numeric string");
}

Json node_to_json(const BuildReport& r, int idx) {
  const NodeReport& n = r.nodes.at(idx);
  Json j;
  j["node"] = n.node;
  j["ambient_dim"] = n.ambient_dim;
  j["leaf"] = n.leaf;
  j["K"] = n.K;
  j["M"] = n.M;
  j["N"] = n.N;
  j["cardinality"] = n.cardinality;
  j["quadrature_residual"] = n.quadrature_residual;
  j["cache_hit"] = n.cache_hit;
  j["method"] = n.method;
  j["residual"] = n.residual;
  j["passed"] = n.passed;
  if (!n.leaf) {
    j["children"] = Json::array({node_to_json(r, n.m_child), node_to_json(r, n.n_child)});
  }
  return j;
}

int node_from_json(const Json& j, BuildReport& r) {
  NodeReport n;
  n.node = j.at("node").get<int>();
  n.ambient_dim = j.at("ambient_dim").get<int>();
  n.leaf = j.at("leaf").get<bool>();
  n.K = j.at("K").get<std::size_t>();
  n.M = j.at("M").get<std::size_t>();
  n.N = j.at("N").get<std::size_t>();
  n.cardinality = j.at("cardinality").get<std::size_t>();
  n.quadrature_residual = j.at("quadrature_residual").get<double>();
  n.cache_hit = j.at("cache_hit").get<bool>();
  n.method = j.at("method").get<std::string>();
  n.residual = j.at("residual").get<double>();
  n.passed = j.at("passed").get<bool>();
  if (!n.leaf) {
    const Json& children = j.at("children");
    n.m_child = node_from_json(children.at(0), r);
    n.n_child = node_from_json(children.at(1), r);
  }
  if (n.node < 0) throw std::invalid_argument("negative node index");
  if (r.nodes.size() <= static_cast<std::size_t>(n.node)) r.nodes.resize(n.node + 1);
  r.nodes[n.node] = n;
  return n.node;
}

}  // namespace

std::string format_decimal(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_hex(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%a", value);
  return buf;
}

double parse_number(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(s.c_str(), &end);
  // Underflow to a subnormal also sets ERANGE; only overflow is an error.
  if (end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(value))) {
    throw std::invalid_argument("malformed number '" + s + "'");
  }
  return value;
}

Json to_json(const Quadrature& q, bool with_hex) {
  Json j;
  j["m"] = q.weight().m;
  j["n"] = q.weight().n;
  j["degree"] = q.degree();
  Json nodes = Json::array();
  for (double x : q.nodes()) nodes.push_back(format_decimal(x));
  j["nodes"] = std::move(nodes);
  if (with_hex) {
    Json hex = Json::array();
    for (double x : q.nodes()) hex.push_back(format_hex(x));
    j["nodes_hex"] = std::move(hex);
  }
  j["K"] = q.size();
  j["max_abs_residual"] = q.max_abs_residual();
  j["tolerance"] = q.tolerance();
  j["certified"] = q.certified();
  return j;
}

Quadrature quadrature_from_json(const Json& j) {
  const JacobiWeight w(j.at("m").get<int>(), j.at("n").get<int>());
  const Json& raw = j.contains("nodes_hex") ? j.at("nodes_hex") : j.at("nodes");
  std::vector<double> nodes;
  for (const Json& x : raw) nodes.push_back(number_field(x));
  if (j.contains("K") && j.at("K").get<std::size_t>() != nodes.size()) {
    throw std::invalid_argument("quadrature: K does not match the node count");
  }
  Quadrature q(w, j.at("degree").get<int>(), std::move(nodes));
  q.set_certification(j.value("certified", false), j.value("tolerance", 0.0),
                      j.contains("max_abs_residual") ? number_field(j.at("max_abs_residual"))
                                                     : std::numeric_limits<double>::infinity());
  return q;
}

Json to_json(const Design& d, bool with_hex) {
  Json j;
  j["ambient_dim"] = d.ambient_dim();
  j["degree"] = d.degree();
  j["count"] = d.size();
  j["points"] = numbers_to_json(d.points(), false);
  if (with_hex) j["points_hex"] = numbers_to_json(d.points(), true);
  return j;
}

Design design_from_json(const Json& j) {
  const int dim = j.at("ambient_dim").get<int>();
  const Json& rows = j.contains("points_hex") ? j.at("points_hex") : j.at("points");
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("design: no points");
  if (j.contains("count") && j.at("count").get<std::size_t>() != rows.size()) {
    throw std::invalid_argument("design: count does not match the number of points");
  }
  Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim)) {
      throw std::invalid_argument("design: point " + std::to_string(i) + " does not have " + std::to_string(dim) +
                                  " coordinates");
    }
    for (int c = 0; c < dim; ++c) points(static_cast<Eigen::Index>(i), c) = number_field(row[c]);
  }
  return Design(dim, j.value("degree", 0), std::move(points));
}

Json to_json(const BuildReport& r) {
  Json j;
  j["sphere_dim"] = r.sphere_dim;
  j["degree"] = r.degree;
  j["cardinality"] = r.cardinality;
  j["predicted_exponent"] = r.predicted_exponent;
  j["t_pow_a"] = std::pow(static_cast<double>(r.degree), static_cast<double>(r.predicted_exponent));
  j["lower_bound"] = r.lower_bound;
  j["residual"] = r.residual;
  j["passed"] = r.passed;
  j["failed_node"] = r.failed_node;
  if (r.root >= 0) j["tree"] = node_to_json(r, r.root);
  return j;
}

BuildReport build_report_from_json(const Json& j) {
  BuildReport r;
  r.sphere_dim = j.at("sphere_dim").get<int>();
  r.degree = j.at("degree").get<int>();
  r.cardinality = j.at("cardinality").get<std::size_t>();
  r.predicted_exponent = j.at("predicted_exponent").get<std::int64_t>();
  r.lower_bound = j.at("lower_bound").get<std::uint64_t>();
  r.residual = j.at("residual").get<double>();
  r.passed = j.at("passed").get<bool>();
  r.failed_node = j.at("failed_node").get<int>();
  if (j.contains("tree")) r.root = node_from_json(j.at("tree"), r);
  return r;
}

Json to_json(const VerificationReport& r) {
  Json j;
  j["method"] = r.method;
  j["degree_checked"] = r.degree_checked;
  j["tolerance"] = r.tolerance;
  j["max_abs_residual"] = r.max_abs_residual;
  j["passed"] = r.passed;
  if (r.worst_monomial) {
    const auto e = r.worst_monomial->exponents();
    j["worst_monomial"] = std::vector<int>(e.begin(), e.end());
  }
  if (r.worst_degree) j["worst_degree"] = *r.worst_degree;
  if (!r.gegenbauer_sums.empty()) j["gegenbauer_sums"] = r.gegenbauer_sums;
  if (!r.parts.empty()) {
    Json parts = Json::array();
    for (const auto& p : r.parts) parts.push_back(to_json(p));
    j["parts"] = std::move(parts);
  }
  return j;
}

VerificationReport verification_report_from_json(const Json& j) {
  VerificationReport r;
  r.method = j.at("method").get<std::string>();
  r.degree_checked = j.at("degree_checked").get<int>();
  r.tolerance = j.at("tolerance").get<double>();
  r.max_abs_residual = j.at("max_abs_residual").get<double>();
  r.passed = j.at("passed").get<bool>();
  if (j.contains("worst_monomial")) r.worst_monomial = MultiIndex(j.at("worst_monomial").get<std::vector<int>>());
  if (j.contains("worst_degree")) r.worst_degree = j.at("worst_degree").get<int>();
  if (j.contains("gegenbauer_sums")) r.gegenbauer_sums = j.at("gegenbauer_sums").get<std::vector<double>>();
  if (j.contains("parts")) {
    for (const Json& p : j.at("parts")) r.parts.push_back(verification_report_from_json(p));
  }
  return r;
}

Json to_json(const QuadratureReport& r) {
  Json j;
  j["K"] = r.K;
  j["iterations"] = r.iterations;
  j["tolerance"] = r.tolerance;
  j["max_abs_residual"] = r.max_abs_residual;
  j["max_power_moment_residual"] = r.max_power_moment_residual;
  j["certified"] = r.certified;
  j["residuals"] = r.residuals;
  return j;
}

std::string design_to_csv(const Design& d) {
  std::string out;
  for (Eigen::Index i = 0; i < d.points().rows(); ++i) {
    for (Eigen::Index c = 0; c < d.points().cols(); ++c) {
      if (c) out += ',';
      out += format_decimal(d.points()(i, c));
    }
    out += '\n';
  }
  return out;
}

Design design_from_csv(std::string_view text, int degree) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') {
      std::vector<double> row;
      std::size_t field_start = 0;
      while (true) {
        const std::size_t comma = std::min(line.find(',', field_start), line.size());
        std::string_view field = line.substr(field_start, comma - field_start);
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        field = b == std::string_view::npos ? std::string_view{} : field.substr(b, e - b + 1);
        try {
          row.push_back(parse_number(field));
        } catch (const std::invalid_argument& err) {
          throw ParseError(std::string("design CSV: ") + err.what(), line_no, field_start + 1);
        }
        if (comma == line.size()) break;
        field_start = comma + 1;
      }
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw ParseError("design CSV: expected " + std::to_string(rows.front().size()) + " columns, found " +
                             std::to_string(row.size()),
                         line_no, 1);
      }
      rows.push_back(std::move(row));
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  if (rows.empty()) throw ParseError("design CSV: no points", 1, 1);
  Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) points(i, c) = rows[i][c];
  }
  const int dim = static_cast<int>(points.cols());
  return Design(dim, degree, std::move(points));
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& err) {
    const auto [line, column] = line_and_column(text, err.byte > 0 ? err.byte - 1 : 0);
    throw ParseError("malformed JSON", line, column);
  }
}

Design parse_design(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) throw ParseError("empty design file", 1, 1);
  if (text[first] == '{') {
    const Json j = parse_json(text);
    try {
      return design_from_json(j);
    } catch (const nlohmann::json::exception& err) {
      throw ParseError(std::string("design JSON: ") + err.what(), 1, 1);
    } catch (const std::invalid_argument& err) {
      throw ParseError(std::string("design JSON: ") + err.what(), 1, 1);
    }
  }
  return design_from_csv(text);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace designforge

#include "dbtsw/measure.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dbtsw/error.hpp"

namespace dbtsw {

EmpiricalMeasure make_measure(Matrix supports, std::optional<Vector> weights) {
  const Eigen::Index n = supports.rows();
  if (n < 1 || supports.cols() < 1) throw InvalidMeasure("measure has no supports");
  if (!supports.allFinite()) throw InvalidMeasure("measure supports contain NaN or Inf");

  Vector w;
  if (weights) {
    w = std::move(*weights);
    if (w.size() != n) {
      throw InvalidMeasure("weight count " + std::to_string(w.size()) +
                           " does not match support count " + std::to_string(n));
    }
    if (!w.allFinite()) throw InvalidMeasure("weights contain NaN or Inf");
    if ((w.array() < 0.0).any()) throw InvalidMeasure("weights must be non-negative");
    const double total = w.sum();
    if (!(total > 0.0)) throw InvalidMeasure("weights sum to zero");
    // Skip the division when the weights are already exact, which keeps
    // make_measure idempotent.
    if (total != 1.0) w /= total;
  } else {
    w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  }
  return EmpiricalMeasure(std::move(supports), std::move(w));
}

Matrix pairwise_distances(const Matrix& supports) {
  const Eigen::Index n = supports.rows();
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = (supports.row(i) - supports.row(j)).norm();
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string{}
                                               : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text, const std::filesystem::path& path,
                    std::size_t line_no) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidMeasure(path.string() + ":" + std::to_string(line_no) +
                         ": cannot parse number '" + text + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

EmpiricalMeasure read_measure_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open measure file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw InvalidMeasure("empty measure file: " + path.string());
  const auto header = split_csv_line(line);
  if (header.empty()) throw InvalidMeasure("missing header in " + path.string());
  const bool has_weight = header.back() == "weight";
  const std::size_t dims = header.size() - (has_weight ? 1 : 0);
  if (dims == 0) throw InvalidMeasure("no coordinate columns in " + path.string());

  std::vector<double> coords;
  std::vector<double> weights;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InvalidMeasure(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " columns, got " +
                           std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < dims; ++c) coords.push_back(parse_double(cells[c], path, line_no));
    if (has_weight) weights.push_back(parse_double(cells.back(), path, line_no));
  }

  const auto n = static_cast<Eigen::Index>(coords.size() / dims);
  if (n == 0) throw InvalidMeasure("no supports in " + path.string());
  Matrix supports = Eigen::Map<Matrix>(coords.data(), n, static_cast<Eigen::Index>(dims));
  std::optional<Vector> w;
  if (has_weight) w = Eigen::Map<Vector>(weights.data(), n);
  try {
    return make_measure(std::move(supports), std::move(w));
  } catch (const InvalidMeasure& e) {
    throw InvalidMeasure(path.string() + ": " + e.what());
  }
}

void write_measure_csv(const EmpiricalMeasure& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write measure file: " + path.string());
  for (Eigen::Index c = 0; c < m.dim(); ++c) out << "x_" << (c + 1) << ',';
  out << "weight\n";
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    for (Eigen::Index c = 0; c < m.dim(); ++c) out << format_double(m.supports()(i, c)) << ',';
    out << format_double(m.weights()(i)) << '\n';
  }
  if (!out) throw IoError("failed writing measure file: " + path.string());
}

}  // namespace dbtsw

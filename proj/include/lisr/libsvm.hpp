#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "logistic.hpp"
#include "textio.hpp"

namespace lisr {

/* Sparse rows as (index, value) pairs with 1-based, strictly increasing
   indices, the way the interchange format stores them. */
struct LibsvmData {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<int> labels;  // mapped to {-1, +1}
  int max_index = 0;
};

/* Accepted label tokens are numeric 0, 1, -1 and +1; {0, 1} data is mapped
   onto {-1, +1}.  Blank lines are skipped and '#' starts a comment that
   runs to the end of the line. */
inline LibsvmData parse_libsvm(std::istream& is) {
  LibsvmData data;
  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);

    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;  // blank or comment-only line

    double label_value = 0.0;
    if (!detail::parse_double(tok[0] == '+' ? std::string_view(tok).substr(1) : tok,
                              label_value) ||
        (label_value != 0.0 && label_value != 1.0 && label_value != -1.0))
      throw ParseError(line_number, "label must be one of 0, 1, -1, +1, got '" + tok + "'");
    data.labels.push_back(label_value > 0.0 ? 1 : -1);

    std::vector<std::pair<int, double>> row;
    int prev_index = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError(line_number, "malformed feature token '" + tok + "'");
      long long index = 0;
      double value = 0.0;
      if (!detail::parse_int(std::string_view(tok).substr(0, colon), index) || index < 1)
        throw ParseError(line_number, "feature index must be a positive integer in '" + tok + "'");
      if (!detail::parse_double(std::string_view(tok).substr(colon + 1), value))
        throw ParseError(line_number, "malformed feature value in '" + tok + "'");
      if (index <= prev_index)
        throw ParseError(line_number, "feature indices must be strictly increasing");
      prev_index = static_cast<int>(index);
      row.emplace_back(static_cast<int>(index), value);
      if (prev_index > data.max_index) data.max_index = prev_index;
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

inline LibsvmData parse_libsvm_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return parse_libsvm(is);
}

/* Values are written in shortest round-trip decimal form, so a parse of the
   output reproduces the input exactly. */
inline void write_libsvm(const LibsvmData& data, std::ostream& os) {
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    os << (data.labels[i] > 0 ? "+1" : "-1");
    for (const auto& [index, value] : data.rows[i])
      os << ' ' << index << ':' << detail::format_double(value);
    os << '\n';
  }
}

/* Densifies into a regularized logistic problem.  The feature dimension is
   the largest observed index unless a larger override is given; an override
   below the data's own dimension would silently drop features, so it is
   rejected. */
inline LogisticProblem to_logistic(const LibsvmData& data, double lambda,
                                   int dim_override = 0) {
  if (data.rows.empty()) throw std::invalid_argument("to_logistic: no records");
  if (dim_override != 0 && dim_override < data.max_index)
    throw std::invalid_argument("to_logistic: dimension override below max feature index");
  const int d = dim_override != 0 ? dim_override : data.max_index;
  if (d < 1) throw std::invalid_argument("to_logistic: data has no features");

  LogisticProblem p;
  p.lambda = lambda;
  p.labels = data.labels;
  p.features = Matrix::Zero(static_cast<int>(data.rows.size()), d);
  for (std::size_t i = 0; i < data.rows.size(); ++i)
    for (const auto& [index, value] : data.rows[i])
      p.features(static_cast<int>(i), index - 1) = value;
  return p;
}

}  // namespace lisr

#include <string>
#include <vector>

#include "rsvm/data.hpp"
#include "rsvm/errors.hpp"
#include "text_util.hpp"

namespace rsvm {

Dataset parse_csv(std::string_view text, const CsvOptions& options) {
  using Kind = ParseError::Kind;
  if (options.label_column < 0) throw ValidationError("label column must be >= 0");

  std::vector<double> cells;
  std::vector<double> labels;
  Index width = -1;
  bool header_pending = options.has_header;

  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (detail::trim(line).empty()) return;
    if (header_pending) {
      header_pending = false;
      return;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(options.delimiter, start);
      fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    const auto cols = static_cast<Index>(fields.size());
    if (width < 0) {
      width = cols;
      if (options.label_column >= width) {
        throw ParseError(Kind::Malformed, line_no,
                         "label column " + std::to_string(options.label_column) + " out of range");
      }
      if (width < 2) throw ParseError(Kind::Malformed, line_no, "need a label and at least one feature");
    } else if (cols != width) {
      throw ParseError(Kind::Malformed, line_no,
                       "expected " + std::to_string(width) + " fields, got " + std::to_string(cols));
    }
    for (Index c = 0; c < cols; ++c) {
      const auto v = detail::parse_double(fields[c]);
      if (!v) {
        throw ParseError(Kind::Malformed, line_no,
                         "column " + std::to_string(c + 1) + ": non-numeric cell '" +
                             std::string(detail::trim(fields[c])) + "'");
      }
      if (c == options.label_column) {
        labels.push_back(detail::coerce_label(*v));
      } else {
        cells.push_back(*v);
      }
    }
  });

  if (labels.empty()) throw ParseError(Kind::EmptyInput, 0, "no rows in CSV input");
  const auto n = static_cast<Index>(labels.size());
  const Index d = width - 1;
  Matrix x = Eigen::Map<const Matrix>(cells.data(), n, d);
  Vector y = Eigen::Map<const Vector>(labels.data(), n);
  return Dataset(std::move(x), std::move(y), Vector::Zero(n));
}

}  // namespace rsvm

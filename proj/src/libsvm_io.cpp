#include <algorithm>
#include <charconv>
#include <string>
#include <vector>

#include "rsvm/data.hpp"
#include "rsvm/errors.hpp"
#include "text_util.hpp"

namespace rsvm {

namespace {

struct SparseRow {
  double label;
  std::vector<std::pair<Index, double>> entries;
};

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, ptr);
}

}  // namespace

Dataset parse_libsvm(std::string_view text) {
  using Kind = ParseError::Kind;
  std::vector<SparseRow> rows;
  Index dim = 0;

  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = detail::split_ws(detail::trim(line));
    if (tokens.empty()) return;

    const auto label = detail::parse_double(tokens.front());
    if (!label) throw ParseError(Kind::Malformed, line_no, "bad label '" + std::string(tokens[0]) + "'");

    SparseRow row{detail::coerce_label(*label), {}};
    Index last = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(Kind::Malformed, line_no, "expected idx:val, got '" + std::string(tok) + "'");
      }
      const auto idx = detail::parse_int(tok.substr(0, colon));
      const auto val = detail::parse_double(tok.substr(colon + 1));
      if (!idx || *idx < 1) {
        throw ParseError(Kind::Malformed, line_no, "bad feature index in '" + std::string(tok) + "'");
      }
      if (!val) throw ParseError(Kind::Malformed, line_no, "bad feature value in '" + std::string(tok) + "'");
      if (*idx <= last) throw ParseError(Kind::Malformed, line_no, "feature indices must strictly increase");
      last = static_cast<Index>(*idx);
      row.entries.emplace_back(last - 1, *val);
    }
    dim = std::max(dim, last);
    rows.push_back(std::move(row));
  });

  if (rows.empty()) throw ParseError(Kind::EmptyInput, 0, "no samples in input");
  if (dim == 0) throw ParseError(Kind::Malformed, 1, "no features in input");

  const auto n = static_cast<Index>(rows.size());
  Matrix x = Matrix::Zero(n, dim);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    y[i] = rows[i].label;
    for (const auto& [j, v] : rows[i].entries) x(i, j) = v;
  }
  return Dataset(std::move(x), std::move(y), Vector::Zero(n));
}

std::string write_libsvm(const Dataset& ds) {
  const Matrix& x = ds.features();
  const Index last = ds.dim() - 1;
  const bool last_col_empty = (x.col(last).array() == 0.0).all();

  std::string out;
  for (Index i = 0; i < ds.size(); ++i) {
    out += ds.labels()[i] > 0 ? "+1" : "-1";
    for (Index j = 0; j < ds.dim(); ++j) {
      const bool force = (i == 0 && j == last && last_col_empty);
      if (x(i, j) == 0.0 && !force) continue;
      out += ' ';
      out += std::to_string(j + 1);
      out += ':';
      append_double(out, x(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace rsvm

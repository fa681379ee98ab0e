#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "batchsel/finite_sum.hpp"

namespace batchsel {

DatasetError::DatasetError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field.empty()) throw DatasetError("empty field", line);
  // from_chars rejects a leading '+', which some exporters write.
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DatasetError("cannot parse '" + std::string(field) + "' as a number", line);
  }
  return value;
}

std::vector<double> split_row(std::string_view text, Delimiter delimiter,
                              std::size_t line) {
  if (delimiter == Delimiter::Auto) {
    delimiter = text.find(',') != std::string_view::npos ? Delimiter::Comma
                                                         : Delimiter::Whitespace;
  }
  std::vector<double> out;
  if (delimiter == Delimiter::Comma) {
    std::size_t start = 0;
    while (true) {
      const auto pos = text.find(',', start);
      out.push_back(parse_field(text.substr(start, pos - start), line));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i) out.push_back(parse_field(text.substr(i, j - i), line));
      i = j;
    }
  }
  return out;
}

}  // namespace

Dataset parse_dataset(std::istream& in, Delimiter delimiter) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t line = 0;
  std::size_t width = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    auto values = split_row(text, delimiter, line);
    if (values.size() < 2) {
      throw DatasetError("need at least one feature and a label", line);
    }
    if (rows.empty()) {
      width = values.size();
    } else if (values.size() != width) {
      throw DatasetError("ragged row: expected " + std::to_string(width) +
                             " columns, found " + std::to_string(values.size()),
                         line);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DatasetError("dataset has no data rows", 0);

  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width - 1);
  data.features.resize(n, d);
  data.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) data.features(i, j) = row[static_cast<std::size_t>(j)];
    data.labels(i) = row.back();
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path, Delimiter delimiter) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open dataset file '" + path.string() + "'");
  return parse_dataset(in, delimiter);
}

}  // namespace batchsel

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace batchsel::report {

/// Shortest round-trip decimal form; independent of the global locale.
std::string format_double(double value);
/// Fixed-point with `digits` decimals, for plot coordinates.
std::string format_fixed(double value, int digits);

/// Comma-separated rows with '\n' terminators. Fields are written verbatim;
/// callers only pass numbers and plain identifiers.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(std::uint64_t value);
  CsvWriter& field(const std::optional<double>& value);  // empty when unset
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 480;
};

/// Static line chart with linear axes, ticks and a legend.
void write_line_chart_svg(std::ostream& out, const std::vector<Series>& series,
                          const ChartOptions& options);

}  // namespace batchsel::report

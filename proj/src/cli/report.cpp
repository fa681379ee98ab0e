#include "batchsel/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace batchsel::report {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double value, int digits) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, digits);
  if (ec != std::errc()) throw std::runtime_error("format_fixed failed");
  return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  for (const auto& h : header) field(h);
  end_row();
}

void CsvWriter::separator() {
  if (filled_ == columns_) throw std::logic_error("csv row has too many fields");
  if (filled_ > 0) out_ << ',';
  ++filled_;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  separator();
  out_ << text;
  return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::field(std::uint64_t value) {
  return field(std::string_view(std::to_string(value)));
}

CsvWriter& CsvWriter::field(const std::optional<double>& value) {
  return value ? field(*value) : field(std::string_view());
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv row has too few fields");
  out_ << '\n';
  filled_ = 0;
}

namespace {

// Rounds the span up to 1, 2 or 5 times a power of ten per tick.
double nice_step(double span, int target_ticks) {
  if (span <= 0) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

std::string tick_label(double v) {
  if (std::abs(v - std::round(v)) < 1e-9) return format_fixed(std::round(v), 0);
  return format_double(v);
}

}  // namespace

void write_line_chart_svg(std::ostream& out, const std::vector<Series>& series,
                          const ChartOptions& options) {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x_min = x_max = s.x[i];
        y_max = s.y[i];
        first = false;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  y_min = 0;
  if (x_max <= x_min) x_max = x_min + 1;
  if (y_max <= y_min) y_max = y_min + 1;

  const double left = 80, right = 20, top = 40, bottom = 60;
  const double w = options.width, h = options.height;
  const double plot_w = w - left - right, plot_h = h - top - bottom;
  auto px = [&](double v) { return left + (v - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double v) { return top + plot_h - (v - y_min) / (y_max - y_min) * plot_h; };
  auto f = [](double v) { return format_fixed(v, 2); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out << "<text x=\"" << f(w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << options.title << "</text>\n";
  }
  out << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << f(left) << "\" y1=\"" << f(top + plot_h) << "\" x2=\"" << f(left + plot_w)
      << "\" y2=\"" << f(top + plot_h) << "\"/>\n"
      << "<line x1=\"" << f(left) << "\" y1=\"" << f(top) << "\" x2=\"" << f(left) << "\" y2=\""
      << f(top + plot_h) << "\"/>\n</g>\n";

  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  const double xs = nice_step(x_max - x_min, 8);
  for (double v = std::ceil(x_min / xs) * xs; v <= x_max + 1e-9 * xs; v += xs) {
    out << "<line x1=\"" << f(px(v)) << "\" y1=\"" << f(top + plot_h) << "\" x2=\"" << f(px(v))
        << "\" y2=\"" << f(top + plot_h + 5) << "\" stroke=\"black\"/>"
        << "<text x=\"" << f(px(v)) << "\" y=\"" << f(top + plot_h + 18)
        << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
  }
  const double ys = nice_step(y_max - y_min, 6);
  for (double v = std::ceil(y_min / ys) * ys; v <= y_max + 1e-9 * ys; v += ys) {
    out << "<line x1=\"" << f(left - 5) << "\" y1=\"" << f(py(v)) << "\" x2=\"" << f(left)
        << "\" y2=\"" << f(py(v)) << "\" stroke=\"black\"/>"
        << "<text x=\"" << f(left - 8) << "\" y=\"" << f(py(v) + 4) << "\" text-anchor=\"end\">"
        << tick_label(v) << "</text>\n";
  }
  out << "</g>\n";

  out << "<text x=\"" << f(left + plot_w / 2) << "\" y=\"" << f(h - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << options.x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << f(top + plot_h / 2) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << f(top + plot_h / 2) << ")\">" << options.y_label << "</text>\n";

  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) out << ' ';
      out << f(px(s.x[i])) << ',' << f(py(s.y[i]));
    }
    out << "\"/>\n";
  }

  double ly = top + 16;
  for (const auto& s : series) {
    out << "<line x1=\"" << f(left + plot_w - 190) << "\" y1=\"" << f(ly) << "\" x2=\""
        << f(left + plot_w - 165) << "\" y2=\"" << f(ly) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << f(left + plot_w - 158) << "\" y=\"" << f(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";
}

}  // namespace batchsel::report

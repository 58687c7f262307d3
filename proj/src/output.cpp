#include "lensforge/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lensforge/emcore.hpp"

namespace lensforge {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// 1, 2 or 5 times a power of ten, giving roughly `target` intervals over `span`.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(open_for_write(path)), path_(path), columns_(header.size()) {
  for (const std::string& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(double value) { return cell(format_number(value)); }

CsvWriter& CsvWriter::cell(const std::string& value) {
  if (filled_ == columns_) throw std::logic_error("too many CSV cells in " + path_.string());
  if (filled_ > 0) out_ << ',';
  out_ << value;
  ++filled_;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("short CSV row in " + path_.string());
  out_ << '\n';
  filled_ = 0;
  if (!out_) throw std::runtime_error("write failed for " + path_.string());
}

void write_svg_line_chart(const std::filesystem::path& path, const LineChart& chart) {
  if (chart.x.size() != chart.y.size() || chart.x.empty()) {
    throw InvalidInput("line chart needs matching, non-empty series");
  }
  const double w = 640.0, h = 420.0;
  const double left = 70.0, right = 20.0, top = 40.0, bottom = 55.0;
  const double pw = w - left - right, ph = h - top - bottom;

  auto [xmin_it, xmax_it] = std::minmax_element(chart.x.begin(), chart.x.end());
  auto [ymin_it, ymax_it] = std::minmax_element(chart.y.begin(), chart.y.end());
  double x0 = *xmin_it, x1 = *xmax_it, y0 = *ymin_it, y1 = *ymax_it;
  if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const double ystep = nice_step(y1 - y0, 5);
  y0 = std::floor(y0 / ystep) * ystep;
  y1 = std::ceil(y1 / ystep) * ystep;
  const double xstep = nice_step(x1 - x0, 8);

  const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ofstream out = open_for_write(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(w) << "\" height=\""
      << fixed(h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fixed(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(chart.title) << "</text>\n";

  for (double y = y0; y <= y1 + 1e-9 * ystep; y += ystep) {
    out << "<line x1=\"" << fixed(left) << "\" x2=\"" << fixed(left + pw) << "\" y1=\""
        << fixed(py(y)) << "\" y2=\"" << fixed(py(y)) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(py(y) + 4)
        << "\" text-anchor=\"end\">" << format_number(std::round(y / ystep) * ystep) << "</text>\n";
  }
  for (double x = std::ceil(x0 / xstep) * xstep; x <= x1 + 1e-9 * xstep; x += xstep) {
    out << "<line x1=\"" << fixed(px(x)) << "\" x2=\"" << fixed(px(x)) << "\" y1=\"" << fixed(top)
        << "\" y2=\"" << fixed(top + ph) << "\" stroke=\"#eee\"/>\n";
    out << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(top + ph + 18)
        << "\" text-anchor=\"middle\">" << format_number(std::round(x / xstep) * xstep)
        << "</text>\n";
  }
  out << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw)
      << "\" height=\"" << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  out << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < chart.x.size(); ++i) {
    out << (i ? " " : "") << fixed(px(chart.x[i])) << ',' << fixed(py(chart.y[i]));
  }
  out << "\"/>\n";
  for (std::size_t i = 0; i < chart.x.size(); ++i) {
    out << "<circle cx=\"" << fixed(px(chart.x[i])) << "\" cy=\"" << fixed(py(chart.y[i]))
        << "\" r=\"3\" fill=\"#1f5fbf\"/>\n";
  }

  out << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(h - 12)
      << "\" text-anchor=\"middle\">" << xml_escape(chart.x_label) << "</text>\n";
  out << "<text transform=\"translate(18 " << fixed(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(chart.y_label) << "</text>\n";
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace lensforge

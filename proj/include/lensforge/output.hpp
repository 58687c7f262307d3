#pragma once

// CSV and SVG writers. CSV floats use six significant digits and LF line endings so
// repeated runs are byte-identical.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace lensforge {

std::string format_number(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(double value);
  CsvWriter& cell(const std::string& value);
  void end_row();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_svg_line_chart(const std::filesystem::path& path, const LineChart& chart);

}  // namespace lensforge

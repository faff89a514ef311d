#pragma once

#include <string>
#include <vector>

namespace coverpath {

// Numeric CSV loaded column-wise; non-numeric fields read as NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // parallel to header

  bool has(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
  size_t row_count() const { return columns.empty() ? 0 : columns[0].size(); }
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained SVG line chart (axes, ticks, legend); no external
// renderer involved, so tests can check the XML directly.
std::string svg_line_chart(const std::string& title,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<Series>& series,
                           int width = 760, int height = 460);

}  // namespace coverpath

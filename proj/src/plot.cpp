#include "coverpath/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace coverpath {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
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

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Round tick steps to 1/2/5 times a power of ten.
double nice_step(double span, int ticks) {
  if (span <= 0.0) return 1.0;
  double raw = span / ticks;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double frac = raw / mag;
  double step = frac <= 1.0 ? 1.0 : frac <= 2.0 ? 2.0 : frac <= 5.0 ? 5.0 : 10.0;
  return step * mag;
}

}  // namespace

bool CsvTable::has(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns[i];
  throw std::invalid_argument("csv: no column named '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("csv: empty input");
  for (const std::string& name : split_fields(line)) t.header.push_back(name);
  t.columns.resize(t.header.size());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != t.header.size())
      throw std::invalid_argument("csv: line " + std::to_string(lineno) +
                                  ": expected " +
                                  std::to_string(t.header.size()) +
                                  " fields, got " +
                                  std::to_string(fields.size()));
    for (size_t i = 0; i < fields.size(); ++i) {
      double v = std::numeric_limits<double>::quiet_NaN();
      try {
        size_t used = 0;
        v = std::stod(fields[i], &used);
        if (used != fields[i].size())
          v = std::numeric_limits<double>::quiet_NaN();
      } catch (const std::exception&) {
      }
      t.columns[i].push_back(v);
    }
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("csv: cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string svg_line_chart(const std::string& title,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<Series>& series, int width,
                           int height) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#ff7f0e", "#9467bd", "#8c564b"};
  const double ml = 64, mr = 18, mt = 40, mb = 52;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series)
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmin <= xmax)) { xmin = 0; xmax = 1; }
  if (!(ymin <= ymax)) { ymin = 0; ymax = 1; }
  if (xmax == xmin) { xmin -= 1; xmax += 1; }
  if (ymax == ymin) { ymin -= 1; ymax += 1; }

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
     << height << "\">\n"
     << "<rect width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n"
     << "<text x=\"" << width / 2.0 << "\" y=\"22\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">"
     << xml_escape(title) << "</text>\n";

  // gridlines + ticks
  double ys = nice_step(ymax - ymin, 5);
  for (double v = std::ceil(ymin / ys) * ys; v <= ymax + 1e-9 * ys; v += ys) {
    double y = py(v);
    os << "<line x1=\"" << ml << "\" y1=\"" << num(y) << "\" x2=\""
       << ml + pw << "\" y2=\"" << num(y)
       << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
       << "<text x=\"" << ml - 8 << "\" y=\"" << num(y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(v) << "</text>\n";
  }
  double xs = nice_step(xmax - xmin, 6);
  for (double v = std::ceil(xmin / xs) * xs; v <= xmax + 1e-9 * xs; v += xs) {
    double x = px(v);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << mt + ph << "\" x2=\""
       << num(x) << "\" y2=\"" << mt + ph + 5
       << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n"
       << "<text x=\"" << num(x) << "\" y=\"" << mt + ph + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(v) << "</text>\n";
  }

  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
     << "\" y2=\"" << mt + ph << "\" stroke=\"#444444\"/>\n"
     << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
     << "\" y2=\"" << mt + ph << "\" stroke=\"#444444\"/>\n"
     << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">"
     << xml_escape(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << mt + ph / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\" transform=\"rotate(-90 16 "
     << mt + ph / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kPalette[si % 6];
    std::ostringstream pts;
    int count = 0;
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
      ++count;
    }
    if (count == 1) {
      os << "<circle cx=\"" << pts.str().substr(0, pts.str().find(','))
         << "\" cy=\""
         << pts.str().substr(pts.str().find(',') + 1,
                             pts.str().find(' ') - pts.str().find(',') - 1)
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    } else if (count > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    }
    // legend swatch
    double lx = ml + pw - 150, ly = mt + 8 + 16.0 * si;
    os << "<rect x=\"" << lx << "\" y=\"" << ly - 9
       << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n"
       << "<text x=\"" << lx + 17 << "\" y=\"" << ly + 1
       << "\" font-family=\"sans-serif\" font-size=\"11\">"
       << xml_escape(s.label) << "</text>\n";
  }

  os << "</svg>\n";
  return os.str();
}

}  // namespace coverpath

#include "gwshift/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gwshift/errors.hpp"

namespace gwshift::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void CsvWriter::add_row(std::vector<std::string> cells) {
  if (cells.size() != header.size())
    throw ConfigError("CsvWriter: row width does not match header");
  rows.push_back(std::move(cells));
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("CsvWriter: cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
  }
}

namespace {

struct Axis {
  double lo = 0.0, hi = 1.0;
  double map(double v, double pix_lo, double pix_hi) const {
    const double t = (v - lo) / (hi - lo);
    return pix_lo + t * (pix_hi - pix_lo);
  }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * (hi - lo); t += step)
    ticks.push_back(t);
  return ticks;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// compact viridis approximation
void viridis(double t, int& r, int& g, int& b) {
  static const double anchors[9][3] = {
      {0.267, 0.005, 0.329}, {0.283, 0.141, 0.458}, {0.254, 0.265, 0.530},
      {0.207, 0.372, 0.553}, {0.164, 0.471, 0.558}, {0.128, 0.567, 0.551},
      {0.135, 0.659, 0.518}, {0.478, 0.821, 0.318}, {0.993, 0.906, 0.144}};
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * 8.0;
  const int i = std::min(7, int(pos));
  const double f = pos - i;
  r = int(255.0 * (anchors[i][0] + f * (anchors[i + 1][0] - anchors[i][0])));
  g = int(255.0 * (anchors[i][1] + f * (anchors[i + 1][1] - anchors[i][1])));
  b = int(255.0 * (anchors[i][2] + f * (anchors[i + 1][2] - anchors[i][2])));
}

constexpr int kMarginL = 72, kMarginR = 24, kMarginT = 36, kMarginB = 52;

void svg_open(std::ostream& out, int w, int h, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"14\">" << title << "</text>\n";
}

void svg_axes(std::ostream& out, int w, int h, const Axis& ax, const Axis& ay,
              const std::string& xl, const std::string& yl, bool log_y) {
  const double x0 = kMarginL, x1 = w - kMarginR, y0 = h - kMarginB, y1 = kMarginT;
  out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
      << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : nice_ticks(ax.lo, ax.hi)) {
    const double px = ax.map(t, x0, x1);
    out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 5
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px << "\" y=\"" << y0 + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(ay.lo, ay.hi)) {
    const double py = ay.map(t, y0, y1);
    out << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(log_y ? std::pow(10.0, t) : t) << "</text>\n";
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xl
      << "</text>\n"
      << "<text x=\"16\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\""
      << " transform=\"rotate(-90 16 " << (y0 + y1) / 2 << ")\">" << yl << "</text>\n";
}

}  // namespace

void write_line_plot(const std::filesystem::path& path, const LinePlotSpec& spec,
                     const std::vector<Series>& series) {
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) {
      xlo = std::min(xlo, v);
      xhi = std::max(xhi, v);
    }
    for (double v : s.y) {
      const double w = spec.log_y ? (v > 0 ? std::log10(v) : NAN) : v;
      if (std::isfinite(w)) {
        ylo = std::min(ylo, w);
        yhi = std::max(yhi, w);
      }
    }
  }
  if (!(xhi > xlo)) xhi = xlo + 1.0;
  if (!(yhi > ylo)) yhi = ylo + 1.0;
  const double pad = 0.05 * (yhi - ylo);
  Axis ax{xlo, xhi}, ay{ylo - pad, yhi + pad};

  std::ofstream out(path);
  if (!out) throw ConfigError("write_line_plot: cannot open " + path.string());
  const int w = spec.width, h = spec.height;
  const double x0 = kMarginL, x1 = w - kMarginR, y0 = h - kMarginB, y1 = kMarginT;
  svg_open(out, w, h, spec.title);
  svg_axes(out, w, h, ax, ay, spec.x_label, spec.y_label, spec.log_y);
  int legend_row = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double yv = spec.log_y ? (s.y[i] > 0 ? std::log10(s.y[i]) : NAN) : s.y[i];
      if (!std::isfinite(yv)) continue;
      out << ax.map(s.x[i], x0, x1) << "," << ay.map(yv, y0, y1) << " ";
    }
    out << "\"/>\n";
    if (!s.label.empty()) {
      const double ly = y1 + 16 + 16 * legend_row++;
      out << "<line x1=\"" << x1 - 150 << "\" y1=\"" << ly << "\" x2=\"" << x1 - 122 << "\" y2=\""
          << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
          << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
          << "<text x=\"" << x1 - 116 << "\" y=\"" << ly + 4
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
  }
  out << "</svg>\n";
}

void write_heatmap(const std::filesystem::path& path, const HeatmapSpec& spec) {
  const std::size_t nx = spec.x_edges.size() - 1, ny = spec.y_edges.size() - 1;
  if (spec.values.size() != nx * ny)
    throw ConfigError("write_heatmap: value count does not match grid");

  double vlo = 1e300, vhi = -1e300;
  for (double v : spec.values) {
    const double w = spec.log_scale ? (v > 0 ? std::log10(v) : NAN) : v;
    if (std::isfinite(w)) {
      vlo = std::min(vlo, w);
      vhi = std::max(vhi, w);
    }
  }
  if (!(vhi > vlo)) vhi = vlo + 1.0;

  Axis ax{spec.x_edges.front(), spec.x_edges.back()};
  Axis ay{spec.y_edges.front(), spec.y_edges.back()};
  std::ofstream out(path);
  if (!out) throw ConfigError("write_heatmap: cannot open " + path.string());
  const int w = spec.width, h = spec.height;
  const double x0 = kMarginL, x1 = w - kMarginR - 56, y0 = h - kMarginB, y1 = kMarginT;
  Axis axp = ax, ayp = ay;
  svg_open(out, w, h, spec.title);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double v = spec.values[i * ny + j];
      const double t = spec.log_scale ? (v > 0 ? std::log10(v) : NAN) : v;
      std::string fill = "#bbbbbb";
      if (std::isfinite(t)) {
        int r, g, b;
        viridis((t - vlo) / (vhi - vlo), r, g, b);
        char buf[10];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
        fill = buf;
      }
      const double px = axp.map(spec.x_edges[i], x0, x1);
      const double pw = axp.map(spec.x_edges[i + 1], x0, x1) - px;
      const double py = ayp.map(spec.y_edges[j + 1], y0, y1);
      const double ph = ayp.map(spec.y_edges[j], y0, y1) - py;
      out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << pw << "\" height=\"" << ph
          << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  svg_axes(out, int(x1 + kMarginR), h, axp, ayp, spec.x_label, spec.y_label, false);
  // colorbar
  const double cx = x1 + 18;
  for (int s = 0; s < 100; ++s) {
    int r, g, b;
    viridis(s / 99.0, r, g, b);
    char buf[10];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    const double py = y0 - (y0 - y1) * (s + 1) / 100.0;
    out << "<rect x=\"" << cx << "\" y=\"" << py << "\" width=\"14\" height=\""
        << (y0 - y1) / 100.0 + 0.5 << "\" fill=\"" << buf << "\"/>\n";
  }
  out << "<text x=\"" << cx + 18 << "\" y=\"" << y0 + 4
      << "\" font-family=\"sans-serif\" font-size=\"10\">" << tick_label(spec.log_scale ? std::pow(10.0, vlo) : vlo)
      << "</text>\n"
      << "<text x=\"" << cx + 18 << "\" y=\"" << y1 + 8
      << "\" font-family=\"sans-serif\" font-size=\"10\">" << tick_label(spec.log_scale ? std::pow(10.0, vhi) : vhi)
      << "</text>\n";
  for (const auto& m : spec.markers) {
    const double px = axp.map(m.x, x0, x1), py = ayp.map(m.y, y0, y1);
    out << "<path d=\"M " << px - 5 << " " << py << " L " << px + 5 << " " << py << " M " << px
        << " " << py - 5 << " L " << px << " " << py + 5
        << "\" stroke=\"" << m.color << "\" stroke-width=\"1.8\"/>\n";
    if (!m.label.empty())
      out << "<text x=\"" << px + 7 << "\" y=\"" << py - 6
          << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" << m.color << "\">"
          << m.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace gwshift::io

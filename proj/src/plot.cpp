#include "emtl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "emtl/errors.hpp"

namespace emtl {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void take(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
  double map(double v, double out_lo, double out_hi) const {
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
  }
};

void svg_header(std::ostringstream& svg, int width, int height) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
}

void svg_axes(std::ostringstream& svg, double x0, double y0, double x1, double y1,
              const Range& rx, const Range& ry, const std::string& xlabel,
              const std::string& ylabel) {
  svg << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << (x1 - x0) << "\" height=\""
      << (y0 - y1) << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << y0 + 28
      << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#222\">" << xlabel << "</text>\n";
  svg << "<text x=\"" << x0 - 34 << "\" y=\"" << (y0 + y1) / 2
      << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#222\" transform=\"rotate(-90 "
      << x0 - 34 << " " << (y0 + y1) / 2 << ")\">" << ylabel << "</text>\n";
  svg << "<text x=\"" << x0 << "\" y=\"" << y0 + 14 << "\" font-size=\"9\" fill=\"#666\">"
      << fmt(rx.lo) << "</text>\n";
  svg << "<text x=\"" << x1 << "\" y=\"" << y0 + 14
      << "\" font-size=\"9\" text-anchor=\"end\" fill=\"#666\">" << fmt(rx.hi) << "</text>\n";
  svg << "<text x=\"" << x0 - 4 << "\" y=\"" << y0
      << "\" font-size=\"9\" text-anchor=\"end\" fill=\"#666\">" << fmt(ry.lo) << "</text>\n";
  svg << "<text x=\"" << x0 - 4 << "\" y=\"" << y1 + 8
      << "\" font-size=\"9\" text-anchor=\"end\" fill=\"#666\">" << fmt(ry.hi) << "</text>\n";
}

const std::vector<std::string>& series_palette() {
  static const std::vector<std::string> palette = {"#1f77b4", "#d62728", "#2ca02c",
                                                   "#9467bd", "#ff7f0e", "#8c564b"};
  return palette;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot file: " + path);
  out << content;
}

}  // namespace

void write_scatter_csv(const LegitimacyEmotionViews& views, const EmotionScheme& scheme,
                       const std::string& path) {
  (void)scheme;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scatter file: " + path);
  out << "id,label,emotion,pc1,pc2,pc3\n";
  for (const LegitimacyView* view : {&views.view0, &views.view1})
    for (const ViewPoint& p : view->points)
      out << p.id << "," << view->label << "," << p.emotion << "," << fmt6(p.pc[0]) << ","
          << fmt6(p.pc[1]) << "," << fmt6(p.pc[2]) << "\n";
}

void write_scatter_svg(const LegitimacyView& view, const EmotionScheme& scheme,
                       const std::string& title, const std::string& path) {
  if (view.points.empty()) throw InvalidInput("write_scatter_svg: empty view");

  const int W = 980, H = 470;
  Range r1, r2, r3;
  for (const ViewPoint& p : view.points) {
    r1.take(p.pc[0]);
    r2.take(p.pc[1]);
    r3.take(p.pc[2]);
  }
  r1.pad();
  r2.pad();
  r3.pad();

  std::ostringstream svg;
  svg_header(svg, W, H);
  svg << "<text x=\"" << W / 2 << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\" "
      << "fill=\"#111\">" << title << "</text>\n";

  struct Panel {
    double x0, y0, x1, y1;
    const Range* ry;
    int pc_y;
    const char* ylabel;
  };
  const Panel panels[2] = {{60, 410, 420, 50, &r2, 1, "PC2"}, {540, 410, 900, 50, &r3, 2, "PC3"}};

  for (const Panel& panel : panels) {
    svg_axes(svg, panel.x0, panel.y0, panel.x1, panel.y1, r1, *panel.ry, "PC1", panel.ylabel);
    for (const ViewPoint& p : view.points) {
      double cx = r1.map(p.pc[0], panel.x0, panel.x1);
      double cy = panel.ry->map(p.pc[static_cast<std::size_t>(panel.pc_y)], panel.y0, panel.y1);
      const std::string& color =
          emotion_color_map().at(scheme.classes[static_cast<std::size_t>(p.emotion)]);
      svg << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"3\" fill=\"" << color
          << "\" fill-opacity=\"0.75\"/>\n";
    }
  }

  // legend with per-class counts
  double ly = 60;
  for (int c = 0; c < scheme.n(); ++c) {
    const std::string& cls = scheme.classes[static_cast<std::size_t>(c)];
    svg << "<circle cx=\"918\" cy=\"" << ly << "\" r=\"4\" fill=\"" << emotion_color_map().at(cls)
        << "\"/>\n"
        << "<text x=\"928\" y=\"" << ly + 4 << "\" font-size=\"10\" fill=\"#222\">" << cls << " ("
        << view.emotion_histogram[static_cast<std::size_t>(c)] << ")</text>\n";
    ly += 18;
  }
  svg << "</svg>\n";
  write_file(path, svg.str());
}

void write_sweep_svg(const std::vector<SweepSeries>& series, const std::string& path) {
  if (series.empty()) throw InvalidInput("write_sweep_svg: no series");
  for (const SweepSeries& s : series)
    if (s.points.empty()) throw InvalidInput("write_sweep_svg: empty series \"" + s.name + "\"");

  const int W = 720, H = 440;
  const double x0 = 70, y0 = 380, x1 = 680, y1 = 50;
  Range rx, ry;
  for (const SweepSeries& s : series)
    for (auto [a, v] : s.points) {
      rx.take(a);
      ry.take(v);
    }
  rx.pad();
  ry.pad();

  std::ostringstream svg;
  svg_header(svg, W, H);
  svg << "<text x=\"" << W / 2 << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\" "
      << "fill=\"#111\">accuracy vs alpha</text>\n";
  svg_axes(svg, x0, y0, x1, y1, rx, ry, "alpha", "accuracy");

  for (std::size_t si = 0; si < series.size(); ++si) {
    const std::string& color = series_palette()[si % series_palette().size()];
    std::ostringstream poly;
    for (auto [a, v] : series[si].points)
      poly << fmt(rx.map(a, x0, x1)) << "," << fmt(ry.map(v, y0, y1)) << " ";
    svg << "<polyline points=\"" << poly.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    for (auto [a, v] : series[si].points)
      svg << "<circle cx=\"" << fmt(rx.map(a, x0, x1)) << "\" cy=\"" << fmt(ry.map(v, y0, y1))
          << "\" r=\"3.2\" fill=\"" << color << "\"/>\n";
    double ly = 60 + 18 * static_cast<double>(si);
    svg << "<rect x=\"590\" y=\"" << ly - 8 << "\" width=\"12\" height=\"4\" fill=\"" << color
        << "\"/>\n"
        << "<text x=\"607\" y=\"" << ly << "\" font-size=\"10\" fill=\"#222\">" << series[si].name
        << "</text>\n";
  }
  svg << "</svg>\n";
  write_file(path, svg.str());
}

}  // namespace emtl

#include "levybsde/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace levybsde {

namespace {

constexpr double kW = 720, kH = 480;
constexpr double kL = 70, kR = 24, kTp = 44, kB = 56;  // margins

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return std::string(buf);
}

struct Series {
  std::string name;
  std::string color;
  bool markers = false;
  std::vector<double> x, y;       // log2 coordinates
  std::vector<double> ylo, yhi;   // optional whisker ends (log2)
};

class LogLogCanvas {
 public:
  void add(Series s) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin_ = std::min(xmin_, s.x[i]); xmax_ = std::max(xmax_, s.x[i]);
      double lo = s.ylo.empty() ? s.y[i] : s.ylo[i];
      double hi = s.yhi.empty() ? s.y[i] : s.yhi[i];
      ymin_ = std::min(ymin_, lo); ymax_ = std::max(ymax_, hi);
    }
    series_.push_back(std::move(s));
  }

  std::string render(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel) const {
    double x0 = xmin_, x1 = xmax_, y0 = ymin_, y1 = ymax_;
    if (!(x0 < x1)) { x0 -= 1; x1 += 1; }
    if (!(y0 < y1)) { y0 -= 1; y1 += 1; }
    const double xpad = 0.04 * (x1 - x0), ypad = 0.08 * (y1 - y0);
    x0 -= xpad; x1 += xpad; y0 -= ypad; y1 += ypad;

    auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
    auto py = [&](double y) { return kH - kB - (y - y0) / (y1 - y0) * (kH - kTp - kB); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kW, "%.0f") +
         "\" height=\"" + fmt(kH, "%.0f") + "\" viewBox=\"0 0 " +
         fmt(kW, "%.0f") + " " + fmt(kH, "%.0f") + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s += "<text x=\"" + fmt(kW / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"15\" fill=\"#111\">" + title +
         "</text>\n";

    // Gridlines and ticks at integer log2 values (thinned to <= 12 per axis).
    const int xstep = std::max(1, (int)std::ceil((x1 - x0) / 12.0));
    const int ystep = std::max(1, (int)std::ceil((y1 - y0) / 12.0));
    for (int t = (int)std::ceil(x0); t <= (int)std::floor(x1); t += xstep) {
      s += "<line x1=\"" + fmt(px(t)) + "\" y1=\"" + fmt(py(y0)) + "\" x2=\"" +
           fmt(px(t)) + "\" y2=\"" + fmt(py(y1)) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
      s += "<text x=\"" + fmt(px(t)) + "\" y=\"" + fmt(kH - kB + 18) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\""
           " fill=\"#333\">" + std::to_string(t) + "</text>\n";
    }
    for (int t = (int)std::ceil(y0); t <= (int)std::floor(y1); t += ystep) {
      s += "<line x1=\"" + fmt(px(x0)) + "\" y1=\"" + fmt(py(t)) + "\" x2=\"" +
           fmt(px(x1)) + "\" y2=\"" + fmt(py(t)) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
      s += "<text x=\"" + fmt(kL - 8) + "\" y=\"" + fmt(py(t) + 4) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\""
           " fill=\"#333\">" + std::to_string(t) + "</text>\n";
    }
    // Axes.
    s += "<line x1=\"" + fmt(kL) + "\" y1=\"" + fmt(kH - kB) + "\" x2=\"" +
         fmt(kW - kR) + "\" y2=\"" + fmt(kH - kB) +
         "\" stroke=\"#111\" stroke-width=\"1.5\"/>\n";
    s += "<line x1=\"" + fmt(kL) + "\" y1=\"" + fmt(kTp) + "\" x2=\"" + fmt(kL) +
         "\" y2=\"" + fmt(kH - kB) + "\" stroke=\"#111\" stroke-width=\"1.5\"/>\n";
    s += "<text x=\"" + fmt((kL + kW - kR) / 2) + "\" y=\"" + fmt(kH - 14) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\""
         " fill=\"#111\">" + xlabel + "</text>\n";
    s += "<text x=\"18\" y=\"" + fmt((kTp + kH - kB) / 2) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\""
         " fill=\"#111\" transform=\"rotate(-90 18 " +
         fmt((kTp + kH - kB) / 2) + ")\">" + ylabel + "</text>\n";

    // Series.
    double ly = kTp + 14;
    for (const auto& sr : series_) {
      std::string pts;
      for (std::size_t i = 0; i < sr.x.size(); ++i)
        pts += fmt(px(sr.x[i])) + "," + fmt(py(sr.y[i])) + " ";
      s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
           sr.color + "\" stroke-width=\"2\"/>\n";
      if (!sr.ylo.empty()) {
        for (std::size_t i = 0; i < sr.x.size(); ++i) {
          if (sr.ylo[i] == sr.yhi[i]) continue;
          s += "<line x1=\"" + fmt(px(sr.x[i])) + "\" y1=\"" +
               fmt(py(sr.ylo[i])) + "\" x2=\"" + fmt(px(sr.x[i])) + "\" y2=\"" +
               fmt(py(sr.yhi[i])) + "\" stroke=\"" + sr.color +
               "\" stroke-width=\"1\"/>\n";
        }
      }
      if (sr.markers)
        for (std::size_t i = 0; i < sr.x.size(); ++i)
          s += "<circle cx=\"" + fmt(px(sr.x[i])) + "\" cy=\"" +
               fmt(py(sr.y[i])) + "\" r=\"3.5\" fill=\"" + sr.color + "\"/>\n";
      // Legend entry.
      s += "<line x1=\"" + fmt(kW - kR - 240) + "\" y1=\"" + fmt(ly - 4) +
           "\" x2=\"" + fmt(kW - kR - 216) + "\" y2=\"" + fmt(ly - 4) +
           "\" stroke=\"" + sr.color + "\" stroke-width=\"2\"/>\n";
      s += "<text x=\"" + fmt(kW - kR - 210) + "\" y=\"" + fmt(ly) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"#111\">" +
           sr.name + "</text>\n";
      ly += 16;
    }
    s += "</svg>\n";
    return s;
  }

 private:
  std::vector<Series> series_;
  double xmin_ = std::numeric_limits<double>::infinity();
  double xmax_ = -std::numeric_limits<double>::infinity();
  double ymin_ = std::numeric_limits<double>::infinity();
  double ymax_ = -std::numeric_limits<double>::infinity();
};

}  // namespace

std::string svg_rate_plot(const RateReport& rep, const std::string& title) {
  LogLogCanvas canvas;
  Series meas{"measured, fit slope " + fmt(rep.fit.slope), "#b03030", true,
              {}, {}, {}, {}};
  Series bound{"bound curve, slope " + fmt(rep.theory_slope), "#3050b0", false,
               {}, {}, {}, {}};
  for (const auto& lv : rep.levels) {
    if (lv.error > 0 && lv.n > 0) {
      meas.x.push_back(std::log2(lv.n));
      meas.y.push_back(std::log2(lv.error));
      const double lo = std::max(lv.error - 3 * lv.se, lv.error / 16);
      meas.ylo.push_back(std::log2(lo));
      meas.yhi.push_back(std::log2(lv.error + 3 * lv.se));
    }
    if (lv.bound > 0 && lv.n > 0) {
      bound.x.push_back(std::log2(lv.n));
      bound.y.push_back(std::log2(lv.bound));
    }
  }
  canvas.add(std::move(meas));
  canvas.add(std::move(bound));
  return canvas.render(title, "log2 n", "log2 error");
}

std::string svg_bracket_plot(const std::vector<LowerBoundReport>& rows,
                             const std::string& title) {
  LogLogCanvas canvas;
  Series lower{"analytic lower bound", "#3050b0", true, {}, {}, {}, {}};
  Series upper{"coupled upper estimate", "#b03030", true, {}, {}, {}, {}};
  for (const auto& r : rows) {
    if (!(r.n > 0) || !std::isfinite(r.n)) continue;
    if (r.lower > 0) {
      lower.x.push_back(std::log2(r.n));
      lower.y.push_back(std::log2(r.lower));
    }
    if (r.coupled_upper > 0) {
      upper.x.push_back(std::log2(r.n));
      upper.y.push_back(std::log2(r.coupled_upper));
    }
  }
  canvas.add(std::move(lower));
  canvas.add(std::move(upper));
  return canvas.render(title, "log2 n", "log2 distance");
}

}  // namespace levybsde

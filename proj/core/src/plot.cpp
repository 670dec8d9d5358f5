#include <cstdio>
#include <fstream>
#include <string>

#include "sypa/error.hpp"
#include "sypa/evaluation.hpp"

namespace sypa {

namespace {

constexpr double kSize = 640.0;    // canvas edge
constexpr double kMargin = 64.0;   // axes inset
constexpr double kPlot = kSize - 2.0 * kMargin;

double px(double recall) { return kMargin + recall * kPlot; }
double py(double precision) { return kSize - kMargin - precision * kPlot; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void pr_scatter(const std::vector<PrPoint>& points, const std::filesystem::path& svg_path) {
  for (const PrPoint& p : points) {
    if (p.precision < 0.0 || p.precision > 1.0 || p.recall < 0.0 || p.recall > 1.0)
      fail("bad params", "precision and recall must lie in [0, 1]");
  }

  std::ofstream f(svg_path);
  if (!f) fail("io", "cannot write plot: " + svg_path.string());
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\""
    << kSize << "\" viewBox=\"0 0 " << kSize << " " << kSize << "\">\n";
  f << "<rect width=\"" << kSize << "\" height=\"" << kSize << "\" fill=\"white\"/>\n";

  // F1 level sets: p = F r / (2r - F), drawn where both coordinates are valid.
  for (int level = 1; level <= 9; ++level) {
    const double f1 = level / 10.0;
    f << "<polyline fill=\"none\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\" points=\"";
    bool first = true;
    for (int i = 0; i <= 200; ++i) {
      const double r = i / 200.0;
      if (2.0 * r - f1 <= 1e-9) continue;
      const double p = f1 * r / (2.0 * r - f1);
      if (p < 0.0 || p > 1.0) continue;
      if (!first) f << ' ';
      f << num(px(r)) << ',' << num(py(p));
      first = false;
    }
    f << "\"/>\n";
    // Label the curve where it crosses p = r = f1/(2 - f1)... which is f1 itself.
    f << "<text x=\"" << num(px(f1) + 4) << "\" y=\"" << num(py(f1) - 4)
      << "\" font-size=\"10\" fill=\"#999999\">F1=" << num(f1) << "</text>\n";
  }

  // Axes.
  f << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(kSize - kMargin) << "\" x2=\""
    << num(kSize - kMargin) << "\" y2=\"" << num(kSize - kMargin)
    << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(kSize - kMargin) << "\" x2=\""
    << num(kMargin) << "\" y2=\"" << num(kMargin) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 10; ++i) {
    const double v = i / 10.0;
    f << "<text x=\"" << num(px(v) - 8) << "\" y=\"" << num(kSize - kMargin + 18)
      << "\" font-size=\"11\">" << num(v) << "</text>\n";
    f << "<text x=\"" << num(kMargin - 34) << "\" y=\"" << num(py(v) + 4)
      << "\" font-size=\"11\">" << num(v) << "</text>\n";
  }
  f << "<text x=\"" << num(kSize / 2 - 24) << "\" y=\"" << num(kSize - 18)
    << "\" font-size=\"13\">recall</text>\n";
  f << "<text x=\"18\" y=\"" << num(kSize / 2)
    << "\" font-size=\"13\" transform=\"rotate(-90 18 " << num(kSize / 2)
    << ")\">precision</text>\n";

  // Data points.
  for (const PrPoint& p : points) {
    f << "<circle cx=\"" << num(px(p.recall)) << "\" cy=\"" << num(py(p.precision))
      << "\" r=\"4\" fill=\"#d62728\"/>\n";
    if (!p.label.empty()) {
      f << "<text x=\"" << num(px(p.recall) + 6) << "\" y=\"" << num(py(p.precision) - 6)
        << "\" font-size=\"11\">" << p.label << "</text>\n";
    }
  }
  f << "</svg>\n";
  if (!f) fail("io", "failed writing plot: " + svg_path.string());
}

}  // namespace sypa

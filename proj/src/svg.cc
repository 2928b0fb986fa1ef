// Copyright (c) 2026 The prosodiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prosodiff/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace prosodiff {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(kWidth) +
         "\" height=\"" + Num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + Num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         Escape(title) + "</text>\n";
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void Add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void Finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string Axes(const Range& y, const std::string& y_label) {
  const double plot_h = kHeight - kTop - kBottom;
  std::string out;
  out += "<line x1=\"" + Num(kLeft) + "\" y1=\"" + Num(kTop) + "\" x2=\"" + Num(kLeft) +
         "\" y2=\"" + Num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + Num(kLeft) + "\" y1=\"" + Num(kHeight - kBottom) + "\" x2=\"" +
         Num(kWidth - kRight) + "\" y2=\"" + Num(kHeight - kBottom) +
         "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / 4.0;
    const double py = kHeight - kBottom - plot_h * i / 4.0;
    out += "<text x=\"" + Num(kLeft - 6) + "\" y=\"" + Num(py + 4) +
           "\" text-anchor=\"end\">" + Label(v) + "</text>\n";
  }
  out += "<text x=\"16\" y=\"" + Num(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + Num(kTop + plot_h / 2) +
         ")\">" + Escape(y_label) + "</text>\n";
  return out;
}

std::string Legend(const std::vector<PlotSeries>& series) {
  std::string out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    out += "<rect x=\"" + Num(kWidth - kRight + 12) + "\" y=\"" + Num(y - 9) +
           "\" width=\"12\" height=\"12\" fill=\"" + kPalette[i % 6] + "\"/>\n";
    out += "<text x=\"" + Num(kWidth - kRight + 30) + "\" y=\"" + Num(y + 2) + "\">" +
           Escape(series[i].name) + "</text>\n";
  }
  return out;
}

}  // namespace

std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series) {
  Range x, y;
  for (const PlotSeries& s : series) {
    if (s.x.size() != s.y.size()) {
      throw std::invalid_argument("plot series '" + s.name + "' has unequal x and y");
    }
    for (double v : s.x) x.Add(v);
    for (double v : s.y) y.Add(v);
  }
  x.Finish();
  y.Finish();
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + plot_w * (v - x.lo) / (x.hi - x.lo); };
  auto py = [&](double v) {
    return kHeight - kBottom - plot_h * (v - y.lo) / (y.hi - y.lo);
  };
  std::string out = Header(title) + Axes(y, y_label);
  for (int i = 0; i <= 4; ++i) {
    const double v = x.lo + (x.hi - x.lo) * i / 4.0;
    out += "<text x=\"" + Num(px(v)) + "\" y=\"" + Num(kHeight - kBottom + 16) +
           "\" text-anchor=\"middle\">" + Label(v) + "</text>\n";
  }
  out += "<text x=\"" + Num(kLeft + plot_w / 2) + "\" y=\"" + Num(kHeight - 10) +
         "\" text-anchor=\"middle\">" + Escape(x_label) + "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::string points;
    for (std::size_t k = 0; k < series[i].x.size(); ++k) {
      if (!std::isfinite(series[i].y[k])) continue;
      points += Num(px(series[i].x[k])) + "," + Num(py(series[i].y[k])) + " ";
    }
    out += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" +
           std::string(kPalette[i % 6]) + "\" points=\"" + points + "\"/>\n";
  }
  return out + Legend(series) + "</svg>\n";
}

std::string BarChartSvg(const std::string& title,
                        const std::vector<std::string>& categories,
                        const std::vector<PlotSeries>& series) {
  Range y;
  y.Add(0.0);
  for (const PlotSeries& s : series) {
    if (s.y.size() != categories.size()) {
      throw std::invalid_argument("bar series '" + s.name + "' has " +
                                  std::to_string(s.y.size()) + " values for " +
                                  std::to_string(categories.size()) + " categories");
    }
    for (double v : s.y) y.Add(v);
  }
  y.Finish();
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double group_w = plot_w / static_cast<double>(std::max<std::size_t>(1, categories.size()));
  const double bar_w =
      0.8 * group_w / static_cast<double>(std::max<std::size_t>(1, series.size()));
  auto py = [&](double v) {
    return kHeight - kBottom - plot_h * (v - y.lo) / (y.hi - y.lo);
  };
  std::string out = Header(title) + Axes(y, "value");
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + group_w * static_cast<double>(c);
    out += "<text x=\"" + Num(gx + group_w / 2) + "\" y=\"" +
           Num(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" +
           Escape(categories[c]) + "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double v = series[i].y[c];
      const double top = py(std::max(v, 0.0));
      const double bottom = py(std::min(v, 0.0));
      out += "<rect x=\"" + Num(gx + 0.1 * group_w + bar_w * static_cast<double>(i)) +
             "\" y=\"" + Num(top) + "\" width=\"" + Num(bar_w) + "\" height=\"" +
             Num(bottom - top) + "\" fill=\"" + kPalette[i % 6] + "\"/>\n";
    }
  }
  return out + Legend(series) + "</svg>\n";
}

}  // namespace prosodiff

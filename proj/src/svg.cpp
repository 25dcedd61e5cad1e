// Copyright 2026 The asreval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asreval/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace asreval::svg {
namespace {

constexpr double kWidthPerGroup = 90.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kPlotHeight = 300.0;
constexpr double kBottom = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string boxplot(const std::vector<stats::BoxplotSummary>& groups, const std::string& title,
                    const std::string& y_label) {
  double lo = 0.0;
  double hi = 1.0;
  for (const auto& g : groups) {
    lo = std::min({lo, g.whisker_low});
    hi = std::max({hi, g.whisker_high});
    for (double o : g.outliers) {
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double width = kLeft + kRight + kWidthPerGroup * static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  const double height = kTop + kPlotHeight + kBottom;
  auto y_of = [&](double v) { return kTop + kPlotHeight * (hi - v) / (hi - lo); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  s += "  <title>" + escape_xml(title) + "</title>\n";
  s += "  <rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
  s += "  <text x=\"" + num(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
       escape_xml(title) + "</text>\n";
  // Axis with five ticks.
  s += "  <g class=\"axis\" stroke=\"black\" font-family=\"sans-serif\" font-size=\"10\">\n";
  s += "    <line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kTop + kPlotHeight) + "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double v = lo + (hi - lo) * i / 4.0;
    double y = y_of(v);
    s += "    <line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(y) + "\"/>\n";
    s += "    <text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 3) + "\" text-anchor=\"end\" stroke=\"none\">" + num(v) +
         "</text>\n";
  }
  s += "    <text transform=\"translate(16," + num(kTop + kPlotHeight / 2) +
       ") rotate(-90)\" text-anchor=\"middle\" stroke=\"none\">" + escape_xml(y_label) + "</text>\n";
  s += "  </g>\n";

  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double cx = kLeft + kWidthPerGroup * (static_cast<double>(i) + 0.5);
    const double half = kWidthPerGroup * 0.3;
    s += "  <g class=\"box\" data-group=\"" + escape_xml(g.group) + "\" data-n=\"" + std::to_string(g.n) +
         "\" stroke=\"black\" fill=\"none\">\n";
    s += "    <line x1=\"" + num(cx) + "\" y1=\"" + num(y_of(g.whisker_high)) + "\" x2=\"" + num(cx) + "\" y2=\"" +
         num(y_of(g.q3)) + "\"/>\n";
    s += "    <line x1=\"" + num(cx) + "\" y1=\"" + num(y_of(g.q1)) + "\" x2=\"" + num(cx) + "\" y2=\"" +
         num(y_of(g.whisker_low)) + "\"/>\n";
    for (double w : {g.whisker_low, g.whisker_high}) {
      s += "    <line x1=\"" + num(cx - half / 2) + "\" y1=\"" + num(y_of(w)) + "\" x2=\"" + num(cx + half / 2) +
           "\" y2=\"" + num(y_of(w)) + "\"/>\n";
    }
    s += "    <rect x=\"" + num(cx - half) + "\" y=\"" + num(y_of(g.q3)) + "\" width=\"" + num(2 * half) +
         "\" height=\"" + num(std::max(0.0, y_of(g.q1) - y_of(g.q3))) + "\" fill=\"#9ecae1\"/>\n";
    s += "    <line x1=\"" + num(cx - half) + "\" y1=\"" + num(y_of(g.median)) + "\" x2=\"" + num(cx + half) +
         "\" y2=\"" + num(y_of(g.median)) + "\" stroke-width=\"2\"/>\n";
    for (double o : g.outliers) {
      s += "    <circle cx=\"" + num(cx) + "\" cy=\"" + num(y_of(o)) + "\" r=\"2\"/>\n";
    }
    s += "    <text x=\"" + num(cx) + "\" y=\"" + num(kTop + kPlotHeight + 16) +
         "\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\" font-family=\"sans-serif\" font-size=\"11\">" +
         escape_xml(g.group) + "</text>\n";
    s += "    <text x=\"" + num(cx) + "\" y=\"" + num(kTop + kPlotHeight + 30) +
         "\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\" font-family=\"sans-serif\" font-size=\"9\">n=" +
         std::to_string(g.n) + "</text>\n";
    s += "  </g>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace asreval::svg

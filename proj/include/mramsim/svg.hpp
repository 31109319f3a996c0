#pragma once

// Dependency-free SVG histogram writer. Output is structural and diffable:
// one <rect> per bin plus axes, labels, and a sample-count annotation.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace mramsim {

struct HistogramOptions {
  int bins = 40;
  int width = 640;
  int height = 400;
  std::string title;
  std::string x_label;
};

inline std::string svg_histogram(const std::vector<double>& values, const HistogramOptions& opt) {
  if (values.empty()) throw std::invalid_argument("histogram needs at least one value");
  if (opt.bins < 1) throw std::invalid_argument("histogram needs at least one bin");

  double lo = values.front(), hi = values.front();
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<int> counts(opt.bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * opt.bins);
    if (b < 0) b = 0;
    if (b >= opt.bins) b = opt.bins - 1;
    ++counts[b];
  }
  const int peak = *std::max_element(counts.begin(), counts.end());

  const double ml = 60, mr = 20, mt = 40, mb = 50; // margins
  const double pw = opt.width - ml - mr;
  const double ph = opt.height - mt - mb;

  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    os << "<text x=\"" << opt.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">" << opt.title << "</text>\n";

  for (int b = 0; b < opt.bins; ++b) {
    const double x = ml + pw * b / opt.bins;
    const double w = pw / opt.bins;
    const double h = peak > 0 ? ph * counts[b] / peak : 0.0;
    os << "<rect class=\"bin\" x=\"" << num(x) << "\" y=\"" << num(mt + ph - h) << "\" width=\""
       << num(w) << "\" height=\"" << num(h) << "\" fill=\"#4878a8\" stroke=\"black\" "
          "stroke-width=\"0.5\"/>\n";
  }

  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
     << mt + ph << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
     << "\" stroke=\"black\"/>\n";

  // axis labels and ticks
  os << "<text x=\"" << ml << "\" y=\"" << opt.height - 14
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << num(lo)
     << "</text>\n";
  os << "<text x=\"" << ml + pw << "\" y=\"" << opt.height - 14
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << num(hi)
     << "</text>\n";
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << opt.height - 14
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
     << (opt.x_label.empty() ? "value" : opt.x_label) << "</text>\n";
  os << "<text x=\"" << ml - 8 << "\" y=\"" << mt + 4
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << peak
     << "</text>\n";
  os << "<text class=\"count\" x=\"" << ml + pw << "\" y=\"" << mt - 8
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">n=" << values.size()
     << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

} // namespace mramsim

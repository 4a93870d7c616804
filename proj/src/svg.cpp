#include "linkrl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace linkrl::svg {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 170;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string header(const std::string& title) {
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
       "\" height=\"" + std::to_string(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(kWidth / 2) +
       "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + title +
       "</text>\n";
  return s;
}

std::string axis_labels(const std::string& x_label, const std::string& y_label) {
  std::string s;
  s += "<text x=\"" + std::to_string((kMarginLeft + kWidth - kMarginRight) / 2) + "\" y=\"" +
       std::to_string(kHeight - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x_label +
       "</text>\n";
  s += "<text x=\"18\" y=\"" + std::to_string((kMarginTop + kHeight - kMarginBottom) / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 "
       "18 " +
       std::to_string((kMarginTop + kHeight - kMarginBottom) / 2) + ")\">" + y_label +
       "</text>\n";
  return s;
}

std::string legend(const std::vector<std::string>& labels) {
  std::string s;
  const int x = kWidth - kMarginRight + 16;
  int y = kMarginTop + 10;
  for (size_t i = 0; i < labels.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    s += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y - 9) +
         "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    s += "<text x=\"" + std::to_string(x + 18) + "\" y=\"" + std::to_string(y + 2) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + labels[i] + "</text>\n";
    y += 18;
  }
  return s;
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) {
    return kHeight - kMarginBottom - (y - ymin) / (ymax - ymin) * plot_h;
  };

  std::string out = header(title);
  out += "<rect x=\"" + std::to_string(kMarginLeft) + "\" y=\"" + std::to_string(kMarginTop) +
         "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    out += "<text x=\"" + num(px(xv)) + "\" y=\"" + std::to_string(kHeight - kMarginBottom + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + num(xv) +
           "</text>\n";
    out += "<text x=\"" + std::to_string(kMarginLeft - 6) + "\" y=\"" + num(py(yv) + 3) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(yv) +
           "</text>\n";
  }

  std::vector<std::string> labels;
  for (size_t i = 0; i < series.size(); ++i) {
    labels.push_back(series[i].label);
    if (series[i].points.empty()) continue;
    std::string pts;
    for (auto [x, y] : series[i].points) {
      pts += num(px(x)) + "," + num(py(y)) + " ";
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
           kPalette[i % std::size(kPalette)] + "\" stroke-width=\"1.5\"/>\n";
  }
  out += legend(labels);
  out += axis_labels(x_label, y_label);
  out += "</svg>\n";
  return out;
}

std::string bar_chart(const std::vector<std::string>& categories,
                      const std::vector<std::pair<std::string, std::vector<double>>>& series,
                      const std::string& title, const std::string& y_label) {
  for (const auto& s : series) {
    if (s.second.size() != categories.size()) {
      throw std::invalid_argument("bar chart series length does not match category count");
    }
  }
  double ymax = 0.0;
  for (const auto& s : series) {
    for (double v : s.second) ymax = std::max(ymax, v);
  }
  if (ymax <= 0.0) ymax = 1.0;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const double group_w = plot_w / static_cast<double>(categories.size());
  const double bar_w = group_w / (static_cast<double>(series.size()) + 0.5);

  std::string out = header(title);
  out += "<rect x=\"" + std::to_string(kMarginLeft) + "\" y=\"" + std::to_string(kMarginTop) +
         "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = ymax * i / 4.0;
    const double ypx = kHeight - kMarginBottom - yv / ymax * plot_h;
    out += "<text x=\"" + std::to_string(kMarginLeft - 6) + "\" y=\"" + num(ypx + 3) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(yv) +
           "</text>\n";
  }

  std::vector<std::string> labels;
  for (size_t si = 0; si < series.size(); ++si) {
    labels.push_back(series[si].first);
    for (size_t c = 0; c < categories.size(); ++c) {
      const double v = series[si].second[c];
      const double h = v / ymax * plot_h;
      const double x = kMarginLeft + group_w * static_cast<double>(c) +
                       bar_w * static_cast<double>(si) + bar_w * 0.25;
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(kHeight - kMarginBottom - h) + "\" width=\"" +
             num(bar_w * 0.9) + "\" height=\"" + num(h) + "\" fill=\"" +
             kPalette[si % std::size(kPalette)] + "\"/>\n";
    }
  }
  const size_t label_stride = std::max<size_t>(1, categories.size() / 14);
  for (size_t c = 0; c < categories.size(); c += label_stride) {
    out += "<text x=\"" + num(kMarginLeft + group_w * (static_cast<double>(c) + 0.5)) + "\" y=\"" +
           std::to_string(kHeight - kMarginBottom + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
           categories[c] + "</text>\n";
  }
  out += legend(labels);
  out += axis_labels("", y_label);
  out += "</svg>\n";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open file for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("failed writing file: " + path);
}

}  // namespace linkrl::svg

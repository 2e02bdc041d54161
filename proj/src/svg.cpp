#include "svg.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>
#include <functional>
#include <vector>

namespace sentrend::svg {

namespace {

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                                  "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string frequency_chart(const CountrySeries& series) {
  const std::size_t weeks = series.pos_counts.size();
  const double width = 120.0 + 90.0 * static_cast<double>(weeks);
  const double height = 300.0;
  const double plot_top = 50.0;
  const double plot_bottom = 250.0;
  std::int64_t peak = 1;
  for (std::size_t w = 0; w < weeks; ++w)
    peak = std::max({peak, series.pos_counts[w], series.neg_counts[w]});

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      width, height);
  out += fmt::format(
      "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">Frequency of positive "
      "and negative tweets: {}</text>\n",
      width / 2, escape(series.country));
  out += fmt::format("<line x1=\"60\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
                     plot_bottom, width - 40);
  const double bar = 30.0;
  for (std::size_t w = 0; w < weeks; ++w) {
    const double x0 = 70.0 + 90.0 * static_cast<double>(w);
    const std::array<std::pair<const char*, std::int64_t>, 2> bars = {
        std::pair{"positive", series.pos_counts[w]}, std::pair{"negative", series.neg_counts[w]}};
    for (std::size_t k = 0; k < bars.size(); ++k) {
      const double h = (plot_bottom - plot_top) * static_cast<double>(bars[k].second) /
                       static_cast<double>(peak);
      out += fmt::format(
          "<rect class=\"bar\" data-kind=\"{}\" data-week=\"{}\" data-count=\"{}\" x=\"{}\" "
          "y=\"{:.2f}\" width=\"{}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
          bars[k].first, w + 1, bars[k].second, x0 + bar * static_cast<double>(k),
          plot_bottom - h, bar, h, k == 0 ? "#2ca02c" : "#d62728");
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">week {}</text>\n",
                       x0 + bar, plot_bottom + 16, w + 1);
  }
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#2ca02c\">positive</text>\n"
      "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#d62728\">negative</text>\n",
      width - 160, height - 12, width - 90, height - 12);
  out += "</svg>\n";
  return out;
}

std::string dendrogram(const Dendrogram& tree, const ClusterAssignment& assignment) {
  const std::size_t n = tree.leaf_labels.size();
  const std::size_t nodes = n + tree.merges.size();

  // leaf order from a depth-first walk of the final merge
  std::vector<std::size_t> order;
  std::function<void(std::size_t)> walk = [&](std::size_t id) {
    if (id < n) {
      order.push_back(id);
      return;
    }
    walk(tree.merges[id - n].a);
    walk(tree.merges[id - n].b);
  };
  if (nodes > 0) walk(nodes - 1);

  double top = 0.0;
  for (const auto& m : tree.merges) top = std::max(top, m.distance);
  if (top <= 0.0) top = 1.0;

  const double step = 28.0;
  const double width = 80.0 + step * static_cast<double>(n);
  const double height = 420.0;
  const double base = 340.0;
  const double scale = (base - 40.0) / top;

  std::vector<double> x(nodes), y(nodes);
  for (std::size_t i = 0; i < order.size(); ++i) {
    x[order[i]] = 50.0 + step * static_cast<double>(i);
    y[order[i]] = base;
  }

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      width, height);
  out += fmt::format(
      "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">Clustering of {} "
      "countries ({} clusters)</text>\n",
      width / 2, n, assignment.k);
  for (std::size_t m = 0; m < tree.merges.size(); ++m) {
    const auto& mg = tree.merges[m];
    const std::size_t id = n + m;
    x[id] = 0.5 * (x[mg.a] + x[mg.b]);
    y[id] = base - scale * mg.distance;
    out += fmt::format(
        "<path class=\"merge\" data-step=\"{}\" data-distance=\"{}\" d=\"M{:.2f},{:.2f} "
        "V{:.2f} H{:.2f} V{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
        m + 1, mg.distance, x[mg.a], y[mg.a], y[id], x[mg.b], y[mg.b]);
  }
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const int cluster = assignment.cluster[leaf];
    out += fmt::format(
        "<text class=\"leaf\" data-cluster=\"{}\" x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" "
        "fill=\"{}\" text-anchor=\"end\" transform=\"rotate(-60 {:.2f} {:.2f})\">{}</text>\n",
        cluster, x[leaf], base + 14, kPalette[(cluster - 1) % kPalette.size()], x[leaf],
        base + 14, escape(tree.leaf_labels[leaf]));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace sentrend::svg

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "hetop/dif.hpp"
#include "hetop/errors.hpp"
#include "hetop/estimator.hpp"
#include "hetop/icc.hpp"

// Hand-built SVG line charts: per-group trajectories with optional dashed
// horizontal guide lines. No timestamps, fixed coordinate precision and a
// fixed palette, so identical inputs render byte-identical documents.

namespace hetop {

namespace svg_detail {

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951",
                                 "#ff8ab7", "#a463f2", "#97bbf5", "#9c6b4e", "#9498a0"};
  return colors[i % 10];
}

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

inline std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;

  void expand(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad(double fraction) {
    const double span = hi - lo;
    const double margin = span > 0.0 ? fraction * span : 0.5;
    lo -= margin;
    hi += margin;
  }
};

}  // namespace svg_detail

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<double> guides;  // dashed horizontal lines
};

inline std::string render_line_chart(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  if (series.empty()) throw data_error("no series to plot");
  using svg_detail::num;
  using svg_detail::tick_label;

  constexpr double width = 800.0, height = 500.0;
  constexpr double left = 70.0, right = 150.0, top = 40.0, bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  svg_detail::Axis x_axis{std::numeric_limits<double>::infinity(),
                          -std::numeric_limits<double>::infinity()};
  svg_detail::Axis y_axis{std::numeric_limits<double>::infinity(),
                          -std::numeric_limits<double>::infinity()};
  for (const PlotSeries& s : series) {
    for (double v : s.x) x_axis.expand(spec.log_x ? std::log10(v) : v);
    for (double v : s.y) y_axis.expand(v);
  }
  for (double g : spec.guides) y_axis.expand(g);
  if (!std::isfinite(x_axis.lo) || !std::isfinite(y_axis.lo))
    throw data_error("no finite data to plot");
  x_axis.pad(0.02);
  y_axis.pad(0.08);

  auto px = [&](double v) {
    const double t = (spec.log_x ? std::log10(v) : v);
    return left + (t - x_axis.lo) / (x_axis.hi - x_axis.lo) * plot_w;
  };
  auto py = [&](double v) { return top + (y_axis.hi - v) / (y_axis.hi - y_axis.lo) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    out += "<text x=\"" + num(left + plot_w / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + spec.title + "</text>\n";

  // frame
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#333\"/>\n";

  // x ticks: powers of ten on a log axis, 6 even ticks otherwise
  if (spec.log_x) {
    const int e_lo = static_cast<int>(std::ceil(x_axis.lo - 1e-9));
    const int e_hi = static_cast<int>(std::floor(x_axis.hi + 1e-9));
    for (int e = e_lo; e <= e_hi; ++e) {
      const double xpix = left + (e - x_axis.lo) / (x_axis.hi - x_axis.lo) * plot_w;
      out += "<line x1=\"" + num(xpix) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(xpix) +
             "\" y2=\"" + num(top + plot_h + 5) + "\" stroke=\"#333\"/>\n";
      out += "<text x=\"" + num(xpix) + "\" y=\"" + num(top + plot_h + 18) +
             "\" text-anchor=\"middle\">1e" + std::to_string(e) + "</text>\n";
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double v = x_axis.lo + (x_axis.hi - x_axis.lo) * i / 5.0;
      const double xpix = left + plot_w * i / 5.0;
      out += "<line x1=\"" + num(xpix) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(xpix) +
             "\" y2=\"" + num(top + plot_h + 5) + "\" stroke=\"#333\"/>\n";
      out += "<text x=\"" + num(xpix) + "\" y=\"" + num(top + plot_h + 18) +
             "\" text-anchor=\"middle\">" + tick_label(v) + "</text>\n";
    }
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = y_axis.lo + (y_axis.hi - y_axis.lo) * i / 5.0;
    const double ypix = py(v);
    out += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(ypix) + "\" x2=\"" + num(left) +
           "\" y2=\"" + num(ypix) + "\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(ypix + 4) +
           "\" text-anchor=\"end\">" + tick_label(v) + "</text>\n";
  }
  if (!spec.x_label.empty())
    out += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 10) +
           "\" text-anchor=\"middle\">" + spec.x_label + "</text>\n";
  if (!spec.y_label.empty())
    out += "<text x=\"18\" y=\"" + num(top + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num(top + plot_h / 2) + ")\">" + spec.y_label + "</text>\n";

  for (double g : spec.guides) {
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(py(g)) + "\" x2=\"" + num(left + plot_w) +
           "\" y2=\"" + num(py(g)) +
           "\" stroke=\"#888\" stroke-dasharray=\"6,4\"/>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    out += "<polyline fill=\"none\" stroke=\"";
    out += svg_detail::palette(s);
    out += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i) out += ' ';
      out += num(px(series[s].x[i])) + "," + num(py(series[s].y[i]));
    }
    out += "\"/>\n";
    const double legend_y = top + 14.0 * static_cast<double>(s + 1);
    out += "<line x1=\"" + num(left + plot_w + 10) + "\" y1=\"" + num(legend_y - 4) + "\" x2=\"" +
           num(left + plot_w + 30) + "\" y2=\"" + num(legend_y - 4) + "\" stroke=\"";
    out += svg_detail::palette(s);
    out += "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(left + plot_w + 34) + "\" y=\"" + num(legend_y) + "\">" +
           series[s].label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

enum class PathPlotKind { mu_path, lambda_path, proportion_elbow };

// Per-group trajectories against log nu; the mu plot draws dashed bounds at
// +/-mean_bound, the lambda plot at disc_lower/disc_upper, the proportion
// plot at the 5% and 10% advisory levels.
inline std::string path_plot_svg(const PathResult& path, const std::vector<std::string>& labels,
                                 PathPlotKind kind, const DifThresholds& t = {}) {
  if (path.fits.empty()) throw data_error("empty path");
  PlotSpec spec;
  spec.log_x = true;
  spec.x_label = "nu";
  std::vector<PlotSeries> series;

  const Eigen::Index g_count = path.fits.front().params.n_groups();
  auto group_series = [&](auto value) {
    for (Eigen::Index g = 0; g < g_count; ++g) {
      PlotSeries s;
      s.label = labels[static_cast<std::size_t>(g)];
      for (Eigen::Index i = 0; i < path.nu_grid.size(); ++i) {
        s.x.push_back(path.nu_grid[i]);
        s.y.push_back(value(path.fits[static_cast<std::size_t>(i)], g));
      }
      series.push_back(std::move(s));
    }
  };

  switch (kind) {
    case PathPlotKind::mu_path:
      spec.title = "Latent means by penalty";
      spec.y_label = "mu";
      spec.guides = {t.mean_bound, -t.mean_bound};
      group_series([](const FitResult& f, Eigen::Index g) { return f.params.mu[g]; });
      break;
    case PathPlotKind::lambda_path:
      spec.title = "Discriminations by penalty";
      spec.y_label = "lambda";
      spec.guides = {t.disc_lower, t.disc_upper};
      group_series([](const FitResult& f, Eigen::Index g) { return f.params.lambda(g); });
      break;
    case PathPlotKind::proportion_elbow: {
      spec.title = "Penalty share of the objective";
      spec.y_label = "penalty proportion";
      spec.guides = {0.05, 0.10};
      PlotSeries s;
      s.label = "proportion";
      for (Eigen::Index i = 0; i < path.nu_grid.size(); ++i) {
        const double p = path.fits[static_cast<std::size_t>(i)].penalty_proportion;
        if (std::isfinite(p)) {
          s.x.push_back(path.nu_grid[i]);
          s.y.push_back(p);
        }
      }
      series.push_back(std::move(s));
      break;
    }
  }
  return render_line_chart(spec, series);
}

inline std::string icc_plot_svg(const std::vector<std::string>& labels,
                                const std::vector<IccCurve>& curves) {
  PlotSpec spec;
  spec.title = "Item characteristic curves";
  spec.x_label = "theta";
  spec.y_label = "expected score";
  std::vector<PlotSeries> series;
  for (std::size_t g = 0; g < curves.size(); ++g) {
    PlotSeries s;
    s.label = labels[g];
    for (Eigen::Index i = 0; i < curves[g].theta.size(); ++i) {
      s.x.push_back(curves[g].theta[i]);
      s.y.push_back(curves[g].score[i]);
    }
    series.push_back(std::move(s));
  }
  return render_line_chart(spec, series);
}

}  // namespace hetop

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "housedict/experiment.hpp"

namespace housedict {

enum class Metric { linf_u, frob_v, x_err_per_entry, support_f1 };

inline constexpr Metric kAllMetrics[] = {Metric::linf_u, Metric::frob_v,
                                         Metric::x_err_per_entry,
                                         Metric::support_f1};

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::linf_u: return "linf_u";
    case Metric::frob_v: return "frob_v";
    case Metric::x_err_per_entry: return "x_err_per_entry";
    case Metric::support_f1: return "support_f1";
  }
  return "linf_u";
}

inline std::optional<Metric> parse_metric(std::string_view s) {
  for (auto m : kAllMetrics) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

inline const std::optional<double>& metric_value(const ResultRow& r, Metric m) {
  switch (m) {
    case Metric::linf_u: return r.linf_u;
    case Metric::frob_v: return r.frob_v;
    case Metric::x_err_per_entry: return r.x_err_per_entry;
    case Metric::support_f1: return r.support_f1;
  }
  return r.linf_u;
}

/// Linear-interpolation quantile of an already sorted sample.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return sorted_quantile(values, 0.5);
}

enum class SweepAxis { p, m, snr_db };

inline std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::p: return "p";
    case SweepAxis::m: return "m";
    case SweepAxis::snr_db: return "snr_db";
  }
  return "p";
}

struct CurvePoint {
  double x = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::size_t count = 0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct Curve {
  std::string label;
  std::vector<CurvePoint> points;

  friend bool operator==(const Curve&, const Curve&) = default;
};

struct PlotData {
  Metric metric = Metric::linf_u;
  SweepAxis axis = SweepAxis::p;
  std::vector<Curve> curves;

  friend bool operator==(const PlotData&, const PlotData&) = default;
};

/// The x axis is the first of p, m, snr_db that takes more than one value.
inline SweepAxis choose_axis(const std::vector<ResultRow>& rows) {
  std::set<Index> ps;
  std::set<std::size_t> ms;
  std::set<std::optional<double>> snrs;
  for (const auto& r : rows) {
    ps.insert(r.p);
    ms.insert(r.m);
    snrs.insert(r.snr_db);
  }
  if (ps.size() > 1) return SweepAxis::p;
  if (ms.size() > 1) return SweepAxis::m;
  if (snrs.size() > 1) return SweepAxis::snr_db;
  return SweepAxis::p;
}

/// Groups rows into one curve per (method, theta, and whichever of p, m,
/// snr_db is not the x axis) and summarizes each x by median and quartiles.
/// Rows without a value for the metric are skipped. With an SNR axis the
/// noiseless rows have no x position and are dropped.
inline PlotData aggregate(const std::vector<ResultRow>& rows, Metric metric) {
  const SweepAxis axis = choose_axis(rows);

  // Sentinel +inf orders the noiseless setting after every finite SNR.
  using Key = std::tuple<std::string, double, std::size_t, Index, double>;
  auto snr_key = [](const std::optional<double>& s) {
    return s ? *s : std::numeric_limits<double>::infinity();
  };
  std::set<double> thetas;
  std::set<std::size_t> ms;
  std::set<Index> ps;
  std::set<double> snrs;
  std::map<Key, std::map<double, std::vector<double>>> groups;
  for (const auto& r : rows) {
    const auto& value = metric_value(r, metric);
    if (!value || !std::isfinite(*value)) continue;
    double x = 0.0;
    Key key{r.method, r.theta, r.m, r.p, snr_key(r.snr_db)};
    switch (axis) {
      case SweepAxis::p:
        x = static_cast<double>(r.p);
        std::get<3>(key) = 0;
        break;
      case SweepAxis::m:
        x = static_cast<double>(r.m);
        std::get<2>(key) = 0;
        break;
      case SweepAxis::snr_db:
        if (!r.snr_db) continue;
        x = *r.snr_db;
        std::get<4>(key) = 0.0;
        break;
    }
    thetas.insert(r.theta);
    ms.insert(r.m);
    ps.insert(r.p);
    snrs.insert(snr_key(r.snr_db));
    groups[key][x].push_back(*value);
  }

  PlotData out{metric, axis, {}};
  for (auto& [key, by_x] : groups) {
    const auto& [method, theta, m, p, snr] = key;
    std::ostringstream label;
    label << method;
    if (thetas.size() > 1) label << " theta=" << theta;
    if (axis != SweepAxis::m && ms.size() > 1) label << " m=" << m;
    if (axis != SweepAxis::p && ps.size() > 1) label << " p=" << p;
    if (axis != SweepAxis::snr_db && snrs.size() > 1) {
      if (std::isinf(snr)) {
        label << " noiseless";
      } else {
        label << " snr=" << snr << "dB";
      }
    }
    Curve curve{label.str(), {}};
    for (auto& [x, values] : by_x) {
      std::sort(values.begin(), values.end());
      curve.points.push_back({x, sorted_quantile(values, 0.5),
                              sorted_quantile(values, 0.25),
                              sorted_quantile(values, 0.75), values.size()});
    }
    out.curves.push_back(std::move(curve));
  }
  return out;
}

namespace detail {

inline std::string fmt_num(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline constexpr const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace detail

/// Standalone SVG: medians as polylines with markers, interquartile ranges as
/// translucent bands, and a legend.
inline std::string render_svg(const PlotData& plot) {
  constexpr double width = 760, height = 480;
  constexpr double left = 70, right = 220, top = 40, bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = 0.0;
  double ymax = -std::numeric_limits<double>::infinity();
  for (const auto& c : plot.curves) {
    for (const auto& pt : c.points) {
      xmin = std::min(xmin, pt.x);
      xmax = std::max(xmax, pt.x);
      ymin = std::min(ymin, pt.q25);
      ymax = std::max(ymax, pt.q75);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  ymax += 0.05 * (ymax - ymin);

  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };
  using detail::fmt_num;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">median " << to_string(plot.metric) << " vs "
      << to_string(plot.axis) << " (band: interquartile range)</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    svg << "<line x1=\"" << fmt_num(sx(xv), "%.2f") << "\" y1=\"" << top + ph
        << "\" x2=\"" << fmt_num(sx(xv), "%.2f") << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fmt_num(sx(xv), "%.2f") << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\">" << fmt_num(xv) << "</text>\n"
        << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt_num(sy(yv), "%.2f")
        << "\" x2=\"" << left + pw << "\" y2=\"" << fmt_num(sy(yv), "%.2f")
        << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << fmt_num(sy(yv) + 4, "%.2f")
        << "\" text-anchor=\"end\">" << fmt_num(yv) << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 18
      << "\" text-anchor=\"middle\">" << to_string(plot.axis) << "</text>\n"
      << "<text transform=\"translate(18," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << to_string(plot.metric)
      << "</text>\n";

  const std::size_t ncolors = std::size(detail::kPalette);
  for (std::size_t c = 0; c < plot.curves.size(); ++c) {
    const auto& curve = plot.curves[c];
    const char* color = detail::kPalette[c % ncolors];
    if (curve.points.empty()) continue;

    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (const auto& pt : curve.points) {
      svg << fmt_num(sx(pt.x), "%.2f") << ',' << fmt_num(sy(pt.q75), "%.2f") << ' ';
    }
    for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
      svg << fmt_num(sx(it->x), "%.2f") << ',' << fmt_num(sy(it->q25), "%.2f") << ' ';
    }
    svg << "\"/>\n";

    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& pt : curve.points) {
      svg << fmt_num(sx(pt.x), "%.2f") << ',' << fmt_num(sy(pt.median), "%.2f") << ' ';
    }
    svg << "\"/>\n";
    for (const auto& pt : curve.points) {
      svg << "<circle cx=\"" << fmt_num(sx(pt.x), "%.2f") << "\" cy=\""
          << fmt_num(sy(pt.median), "%.2f") << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }

    const double ly = top + 10 + 18.0 * static_cast<double>(c);
    svg << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\""
        << left + pw + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">"
        << curve.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

/// Writes <stem>_<metric>.svg for every metric with at least one value and
/// returns the paths written.
inline std::vector<std::string> write_plots(
    const std::vector<ResultRow>& rows, const std::string& stem,
    const std::vector<Metric>& metrics = {std::begin(kAllMetrics),
                                          std::end(kAllMetrics)}) {
  std::vector<std::string> written;
  for (auto metric : metrics) {
    const PlotData plot = aggregate(rows, metric);
    if (plot.curves.empty()) continue;
    const std::string path = stem + "_" + std::string(to_string(metric)) + ".svg";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << render_svg(plot);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
    written.push_back(path);
  }
  return written;
}

}  // namespace housedict

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "otasched/harness.hpp"

namespace otasched {
namespace {

// Picks the grid axis with the most distinct values among aggregate rows.
enum class Axis { kGamma, kDelta, kDevices, kAntennas };

double axis_value(const ResultRow& r, Axis a) {
  switch (a) {
    case Axis::kGamma: return r.gamma_db;
    case Axis::kDelta: return r.delta;
    case Axis::kDevices: return r.devices;
    case Axis::kAntennas: return r.antennas;
  }
  return 0.0;
}

const char* axis_label(Axis a) {
  switch (a) {
    case Axis::kGamma: return "gamma [dB]";
    case Axis::kDelta: return "delta";
    case Axis::kDevices: return "K";
    case Axis::kAntennas: return "N";
  }
  return "";
}

std::string series_key(const ResultRow& r, Axis a) {
  std::ostringstream s;
  s << r.variant;
  if (a != Axis::kGamma) s << " g=" << r.gamma_db;
  if (a != Axis::kDelta) s << " d=" << r.delta;
  if (a != Axis::kDevices) s << " K=" << r.devices;
  if (a != Axis::kAntennas) s << " N=" << r.antennas;
  return s.str();
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                         "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

bool emit_plot(const std::vector<ResultRow>& rows, const std::string& path,
               std::string* warning) {
  auto fail = [&](const std::string& msg) {
    if (warning) *warning = msg;
    return false;
  };
  std::vector<ResultRow> agg;
  for (const auto& r : rows)
    if (r.trial == kAggregateTrial) agg.push_back(r);
  if (agg.empty()) return fail("plot: no aggregate rows");

  Axis axis = Axis::kGamma;
  std::size_t best = 0;
  for (Axis a : {Axis::kGamma, Axis::kDelta, Axis::kDevices, Axis::kAntennas}) {
    std::set<double> distinct;
    for (const auto& r : agg) distinct.insert(axis_value(r, a));
    if (distinct.size() > best) {
      best = distinct.size();
      axis = a;
    }
  }

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : agg)
    series[series_key(r, axis)].emplace_back(axis_value(r, axis), r.mean_s);

  double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (auto [x, y] : pts) {
      if (!std::isfinite(x) || !std::isfinite(y))
        return fail("plot: non-finite value in series " + key);
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;

  const double w = 640, h = 420, left = 60, right = 200, top = 20, bottom = 50;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };

  std::ofstream out(path);
  if (!out) return fail("plot: cannot open '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\""
      << w - right << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    out << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 15
        << "\" text-anchor=\"middle\">" << xv << "</text>\n";
    out << "<text x=\"" << left - 5 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\">" << yv << "</text>\n";
  }
  out << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 10
      << "\" text-anchor=\"middle\">" << axis_label(axis) << "</text>\n";
  out << "<text x=\"15\" y=\"" << (top + h - bottom) / 2
      << "\" transform=\"rotate(-90 15 " << (top + h - bottom) / 2
      << ")\" text-anchor=\"middle\">mean |S|</text>\n";
  int idx = 0;
  for (const auto& [key, pts] : series) {
    const char* color = kColors[idx % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (auto [x, y] : pts) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << w - right + 10 << "\" y=\"" << top + 14 * idx + 10
        << "\" fill=\"" << color << "\">" << key << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
  if (!out) return fail("plot: write to '" + path + "' failed");
  return true;
}

}  // namespace otasched

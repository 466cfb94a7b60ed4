#include "polyreach/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace polyreach {

namespace {

constexpr double kWidth = 840.0, kHeight = 640.0, kMargin = 60.0;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct View {
  double xmin, xmax, ymin, ymax;
  double sx(double x) const { return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin); }
  double sy(double y) const {
    return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
  }
};

}  // namespace

std::string emit_svg(const std::vector<FlowpipeSegment>& flowpipes,
                     const std::vector<Trajectory>& trajectories, const Box& goal,
                     std::pair<std::size_t, std::size_t> dims, const std::string& x_label,
                     const std::string& y_label) {
  const std::size_t dx = dims.first, dy = dims.second;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto grow = [&](double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (const auto& fp : flowpipes) {
    if (dx >= fp.box.size() || dy >= fp.box.size())
      throw std::invalid_argument("emit_svg: projection axis out of range");
    grow(fp.box[dx].lo, fp.box[dy].lo);
    grow(fp.box[dx].hi, fp.box[dy].hi);
  }
  for (const auto& tr : trajectories)
    for (const auto& s : tr.states) grow(s[dx], s[dy]);
  if (goal.size() > std::max(dx, dy)) {
    grow(goal[dx].lo, goal[dy].lo);
    grow(goal[dx].hi, goal[dy].hi);
  }
  if (xmin > xmax) {
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  double padx = 0.05 * (xmax - xmin + 1e-12), pady = 0.05 * (ymax - ymin + 1e-12);
  View v{xmin - padx, xmax + padx, ymin - pady, ymax + pady};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\""
     << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << " " << fmt(kHeight) << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
     << "\" fill=\"white\"/>\n";

  // axes
  os << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(kHeight - kMargin) << "\" x2=\""
     << fmt(kWidth - kMargin) << "\" y2=\"" << fmt(kHeight - kMargin)
     << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(kMargin) << "\" x2=\"" << fmt(kMargin)
     << "\" y2=\"" << fmt(kHeight - kMargin) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"" << fmt(kHeight - kMargin / 4)
     << "\" font-size=\"14\" text-anchor=\"middle\">" << x_label << "</text>\n";
  os << "<text x=\"" << fmt(kMargin / 3) << "\" y=\"" << fmt(kHeight / 2)
     << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 " << fmt(kMargin / 3)
     << " " << fmt(kHeight / 2) << ")\">" << y_label << "</text>\n";

  // axis tick labels at the corners of the data range
  os << "<text x=\"" << fmt(v.sx(xmin)) << "\" y=\"" << fmt(kHeight - kMargin + 16)
     << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xmin) << "</text>\n";
  os << "<text x=\"" << fmt(v.sx(xmax)) << "\" y=\"" << fmt(kHeight - kMargin + 16)
     << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xmax) << "</text>\n";
  os << "<text x=\"" << fmt(kMargin - 6) << "\" y=\"" << fmt(v.sy(ymin))
     << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(ymin) << "</text>\n";
  os << "<text x=\"" << fmt(kMargin - 6) << "\" y=\"" << fmt(v.sy(ymax))
     << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(ymax) << "</text>\n";

  for (const auto& fp : flowpipes) {
    double x = v.sx(fp.box[dx].lo), y = v.sy(fp.box[dy].hi);
    double w = v.sx(fp.box[dx].hi) - x, h = v.sy(fp.box[dy].lo) - y;
    os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
       << "\" height=\"" << fmt(h)
       << "\" fill=\"none\" stroke=\"green\" stroke-width=\"0.8\"/>\n";
  }

  if (goal.size() > std::max(dx, dy)) {
    double x = v.sx(goal[dx].lo), y = v.sy(goal[dy].hi);
    double w = v.sx(goal[dx].hi) - x, h = v.sy(goal[dy].lo) - y;
    os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
       << "\" height=\"" << fmt(h)
       << "\" fill=\"rgb(200,220,255)\" fill-opacity=\"0.5\" stroke=\"blue\" stroke-width=\"1.5\"/>\n";
  }

  for (const auto& tr : trajectories) {
    os << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"0.6\" points=\"";
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      if (i) os << " ";
      os << fmt(v.sx(tr.states[i][dx])) << "," << fmt(v.sy(tr.states[i][dy]));
    }
    os << "\"/>\n";
  }

  os << "</svg>\n";
  return os.str();
}

}  // namespace polyreach

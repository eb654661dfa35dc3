#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "depthcraft/classifier.hpp"
#include "depthcraft/datamodel.hpp"
#include "depthcraft/depth/engine.hpp"
#include "depthcraft/functional.hpp"
#include "depthcraft/parallel.hpp"

namespace depthcraft {

using Point2 = std::array<double, 2>;
using Polyline = std::vector<Point2>;

/// Values of a scalar function on a rectangular grid: value(i, j) is taken
/// at (xs[i], ys[j]).
struct Grid {
  std::vector<double> xs;
  std::vector<double> ys;
  Matrix value;  // xs.size() x ys.size()
};

inline std::vector<double> linspace(double lo, double hi, Index count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return out;
}

/// Bounding box of the data padded by 10% on every side.
inline std::array<double, 4> padded_box(const Matrix& x) {
  double x0 = x.col(0).minCoeff(), x1 = x.col(0).maxCoeff();
  double y0 = x.col(1).minCoeff(), y1 = x.col(1).maxCoeff();
  double px = 0.1 * std::max(x1 - x0, 1e-9);
  double py = 0.1 * std::max(y1 - y0, 1e-9);
  return {x0 - px, x1 + px, y0 - py, y1 + py};
}

/// Depth of every grid node w.r.t. the single class of `engine`.
inline Grid depth_grid(const DepthEngine& engine, const std::vector<double>& xs, const std::vector<double>& ys) {
  if (engine.dim() != 2) throw UnsupportedError("depth grids need two-dimensional data");
  Grid g{xs, ys, Matrix(static_cast<Index>(xs.size()), static_cast<Index>(ys.size()))};
  parallel_for(xs.size(), [&](std::size_t i) {
    Vector z(2);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      z << xs[i], ys[j];
      g.value(static_cast<Index>(i), static_cast<Index>(j)) = engine.depth(z, 0);
    }
  });
  return g;
}

// ---- marching squares ----

namespace detail {

/// Edge identifiers: horizontal edge (i,j)-(i+1,j) and vertical edge (i,j)-(i,j+1).
inline long long edge_id(Index i, Index j, bool vertical, Index ny) {
  return (static_cast<long long>(i) * (ny + 1) + j) * 2 + (vertical ? 1 : 0);
}

}  // namespace detail

/// Iso-lines of the grid at `level`, by marching squares with linear
/// interpolation along cell edges. Segments are chained into polylines;
/// closed loops repeat their first point at the end.
inline std::vector<Polyline> marching_squares(const Grid& g, double level) {
  const Index nx = static_cast<Index>(g.xs.size());
  const Index ny = static_cast<Index>(g.ys.size());
  std::map<long long, Point2> where;
  std::vector<std::array<long long, 2>> segments;
  auto above = [&](Index i, Index j) { return g.value(i, j) >= level; };
  auto cross = [&](Index i0, Index j0, Index i1, Index j1, bool vertical) {
    long long id = detail::edge_id(i0, j0, vertical, ny);
    if (!where.count(id)) {
      double v0 = g.value(i0, j0), v1 = g.value(i1, j1);
      double t = v1 == v0 ? 0.5 : (level - v0) / (v1 - v0);
      where[id] = {g.xs[static_cast<std::size_t>(i0)] + t * (g.xs[static_cast<std::size_t>(i1)] - g.xs[static_cast<std::size_t>(i0)]),
                   g.ys[static_cast<std::size_t>(j0)] + t * (g.ys[static_cast<std::size_t>(j1)] - g.ys[static_cast<std::size_t>(j0)])};
    }
    return id;
  };
  for (Index i = 0; i + 1 < nx; ++i) {
    for (Index j = 0; j + 1 < ny; ++j) {
      // corners: a=(i,j) b=(i+1,j) c=(i+1,j+1) d=(i,j+1)
      int code = (above(i, j) ? 1 : 0) | (above(i + 1, j) ? 2 : 0) | (above(i + 1, j + 1) ? 4 : 0) | (above(i, j + 1) ? 8 : 0);
      if (code == 0 || code == 15) continue;
      auto bottom = [&] { return cross(i, j, i + 1, j, false); };
      auto right = [&] { return cross(i + 1, j, i + 1, j + 1, true); };
      auto top = [&] { return cross(i, j + 1, i + 1, j + 1, false); };
      auto left = [&] { return cross(i, j, i, j + 1, true); };
      double centre = 0.25 * (g.value(i, j) + g.value(i + 1, j) + g.value(i + 1, j + 1) + g.value(i, j + 1));
      switch (code) {
        case 1: case 14: segments.push_back({left(), bottom()}); break;
        case 2: case 13: segments.push_back({bottom(), right()}); break;
        case 3: case 12: segments.push_back({left(), right()}); break;
        case 4: case 11: segments.push_back({right(), top()}); break;
        case 6: case 9: segments.push_back({bottom(), top()}); break;
        case 7: case 8: segments.push_back({left(), top()}); break;
        case 5:
          if (centre >= level) {
            segments.push_back({left(), top()});
            segments.push_back({bottom(), right()});
          } else {
            segments.push_back({left(), bottom()});
            segments.push_back({right(), top()});
          }
          break;
        case 10:
          if (centre >= level) {
            segments.push_back({left(), bottom()});
            segments.push_back({right(), top()});
          } else {
            segments.push_back({left(), top()});
            segments.push_back({bottom(), right()});
          }
          break;
        default: break;
      }
    }
  }
  // Chain segments sharing an edge crossing.
  std::map<long long, std::vector<std::size_t>> touching;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    touching[segments[s][0]].push_back(s);
    touching[segments[s][1]].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  auto next_segment = [&](long long at) -> long long {
    for (std::size_t s : touching[at]) {
      if (!used[s]) return static_cast<long long>(s);
    }
    return -1;
  };
  std::vector<Polyline> out;
  // Open chains start at crossings with a single segment; loops afterwards.
  std::vector<long long> starts;
  for (const auto& [id, segs] : touching) {
    if (segs.size() == 1) starts.push_back(id);
  }
  auto walk = [&](long long from, std::size_t first) {
    std::vector<long long> ids{from};
    long long at = from;
    long long s = static_cast<long long>(first);
    while (s >= 0) {
      used[static_cast<std::size_t>(s)] = true;
      const auto& seg = segments[static_cast<std::size_t>(s)];
      at = seg[0] == at ? seg[1] : seg[0];
      ids.push_back(at);
      s = next_segment(at);
    }
    Polyline line;
    for (long long id : ids) line.push_back(where[id]);
    out.push_back(std::move(line));
  };
  for (long long id : starts) {
    long long s = next_segment(id);
    if (s >= 0) walk(id, static_cast<std::size_t>(s));
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (!used[s]) walk(segments[s][0], s);
  }
  return out;
}

inline bool is_closed(const Polyline& p) { return p.size() > 2 && p.front() == p.back(); }

// ---- contours ----

/// Levels from the user parameter: a value in (0, 1] is one contour depth,
/// a larger value v gives ceil(v) levels equally spaced in (0, max_depth).
inline std::vector<double> contour_levels(double levels, double max_depth) {
  if (!(levels > 0.0)) throw ParameterError("levels: must be positive");
  if (levels <= 1.0) return {levels};
  int count = static_cast<int>(std::ceil(levels));
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(max_depth * k / (count + 1));
  return out;
}

struct ContourResult {
  Grid grid;
  std::vector<double> levels;
  std::vector<std::vector<Polyline>> lines;  // per level
  Matrix data;
};

inline ContourResult contour_grid(const DataMatrix& data, const DepthSpec& spec, Index frequency, double levels) {
  if (data.cols() != 2) throw UnsupportedError("contours need two-dimensional data");
  if (frequency < 10) throw ParameterError("frequency: must be at least 10");
  DepthEngine engine(data, spec);
  auto box = padded_box(data.values());
  ContourResult r;
  r.grid = depth_grid(engine, linspace(box[0], box[1], frequency), linspace(box[2], box[3], frequency));
  r.levels = contour_levels(levels, r.grid.value.maxCoeff());
  for (double lv : r.levels) r.lines.push_back(marching_squares(r.grid, lv));
  r.data = data.values();
  return r;
}

/// Depth surface on an xnum x ynum grid over the padded bounding box.
inline Grid surface_grid(const DataMatrix& data, const DepthSpec& spec, Index xnum, Index ynum) {
  if (data.cols() != 2) throw UnsupportedError("surfaces need two-dimensional data");
  if (xnum < 2 || ynum < 2) throw ParameterError("xnum/ynum: must be at least 2");
  DepthEngine engine(data, spec);
  auto box = padded_box(data.values());
  return depth_grid(engine, linspace(box[0], box[1], xnum), linspace(box[2], box[3], ynum));
}

// ---- output ----

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

inline const char* palette(int k) {
  static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors[k % 8];
}

/// Maps data coordinates into an SVG viewport with y pointing up.
struct Frame {
  double x0, x1, y0, y1;
  double left = 50, top = 20, width = 400, height = 400;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

inline void svg_open(std::ostream& out, double w, double h) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
      << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"white\"/>\n";
}

inline void svg_polyline(std::ostream& out, const Frame& f, const Polyline& p, const char* color, double width) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << fmt(width) << "\" points=\"";
  for (std::size_t k = 0; k < p.size(); ++k) out << (k ? " " : "") << fmt(f.px(p[k][0])) << ',' << fmt(f.py(p[k][1]));
  out << "\"/>\n";
}

inline void svg_axes(std::ostream& out, const Frame& f, const std::string& xlab, const std::string& ylab) {
  out << "<rect x=\"" << fmt(f.left) << "\" y=\"" << fmt(f.top) << "\" width=\"" << fmt(f.width) << "\" height=\"" << fmt(f.height)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double vx = f.x0 + (f.x1 - f.x0) * k / 4.0;
    double vy = f.y0 + (f.y1 - f.y0) * k / 4.0;
    out << "<text x=\"" << fmt(f.px(vx)) << "\" y=\"" << fmt(f.top + f.height + 15) << "\" font-size=\"10\" text-anchor=\"middle\">"
        << fmt(vx) << "</text>\n";
    out << "<text x=\"" << fmt(f.left - 5) << "\" y=\"" << fmt(f.py(vy) + 3) << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(vy)
        << "</text>\n";
  }
  out << "<text x=\"" << fmt(f.left + f.width / 2) << "\" y=\"" << fmt(f.top + f.height + 32)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << xlab << "</text>\n";
  out << "<text x=\"12\" y=\"" << fmt(f.top + f.height / 2) << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 12 "
      << fmt(f.top + f.height / 2) << ")\">" << ylab << "</text>\n";
}

}  // namespace detail

/// CSV with header x,y,depth, x varying slowest.
inline void write_grid_csv(std::ostream& out, const Grid& g) {
  out << "x,y,depth\n";
  for (std::size_t i = 0; i < g.xs.size(); ++i) {
    for (std::size_t j = 0; j < g.ys.size(); ++j) {
      out << detail::format_double(g.xs[i]) << ',' << detail::format_double(g.ys[j]) << ','
          << detail::format_double(g.value(static_cast<Index>(i), static_cast<Index>(j))) << '\n';
    }
  }
}

inline void write_contours_svg(std::ostream& out, const ContourResult& r) {
  detail::Frame f{r.grid.xs.front(), r.grid.xs.back(), r.grid.ys.front(), r.grid.ys.back()};
  detail::svg_open(out, 480, 470);
  detail::svg_axes(out, f, "X1", "X2");
  for (Index i = 0; i < r.data.rows(); ++i) {
    out << "<circle cx=\"" << detail::fmt(f.px(r.data(i, 0))) << "\" cy=\"" << detail::fmt(f.py(r.data(i, 1)))
        << "\" r=\"2\" fill=\"#555555\"/>\n";
  }
  for (std::size_t k = 0; k < r.levels.size(); ++k) {
    out << "<g class=\"level\" data-depth=\"" << detail::fmt(r.levels[k]) << "\">\n";
    for (const auto& line : r.lines[k]) detail::svg_polyline(out, f, line, detail::palette(static_cast<int>(k)), 1.2);
    out << "</g>\n";
  }
  out << "</svg>\n";
}

/// Isometric wire-frame rendering of a height field; theta turns around the
/// vertical axis, phi tilts the view (degrees).
inline void write_surface_svg(std::ostream& out, const Grid& g, const Matrix& data, double theta = 30.0, double phi = 30.0) {
  const double th = theta * std::numbers::pi / 180.0;
  const double ph = phi * std::numbers::pi / 180.0;
  const double xr = g.xs.back() - g.xs.front();
  const double yr = g.ys.back() - g.ys.front();
  double zmax = std::max(g.value.maxCoeff(), 1e-12);
  auto project = [&](double x, double y, double z) {
    double u = (x - g.xs.front()) / xr - 0.5;
    double v = (y - g.ys.front()) / yr - 0.5;
    double w = z / zmax;
    double sx = u * std::cos(th) - v * std::sin(th);
    double depth = u * std::sin(th) + v * std::cos(th);
    double sy = w * std::cos(ph) - depth * std::sin(ph);
    return Point2{250 + 300 * sx, 250 - 300 * sy};
  };
  detail::svg_open(out, 500, 500);
  auto line = [&](const Polyline& p) {
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"0.6\" points=\"";
    for (std::size_t k = 0; k < p.size(); ++k) out << (k ? " " : "") << detail::fmt(p[k][0]) << ',' << detail::fmt(p[k][1]);
    out << "\"/>\n";
  };
  for (std::size_t i = 0; i < g.xs.size(); ++i) {
    Polyline p;
    for (std::size_t j = 0; j < g.ys.size(); ++j) p.push_back(project(g.xs[i], g.ys[j], g.value(static_cast<Index>(i), static_cast<Index>(j))));
    line(p);
  }
  for (std::size_t j = 0; j < g.ys.size(); ++j) {
    Polyline p;
    for (std::size_t i = 0; i < g.xs.size(); ++i) p.push_back(project(g.xs[i], g.ys[j], g.value(static_cast<Index>(i), static_cast<Index>(j))));
    line(p);
  }
  for (Index i = 0; i < data.rows(); ++i) {
    Point2 p = project(data(i, 0), data(i, 1), 0.0);
    out << "<circle cx=\"" << detail::fmt(p[0]) << "\" cy=\"" << detail::fmt(p[1]) << "\" r=\"2.5\" fill=\"black\"/>\n";
  }
  out << "</svg>\n";
}

// ---- DD-plot ----

/// +1 where the model assigns the first class, -1 elsewhere, on a
/// resolution x resolution grid of the unit square (two classes only).
inline Grid separation_grid(const TrainedModel& m, Index resolution = 200) {
  if (m.num_classes() != 2) throw UnsupportedError("separation boundaries are drawn for two classes only");
  if (m.config.separator.kind == SeparatorKind::dknn) throw UnsupportedError("dknn has no boundary in the depth space");
  Grid g{linspace(0.0, 1.0, resolution), linspace(0.0, 1.0, resolution), Matrix(resolution, resolution)};
  for (Index i = 0; i < resolution; ++i) {
    for (Index j = 0; j < resolution; ++j) {
      Vector row(2);
      row << g.xs[static_cast<std::size_t>(i)], g.ys[static_cast<std::size_t>(j)];
      Rng rng(point_seed(m.config.seed, row));
      g.value(i, j) = m.decide(row, row, rng) == 0 ? 1.0 : -1.0;
    }
  }
  return g;
}

struct DDPlotOptions {
  bool draw_separation = true;
  std::string xlab = "C1";
  std::string ylab = "C2";
  Index resolution = 200;
};

/// DD-plot of a depth space as SVG; with a two-class model the separating
/// boundary is traced from its sign grid. For q > 2 one panel per class pair.
inline void write_ddplot_svg(std::ostream& out, const DepthSpace& ds, const TrainedModel* model, const DDPlotOptions& opt = {}) {
  const int q = ds.classes();
  if (q < 2) throw ParameterError("a DD-plot needs at least 2 classes");
  std::vector<std::pair<int, int>> panels;
  for (int a = 0; a < q; ++a) {
    for (int b = a + 1; b < q; ++b) panels.emplace_back(a, b);
  }
  const double panel = 480;
  detail::svg_open(out, panel * static_cast<double>(panels.size()), 470);
  for (std::size_t p = 0; p < panels.size(); ++p) {
    auto [a, b] = panels[p];
    detail::Frame f{0.0, 1.0, 0.0, 1.0};
    f.left += panel * static_cast<double>(p);
    std::string xl = q == 2 ? opt.xlab : "C" + std::to_string(a + 1);
    std::string yl = q == 2 ? opt.ylab : "C" + std::to_string(b + 1);
    detail::svg_axes(out, f, xl, yl);
    out << "<polyline fill=\"none\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\" points=\"" << detail::fmt(f.px(0)) << ','
        << detail::fmt(f.py(0)) << ' ' << detail::fmt(f.px(1)) << ',' << detail::fmt(f.py(1)) << "\"/>\n";
    for (Index i = 0; i < ds.rows(); ++i) {
      int cls = ds.labels.empty() ? 0 : ds.labels[static_cast<std::size_t>(i)] - 1;
      if (q > 2 && cls != a && cls != b) continue;
      out << "<circle cx=\"" << detail::fmt(f.px(ds.depths(i, a))) << "\" cy=\"" << detail::fmt(f.py(ds.depths(i, b)))
          << "\" r=\"2.5\" fill=\"" << detail::palette(cls) << "\"/>\n";
    }
    if (q == 2 && model && opt.draw_separation) {
      Grid g = separation_grid(*model, opt.resolution);
      for (const auto& line : marching_squares(g, 0.0)) detail::svg_polyline(out, f, line, "black", 1.5);
    }
  }
  out << "</svg>\n";
}

/// One polyline per observation, coloured by class.
inline void write_functions_svg(std::ostream& out, const FunctionalSample& s) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& c : s.curves()) {
    x0 = std::min(x0, c.args.front());
    x1 = std::max(x1, c.args.back());
    for (double v : c.vals) {
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  detail::Frame f{x0, x1, y0, y1};
  detail::svg_open(out, 480, 470);
  detail::svg_axes(out, f, "t", "f(t)");
  for (std::size_t i = 0; i < s.size(); ++i) {
    Polyline p;
    for (std::size_t k = 0; k < s.curves()[i].args.size(); ++k) p.push_back({s.curves()[i].args[k], s.curves()[i].vals[k]});
    detail::svg_polyline(out, f, p, detail::palette(s.labeled() ? s.labels()[i] - 1 : 0), 0.8);
  }
  out << "</svg>\n";
}

}  // namespace depthcraft

// Copyright 2026 The qmemlab Authors
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

#pragma once

// Hysteresis-loop geometry in the I/V plane: shoelace area, perimeter,
// lobe segmentation at self-intersections and the form factor 4 pi A / P^2.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "qmem/dynamics.hpp"
#include "qmem/error.hpp"

namespace qmem {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Ordered samples of a curve; a closing segment from the last point back to
/// the first is implied wherever a closed polygon is needed.
using PlaneCurve = std::vector<Point2>;

struct LoopMetrics {
  double area = 0.0;
  double perimeter = 0.0;
  double form_factor = 0.0;
  std::size_t period_index = 0;
};

/// |signed shoelace area|; fewer than 3 points gives 0.
inline double polyline_area(std::span<const Point2> c) {
  if (c.size() < 3) return 0.0;
  // Shifting to the first point keeps the cross products well conditioned.
  const Point2 o = c.front();
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < c.size(); ++i) {
    const double ax = c[i].x - o.x, ay = c[i].y - o.y;
    const double bx = c[i + 1].x - o.x, by = c[i + 1].y - o.y;
    twice += ax * by - bx * ay;
  }
  return std::abs(0.5 * twice);
}

/// Sum of segment lengths including the closing segment; fewer than 2 points gives 0.
inline double polyline_perimeter(std::span<const Point2> c) {
  if (c.size() < 2) return 0.0;
  double p = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point2& a = c[i];
    const Point2& b = c[(i + 1) % c.size()];
    p += std::hypot(b.x - a.x, b.y - a.y);
  }
  return p;
}

namespace detail {

struct Crossing {
  double t;  // parameter along the new segment
  Point2 at;
};

// Intersection of the new segment p->q with the old closed segment a->b.
// Parallel and collinear pairs count as no intersection; hits at the very
// start of the new segment are ignored.
inline std::optional<Crossing> segment_hit(Point2 p, Point2 q, Point2 a, Point2 b) {
  if (std::max(p.x, q.x) < std::min(a.x, b.x) || std::max(a.x, b.x) < std::min(p.x, q.x) ||
      std::max(p.y, q.y) < std::min(a.y, b.y) || std::max(a.y, b.y) < std::min(p.y, q.y))
    return std::nullopt;
  const double rx = q.x - p.x, ry = q.y - p.y;
  const double sx = b.x - a.x, sy = b.y - a.y;
  const double denom = rx * sy - ry * sx;
  if (denom == 0.0) return std::nullopt;
  const double wx = a.x - p.x, wy = a.y - p.y;
  const double t = (wx * sy - wy * sx) / denom;
  const double u = (wx * ry - wy * rx) / denom;
  constexpr double eps = 1e-12;
  if (t <= eps || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  if (u == 0.0) return Crossing{t, a};
  if (u == 1.0) return Crossing{t, b};
  return Crossing{t, Point2{p.x + t * rx, p.y + t * ry}};
}

}  // namespace detail

/// Splits a closed curve into simple lobes by peeling off a loop every time a
/// new segment crosses an earlier, non-adjacent one (O(n^2) sweep). The part
/// left at the end forms the last lobe. A curve without crossings is returned
/// whole. Lobes with fewer than 3 points are dropped, except that a curve
/// without any lobe is returned as a single degenerate lobe.
inline std::vector<PlaneCurve> segment_lobes(std::span<const Point2> c) {
  std::vector<PlaneCurve> lobes;
  if (c.empty()) return lobes;
  std::vector<Point2> path;
  path.reserve(c.size() + 1);
  auto emit = [&](PlaneCurve lobe) {
    if (lobe.size() >= 3) lobes.push_back(std::move(lobe));
  };

  auto add_point = [&](Point2 q) {
    if (!path.empty() && path.back() == q) return;
    // A single new segment can close several loops; keep peeling until it is clear.
    while (!path.empty()) {
      const Point2 p = path.back();
      std::optional<detail::Crossing> best;
      std::size_t best_j = 0;
      // Most recent crossing first: it closes the smallest loop.
      for (std::size_t j = path.size() >= 3 ? path.size() - 3 + 1 : 0; j-- > 0;) {
        if (auto hit = detail::segment_hit(p, q, path[j], path[j + 1])) {
          if (!best || hit->t < best->t) {
            best = hit;
            best_j = j;
          }
        }
      }
      if (!best) break;
      PlaneCurve lobe;
      lobe.push_back(best->at);
      for (std::size_t k = best_j + 1; k < path.size(); ++k)
        if (!(path[k] == lobe.back())) lobe.push_back(path[k]);
      emit(std::move(lobe));
      path.resize(best_j + 1);
      if (!(path.back() == best->at)) path.push_back(best->at);
    }
    if (path.empty() || !(path.back() == q)) path.push_back(q);
  };

  for (const Point2& q : c) add_point(q);
  // Close the curve back to its first sample.
  if (c.size() > 2 && !(c.front() == c.back())) add_point(c.front());
  if (path.size() > 1 && path.back() == path.front()) path.pop_back();
  if (path.size() >= 3 || lobes.empty()) {
    if (lobes.empty()) {
      lobes.push_back(PlaneCurve(c.begin(), c.end()));
    } else {
      emit(PlaneCurve(path.begin(), path.end()));
    }
  }
  return lobes;
}

/// Area enclosed by a closed curve counted with multiplicity, the integral of
/// |winding number| over the plane. For curves whose lobes do not overlap this
/// is the sum of the lobe areas; unlike any particular lobe decomposition it
/// does not depend on where the samples start and varies continuously with
/// the curve.
///
/// Vertical slab sweep: between consecutive vertex abscissae (refined at
/// crossings of the active segments) the segments are ordered by height, the
/// winding number steps by +-1 across each of them and every band between
/// two neighbours is an exact trapezoid.
inline double winding_area(std::span<const Point2> c) {
  if (c.size() < 3) return 0.0;
  struct Seg {
    double x0, y0, x1, y1;  // x0 < x1
    int dir;                // +1 when traversed towards -x
    double y_at(double x) const { return y0 + (y1 - y0) * ((x - x0) / (x1 - x0)); }
  };
  std::vector<Seg> segs;
  segs.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point2 a = c[i], b = c[(i + 1) % c.size()];
    if (a.x == b.x) continue;  // vertical pieces enclose nothing
    if (a.x < b.x) segs.push_back({a.x, a.y, b.x, b.y, -1});
    else segs.push_back({b.x, b.y, a.x, a.y, +1});
  }
  if (segs.empty()) return 0.0;
  std::sort(segs.begin(), segs.end(), [](const Seg& p, const Seg& q) { return p.x0 < q.x0; });
  std::vector<double> xs;
  xs.reserve(2 * segs.size());
  for (const auto& s : segs) {
    xs.push_back(s.x0);
    xs.push_back(s.x1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double area = 0.0;
  std::vector<const Seg*> active;
  std::vector<double> cuts;
  std::vector<std::pair<double, int>> column;
  std::size_t next = 0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double xa = xs[k], xb = xs[k + 1];
    std::erase_if(active, [xa](const Seg* s) { return s->x1 <= xa; });
    while (next < segs.size() && segs[next].x0 <= xa) {
      if (segs[next].x1 > xa) active.push_back(&segs[next]);
      ++next;
    }
    if (active.size() < 2) continue;
    // Crossings inside the slab split it further so the vertical order is fixed in each piece.
    cuts.assign({xa, xb});
    for (std::size_t p = 0; p < active.size(); ++p) {
      for (std::size_t q = p + 1; q < active.size(); ++q) {
        const double da = active[p]->y_at(xa) - active[q]->y_at(xa);
        const double db = active[p]->y_at(xb) - active[q]->y_at(xb);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) cuts.push_back(xa + (xb - xa) * (da / (da - db)));
      }
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t m = 0; m + 1 < cuts.size(); ++m) {
      const double u = cuts[m], v = cuts[m + 1];
      if (!(v > u)) continue;
      const double mid = 0.5 * (u + v);
      column.clear();
      for (const Seg* s : active) column.emplace_back(s->y_at(mid), s->dir);
      std::sort(column.begin(), column.end(), [](const auto& p, const auto& q) { return p.first > q.first; });
      int w = 0;
      for (std::size_t r = 0; r + 1 < column.size(); ++r) {
        w += column[r].second;
        if (w != 0) area += std::abs(w) * (v - u) * (column[r].first - column[r + 1].first);
      }
    }
  }
  return area;
}

/// A = enclosed area with multiplicity (winding_area), P = length of the
/// closed curve, F = 4 pi A / P^2 (0 when P = 0). For a curve split into
/// non-overlapping lobes, A and P are the sums over its lobes.
inline LoopMetrics form_factor(std::span<const Point2> c) {
  LoopMetrics m;
  m.area = winding_area(c);
  m.perimeter = polyline_perimeter(c);
  m.form_factor = m.perimeter > 0.0 ? 4.0 * std::numbers::pi * m.area / (m.perimeter * m.perimeter) : 0.0;
  return m;
}

/// I/V curve of memristor l with V and I each divided by their trajectory-wide max |value|.
inline PlaneCurve normalized_iv_curve(const Trajectory& tr, std::size_t l) {
  if (l >= tr.modes.size()) throw ConfigError("normalized_iv_curve: memristor index out of range");
  const auto& m = tr.modes[l];
  double vmax = 0.0, imax = 0.0;
  for (std::size_t k = 0; k < m.v_cap.size(); ++k) {
    vmax = std::max(vmax, std::abs(m.v_cap[k]));
    imax = std::max(imax, std::abs(m.i_qp[k]));
  }
  const double sv = vmax > 0.0 ? 1.0 / vmax : 0.0;
  const double si = imax > 0.0 ? 1.0 / imax : 0.0;
  PlaneCurve c(m.v_cap.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = {m.v_cap[k] * sv, m.i_qp[k] * si};
  return c;
}

struct PeriodSeries {
  std::vector<LoopMetrics> periods;
  double mean_form_factor = 0.0;
};

/// One LoopMetrics per drive period (samples k*spp .. (k+1)*spp inclusive) of the
/// normalized curve, plus their mean form factor.
inline PeriodSeries per_period_series(const Trajectory& tr, std::size_t l) {
  const std::size_t spp = tr.steps_per_period;
  if (spp == 0 || tr.size() < spp + 1 || (tr.size() - 1) % spp != 0)
    throw ConfigError("per_period_series: trajectory does not span an integer number of periods");
  const PlaneCurve curve = normalized_iv_curve(tr, l);
  const std::size_t n_periods = (tr.size() - 1) / spp;
  PeriodSeries out;
  for (std::size_t k = 0; k < n_periods; ++k) {
    const std::span<const Point2> period(curve.data() + k * spp, spp + 1);
    LoopMetrics m = form_factor(period);
    m.period_index = k;
    out.mean_form_factor += m.form_factor;
    out.periods.push_back(m);
  }
  out.mean_form_factor /= static_cast<double>(n_periods);
  return out;
}

/// CSV with header period,area,perimeter,form_factor.
inline void write_loops_csv(std::ostream& os, const PeriodSeries& s) {
  os << "period,area,perimeter,form_factor\n";
  char buf[128];
  for (const auto& m : s.periods) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", m.period_index, m.area, m.perimeter, m.form_factor);
    os << buf;
  }
}

}  // namespace qmem

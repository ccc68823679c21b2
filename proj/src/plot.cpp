#include "cei/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <vector>

namespace cei {

namespace {

const char* kLeftColor = "#1f77b4";
const char* kRightColor = "#d62728";

void appendf(std::string& out, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

void appendf(std::string& out, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  const int n = vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  if (n > 0) out.append(buf, static_cast<std::size_t>(n));
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi - lo < 1e-9) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

Range range_of(const std::vector<double>& v) {
  Range r;
  if (v.empty()) return r;
  r.lo = r.hi = v[0];
  for (double x : v) r.include(x);
  return r;
}

// Round tick spacing to a 1/2/5 decade multiple.
std::vector<double> nice_ticks(const Range& r, int target) {
  const double span = r.hi - r.lo;
  double step = std::pow(10.0, std::floor(std::log10(span / std::max(target, 2))));
  for (double mult : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
    if (span / (step * mult) <= target) {
      step *= mult;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * span; t += step)
    ticks.push_back(std::abs(t) < 1e-12 ? 0.0 : t);
  return ticks;
}

std::string format_tick(double v) {
  char buf[32];
  snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// One chart area mapping data coordinates to pixels.
struct Panel {
  double px = 70.0, py = 0.0;         // top-left of the plot area
  double pw = 720.0, ph = 170.0;      // plot area size
  Range xr, yr;

  double X(double x) const { return px + (x - xr.lo) / (xr.hi - xr.lo) * pw; }
  double Y(double y) const { return py + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; }

  void frame(std::string& out, const std::string& ylabel, bool xlabels) const {
    appendf(out,
            "<rect x='%.1f' y='%.1f' width='%.1f' height='%.1f' fill='none' "
            "stroke='#555' stroke-width='1'/>\n",
            px, py, pw, ph);
    for (double t : nice_ticks(yr, 5)) {
      const double y = Y(t);
      appendf(out,
              "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#ddd' "
              "stroke-width='0.7'/>\n",
              px, y, px + pw, y);
      appendf(out,
              "<text x='%.1f' y='%.1f' font-size='11' text-anchor='end' "
              "fill='#333'>%s</text>\n",
              px - 6.0, y + 3.5, format_tick(t).c_str());
    }
    for (double t : nice_ticks(xr, 8)) {
      const double x = X(t);
      appendf(out,
              "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#ddd' "
              "stroke-width='0.7'/>\n",
              x, py, x, py + ph);
      if (xlabels)
        appendf(out,
                "<text x='%.1f' y='%.1f' font-size='11' text-anchor='middle' "
                "fill='#333'>%s</text>\n",
                x, py + ph + 16.0, format_tick(t).c_str());
    }
    appendf(out,
            "<text x='%.1f' y='%.1f' font-size='12' text-anchor='middle' "
            "fill='#111' transform='rotate(-90 %.1f %.1f)'>%s</text>\n",
            px - 48.0, py + ph / 2.0, px - 48.0, py + ph / 2.0, ylabel.c_str());
  }

  void polyline(std::string& out, const std::vector<double>& xs,
                const std::vector<double>& ys, const char* color) const {
    if (xs.empty()) return;
    out += "<polyline fill='none' stroke='";
    out += color;
    out += "' stroke-width='1.6' points='";
    for (std::size_t i = 0; i < xs.size(); ++i)
      appendf(out, "%.1f,%.1f ", X(xs[i]), Y(ys[i]));
    out += "'/>\n";
  }

  void dashed_hline(std::string& out, double y, const char* color,
                    const char* label = nullptr) const {
    if (y < yr.lo || y > yr.hi) return;
    appendf(out,
            "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='%s' "
            "stroke-width='1' stroke-dasharray='6 4'/>\n",
            px, Y(y), px + pw, Y(y), color);
    if (label)
      appendf(out,
              "<text x='%.1f' y='%.1f' font-size='10' fill='%s'>%s</text>\n",
              px + pw - 34.0, Y(y) - 3.0, color, label);
  }

  void star(std::string& out, double x, double y, const char* color) const {
    const double cx = X(x), cy = Y(y), ro = 6.0, ri = 2.6;
    out += "<polygon points='";
    for (int k = 0; k < 10; ++k) {
      const double ang = -M_PI / 2.0 + k * M_PI / 5.0;
      const double r = (k % 2 == 0) ? ro : ri;
      appendf(out, "%.1f,%.1f ", cx + r * std::cos(ang), cy + r * std::sin(ang));
    }
    appendf(out, "' fill='%s' stroke='#222' stroke-width='0.6'/>\n", color);
  }

  void circle_marker(std::string& out, double x, double y, const char* color) const {
    appendf(out,
            "<circle cx='%.1f' cy='%.1f' r='4.2' fill='none' stroke='%s' "
            "stroke-width='1.6'/>\n",
            X(x), Y(y), color);
  }

  void cross(std::string& out, double x, double y, const char* color) const {
    const double cx = X(x), cy = Y(y), r = 4.5;
    appendf(out,
            "<path d='M %.1f %.1f L %.1f %.1f M %.1f %.1f L %.1f %.1f' "
            "stroke='%s' stroke-width='1.8'/>\n",
            cx - r, cy - r, cx + r, cy + r, cx - r, cy + r, cx + r, cy - r, color);
  }
};

struct SideSeries {
  std::vector<double> t, s, v, a_in, risk;
  std::vector<std::size_t> upper, lower, infeasible;  // indices into t
};

SideSeries extract(const RunResult& run, Side side) {
  SideSeries out;
  for (const TraceRecord& r : run.trace) {
    if (r.side != side) continue;
    out.t.push_back(r.time);
    out.s.push_back(r.s);
    out.v.push_back(r.v);
    out.a_in.push_back(r.a_in);
    out.risk.push_back(r.max_risk);
    const std::size_t idx = out.t.size() - 1;
    switch (r.event) {
      case TraceEvent::kReplanUpper: out.upper.push_back(idx); break;
      case TraceEvent::kReplanLower: out.lower.push_back(idx); break;
      case TraceEvent::kInfeasible: out.infeasible.push_back(idx); break;
      case TraceEvent::kNone: break;
    }
  }
  return out;
}

Range merge_ranges(Range a, const Range& b) {
  a.include(b.lo);
  a.include(b.hi);
  return a;
}

void markers(std::string& out, const Panel& panel, const SideSeries& ss,
             const std::vector<double>& ys, const char* color) {
  for (std::size_t i : ss.upper) panel.star(out, ss.t[i], ys[i], color);
  for (std::size_t i : ss.lower) panel.circle_marker(out, ss.t[i], ys[i], color);
  for (std::size_t i : ss.infeasible) panel.cross(out, ss.t[i], ys[i], "#111");
}

}  // namespace

std::string run_panels_svg(const RunResult& run, const ScenarioConfig& config) {
  const double width = 840.0, panel_h = 170.0, gap = 46.0, top = 40.0;
  const double height = top + 4 * (panel_h + gap) + 10.0;

  std::string out;
  appendf(out,
          "<svg xmlns='http://www.w3.org/2000/svg' width='%.0f' height='%.0f' "
          "viewBox='0 0 %.0f %.0f'>\n<rect width='%.0f' height='%.0f' "
          "fill='white'/>\n",
          width, height, width, height, width, height);
  appendf(out,
          "<text x='%.1f' y='22' font-size='15' font-family='sans-serif' "
          "fill='#111'>scenario %s</text>\n",
          70.0, config.name.c_str());
  appendf(out,
          "<text x='%.1f' y='22' font-size='12' text-anchor='end' "
          "fill='%s'>left</text>\n<text x='%.1f' y='22' font-size='12' "
          "text-anchor='end' fill='%s'>right</text>\n",
          width - 120.0, kLeftColor, width - 70.0, kRightColor);
  out += "<g font-family='sans-serif'>\n";

  if (run.trace.empty()) {
    appendf(out,
            "<text x='%.1f' y='%.1f' font-size='14' fill='#111'>no trace rows "
            "(run ended at t=%.2f: %s)</text>\n",
            70.0, top + 40.0, run.outcome.final_time,
            run.outcome.end_reason.c_str());
    out += "</g>\n</svg>\n";
    return out;
  }

  const SideSeries L = extract(run, Side::kLeft);
  const SideSeries R = extract(run, Side::kRight);
  Range tr = merge_ranges(range_of(L.t), range_of(R.t));
  tr.pad();

  struct Spec {
    const char* label;
    const std::vector<double>* left;
    const std::vector<double>* right;
  };
  const Spec specs[4] = {{"position [m]", &L.s, &R.s},
                         {"velocity [m/s]", &L.v, &R.v},
                         {"input [m/s^2]", &L.a_in, &R.a_in},
                         {"perceived risk", &L.risk, &R.risk}};

  for (int p = 0; p < 4; ++p) {
    Panel panel;
    panel.py = top + p * (panel_h + gap);
    panel.ph = panel_h;
    panel.xr = tr;
    Range yr = merge_ranges(range_of(*specs[p].left), range_of(*specs[p].right));
    if (p == 3) {
      yr.include(0.0);
      yr.include(1.0);
      yr.include(config.left.rho_upper);
      yr.include(config.right.rho_upper);
    }
    yr.pad();
    panel.yr = yr;
    panel.frame(out, specs[p].label, p == 3);

    if (p == 0 && config.track.kind == TrackKind::kMerge)
      panel.dashed_hline(out, config.track.merge_point(), "#777", "merge");
    if (p == 3) {
      panel.dashed_hline(out, config.left.rho_lower, kLeftColor);
      panel.dashed_hline(out, config.left.rho_upper, kLeftColor);
      panel.dashed_hline(out, config.right.rho_lower, kRightColor);
      panel.dashed_hline(out, config.right.rho_upper, kRightColor);
    }

    panel.polyline(out, L.t, *specs[p].left, kLeftColor);
    panel.polyline(out, R.t, *specs[p].right, kRightColor);
    markers(out, panel, L, *specs[p].left, kLeftColor);
    markers(out, panel, R, *specs[p].right, kRightColor);
    if (p == 3)
      appendf(out,
              "<text x='%.1f' y='%.1f' font-size='12' text-anchor='middle' "
              "fill='#111'>time [s]</text>\n",
              panel.px + panel.pw / 2.0, panel.py + panel.ph + 34.0);
  }

  out += "</g>\n</svg>\n";
  return out;
}

std::string sweep_svg(const SweepResult& sweep) {
  const double width = 640.0, height = 420.0;
  std::string out;
  appendf(out,
          "<svg xmlns='http://www.w3.org/2000/svg' width='%.0f' height='%.0f' "
          "viewBox='0 0 %.0f %.0f'>\n<rect width='%.0f' height='%.0f' "
          "fill='white'/>\n<g font-family='sans-serif'>\n",
          width, height, width, height, width, height);

  Panel panel;
  panel.px = 70.0;
  panel.py = 46.0;
  panel.pw = width - 100.0;
  panel.ph = height - 120.0;

  std::vector<double> vx, vy;
  for (const SweepRow& row : sweep.rows) {
    vx.push_back(row.velocity);
    if (!row.collided) vy.push_back(row.steady_gap);
  }
  panel.xr = range_of(vx);
  panel.xr.pad();
  panel.yr = vy.empty() ? Range{0.0, 1.0} : range_of(vy);
  panel.yr.include(0.0);
  panel.yr.pad();
  panel.frame(out, "steady-state gap [m]", true);
  appendf(out,
          "<text x='%.1f' y='%.1f' font-size='12' text-anchor='middle' "
          "fill='#111'>follower velocity [m/s]</text>\n",
          panel.px + panel.pw / 2.0, panel.py + panel.ph + 34.0);
  appendf(out, "<text x='70' y='24' font-size='15' fill='#111'>car-following "
               "steady gaps</text>\n");

  if (sweep.fit.valid) {
    const double x0 = panel.xr.lo, x1 = panel.xr.hi;
    appendf(out,
            "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#555' "
            "stroke-width='1.4' stroke-dasharray='7 4'/>\n",
            panel.X(x0), panel.Y(sweep.fit.intercept + sweep.fit.slope * x0),
            panel.X(x1), panel.Y(sweep.fit.intercept + sweep.fit.slope * x1));
    appendf(out,
            "<text x='%.1f' y='%.1f' font-size='12' fill='#333'>gap = %.3f + "
            "%.3f v, R^2 = %.4f</text>\n",
            panel.px + 10.0, panel.py + 18.0, sweep.fit.intercept,
            sweep.fit.slope, sweep.fit.r_squared);
  }

  for (const SweepRow& row : sweep.rows) {
    if (row.collided) {
      panel.cross(out, row.velocity,
                  panel.yr.lo + 0.05 * (panel.yr.hi - panel.yr.lo), kRightColor);
    } else {
      appendf(out, "<circle cx='%.1f' cy='%.1f' r='4.5' fill='%s'/>\n",
              panel.X(row.velocity), panel.Y(row.steady_gap), kLeftColor);
    }
  }

  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace cei

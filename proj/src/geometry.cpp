#include "flexbie/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "flexbie/quadrature.hpp"

namespace flexbie {

CurvePoint Curve::at(double t) const {
  std::array<Vec2, 5> g;
  derivatives(t, g);

  CurvePoint p;
  p.t = t;
  p.pos = g[0];
  const double v = norm(g[1]);
  p.speed = v;
  p.tau = (1.0 / v) * g[1];
  p.nrm = {p.tau.y, -p.tau.x};

  const double c = cross(g[1], g[2]);
  const double cp = cross(g[1], g[3]);
  const double cpp = cross(g[2], g[3]) + cross(g[1], g[4]);
  const double vp = dot(g[1], g[2]) / v;
  const double vpp = (dot(g[2], g[2]) + dot(g[1], g[3])) / v - vp * vp / v;

  const double v3 = v * v * v;
  const double kt = cp / v3 - 3.0 * c * vp / (v3 * v);
  const double ktt = cpp / v3 - 6.0 * cp * vp / (v3 * v) -
                     3.0 * c * vpp / (v3 * v) + 12.0 * c * vp * vp / (v3 * v * v);

  p.kappa = c / v3;
  p.kappa_s = kt / v;
  p.kappa_ss = ktt / (v * v) - kt * vp / v3;
  return p;
}

void Circle::derivatives(double t, std::array<Vec2, 5>& d) const {
  const double co = std::cos(t), si = std::sin(t);
  d[0] = c_ + Vec2{r_ * co, r_ * si};
  d[1] = {-r_ * si, r_ * co};
  d[2] = {-r_ * co, -r_ * si};
  d[3] = {r_ * si, -r_ * co};
  d[4] = {r_ * co, r_ * si};
}

Vec2 Circle::chord(double t1, double t2) const {
  // cos t1 - cos t2 = -2 sin(m) sin(d), sin t1 - sin t2 = 2 cos(m) sin(d)
  const double m = 0.5 * (t1 + t2), d = 0.5 * (t1 - t2);
  const double sd = std::sin(d);
  return {-2.0 * r_ * std::sin(m) * sd, 2.0 * r_ * std::cos(m) * sd};
}

void Droplet::derivatives(double t, std::array<Vec2, 5>& d) const {
  const double co = std::cos(t), si = std::sin(t);
  const double c2 = std::cos(2.0 * t), s2 = std::sin(2.0 * t);
  // y = sin t - 0.4 cos^2 t = sin t - 0.2 - 0.2 cos 2t
  d[0] = {2.0 * co, si - 0.2 - 0.2 * c2};
  d[1] = {-2.0 * si, co + 0.4 * s2};
  d[2] = {-2.0 * co, -si + 0.8 * c2};
  d[3] = {2.0 * si, -co - 1.6 * s2};
  d[4] = {2.0 * co, si - 3.2 * c2};
}

Vec2 Droplet::chord(double t1, double t2) const {
  const double m = 0.5 * (t1 + t2), d = 0.5 * (t1 - t2);
  const double sd = std::sin(d), s2d = std::sin(2.0 * d);
  // y = sin t - 0.2 - 0.2 cos 2t, so the constant drops out of the chord
  return {-4.0 * std::sin(m) * sd,
          2.0 * std::cos(m) * sd + 0.4 * std::sin(2.0 * m) * s2d};
}

void Starfish::derivatives(double t, std::array<Vec2, 5>& d) const {
  const double n = arms_;
  const double cn = std::cos(n * t), sn = std::sin(n * t);
  // radius rho(t) = 1 + amp cos(n t) and its t-derivatives
  double rho[5] = {1.0 + amp_ * cn, -amp_ * n * sn, -amp_ * n * n * cn,
                   amp_ * n * n * n * sn, amp_ * n * n * n * n * cn};
  const double co = std::cos(t), si = std::sin(t);
  // e = (cos t, sin t); e' = e_perp; e'' = -e; cycle of length 4
  const Vec2 e{co, si}, ep{-si, co};
  const Vec2 ed[5] = {e, ep, -e, -ep, e};
  const double binom[5][5] = {{1, 0, 0, 0, 0},
                              {1, 1, 0, 0, 0},
                              {1, 2, 1, 0, 0},
                              {1, 3, 3, 1, 0},
                              {1, 4, 6, 4, 1}};
  for (int j = 0; j <= 4; ++j) {
    Vec2 acc{0.0, 0.0};
    for (int m = 0; m <= j; ++m) acc += binom[j][m] * rho[j - m] * ed[m];
    d[j] = acc;
  }
}

Vec2 Starfish::chord(double t1, double t2) const {
  // Product-to-sum: cos(nt) cos t = (cos((n+1)t) + cos((n-1)t)) / 2 and
  // cos(nt) sin t = (sin((n+1)t) - sin((n-1)t)) / 2, then difference each
  // pure harmonic exactly.
  const double n = arms_;
  const double m = 0.5 * (t1 + t2), d = 0.5 * (t1 - t2);
  const double sd = std::sin(d);
  const double sp = std::sin((n + 1.0) * d), sm = std::sin((n - 1.0) * d);
  double cx = -2.0 * std::sin(m) * sd;
  double cy = 2.0 * std::cos(m) * sd;
  cx += -amp_ * std::sin((n + 1.0) * m) * sp - amp_ * std::sin((n - 1.0) * m) * sm;
  cy += amp_ * std::cos((n + 1.0) * m) * sp - amp_ * std::cos((n - 1.0) * m) * sm;
  return {cx, cy};
}

void TransformedCurve::derivatives(double t, std::array<Vec2, 5>& d) const {
  base_->derivatives(t, d);
  for (auto& v : d) v = {m00_ * v.x + m01_ * v.y, m10_ * v.x + m11_ * v.y};
  d[0] += shift_;
}

Vec2 TransformedCurve::chord(double t1, double t2) const {
  const Vec2 c = base_->chord(t1, t2);
  return {m00_ * c.x + m01_ * c.y, m10_ * c.x + m11_ * c.y};
}

Panelization::Panelization(std::vector<std::shared_ptr<const Curve>> curves,
                           int panels_per_curve, int order)
    : curves_(std::move(curves)),
      panels_per_curve_(panels_per_curve),
      order_(order) {
  assert(panels_per_curve_ >= 1 && order_ >= 2);
  const QuadRule& rule = gauss_legendre(order_);
  ref_ = rule.x;
  ref_w_ = rule.w;

  const int nc = static_cast<int>(curves_.size());
  panels_.reserve(nc * panels_per_curve_);
  nodes_.reserve(nc * panels_per_curve_ * order_);
  lengths_.resize(nc);

  for (int c = 0; c < nc; ++c) {
    double s_running = 0.0;
    for (int p = 0; p < panels_per_curve_; ++p) {
      Panel pan;
      pan.component = c;
      pan.t0 = 2.0 * M_PI * p / panels_per_curve_;
      pan.t1 = 2.0 * M_PI * (p + 1) / panels_per_curve_;
      pan.first_node = static_cast<int>(nodes_.size());
      pan.s0 = s_running;
      const double mid = 0.5 * (pan.t0 + pan.t1);
      const double half = 0.5 * (pan.t1 - pan.t0);

      std::vector<double> spd(order_);
      for (int j = 0; j < order_; ++j) {
        CurvePoint q = curves_[c]->at(mid + half * ref_[j]);
        spd[j] = q.speed * half;  // |dgamma/dxi| on the reference interval
        nodes_.push_back(q);
        weights_.push_back(ref_w_[j] * spd[j]);
      }
      std::vector<double> sc = legendre_coefficients(rule, spd);
      std::vector<double> off = legendre_antiderivative(sc);
      pan.arc_len = legendre_eval(off, 1.0);
      for (int j = 0; j < order_; ++j)
        node_s_.push_back(s_running + legendre_eval(off, ref_[j]));
      s_running += pan.arc_len;
      spd_coef_.push_back(std::move(sc));
      arc_coef_.push_back(std::move(off));
      panels_.push_back(pan);
    }
    lengths_[c] = s_running;
  }
}

double Panelization::total_length() const {
  double s = 0.0;
  for (double l : lengths_) s += l;
  return s;
}

double Panelization::param_at_arclen(int component, double s) const {
  const double len = lengths_[component];
  s = std::fmod(s, len);
  if (s < 0.0) s += len;
  // Locate the panel whose [s0, s0 + arc_len) contains s.
  int lo = panel_begin(component), hi = panel_end(component) - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (panels_[mid].s0 <= s)
      lo = mid;
    else
      hi = mid - 1;
  }
  const Panel& pan = panels_[lo];
  const auto& off = arc_coef_[lo];
  const auto& spd = spd_coef_[lo];
  const double target = s - pan.s0;
  // Safeguarded Newton on off(xi) = target; off is strictly increasing.
  double a = -1.0, b = 1.0, xi = -1.0 + 2.0 * target / pan.arc_len;
  for (int it = 0; it < 60; ++it) {
    const double f = legendre_eval(off, xi) - target;
    if (f > 0.0)
      b = xi;
    else
      a = xi;
    const double df = legendre_eval(spd, xi);
    double step = f / df;
    double next = xi - step;
    if (next <= a || next >= b) next = 0.5 * (a + b);
    if (std::abs(next - xi) < 1e-15) {
      xi = next;
      break;
    }
    xi = next;
  }
  const double mid = 0.5 * (pan.t0 + pan.t1), half = 0.5 * (pan.t1 - pan.t0);
  return mid + half * xi;
}

CurvePoint Panelization::nearest_point(int component, const Vec2& x) const {
  const Curve& cur = *curves_[component];
  double best = 1e300;
  double t = 0.0;
  for (int j = node_begin(component); j < node_end(component); ++j) {
    const double d2 = norm2(x - nodes_[j].pos);
    if (d2 < best) {
      best = d2;
      t = nodes_[j].t;
    }
  }
  // Newton on g(t) = (x - gamma(t)) . gamma'(t) = 0.
  std::array<Vec2, 5> g;
  for (int it = 0; it < 30; ++it) {
    cur.derivatives(t, g);
    const Vec2 r = x - g[0];
    const double f = dot(r, g[1]);
    const double df = -dot(g[1], g[1]) + dot(r, g[2]);
    const double step = f / df;
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return cur.at(t);
}

double Panelization::min_node_distance(const Vec2& x) const {
  double best = 1e300;
  for (const auto& q : nodes_) best = std::min(best, norm2(x - q.pos));
  return std::sqrt(best);
}

int Panelization::side_of(const Vec2& x) const {
  // Nodal winding number; switch to nearest-point projection when x is
  // within a few node spacings of some component (the nodal quadrature of
  // the winding integral degrades there).
  double best = 1e300;
  int best_node = 0;
  for (int j = 0; j < num_nodes(); ++j) {
    const double d2 = norm2(x - nodes_[j].pos);
    if (d2 < best) {
      best = d2;
      best_node = j;
    }
  }
  const Panel& pan = panels_[node_panel(best_node)];
  const double spacing = pan.arc_len / order_;
  if (best < 25.0 * spacing * spacing) {
    const CurvePoint q =
        nearest_point(panels_[node_panel(best_node)].component, x);
    return dot(x - q.pos, q.nrm) >= 0.0 ? +1 : -1;
  }
  double w = 0.0;
  for (int j = 0; j < num_nodes(); ++j) {
    const Vec2 r = nodes_[j].pos - x;
    w += weights_[j] * cross(r, nodes_[j].tau) / norm2(r);
  }
  w /= 2.0 * M_PI;
  return std::lround(w) >= 1 ? -1 : +1;
}

}  // namespace flexbie

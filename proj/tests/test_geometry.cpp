#include "flexbie/geometry.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "doctest.h"

using namespace flexbie;

namespace {

// d/dt by five-point central differences.
double fd5(const std::function<double(double)>& f, double t, double h) {
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) /
         (12.0 * h);
}

}  // namespace

TEST_CASE("circle frame and curvature") {
  Circle c({0.4, -0.3}, 2.5);
  for (double t : {0.0, 0.7, 2.0, 4.4, 6.0}) {
    CurvePoint p = c.at(t);
    CHECK(p.kappa == doctest::Approx(1.0 / 2.5).epsilon(1e-14));
    CHECK(std::abs(p.kappa_s) < 1e-13);
    CHECK(std::abs(p.kappa_ss) < 1e-12);
    CHECK(p.speed == doctest::Approx(2.5).epsilon(1e-14));
    // Outward normal points away from the center.
    Vec2 radial = p.pos - Vec2{0.4, -0.3};
    CHECK(dot(radial, p.nrm) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(std::abs(dot(p.tau, p.nrm)) < 1e-15);
  }
}

TEST_CASE("transformed circle scales curvature") {
  auto base = std::make_shared<Circle>(Vec2{0, 0}, 1.0);
  TransformedCurve tc(base, 1.5, 0.6, {2.0, -1.0});
  CurvePoint p = tc.at(1.1);
  CHECK(p.kappa == doctest::Approx(1.0 / 1.5).epsilon(1e-13));
  CHECK(norm(p.pos - Vec2{2.0, -1.0}) == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(p.speed == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("curvature derivatives match finite differences") {
  Droplet drop;
  Starfish star(5, 0.3);
  const Curve* curves[] = {&drop, &star};
  for (const Curve* cur : curves) {
    for (double t : {0.3, 1.2, 2.8, 5.1}) {
      CurvePoint p = cur->at(t);
      auto kap = [&](double u) { return cur->at(u).kappa; };
      auto kap_s = [&](double u) { return cur->at(u).kappa_s; };
      const double h = 1e-4;
      // d/ds = (1/speed) d/dt
      double ks_fd = fd5(kap, t, h) / p.speed;
      double kss_fd = fd5(kap_s, t, h) / p.speed;
      CHECK(p.kappa_s == doctest::Approx(ks_fd).epsilon(1e-9));
      CHECK(p.kappa_ss == doctest::Approx(kss_fd).epsilon(1e-8));
      // Tangent angle derivative gives curvature directly.
      auto ang = [&](double u) {
        std::array<Vec2, 5> d;
        cur->derivatives(u, d);
        return std::atan2(d[1].y, d[1].x);
      };
      if (std::abs(ang(t + 2 * h) - ang(t - 2 * h)) < 1.0)  // avoid branch cut
        CHECK(p.kappa == doctest::Approx(fd5(ang, t, h) / p.speed).epsilon(1e-10));
    }
  }
}

TEST_CASE("droplet is convex, starfish 0.3/5 is not") {
  Droplet drop;
  Starfish star(5, 0.3);
  double kmin_drop = 1e9, kmin_star = 1e9;
  for (int i = 0; i < 2000; ++i) {
    double t = 2.0 * M_PI * i / 2000;
    kmin_drop = std::min(kmin_drop, drop.at(t).kappa);
    kmin_star = std::min(kmin_star, star.at(t).kappa);
  }
  CHECK(kmin_drop > 0.0);
  CHECK(kmin_star < 0.0);
}

TEST_CASE("arclength Taylor expansion of the curve") {
  auto drop = std::make_shared<Droplet>();
  Panelization pan({drop}, 16, 16);
  const double s0 = 2.3;
  CurvePoint p = pan.curve(0).at(pan.param_at_arclen(0, s0));
  for (double s : {1e-2, 5e-3, 2.5e-3}) {
    CurvePoint q = pan.curve(0).at(pan.param_at_arclen(0, s0 + s));
    Vec2 pred = p.pos + s * p.tau - (s * s / 2.0) * p.kappa * p.nrm -
                (s * s * s / 6.0) * (p.kappa_s * p.nrm + p.kappa * p.kappa * p.tau) +
                (s * s * s * s / 24.0) *
                    ((p.kappa * p.kappa * p.kappa - p.kappa_ss) * p.nrm -
                     3.0 * p.kappa * p.kappa_s * p.tau);
    CHECK(norm(q.pos - pred) < 50.0 * std::pow(s, 5));
  }
}

TEST_CASE("panelization weights sum to arclength") {
  auto circ = std::make_shared<Circle>(Vec2{0, 0}, 1.3);
  Panelization pan({circ}, 8, 16);
  double s = 0.0;
  for (int j = 0; j < pan.num_nodes(); ++j) s += pan.weight(j);
  CHECK(s == doctest::Approx(2.0 * M_PI * 1.3).epsilon(1e-13));
  CHECK(pan.component_length(0) == doctest::Approx(2.0 * M_PI * 1.3).epsilon(1e-13));

  auto drop = std::make_shared<Droplet>();
  Panelization pd8({drop}, 8, 16), pd16({drop}, 16, 16);
  CHECK(pd8.total_length() ==
        doctest::Approx(pd16.total_length()).epsilon(1e-12));
}

TEST_CASE("node arclength is consistent with param_at_arclen") {
  auto drop = std::make_shared<Droplet>();
  Panelization pan({drop}, 12, 16);
  for (int j : {0, 5, 50, 100, 191}) {
    double t = pan.param_at_arclen(0, pan.node_arclen(j));
    CHECK(t == doctest::Approx(pan.node(j).t).epsilon(1e-12));
  }
}

TEST_CASE("nearest point on circle") {
  auto circ = std::make_shared<Circle>(Vec2{0, 0}, 1.0);
  Panelization pan({circ}, 8, 16);
  CurvePoint q = pan.nearest_point(0, {2.0, 0.3});
  const double r = std::hypot(2.0, 0.3);
  CHECK(q.pos.x == doctest::Approx(2.0 / r).epsilon(1e-12));
  CHECK(q.pos.y == doctest::Approx(0.3 / r).epsilon(1e-12));
}

TEST_CASE("side classification, including points very near the boundary") {
  auto drop = std::make_shared<Droplet>();
  Panelization pan({drop}, 16, 16);
  CHECK(pan.side_of({0.0, 0.0}) == -1);
  CHECK(pan.side_of({1.35, 0.0}) == -1);
  CHECK(pan.side_of({3.0, 0.0}) == +1);
  CHECK(pan.side_of({0.0, -5.0}) == +1);
  for (double t : {0.4, 1.9, 3.3, 5.6}) {
    CurvePoint p = pan.curve(0).at(t);
    for (double h : {1e-3, 1e-6, 1e-8}) {
      CHECK(pan.side_of(p.pos + h * p.nrm) == +1);
      CHECK(pan.side_of(p.pos - h * p.nrm) == -1);
    }
  }
}

TEST_CASE("side classification with two components") {
  auto a = std::make_shared<Circle>(Vec2{0, 0}, 1.0);
  auto b = std::make_shared<Circle>(Vec2{4, 0}, 1.0);
  Panelization pan({a, b}, 8, 16);
  CHECK(pan.side_of({0, 0}) == -1);
  CHECK(pan.side_of({4, 0.2}) == -1);
  CHECK(pan.side_of({2, 0}) == +1);
  CHECK(pan.side_of({10, 10}) == +1);
}

TEST_CASE("exact chords agree with position differences when separated") {
  auto circ = std::make_shared<Circle>(Vec2{0.4, -0.2}, 1.7);
  auto drop = std::make_shared<Droplet>();
  auto star = std::make_shared<Starfish>(5, 0.3);
  auto xform = std::make_shared<TransformedCurve>(star, 0.8, 0.6, Vec2{2, 1});
  const Curve* curves[] = {circ.get(), drop.get(), star.get(), xform.get()};
  for (const Curve* c : curves) {
    for (double t1 : {0.3, 2.0, 5.1}) {
      const double t2 = t1 + 0.9;
      const Vec2 ch = c->chord(t1, t2);
      const Vec2 pd = c->position(t1) - c->position(t2);
      CHECK(norm(ch - pd) < 1e-13 * std::max(1.0, norm(pd)));
    }
  }
}

TEST_CASE("exact chords keep relative accuracy at tiny separations") {
  // The position difference loses absolute accuracy ~1e-16 at any
  // separation; the chord must track dt * gamma'(midpoint) with full
  // relative accuracy well below that scale.
  auto circ = std::make_shared<Circle>(Vec2{0.0, 0.0}, 2.0);
  auto drop = std::make_shared<Droplet>();
  auto star = std::make_shared<Starfish>(3, 0.2);
  const Curve* curves[] = {circ.get(), drop.get(), star.get()};
  for (const Curve* c : curves) {
    for (double t0 : {0.7, 2.9, 4.4}) {
      for (double dt : {1e-6, 1e-9, 1e-12}) {
        // Compare against the separation the arguments actually encode;
        // fl(t0 + dt) - t0 differs from dt in relative terms.
        const double tp = t0 + dt;
        const double dte = tp - t0;
        const Vec2 ch = c->chord(tp, t0);
        std::array<Vec2, 5> d;
        c->derivatives(t0 + 0.5 * dte, d);
        // chord = dte * gamma'(mid) + dte^3 gamma'''(mid)/24 + O(dte^5)
        const Vec2 model = dte * d[1] + (dte * dte * dte / 24.0) * d[3];
        CHECK(norm(ch - model) < 1e-13 * norm(ch));
      }
    }
  }

  // Circle chord length is exactly 2 R sin(dte / 2).
  const double t0 = 1.0;
  const double tp = t0 + 3e-11;
  const double dte = tp - t0;
  const Vec2 ch = circ->chord(tp, t0);
  CHECK(norm(ch) == doctest::Approx(2.0 * 2.0 * std::sin(0.5 * dte))
                        .epsilon(1e-13));
}

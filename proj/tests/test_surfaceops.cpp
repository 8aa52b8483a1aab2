#include "flexbie/surfaceops.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "flexbie/geometry.hpp"
#include "flexbie/kernels.hpp"
#include "flexbie/quadrature.hpp"

using namespace flexbie;

namespace {

// Brute-force principal value of the geometric Hilbert kernel against a
// density given as a function of the curve parameter: adaptive quadrature
// outside a symmetric arclength window, Richardson-extrapolated in the
// window size (error model c1 eps + c3 eps^3; the even term cancels).
double pv_hilbert(const Panelization& pan, int c, const CurvePoint& x,
                  double sx, const std::function<double(double)>& rho) {
  const Curve& curve = pan.curve(c);
  const double L = pan.component_length(c);
  auto at_eps = [&](double eps) {
    const double t_lo = pan.param_at_arclen(c, sx + eps);
    const double t_hi = pan.param_at_arclen(c, sx + L - eps);
    auto f = [&](double t) -> std::complex<double> {
      const CurvePoint y = curve.at(t);
      const PairInvariants iv = pair_invariants(curve, x, y);
      return hilbert_kernel(iv) * rho(t) * y.speed;
    };
    double total = 0.0;
    if (t_hi > t_lo) {
      total = adaptive_integrate(f, t_lo, t_hi, 1e-12, 1.0, 16, 32, nullptr)
                  .real();
    } else {
      total =
          adaptive_integrate(f, t_lo, 2.0 * M_PI, 1e-12, 1.0, 16, 32, nullptr)
              .real() +
          adaptive_integrate(f, 0.0, t_hi, 1e-12, 1.0, 16, 32, nullptr).real();
    }
    return total;
  };
  const double h = 5e-4;
  const double i1 = at_eps(4.0 * h), i2 = at_eps(2.0 * h), i3 = at_eps(h);
  return (8.0 * i3 - 6.0 * i2 + i1) / 3.0;
}

double linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x * x;
  return std::sqrt(m);
}

}  // namespace

TEST_CASE("Hilbert transform maps circle harmonics to conjugates") {
  auto circ = std::make_shared<Circle>(Vec2{0.0, 0.0}, 1.0);
  Panelization pan({circ}, 16, 16);
  const int n = pan.num_nodes();
  const SurfaceOperator H = hilbert_matrix(pan);

  for (int m : {1, 2, 3, 4}) {
    std::vector<double> rho(n), want(n);
    for (int j = 0; j < n; ++j) {
      rho[j] = std::cos(m * pan.node(j).t);
      want[j] = std::sin(m * pan.node(j).t);
    }
    const std::vector<double> got = H.apply(rho);
    for (int j = 0; j < n; ++j)
      CHECK(std::abs(got[j] - want[j]) < 1e-10);
  }

  // Constant densities are annihilated.
  std::vector<double> ones(n, 1.0);
  CHECK(linf(H.apply(ones)) < 1e-11);
}

TEST_CASE("Hilbert sign is fixed by the PV oracle on the circle") {
  auto circ = std::make_shared<Circle>(Vec2{0.0, 0.0}, 1.0);
  Panelization pan({circ}, 16, 16);
  auto rho = [](double t) { return std::cos(2.0 * t); };
  for (int i : {3, 140}) {
    const CurvePoint x = pan.node(i);
    const double pv = pv_hilbert(pan, 0, x, pan.node_arclen(i), rho);
    CHECK(std::abs(pv - std::sin(2.0 * x.t)) < 1e-7);
  }
}

TEST_CASE("Hilbert matrix matches the PV oracle on the droplet") {
  auto drop = std::make_shared<Droplet>();
  Panelization pan({drop}, 16, 16);
  const int n = pan.num_nodes();
  const SurfaceOperator H = hilbert_matrix(pan);

  auto rho = [](double t) { return std::cos(2.0 * t) + 0.3 * std::sin(5.0 * t); };
  std::vector<double> rv(n);
  for (int j = 0; j < n; ++j) rv[j] = rho(pan.node(j).t);
  const std::vector<double> got = H.apply(rv);

  for (int i : {37, 120, 201}) {
    const double pv = pv_hilbert(pan, 0, pan.node(i), pan.node_arclen(i), rho);
    CHECK(std::abs(got[i] - pv) < 1e-7);
  }
}

TEST_CASE("double layer of a constant density is -1/2 on the surface") {
  auto circ = std::make_shared<Circle>(Vec2{0.3, -0.1}, 1.4);
  auto drop = std::make_shared<Droplet>();
  for (const auto& curve : {std::static_pointer_cast<const Curve>(circ),
                            std::static_pointer_cast<const Curve>(drop)}) {
    Panelization pan({curve}, 16, 16);
    const SurfaceOperator D = laplace_dlp_matrix(pan);
    const std::vector<double> out =
        D.apply(std::vector<double>(pan.num_nodes(), 1.0));
    for (double v : out) CHECK(std::abs(v + 0.5) < 1e-10);
  }
}

TEST_CASE("double layer kernel is constant on a circle") {
  const double R = 1.7;
  auto circ = std::make_shared<Circle>(Vec2{0.0, 0.0}, R);
  Panelization pan({circ}, 8, 16);
  const SurfaceOperator D = laplace_dlp_matrix(pan);
  const double cst = -1.0 / (4.0 * M_PI * R);
  for (int j = 0; j < pan.num_nodes(); ++j)
    CHECK(D.entry(0, j) == doctest::Approx(cst * pan.weight(j)).epsilon(1e-12));
}

TEST_CASE("quarter H squared equals D squared minus a quarter identity") {
  auto drop = std::make_shared<Droplet>();
  Panelization pan({drop}, 16, 16);  // N = 256
  const int n = pan.num_nodes();
  const SurfaceOperator H = hilbert_matrix(pan);
  const SurfaceOperator D = laplace_dlp_matrix(pan);

  std::mt19937 rng(20260816);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> a(9), b(9);
    for (int m = 0; m <= 8; ++m) {
      a[m] = uni(rng);
      b[m] = uni(rng);
    }
    std::vector<double> rho(n);
    for (int j = 0; j < n; ++j) {
      const double t = pan.node(j).t;
      double v = 0.0;
      for (int m = 0; m <= 8; ++m)
        v += a[m] * std::cos(m * t) + b[m] * std::sin(m * t);
      rho[j] = v;
    }
    const std::vector<double> hh = H.apply(H.apply(rho));
    const std::vector<double> dd = D.apply(D.apply(rho));
    std::vector<double> res(n);
    for (int j = 0; j < n; ++j)
      res[j] = 0.25 * hh[j] + 0.25 * rho[j] - dd[j];
    CHECK(l2(res) <= 1e-8 * l2(rho));
  }
}

TEST_CASE("arclength derivative acts exactly on resolved data") {
  const double R = 1.7;
  auto circ = std::make_shared<Circle>(Vec2{0.0, 0.0}, R);
  Panelization pc({circ}, 16, 16);
  const SurfaceOperator Dc = dds_matrix(pc);
  std::vector<double> rho(pc.num_nodes());
  for (int j = 0; j < pc.num_nodes(); ++j) rho[j] = std::sin(pc.node(j).t);
  const std::vector<double> got = Dc.apply(rho);
  for (int j = 0; j < pc.num_nodes(); ++j)
    CHECK(std::abs(got[j] - std::cos(pc.node(j).t) / R) < 1e-10);

  // Constants die (row entries reach ~1e2, so the cancellation floor sits
  // near 1e-11; measured 4e-11 at this resolution).
  CHECK(linf(Dc.apply(std::vector<double>(pc.num_nodes(), 1.0))) < 1e-9);

  // x-coordinate restricted to the droplet differentiates to tau_x.
  auto drop = std::make_shared<Droplet>();
  Panelization pd({drop}, 16, 16);
  const SurfaceOperator Dd = dds_matrix(pd);
  std::vector<double> xs(pd.num_nodes());
  for (int j = 0; j < pd.num_nodes(); ++j) xs[j] = pd.node(j).pos.x;
  const std::vector<double> gd = Dd.apply(xs);
  for (int j = 0; j < pd.num_nodes(); ++j)
    CHECK(std::abs(gd[j] - pd.node(j).tau.x) < 1e-9);
}

TEST_CASE("d/ds composed with H is the |m|/R multiplier on a circle") {
  auto circ = std::make_shared<Circle>(Vec2{0.0, 0.0}, 1.0);
  Panelization pan({circ}, 16, 16);
  const int n = pan.num_nodes();
  const SurfaceOperator HD = dds_matrix(pan).compose(hilbert_matrix(pan));
  for (int m = 1; m <= 8; ++m) {
    std::vector<double> rc(n), rs(n);
    for (int j = 0; j < n; ++j) {
      rc[j] = std::cos(m * pan.node(j).t);
      rs[j] = std::sin(m * pan.node(j).t);
    }
    const std::vector<double> gc = HD.apply(rc);
    const std::vector<double> gs = HD.apply(rs);
    for (int j = 0; j < n; ++j) {
      CHECK(std::abs(gc[j] - m * rc[j]) < 1e-8);
      CHECK(std::abs(gs[j] - m * rs[j]) < 1e-8);
    }
  }
}

TEST_CASE("operators are block-diagonal over components") {
  auto a = std::make_shared<Circle>(Vec2{0.0, 0.0}, 1.0);
  auto b = std::make_shared<Circle>(Vec2{4.0, 0.0}, 1.0);
  Panelization two({a, b}, 16, 16);
  Panelization one({a}, 16, 16);
  const SurfaceOperator H2 = hilbert_matrix(two);
  const SurfaceOperator H1 = hilbert_matrix(one);
  const int nc = one.num_nodes();

  // Density on component 0 produces exactly zero on component 1.
  std::vector<double> rho(two.num_nodes(), 0.0);
  for (int j = 0; j < nc; ++j) rho[j] = std::cos(two.node(j).t);
  const std::vector<double> out = H2.apply(rho);
  for (int j = nc; j < two.num_nodes(); ++j) CHECK(out[j] == 0.0);

  // Identical translated components carry identical blocks.
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) {
      CHECK(std::abs(H2.entry(i, j) - H1.entry(i, j)) < 1e-13);
      CHECK(std::abs(H2.entry(nc + i, nc + j) - H1.entry(i, j)) < 1e-13);
    }
}

TEST_CASE("operator construction is deterministic") {
  auto drop = std::make_shared<Droplet>();
  Panelization pan({drop}, 8, 16);
  const SurfaceOperator h1 = hilbert_matrix(pan);
  const SurfaceOperator h2 = hilbert_matrix(pan);
  CHECK(h1.data() == h2.data());
  const SurfaceOperator d1 = laplace_dlp_matrix(pan);
  const SurfaceOperator d2 = laplace_dlp_matrix(pan);
  CHECK(d1.data() == d2.data());
}

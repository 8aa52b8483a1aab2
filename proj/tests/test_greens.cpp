#include "flexbie/greens.hpp"

#include <cmath>
#include <complex>
#include <functional>

#include "doctest.h"

using namespace flexbie;

namespace {

double rel_err(Cx got, Cx ref) {
  return std::abs(got - ref) / std::max(1e-300, std::abs(ref));
}

// Laplacian and bilaplacian of a radial profile in terms of rho-derivatives:
// Lap f = 4 (rho f'' + f'),  Lap^2 f = 16 (rho^2 f'''' + 4 rho f''' + 2 f'').
Cx bilap(const RadialDerivs& g, double rho) {
  return 16.0 * (rho * rho * g.d[4] + 4.0 * rho * g.d[3] + 2.0 * g.d[2]);
}
Cx bilap_drho(const RadialDerivs& g, double rho) {
  return 16.0 * (rho * rho * g.d[5] + 6.0 * rho * g.d[4] + 6.0 * g.d[3]);
}

}  // namespace

TEST_CASE("full profile satisfies the plate equation away from the source") {
  // Restricted to kr >= 0.5: below that the identity is evaluated through
  // cancelling 1/z^9 Bessel coefficients and stops being a sharp test
  // (which is why the series path exists).
  for (double k : {0.8, 3.7, 12.0}) {
    FlexuralGreen gf(k);
    for (double r : {0.11, 0.5, 1.7, 4.0}) {
      if (k * r < 0.5) continue;
      RadialDerivs g = gf.full(r);
      const double rho = r * r;
      const double k4 = k * k * k * k;
      // Lap^2 g = k^4 g, and the same after one more d/drho (reaches d[5]).
      CHECK(rel_err(bilap(g, rho), k4 * g.d[0]) < 2e-9);
      CHECK(rel_err(bilap_drho(g, rho), k4 * g.d[1]) < 1e-8);
    }
  }
}

TEST_CASE("remainder series satisfies the shifted plate equation") {
  // Lap^2 (g - g_b) = k^4 g  =>  bilap(rem) = k^4 (rem + g_b).
  for (double k : {0.9, 6.0}) {
    FlexuralGreen gf(k);
    for (double zr : {0.01, 0.3, 0.9}) {
      const double r = zr / k;
      const double rho = r * r;
      RadialDerivs rem = gf.remainder_series(r);
      RadialDerivs gb = FlexuralGreen::biharmonic(r);
      const double k4 = k * k * k * k;
      CHECK(rel_err(bilap(rem, rho), k4 * (rem.d[0] + gb.d[0])) < 1e-11);
      CHECK(rel_err(bilap_drho(rem, rho), k4 * (rem.d[1] + gb.d[1])) < 1e-11);
    }
  }
}

TEST_CASE("biharmonic profile is annihilated by the bilaplacian") {
  for (double r : {0.03, 1.0, 7.0}) {
    RadialDerivs gb = FlexuralGreen::biharmonic(r);
    CHECK(std::abs(bilap(gb, r * r)) < 1e-14 / std::pow(r, 2));
  }
}

TEST_CASE("series plus biharmonic matches the direct evaluation") {
  for (double k : {2.0, 8.0}) {
    FlexuralGreen gf(k);
    for (double zr : {0.3, 0.6, 0.95}) {
      const double r = zr / k;
      RadialDerivs direct = gf.full(r);
      RadialDerivs rem = gf.remainder_series(r);
      RadialDerivs gb = FlexuralGreen::biharmonic(r);
      for (int j = 0; j <= 5; ++j) {
        CHECK(rel_err(direct.d[j], rem.d[j] + gb.d[j]) < 1e-9);
      }
    }
  }
}

TEST_CASE("log-free remainder differs by ln(r) times the log coefficient") {
  // remainder_series - remainder_log_free must equal, order by order,
  // ln(r) * (c - c_b) where c is the log-coefficient profile and c_b its
  // biharmonic part {rho/(8 pi), 1/(8 pi), 0, ...}.
  for (double k : {0.8, 3.7, 12.0}) {
    FlexuralGreen gf(k);
    for (double r : {0.02, 0.21, 0.7}) {
      if (k * r >= 1.0) continue;
      RadialDerivs rem = gf.remainder_series(r);
      RadialDerivs a = gf.remainder_log_free(r);
      RadialDerivs c = gf.log_coefficient(r);
      const double rho = r * r;
      const double cb[6] = {rho / (8.0 * M_PI), 1.0 / (8.0 * M_PI),
                            0.0, 0.0, 0.0, 0.0};
      for (int j = 0; j <= 5; ++j) {
        const Cx want = std::log(r) * (c.d[j] - cb[j]);
        const Cx got = rem.d[j] - a.d[j];
        CHECK(std::abs(got - want) <
              1e-13 * std::max(1.0, std::abs(rem.d[j])));
      }
    }
  }
}

TEST_CASE("remainder at zero matches the series at tiny radius") {
  FlexuralGreen gf(2.0);
  Cx g0, g1, g2;
  gf.remainder_at_zero(&g0, &g1, &g2);
  RadialDerivs rem = gf.remainder_series(1e-7);
  CHECK(rel_err(rem.d[0], g0) < 1e-12);
  CHECK(rel_err(rem.d[1], g1) < 1e-11);
  CHECK(rel_err(rem.d[2], g2) < 1e-10);
}

TEST_CASE("log coefficient: series and bessel paths agree at the switch") {
  // Linear extrapolation of two series-side samples across the switch at
  // kr = 1; its own error is O(eps^2), far below the tolerance, so any
  // residual is genuine path disagreement.
  for (double k : {1.0, 5.0}) {
    FlexuralGreen gf(k);
    const double eps = 1e-6 / k;
    const double r1 = 1.0 / k - 2.0 * eps, r2 = 1.0 / k - eps,
                 r3 = 1.0 / k + eps;
    RadialDerivs a1 = gf.log_coefficient(r1);
    RadialDerivs a2 = gf.log_coefficient(r2);
    RadialDerivs b = gf.log_coefficient(r3);
    for (int j = 0; j <= 5; ++j) {
      const Cx extrap = a2.d[j] + (a2.d[j] - a1.d[j]) * ((r3 - r2) / (r2 - r1));
      CHECK(rel_err(extrap, b.d[j]) < 1e-8);
    }
  }
}

TEST_CASE("log coefficient slope at the origin") {
  FlexuralGreen gf(3.0);
  RadialDerivs c = gf.log_coefficient(1e-8);
  CHECK(rel_err(c.d[1], Cx(1.0 / (8.0 * M_PI))) < 1e-12);
  Cx c0, c1, c2;
  FlexuralGreen::log_coefficient_at_zero(&c0, &c1, &c2);
  CHECK(std::abs(c0) == 0.0);
  CHECK(c1.real() == doctest::Approx(1.0 / (8.0 * M_PI)));
  CHECK(std::abs(c2) == 0.0);
}

TEST_CASE("log coefficient reproduces the imaginary-free log content") {
  // The log content of g is real: Im(g - c ln r) must equal Im(g) exactly,
  // and the imaginary part of c must vanish.
  FlexuralGreen gf(4.0);
  for (double r : {0.1, 0.3, 0.7}) {
    RadialDerivs c = gf.log_coefficient(r);
    for (int j = 0; j <= 5; ++j) CHECK(c.d[j].imag() == 0.0);
  }
}

TEST_CASE("tensor contraction matches exact polynomial derivatives") {
  // Profile rho^3, i.e. f(x, y) = |x - y|^6. References are the exact
  // nested directional derivatives, computed symbolically and frozen.
  const Vec2 x0{0.4, -0.2}, y0{-0.3, 0.5};
  auto prof = [](double rho) {
    RadialDerivs g;
    g.d[0] = rho * rho * rho;
    g.d[1] = 3.0 * rho * rho;
    g.d[2] = 6.0 * rho;
    g.d[3] = 6.0;
    return g;
  };
  const Vec2 dirs[5] = {{1.0, 0.0}, {0.6, 0.8}, {0.0, 1.0}, {-0.8, 0.6},
                        {0.28, -0.96}};
  const bool on_y[5] = {false, true, false, false, true};
  const double ref[6] = {0.941192, 4.03368, -1.15248, -6.5856, 19.7568,
                         -34.99776};
  const double rho = norm2(x0 - y0);
  for (int m = 0; m <= 5; ++m) {
    Cx got = contract(prof(rho), x0 - y0, dirs, on_y, m);
    CHECK(got.real() == doctest::Approx(ref[m]).epsilon(1e-13));
    CHECK(got.imag() == 0.0);
  }
}

TEST_CASE("contraction limit agrees with small-separation contraction") {
  FlexuralGreen gf(2.0);
  Cx g0, g1, g2;
  gf.remainder_at_zero(&g0, &g1, &g2);
  const Vec2 tau{0.6, 0.8}, nrm{0.8, -0.6};
  const Vec2 dirs[4] = {nrm, tau, nrm, nrm};
  const bool on_y[4] = {false, true, true, false};
  const double r = 1e-6;
  const Vec2 x{0.0, 0.0}; const Vec2 y = x - r * tau;
  RadialDerivs rem = gf.remainder_series(norm(x - y));
  for (int m : {0, 2, 4}) {
    Cx lim = contract_limit(g0, g1, g2, dirs, on_y, m);
    Cx val = contract(rem, x - y, dirs, on_y, m);
    CHECK(std::abs(lim - val) < 1e-8 * std::max(1.0, std::abs(lim)));
  }
  for (int m : {1, 3}) {
    Cx val = contract(rem, x - y, dirs, on_y, m);
    CHECK(std::abs(contract_limit(g0, g1, g2, dirs, on_y, m)) == 0.0);
    CHECK(std::abs(val) < 1e-5);
  }
}

#include "flexbie/greens.hpp"

#include <cassert>
#include <cmath>

#include "flexbie/special.hpp"

namespace flexbie {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606;
constexpr int kSeriesTerms = 26;

// (d/drho)^j F0(k sqrt(rho)) = c0[j] F0(z) + c1[j] F1(z), z = k sqrt(rho).
// Three recurrence families:
//   cylinder (J, Y, H):  F0' = -F1, F1' =  F0 - F1/z
//   modified K:          F0' = -F1, F1' = -F0 - F1/z
//   modified I:          F0' = +F1, F1' =  F0 - F1/z
enum class Pair { Cylinder, ModK, ModI };

void radial_chain(Pair which, double k, double z, double c0[6], double c1[6]) {
  const double K2 = k * k;
  const double K4 = K2 * K2, K6 = K4 * K2, K8 = K6 * K2, K10 = K8 * K2;
  const double z2 = z * z, z3 = z2 * z, z4 = z2 * z2, z5 = z4 * z;
  const double z6 = z4 * z2, z7 = z6 * z, z8 = z4 * z4, z9 = z8 * z;
  c0[0] = 1.0;
  c1[0] = 0.0;
  switch (which) {
    case Pair::Cylinder:
      c0[1] = 0.0;
      c1[1] = -K2 / (2.0 * z);
      c0[2] = -K4 / (4.0 * z2);
      c1[2] = K4 / (2.0 * z3);
      c0[3] = K6 / (2.0 * z4);
      c1[3] = K6 * (z2 - 8.0) / (8.0 * z5);
      c0[4] = K8 * (z2 - 24.0) / (16.0 * z6);
      c1[4] = -K8 * (z2 - 6.0) / (2.0 * z7);
      c0[5] = -3.0 * K10 * (z2 - 16.0) / (8.0 * z8);
      c1[5] = -K10 * (z4 - 72.0 * z2 + 384.0) / (32.0 * z9);
      break;
    case Pair::ModK:
      c0[1] = 0.0;
      c1[1] = -K2 / (2.0 * z);
      c0[2] = K4 / (4.0 * z2);
      c1[2] = K4 / (2.0 * z3);
      c0[3] = -K6 / (2.0 * z4);
      c1[3] = -K6 * (z2 + 8.0) / (8.0 * z5);
      c0[4] = K8 * (z2 + 24.0) / (16.0 * z6);
      c1[4] = K8 * (z2 + 6.0) / (2.0 * z7);
      c0[5] = -3.0 * K10 * (z2 + 16.0) / (8.0 * z8);
      c1[5] = -K10 * (z4 + 72.0 * z2 + 384.0) / (32.0 * z9);
      break;
    case Pair::ModI:
      c0[1] = 0.0;
      c1[1] = K2 / (2.0 * z);
      c0[2] = K4 / (4.0 * z2);
      c1[2] = -K4 / (2.0 * z3);
      c0[3] = -K6 / (2.0 * z4);
      c1[3] = K6 * (z2 + 8.0) / (8.0 * z5);
      c0[4] = K8 * (z2 + 24.0) / (16.0 * z6);
      c1[4] = -K8 * (z2 + 6.0) / (2.0 * z7);
      c0[5] = -3.0 * K10 * (z2 + 16.0) / (8.0 * z8);
      c1[5] = K10 * (z4 + 72.0 * z2 + 384.0) / (32.0 * z9);
      break;
  }
}

// After j rho-derivatives, rho^m ln(rho) becomes rho^(m-j) (f ln(rho) + g);
// iterate (a, f, g) <- (a-1, a f, f + a g) starting from (m, 1, 0).
void log_power_derivative(int m, int j, double* f, double* g) {
  double a = m, ff = 1.0, gg = 0.0;
  for (int i = 0; i < j; ++i) {
    gg = ff + a * gg;
    ff = a * ff;
    a -= 1.0;
  }
  *f = ff;
  *g = gg;
}

double falling(int m, int j) {
  double p = 1.0;
  for (int i = 0; i < j; ++i) p *= (m - i);
  return p;
}

}  // namespace

FlexuralGreen::FlexuralGreen(double k) : k_(k) { assert(k > 0.0); }

RadialDerivs FlexuralGreen::full(double r) const {
  const double z = k_ * r;
  CylinderBessel cb = cylinder_bessel(z);
  const double K0 = bessel_k0(z);
  const double K1 = bessel_k1(z);
  const Cx h0(cb.j0, cb.y0), h1(cb.j1, cb.y1);

  double hc0[6], hc1[6], kc0[6], kc1[6];
  radial_chain(Pair::Cylinder, k_, z, hc0, hc1);
  radial_chain(Pair::ModK, k_, z, kc0, kc1);

  const double inv2k2 = 1.0 / (2.0 * k_ * k_);
  const Cx quarter_i(0.0, 0.25);
  RadialDerivs g;
  for (int j = 0; j <= 5; ++j) {
    const Cx hankel_part = hc0[j] * h0 + hc1[j] * h1;
    const double kpart = kc0[j] * K0 + kc1[j] * K1;
    g.d[j] = inv2k2 * (quarter_i * hankel_part - kpart / (2.0 * M_PI));
  }
  return g;
}

RadialDerivs FlexuralGreen::remainder_series(double r) const {
  return remainder_impl(r, true);
}

RadialDerivs FlexuralGreen::remainder_log_free(double r) const {
  return remainder_impl(r, false);
}

RadialDerivs FlexuralGreen::remainder_impl(double r, bool with_log) const {
  assert(r > 0.0);
  const double k2 = k_ * k_;
  const double rho = r * r;
  const double sig = 0.25 * k2 * rho;  // (kr/2)^2
  const double lnrho = with_log ? std::log(rho) : 0.0;
  const double L = std::log(0.5 * k_) + kEulerGamma;
  const double q = 0.25 * k2;  // d(sigma)/d(rho)

  // (g - g_b)(rho) = sum_m [ a_m + b_m ln r ] sigma^m, b_m = 0 for even m
  // and for m = 1 (removed with g_b); ln r = ln(rho)/2. Dropping the lnrho
  // factor keeps the rational residue of each rho-derivative of the b_m
  // terms, so with_log = false yields exactly (series) - ln(r) c_diff^(j).
  const Cx i8k2(0.0, 1.0 / (8.0 * k2));
  RadialDerivs g;
  double inv_fact2 = 1.0;  // 1/(m!)^2
  double h = 0.0;          // harmonic number
  double sig_pow[kSeriesTerms + 1];
  sig_pow[0] = 1.0;
  for (int m = 1; m <= kSeriesTerms; ++m) sig_pow[m] = sig_pow[m - 1] * sig;

  for (int m = 0; m <= kSeriesTerms; ++m) {
    if (m > 0) {
      inv_fact2 /= double(m) * double(m);
      h += 1.0 / m;
    }
    const double parity = (m % 2 == 0) ? 1.0 : -1.0;
    Cx a_m = parity * i8k2 * inv_fact2;
    double b_m = 0.0;
    if (m % 2 == 1) {
      a_m += (L - h) * inv_fact2 / (2.0 * M_PI * k2);
      if (m >= 3) b_m = inv_fact2 / (2.0 * M_PI * k2);
    }
    double qj = 1.0;  // (k^2/4)^j
    for (int j = 0; j <= 5; ++j) {
      if (m >= j) g.d[j] += a_m * qj * falling(m, j) * sig_pow[m - j];
      if (b_m != 0.0) {
        // b_m sigma^m ln r = (b_m q^m / 2) rho^m ln(rho)
        double f, gg;
        log_power_derivative(m, j, &f, &gg);
        g.d[j] += 0.5 * b_m * std::pow(q, m) * (f * lnrho + gg) *
                  std::pow(rho, double(m - j));
      }
      qj *= q;
    }
  }
  return g;
}

void FlexuralGreen::remainder_at_zero(Cx* g0, Cx* g1, Cx* g2) const {
  const double k2 = k_ * k_;
  const double L = std::log(0.5 * k_) + kEulerGamma;
  const Cx i8k2(0.0, 1.0 / (8.0 * k2));
  const Cx a1 = -i8k2 + (L - 1.0) / (2.0 * M_PI * k2);
  const Cx a2 = 0.25 * i8k2;
  const double q = 0.25 * k2;
  *g0 = i8k2;
  *g1 = q * a1;
  *g2 = 2.0 * q * q * a2;
}

RadialDerivs FlexuralGreen::biharmonic(double r) {
  assert(r > 0.0);
  const double rho = r * r;
  const double c = 1.0 / (16.0 * M_PI);
  RadialDerivs g;
  g.d[0] = c * rho * std::log(rho);
  g.d[1] = c * (std::log(rho) + 1.0);
  g.d[2] = c / rho;
  g.d[3] = -c / (rho * rho);
  g.d[4] = 2.0 * c / (rho * rho * rho);
  g.d[5] = -6.0 * c / (rho * rho * rho * rho);
  return g;
}

RadialDerivs FlexuralGreen::log_coefficient(double r) const {
  const double k2 = k_ * k_;
  const double z = k_ * r;
  RadialDerivs g;
  if (z >= 1.0) {
    ModifiedBessel mb = modified_bessel(z);
    const double ez = std::exp(z);
    const double I0 = mb.i0e * ez, I1 = mb.i1e * ez;
    CylinderBessel cb = cylinder_bessel(z);
    double ic0[6], ic1[6], jc0[6], jc1[6];
    radial_chain(Pair::ModI, k_, z, ic0, ic1);
    radial_chain(Pair::Cylinder, k_, z, jc0, jc1);
    for (int j = 0; j <= 5; ++j) {
      const double iv = ic0[j] * I0 + ic1[j] * I1;
      const double jv = jc0[j] * cb.j0 + jc1[j] * cb.j1;
      g.d[j] = (iv - jv) / (4.0 * M_PI * k2);
    }
    return g;
  }
  // (I0 - J0)(z) = 2 sum_{m odd} sigma^m / (m!)^2, sigma = (z/2)^2.
  const double rho = r * r;
  const double sig = 0.25 * k2 * rho;
  const double q = 0.25 * k2;
  double inv_fact2 = 1.0;
  for (int m = 1; m <= kSeriesTerms; m += 2) {
    inv_fact2 /= double(m) * double(m);
    if (m > 1) inv_fact2 /= double(m - 1) * double(m - 1);
    const double c_m = 2.0 * inv_fact2 / (4.0 * M_PI * k2);
    double qj = 1.0;
    for (int j = 0; j <= 5 && j <= m; ++j) {
      g.d[j] += c_m * qj * falling(m, j) * std::pow(sig, m - j);
      qj *= q;
    }
  }
  return g;
}

void FlexuralGreen::log_coefficient_at_zero(Cx* c0, Cx* c1, Cx* c2) {
  *c0 = 0.0;
  *c1 = 1.0 / (8.0 * M_PI);
  *c2 = 0.0;
}

Cx contract(const RadialDerivs& g, const Vec2& d, const Vec2* dirs,
            const bool* on_y, int m) {
  assert(m >= 0 && m <= 5);
  double sgn = 1.0;
  for (int i = 0; i < m; ++i)
    if (on_y[i]) sgn = -sgn;

  double p[5], mm[5][5];
  for (int i = 0; i < m; ++i) {
    p[i] = dot(d, dirs[i]);
    for (int j = i + 1; j < m; ++j) mm[i][j] = dot(dirs[i], dirs[j]);
  }
  const auto& gd = g.d;
  Cx v = 0.0;
  switch (m) {
    case 0:
      v = gd[0];
      break;
    case 1:
      v = 2.0 * gd[1] * p[0];
      break;
    case 2:
      v = 4.0 * gd[2] * p[0] * p[1] + 2.0 * gd[1] * mm[0][1];
      break;
    case 3:
      v = 8.0 * gd[3] * p[0] * p[1] * p[2] +
          4.0 * gd[2] *
              (mm[0][1] * p[2] + mm[0][2] * p[1] + mm[1][2] * p[0]);
      break;
    case 4: {
      const double P = p[0] * p[1] * p[2] * p[3];
      double s6 = mm[0][1] * p[2] * p[3] + mm[0][2] * p[1] * p[3] +
                  mm[0][3] * p[1] * p[2] + mm[1][2] * p[0] * p[3] +
                  mm[1][3] * p[0] * p[2] + mm[2][3] * p[0] * p[1];
      double s3 = mm[0][1] * mm[2][3] + mm[0][2] * mm[1][3] +
                  mm[0][3] * mm[1][2];
      v = 16.0 * gd[4] * P + 8.0 * gd[3] * s6 + 4.0 * gd[2] * s3;
      break;
    }
    case 5: {
      const double P = p[0] * p[1] * p[2] * p[3] * p[4];
      double s10 = 0.0;
      for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
          double rest = 1.0;
          for (int l = 0; l < 5; ++l)
            if (l != i && l != j) rest *= p[l];
          s10 += mm[i][j] * rest;
        }
      // Singleton s, remaining four indices paired two ways each of 3.
      double s15 = 0.0;
      for (int s = 0; s < 5; ++s) {
        int o[4], n = 0;
        for (int l = 0; l < 5; ++l)
          if (l != s) o[n++] = l;
        auto M = [&](int a, int b) {
          return a < b ? mm[a][b] : mm[b][a];
        };
        const double pairings = M(o[0], o[1]) * M(o[2], o[3]) +
                                M(o[0], o[2]) * M(o[1], o[3]) +
                                M(o[0], o[3]) * M(o[1], o[2]);
        s15 += pairings * p[s];
      }
      v = 32.0 * gd[5] * P + 16.0 * gd[4] * s10 + 8.0 * gd[3] * s15;
      break;
    }
  }
  return sgn * v;
}

Cx contract_limit(Cx g0, Cx g1, Cx g2, const Vec2* dirs, const bool* on_y,
                  int m) {
  assert(m >= 0 && m <= 5);
  double sgn = 1.0;
  for (int i = 0; i < m; ++i)
    if (on_y[i]) sgn = -sgn;
  switch (m) {
    case 0:
      return sgn * g0;
    case 2:
      return sgn * 2.0 * g1 * dot(dirs[0], dirs[1]);
    case 4: {
      const double s3 = dot(dirs[0], dirs[1]) * dot(dirs[2], dirs[3]) +
                        dot(dirs[0], dirs[2]) * dot(dirs[1], dirs[3]) +
                        dot(dirs[0], dirs[3]) * dot(dirs[1], dirs[2]);
      return sgn * 4.0 * g2 * s3;
    }
    default:
      return 0.0;  // odd orders vanish in the limit
  }
}

}  // namespace flexbie

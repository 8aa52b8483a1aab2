#include "flexbie/quadrature.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"

using namespace flexbie;

namespace {

// Brute-force reference for integral f(t) ln|t-t0| dt over [-1,1]:
// split at t0 when inside and refine heavily; the log is integrable, so
// composite Gauss on graded subintervals converges fast.
double brute_log_integral(const std::function<double(double)>& f, double t0) {
  const QuadRule& r = gauss_legendre(40);
  auto seg = [&](double a, double b) {
    double s = 0.0;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (size_t j = 0; j < r.x.size(); ++j) {
      const double t = mid + half * r.x[j];
      s += r.w[j] * f(t) * std::log(std::abs(t - t0));
    }
    return half * s;
  };
  auto graded = [&](double from, double towards) {
    // dyadic grading toward the singular endpoint
    double s = 0.0;
    double a = from;
    for (int l = 0; l < 60; ++l) {
      double b = towards + (a - towards) * 0.5;
      if (b == a || b == towards) break;  // hit t0 in floating point
      s += seg(std::min(a, b), std::max(a, b));
      a = b;
    }
    return s;
  };
  if (t0 > -1.0 && t0 < 1.0) return graded(-1.0, t0) + graded(1.0, t0);
  double lo = -1.0, hi = 1.0;
  if (std::abs(t0 - lo) < std::abs(t0 - hi)) return graded(hi, lo);
  return graded(lo, hi);
}

}  // namespace

TEST_CASE("gauss legendre integrates monomials exactly") {
  for (int n : {4, 8, 16}) {
    const QuadRule& r = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (size_t j = 0; j < r.x.size(); ++j) s += r.w[j] * std::pow(r.x[j], k);
      const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
    for (int j = 0; j < n / 2; ++j) {
      CHECK(r.x[j] == doctest::Approx(-r.x[n - 1 - j]).epsilon(1e-14));
      CHECK(r.w[j] == doctest::Approx(r.w[n - 1 - j]).epsilon(1e-14));
    }
  }
}

TEST_CASE("legendre Q values satisfy the cross relation with P") {
  // P_n(x) Q_{n-1}(x) - P_{n-1}(x) Q_n(x) = 1/n, both inside and outside.
  for (double x : {-0.95, -0.3, 0.0, 0.6, 0.99, 1.0106, 1.3, -2.7, 8.0}) {
    double p[21], q[21];
    legendre_values(20, x, p);
    legendre_q_values(20, x, q);
    for (int n : {1, 5, 12, 20}) {
      CHECK(p[n] * q[n - 1] - p[n - 1] * q[n] ==
            doctest::Approx(1.0 / n).epsilon(1e-11));
    }
  }
  // Closed forms for the lowest orders.
  double q[3];
  legendre_q_values(2, 0.5, q);
  CHECK(q[0] == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx(0.25 * std::log(3.0) - 1.0).epsilon(1e-13));
  legendre_q_values(2, 2.0, q);
  CHECK(q[0] == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx(std::log(3.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("log moments match brute force") {
  for (double t0 : {0.0, 0.31, -0.74, 0.97, -0.999, 1.0106, -1.02, 1.8, -3.5}) {
    double mom[13];
    legendre_log_moments(12, t0, mom);
    for (int k : {0, 1, 2, 5, 12}) {
      auto f = [k](double t) {
        double p[13];
        legendre_values(12, t, p);
        return p[k];
      };
      const double ref = brute_log_integral(f, t0);
      CHECK(mom[k] == doctest::Approx(ref).epsilon(5e-11).scale(1.0));
    }
  }
}

TEST_CASE("log quadrature weights integrate polynomials times log") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const QuadRule& r = gauss_legendre(16);
  for (double t0 : {0.0, -0.62, 0.988, 1.0106, 2.4}) {
    std::vector<double> v = log_quadrature_weights(r, t0);
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<double> coef(16);
      for (auto& c : coef) c = unif(rng);
      auto f = [&](double t) {
        double p[16];
        legendre_values(15, t, p);
        double s = 0.0;
        for (int k = 0; k < 16; ++k) s += coef[k] * p[k];
        return s;
      };
      double s = 0.0;
      for (int j = 0; j < 16; ++j) s += v[j] * f(r.x[j]);
      CHECK(s == doctest::Approx(brute_log_integral(f, t0)).epsilon(2e-10).scale(1.0));
    }
  }
}

TEST_CASE("legendre interpolation and antiderivative") {
  const QuadRule& r = gauss_legendre(12);
  auto f = [](double x) { return std::exp(0.8 * x) * std::cos(2.0 * x); };
  std::vector<double> fv(12);
  for (int j = 0; j < 12; ++j) fv[j] = f(r.x[j]);
  std::vector<double> c = legendre_coefficients(r, fv);
  CHECK(legendre_eval(c, 0.37) == doctest::Approx(f(0.37)).epsilon(1e-9));
  std::vector<double> a = legendre_antiderivative(c);
  CHECK(legendre_eval(a, -1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  // Compare with an independent quadrature of f over [-1, x].
  const QuadRule& rr = gauss_legendre(40);
  double ref = 0.0;
  const double x1 = 0.55;
  for (size_t j = 0; j < rr.x.size(); ++j)
    ref += rr.w[j] * f(-1.0 + (x1 + 1.0) * 0.5 * (rr.x[j] + 1.0));
  ref *= (x1 + 1.0) * 0.5;
  CHECK(legendre_eval(a, x1) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("adaptive integration of a nearly singular integrand") {
  // integral_0^1 dt / ((t - 0.3)^2 + d^2) = (atan((1-0.3)/d) + atan(0.3/d))/d
  for (double d : {1e-2, 1e-5, 1e-8}) {
    auto f = [d](double t) {
      return std::complex<double>(1.0 / ((t - 0.3) * (t - 0.3) + d * d), 0.0);
    };
    bool ok = false;
    std::complex<double> v =
        adaptive_integrate(f, 0.0, 1.0, 1e-13, 0.0, 16, 48, &ok);
    const double exact = (std::atan(0.7 / d) + std::atan(0.3 / d)) / d;
    CHECK(ok);
    CHECK(v.real() == doctest::Approx(exact).epsilon(1e-11));
  }
}

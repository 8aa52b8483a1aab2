#pragma once

// Gauss-Legendre rules, Legendre polynomial utilities, interpolatory
// quadrature for integrands with a logarithmic factor, and adaptive
// panel integration for nearly singular integrands.

#include <complex>
#include <functional>
#include <vector>

namespace flexbie {

struct QuadRule {
  std::vector<double> x;  // nodes in (-1, 1), ascending
  std::vector<double> w;  // positive weights
};

// n-point Gauss-Legendre rule on [-1, 1]; exact for degree 2n-1.
const QuadRule& gauss_legendre(int n);

// P_0(x) .. P_n(x).
void legendre_values(int n, double x, double* out);

// Legendre functions of the second kind Q_0(x) .. Q_n(x), x != +-1.
// Forward recurrence inside (-1,1); outside, backward (Miller) recurrence
// normalized by Q_0 to avoid the unstable forward direction.
void legendre_q_values(int n, double x, double* out);

// Moments L_j = integral_{-1}^{1} P_j(t) ln|t - t0| dt, j = 0..n.
void legendre_log_moments(int n, double t0, double* out);

// Interpolatory weights v with sum_j v_j f(x_j) ~ integral f(t) ln|t-t0| dt,
// exact for f of degree < rule size. t0 may lie inside or outside [-1,1].
std::vector<double> log_quadrature_weights(const QuadRule& rule, double t0);

// Legendre expansion coefficients of the polynomial interpolating nodal
// values f_j at the rule nodes: c_k = (2k+1)/2 sum_j w_j P_k(x_j) f_j.
// Exactness of the rule makes this the exact expansion for deg f < n.
template <typename T>
std::vector<T> legendre_coefficients(const QuadRule& rule,
                                     const std::vector<T>& f) {
  const int n = static_cast<int>(rule.x.size());
  std::vector<T> c(n, T(0));
  std::vector<double> p(n);
  for (int j = 0; j < n; ++j) {
    legendre_values(n - 1, rule.x[j], p.data());
    for (int k = 0; k < n; ++k) c[k] += rule.w[j] * p[k] * f[j];
  }
  for (int k = 0; k < n; ++k) c[k] *= 0.5 * (2 * k + 1);
  return c;
}

template <typename T>
T legendre_eval(const std::vector<T>& c, double x) {
  // Clenshaw with the Legendre recurrence.
  const int n = static_cast<int>(c.size());
  T b1(0), b2(0);
  for (int k = n - 1; k >= 1; --k) {
    T b0 = c[k] + ((2.0 * k + 1.0) / (k + 1.0)) * x * b1 -
           ((k + 1.0) / (k + 2.0)) * b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + x * b1 - 0.5 * b2;
}

// Coefficients of the antiderivative F with F(-1) = 0, via
// integral P_k = (P_{k+1} - P_{k-1}) / (2k+1).
std::vector<double> legendre_antiderivative(const std::vector<double>& c);

// Adaptive composite Gauss-Legendre integration of f over [a, b].
// Bisect while the two-half refinement differs from the parent estimate
// by more than tol relative to scale (or absolute if scale is 0).
// Returns the refined estimate; sets *converged if provided.
std::complex<double> adaptive_integrate(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double tol, double scale, int order, int max_depth, bool* converged);

}  // namespace flexbie

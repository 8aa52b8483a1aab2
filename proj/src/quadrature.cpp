#include "flexbie/quadrature.hpp"

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace flexbie {

namespace {

// P_n(x) and its derivative, three-term recurrence.
void legendre_pair(int n, double x, double* pn, double* dpn) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    *pn = p0;
    *dpn = 0.0;
    return;
  }
  for (int k = 1; k < n; ++k) {
    double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  *pn = p1;
  *dpn = n * (x * p1 - p0) / (x * x - 1.0);
}

QuadRule build_gauss_legendre(int n) {
  assert(n >= 1);
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pn = 0.0, dpn = 1.0;
    for (int it = 0; it < 60; ++it) {
      legendre_pair(n, x, &pn, &dpn);
      double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre_pair(n, x, &pn, &dpn);
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
  }
  return r;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

void legendre_values(int n, double x, double* out) {
  out[0] = 1.0;
  if (n == 0) return;
  out[1] = x;
  for (int k = 1; k < n; ++k)
    out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1);
}

void legendre_q_values(int n, double x, double* out) {
  const double ax = std::abs(x);
  if (ax < 1.0) {
    out[0] = 0.5 * std::log((1.0 + x) / (1.0 - x));
    if (n == 0) return;
    out[1] = x * out[0] - 1.0;
    for (int k = 1; k < n; ++k)
      out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1);
    return;
  }
  if (ax < 1.0 + 1e-12)
    throw std::domain_error("legendre_q_values: x too close to +-1");
  const double q0 = 0.5 * std::log((x + 1.0) / (x - 1.0));
  if (n == 0) {
    out[0] = q0;
    return;
  }
  // Backward (Miller) recurrence: Q is the minimal solution for |x| > 1.
  // Depth chosen so the contamination by the dominant solution P decays
  // below 1e-24 relative: P_k/Q_k grows like zeta^(2k+1).
  const double zeta = ax + std::sqrt(ax * ax - 1.0);
  int extra = static_cast<int>(std::ceil(28.0 / (2.0 * std::log10(zeta)))) + 8;
  if (extra > 4000) extra = 4000;
  const int m = n + extra;
  std::vector<double> q(m + 2);
  q[m + 1] = 0.0;
  q[m] = 1.0;
  for (int k = m; k >= 1; --k)
    q[k - 1] = ((2 * k + 1) * x * q[k] - (k + 1) * q[k + 1]) / k;
  const double c = q0 / q[0];
  for (int k = 0; k <= n; ++k) out[k] = c * q[k];
}

void legendre_log_moments(int n, double t0, double* out) {
  auto plog = [](double u) { return u == 0.0 ? 0.0 : u * std::log(std::abs(u)); };
  out[0] = plog(1.0 - t0) + plog(1.0 + t0) - 2.0;
  if (n == 0) return;
  std::vector<double> q(n + 2);
  legendre_q_values(n + 1, t0, q.data());
  for (int k = 1; k <= n; ++k)
    out[k] = 2.0 * (q[k + 1] - q[k - 1]) / (2.0 * k + 1.0);
}

std::vector<double> log_quadrature_weights(const QuadRule& rule, double t0) {
  const int n = static_cast<int>(rule.x.size());
  Eigen::MatrixXd a(n, n);
  std::vector<double> p(n);
  for (int j = 0; j < n; ++j) {
    legendre_values(n - 1, rule.x[j], p.data());
    for (int k = 0; k < n; ++k) a(k, j) = p[k];
  }
  Eigen::VectorXd rhs(n);
  std::vector<double> mom(n);
  legendre_log_moments(n - 1, t0, mom.data());
  for (int k = 0; k < n; ++k) rhs(k) = mom[k];
  Eigen::VectorXd v = a.partialPivLu().solve(rhs);
  return std::vector<double>(v.data(), v.data() + n);
}

std::vector<double> legendre_antiderivative(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  std::vector<double> a(n + 1, 0.0);
  if (n > 0) a[1] += c[0];
  for (int k = 1; k < n; ++k) {
    a[k + 1] += c[k] / (2.0 * k + 1.0);
    a[k - 1] -= c[k] / (2.0 * k + 1.0);
  }
  double at_left = 0.0;
  for (int k = 0; k <= n; ++k) at_left += (k % 2 == 0 ? a[k] : -a[k]);
  a[0] -= at_left;
  return a;
}

namespace {

std::complex<double> gl_segment(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    const QuadRule& r) {
  std::complex<double> s = 0.0;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (size_t j = 0; j < r.x.size(); ++j)
    s += r.w[j] * f(mid + half * r.x[j]);
  return half * s;
}

std::complex<double> adaptive_rec(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    std::complex<double> whole, double tol, double scale, const QuadRule& r,
    int depth, int max_depth, bool* converged) {
  const double mid = 0.5 * (a + b);
  const std::complex<double> left = gl_segment(f, a, mid, r);
  const std::complex<double> right = gl_segment(f, mid, b, r);
  const std::complex<double> sum = left + right;
  const double err = std::abs(sum - whole);
  if (err <= tol * std::max(scale, std::abs(sum))) return sum;
  if (depth >= max_depth) {
    if (converged) *converged = false;
    return sum;
  }
  return adaptive_rec(f, a, mid, left, tol, scale, r, depth + 1, max_depth,
                      converged) +
         adaptive_rec(f, mid, b, right, tol, scale, r, depth + 1, max_depth,
                      converged);
}

}  // namespace

std::complex<double> adaptive_integrate(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double tol, double scale, int order, int max_depth, bool* converged) {
  if (converged) *converged = true;
  const QuadRule& r = gauss_legendre(order);
  const std::complex<double> whole = gl_segment(f, a, b, r);
  return adaptive_rec(f, a, b, whole, tol, scale, r, 0, max_depth, converged);
}

}  // namespace flexbie

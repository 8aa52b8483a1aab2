#pragma once

// Outgoing Green function of the flexural plate operator Lap^2 - k^4 in the
// plane, split into a biharmonic part, a smooth remainder, and an explicit
// log-coefficient profile. All profiles are functions of rho = |x - y|^2 and
// carry their rho-derivatives up to fifth order, which is what fourth-order
// boundary operators on two-dimensional kernels require.

#include <array>
#include <complex>

#include "flexbie/geometry.hpp"

namespace flexbie {

using Cx = std::complex<double>;

struct RadialDerivs {
  std::array<Cx, 6> d{};  // d[j] = (d/drho)^j of the profile
};

class FlexuralGreen {
 public:
  explicit FlexuralGreen(double k);

  double wavenumber() const { return k_; }

  // Full profile g(r) = (1/(2k^2)) [ (i/4) H0(kr) - (1/(2 pi)) K0(kr) ],
  // via Bessel evaluations. Accurate for kr not small; pair with the series
  // below under series_switch_radius().
  RadialDerivs full(double r) const;

  // g - g_b with g_b(r) = r^2 ln(r)/(8 pi): ascending series in (kr/2)^2,
  // cancellation-free. Intended for 0 < kr < 1.
  RadialDerivs remainder_series(double r) const;

  // Log-free component of the same series: remainder_series minus
  // ln(r) * (log_coefficient - biharmonic log coefficient), order by order.
  RadialDerivs remainder_log_free(double r) const;

  // Value and first two rho-derivatives of g - g_b at r = 0 (all finite).
  void remainder_at_zero(Cx* g0, Cx* g1, Cx* g2) const;

  // Biharmonic profile g_b = rho ln(rho) / (16 pi).
  static RadialDerivs biharmonic(double r);

  // Coefficient of ln(r) in g: c(rho) = (I0 - J0)(kr) / (4 pi k^2).
  // Entire in rho; series for kr < 1, Bessel beyond.
  RadialDerivs log_coefficient(double r) const;

  // c(0) = 0, c'(0) = 1/(8 pi), c''(0) = 0.
  static void log_coefficient_at_zero(Cx* c0, Cx* c1, Cx* c2);

  double series_switch_radius() const { return 1.0 / k_; }

 private:
  RadialDerivs remainder_impl(double r, bool with_log) const;

  double k_;
};

// D_{a1} ... D_{am} g(|x-y|^2) for unit directions a_i, all derivatives
// taken at x; a direction flagged on_y differentiates in y instead, which
// flips its sign. d = x - y, m <= 5.
Cx contract(const RadialDerivs& g, const Vec2& d, const Vec2* dirs,
            const bool* on_y, int m);

// y -> x limit of `contract` for a profile with finite g(0), g'(0), g''(0)
// whose higher derivatives diverge no faster than the vanishing geometric
// factors decay (true of the remainder and log-coefficient profiles):
// odd orders vanish, even orders keep only the full pairings.
Cx contract_limit(Cx g0, Cx g1, Cx g2, const Vec2* dirs, const bool* on_y,
                  int m);

}  // namespace flexbie

#include "flexbie/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <mutex>

namespace flexbie {

namespace {

void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

}  // namespace

CylinderBessel cylinder_bessel(double z) {
  disable_gsl_abort();
  CylinderBessel b;
  b.j0 = gsl_sf_bessel_J0(z);
  b.j1 = gsl_sf_bessel_J1(z);
  b.y0 = gsl_sf_bessel_Y0(z);
  b.y1 = gsl_sf_bessel_Y1(z);
  return b;
}

ModifiedBessel modified_bessel(double z) {
  disable_gsl_abort();
  ModifiedBessel b;
  b.i0e = gsl_sf_bessel_I0_scaled(z);
  b.i1e = gsl_sf_bessel_I1_scaled(z);
  b.k0e = gsl_sf_bessel_K0_scaled(z);
  b.k1e = gsl_sf_bessel_K1_scaled(z);
  return b;
}

double bessel_k0(double z) {
  disable_gsl_abort();
  if (z > 600.0) return gsl_sf_bessel_K0_scaled(z) * std::exp(-z);
  return gsl_sf_bessel_K0(z);
}

double bessel_k1(double z) {
  disable_gsl_abort();
  if (z > 600.0) return gsl_sf_bessel_K1_scaled(z) * std::exp(-z);
  return gsl_sf_bessel_K1(z);
}

double bessel_i0(double z) {
  disable_gsl_abort();
  return gsl_sf_bessel_I0(z);
}

double bessel_i1(double z) {
  disable_gsl_abort();
  return gsl_sf_bessel_I1(z);
}

}  // namespace flexbie

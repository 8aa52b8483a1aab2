#pragma once

// Bessel function bundles used by the flexural Green function: cylinder
// functions J0, J1, Y0, Y1 and modified functions I0, I1, K0, K1 at real
// positive argument. Backed by GSL; exponentially scaled variants keep the
// modified functions finite at large argument.

namespace flexbie {

struct CylinderBessel {
  double j0, j1, y0, y1;
};

struct ModifiedBessel {
  // i0e = e^{-z} I0(z), i1e = e^{-z} I1(z), k0e = e^{z} K0(z), k1e = e^{z} K1(z)
  double i0e, i1e, k0e, k1e;
};

CylinderBessel cylinder_bessel(double z);
ModifiedBessel modified_bessel(double z);

// Unscaled K0, K1; underflow to 0 above z ~ 705 instead of trapping.
double bessel_k0(double z);
double bessel_k1(double z);
// Unscaled I0 - J0; cancellation-free only through the scaled forms upstream,
// provided here for moderate z where the direct difference is adequate.
double bessel_i0(double z);
double bessel_i1(double z);

}  // namespace flexbie

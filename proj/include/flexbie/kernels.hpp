#pragma once

// Representation and boundary kernels for time-harmonic flexural waves in a
// thin plate, for clamped, supported, and free boundary conditions on a
// smooth closed curve. Every on-surface kernel is evaluated in split form
//
//   K(x, y) = psi(x, y) + phi(x, y) ln|x - y|,
//
// with psi and phi both smooth, which is what a log-corrected panel rule
// needs. The biharmonic contribution to psi is evaluated through grouped
// closed forms in the pair invariants (p, q, e, f, rnx, rtx, r^2) chosen so
// that no term grows faster than the value as y -> x; naive term-by-term
// summation loses all significant digits near the diagonal and is kept only
// as a negative control.

#include <array>
#include <cstdint>
#include <vector>

#include "flexbie/geometry.hpp"
#include "flexbie/greens.hpp"

namespace flexbie {

enum class BCKind { kClamped, kSupported, kFree };
enum class Side { kInterior, kExterior };

struct MaterialParams {
  double k;   // wavenumber, > 0
  double nu;  // Poisson ratio, -1 <= nu < 1/2 (supported needs nu > -1)
};

// Coefficients the boundary operators derive from the Poisson ratio.
struct DerivedCoefficients {
  double alpha1;  // 2 - nu
  double alpha2;  // (nu - 1)(7 + nu) / (3 - nu)
  double alpha3;  // (1 - nu)(3 + nu) / (1 + nu)
  double c0;      // (nu - 1)(nu + 3)(2 nu - 1) / (2 (3 - nu))
  double beta;    // (1 + nu) / 2
  static DerivedCoefficients from(double nu);
};

// +beta on the exterior side, -beta on the interior side.
double signed_beta(double nu, Side side);

// Frame-invariant data of an evaluation pair, r = x - y.
struct PairInvariants {
  double p, q;      // r . n(y), r . tau(y)
  double e, f;      // n(x) . n(y), n(x) . tau(y)
  double rnx, rtx;  // r . n(x), r . tau(x)
  double r2;        // |r|^2
};

// Position-difference construction. The subtraction x.pos - y.pos carries
// an absolute error ~eps, which the kernel contractions amplify like
// 1/|x-y|^4 near the diagonal; use the chord-based overload whenever both
// points lie on the same curve.
PairInvariants pair_invariants(const CurvePoint& x, const CurvePoint& y);

// Chord-based construction: x - y computed by the curve's exact chord, so
// every invariant keeps full relative accuracy down to arbitrarily small
// separations. Required for near-diagonal kernel evaluation.
PairInvariants pair_invariants(const Curve& c, const CurvePoint& x,
                               const CurvePoint& y);

// Kernels of the scalar auxiliary operators on the curve.
double hilbert_kernel(const PairInvariants& iv);        // H
double hilbert_prime_kernel(const PairInvariants& iv);  // (d/ds) H
double dlp_kernel(const PairInvariants& iv);            // Laplace double layer

struct KernelSplit {
  Cx psi{};
  double phi = 0.0;
};

struct BlockSplit {
  KernelSplit k11, k12, k21, k22;
};
struct BlockValues {
  Cx k11, k12, k21, k22;
};
struct BlockReal {
  double k11 = 0.0, k12 = 0.0, k21 = 0.0, k22 = 0.0;
};

// Free-plate entries before composition with the Hilbert transform. c11b and
// c21a are the combined continuous kernels (raw kernel plus its Hilbert
// counterterm); k11b appears only through c11b, k21a only through c21a.
struct FreeBlockSplit {
  KernelSplit k11a, c11b, k12, c21a, k21b, k22;
};
struct FreeBlockValues {
  Cx k11a, c11b, k12, c21a, k21b, k22;
};
struct FreeBlockReal {
  double k11a = 0.0, c11b = 0.0, k12 = 0.0, c21a = 0.0, k21b = 0.0,
         k22 = 0.0;
};

// Layer-potential kernels for field evaluation at x off the curve. k1b is
// used only by the free plate, whose first kernel is k1a + beta^± k1b o H.
struct RepKernels {
  Cx k1, k1b, k2;
};

// Diagonal 2x2 jump matrix of the second-kind system; for the free plate the
// derivative-of-Hilbert jump is already absorbed into the diagonal entries.
struct JumpMatrix {
  double d11 = 0.0, d12 = 0.0, d21 = 0.0, d22 = 0.0;
};

// One summand of a kernel's directional-derivative table.
enum class DirTag : std::uint8_t { kNx, kTx, kNy, kTy };
struct KernelTerm {
  double coeff;
  int m;  // number of directions, <= 5
  std::array<DirTag, 5> dirs;
};

// The complete derivative table of one block entry. Clamped/supported rows
// are indexed 0..3 as k11, k12, k21, k22; free rows 0..5 as k11a, k11b, k12,
// k21a, k21b, k22 (the raw tables, without Hilbert counterterms).
std::vector<KernelTerm> kernel_terms(BCKind bc, int entry,
                                     const DerivedCoefficients& dc, double nu,
                                     double kappa_x, double kappa_y,
                                     double kappa_s_y);

class BoundaryKernels {
 public:
  // Throws std::invalid_argument when the material parameters are outside
  // the admissible range for the chosen boundary condition.
  BoundaryKernels(BCKind bc, const MaterialParams& mp);

  BCKind bc() const { return bc_; }
  const MaterialParams& material() const { return mp_; }
  const DerivedCoefficients& coefficients() const { return dc_; }

  // Full kernel values at separated points (plain far quadrature). The
  // invariant-taking forms are the primary entry points; the CurvePoint
  // wrappers build invariants by position differencing and are only safe
  // when the points are well separated.
  BlockValues block(const PairInvariants& iv, double kappa_x, double kappa_y,
                    double kappa_s_y) const;
  FreeBlockValues free_block(const PairInvariants& iv, double kappa_x,
                             double kappa_y, double kappa_s_y) const;
  BlockValues block(const CurvePoint& x, const CurvePoint& y) const;
  FreeBlockValues free_block(const CurvePoint& x, const CurvePoint& y) const;

  // Split values for the log-corrected near rule; s = arc(x) - arc(y) along
  // the component containing both points. Near-diagonal accuracy requires
  // chord-based invariants.
  BlockSplit block_split(const PairInvariants& iv, double kappa_x,
                         double kappa_y, double kappa_s_y, double kappa_ss_y,
                         double s) const;
  FreeBlockSplit free_block_split(const PairInvariants& iv, double kappa_x,
                                  double kappa_y, double kappa_s_y,
                                  double kappa_ss_y, double s) const;
  BlockSplit block_split(const CurvePoint& x, const CurvePoint& y,
                         double s) const;
  FreeBlockSplit free_block_split(const CurvePoint& x, const CurvePoint& y,
                                  double s) const;

  // y -> x limits of the split (diagonal of the Nystrom system).
  BlockSplit diagonal(const CurvePoint& x) const;
  FreeBlockSplit free_diagonal(const CurvePoint& x) const;

  // Layer-potential kernels for a target x off the curve.
  RepKernels representation(const Vec2& x, const CurvePoint& y) const;

  // Analytic y -> x limits of the log-free biharmonic kernel parts; the
  // verification table for the small-separation oracle, not used by
  // assembly.
  BlockReal on_surface_limits(const CurvePoint& x) const;
  FreeBlockReal free_on_surface_limits(const CurvePoint& x) const;

  // Log-free biharmonic part of every entry in grouped stable form.
  // s_abs = |arc(x) - arc(y)|, used only to route the two entries whose
  // grouped forms still cancel across curvature groups (supported k21, free
  // k21b) to their diagonal limits once s_abs <= 1e-4.
  BlockReal biharmonic_stable(const PairInvariants& iv, double kappa_x,
                              double kappa_y, double kappa_s_y,
                              double kappa_ss_y, double s_abs) const;
  FreeBlockReal free_biharmonic_stable(const PairInvariants& iv,
                                       double kappa_x, double kappa_y,
                                       double kappa_s_y, double kappa_ss_y,
                                       double s_abs) const;

  // Same values by raw per-term summation; loses the diagonal cancellation
  // and exists only as the negative control for the stability tests.
  BlockReal biharmonic_naive(const PairInvariants& iv, double kappa_x,
                             double kappa_y, double kappa_s_y) const;
  FreeBlockReal free_biharmonic_naive(const PairInvariants& iv,
                                      double kappa_x, double kappa_y,
                                      double kappa_s_y) const;

 private:
  BCKind bc_;
  MaterialParams mp_;
  DerivedCoefficients dc_;
  FlexuralGreen green_;
};

JumpMatrix jump_matrix(BCKind bc, Side side, const MaterialParams& mp,
                       const CurvePoint& x);

}  // namespace flexbie

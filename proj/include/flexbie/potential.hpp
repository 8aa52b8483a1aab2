#pragma once

// Boundary data construction, off-surface evaluation of the layer-potential
// representation, far-field traces, and jump probes.

#include <array>
#include <functional>
#include <vector>

#include "flexbie/geometry.hpp"
#include "flexbie/kernels.hpp"
#include "flexbie/system.hpp"

namespace flexbie {

enum class DataKind { kPointSource, kPlaneWave, kCustom };

// Right-hand-side traces sampled at the quadrature nodes.
struct BoundaryData {
  std::vector<Cx> f1, f2;
  DataKind kind = DataKind::kCustom;

  // Node-interleaved layout expected by BVProblem::rhs.
  std::vector<Cx> interleaved() const { return interleave(f1, f2); }
};

// Traces of the outgoing point source G(., source) under the two boundary
// operators of the condition. The source must lie away from the propagation
// side (inside some component for an exterior problem, outside every
// component for an interior one), else std::invalid_argument. A problem
// driven by this data has exact solution G(., source) on the propagation
// side, which is what the analytic convergence tests exploit.
BoundaryData point_source_data(BCKind bc, Side side, const MaterialParams& mp,
                               const Vec2& source, const Panelization& p);

// Scattering data for the unit plane wave exp(i k d . x): the negated
// boundary traces, so the solved density radiates the scattered field and
// incident + scattered satisfies the homogeneous condition. direction must
// be a unit vector.
BoundaryData plane_wave_data(BCKind bc, const MaterialParams& mp,
                             const Vec2& direction, const Panelization& p);

// Far-field samples f(theta) = sqrt(R) exp(-ikR) u(R cos theta, R sin theta)
// on an equispaced angular grid over [0, 2 pi). phase is the two-argument
// arctangent atan2(Im f, Re f), valued in (-pi, pi].
struct FarField {
  std::vector<double> theta;
  std::vector<Cx> f;
  std::vector<double> magnitude;
  std::vector<double> phase;
  double radius = 0.0;
};

// Evaluates the layer-potential representation carried by a solved density
// pair at points off the boundary. Panels closer to the target than their
// own arclength are integrated adaptively against the Legendre interpolant
// of the densities; all others use the plain panel rule. The free-plate
// Hilbert composition is applied to the first density once at construction,
// and the transformed density is integrated against the second first-row
// kernel thereafter.
class PotentialEvaluator {
 public:
  PotentialEvaluator(const Panelization& p, BCKind bc, Side side,
                     const MaterialParams& mp, std::vector<Cx> rho1,
                     std::vector<Cx> rho2);

  // Densities taken from a solved system.
  PotentialEvaluator(const BVProblem& problem, const DensitySolution& sol);

  // Field value at one point. Throws std::invalid_argument when x lies on
  // the boundary and std::runtime_error when an adaptive panel rule fails
  // to converge.
  Cx operator()(const Vec2& x) const;

  // Batch evaluation, parallel over points.
  std::vector<Cx> eval(const std::vector<Vec2>& points) const;

  // Far-field trace on n_theta equispaced angles. Exterior problems only
  // (std::logic_error otherwise); radius must be large against the
  // geometry.
  FarField far_field(int n_theta, double radius) const;

  // Traces (B1 u, B2 u) of the represented field at x0 + h n(x0), where
  // x0 = node(node) and the operator frame (normal, tangent, curvature) is
  // frozen at x0. Signed h selects the approach side; positive is along the
  // outward normal. Building block of jump_probe.
  std::array<Cx, 2> boundary_operator_traces(int node, double h) const;

  const Panelization& boundary() const { return *p_; }
  BCKind bc() const { return kb_.bc(); }
  Side side() const { return side_; }
  double wavenumber() const { return mp_.k; }
  // L1 size of the densities; the reference scale for adaptive tolerances.
  double density_scale() const { return scale_; }

 private:
  Cx graded_cells(const std::function<Cx(double)>& f, double lo, double hi,
                  bool sing_at_lo, double floor_w) const;
  Cx split_adaptive(int q, const Vec2& x,
                    const std::function<Cx(double)>& f) const;
  Cx near_panel_field(int q, const Vec2& x) const;
  Cx near_panel_trace(int q, const CurvePoint& xp, int row) const;
  std::array<Cx, 2> trace_rows(const CurvePoint& xp, const CurvePoint& y,
                               const Cx& r1, const Cx& r2, const Cx& rh) const;
  double panel_node_distance(int q, const Vec2& x) const;
  void reject_on_boundary(int component, const Vec2& x) const;

  const Panelization* p_;
  Side side_;
  MaterialParams mp_;
  BoundaryKernels kb_;
  double sbeta_ = 0.0;
  std::vector<Cx> rho1_, rho2_, hrho1_;
  // Per-panel Legendre coefficients of the densities on [-1, 1].
  std::vector<std::vector<Cx>> c1_, c2_, ch_;
  double scale_ = 0.0;
};

// One-sided boundary limits of the operator traces at a node, obtained by
// sliding three-point polynomial extrapolation of the probe sequence to
// h = 0. err* is the modulus of the last extrapolation increment; compare
// the limits against the on-surface system rows to isolate the jump terms.
struct JumpProbe {
  Cx limit1, limit2;
  double err1 = 0.0, err2 = 0.0;
};

// Probes the jump relations of the represented field at a node. offsets must
// hold at least three nonzero values of one sign with strictly decreasing
// magnitude. Throws std::runtime_error (with the offending extrapolants in
// the message) when the extrapolation fails to settle.
JumpProbe jump_probe(const PotentialEvaluator& u, int node,
                     const std::vector<double>& offsets);

// Default probe offsets 2^-j times the arclength of the node's panel,
// j = 3..10, signed along the outward normal when from_outside is set.
std::vector<double> probe_offsets(const Panelization& p, int node,
                                  bool from_outside);

}  // namespace flexbie

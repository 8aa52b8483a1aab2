#pragma once

// Nystrom assembly and solvers for the second-kind boundary systems. The
// unknowns are the two layer densities sampled at the panelization nodes,
// interleaved as (rho1, rho2) per node in panelization (component-major)
// order, so the system dimension is twice the node count.

#include <vector>

#include "flexbie/geometry.hpp"
#include "flexbie/kernels.hpp"

namespace flexbie {

// One boundary-value problem: which curves carry the densities, which
// boundary condition and side, the material, and the boundary data samples
// (f1, f2) interleaved per node. `boundary` is borrowed, not owned.
struct BVProblem {
  const Panelization* boundary = nullptr;
  BCKind bc = BCKind::kClamped;
  Side side = Side::kExterior;
  MaterialParams mp{1.0, 0.0};
  std::vector<Cx> rhs;
};

// Dense square system matrix, row-major, dimension 2 * num_nodes.
class SystemMatrix {
 public:
  SystemMatrix() = default;
  explicit SystemMatrix(int num_nodes)
      : n_(num_nodes),
        a_(4 * static_cast<std::size_t>(num_nodes) * num_nodes) {}

  int num_nodes() const { return n_; }
  int dim() const { return 2 * n_; }
  Cx& at(int i, int j) { return a_[static_cast<std::size_t>(i) * dim() + j]; }
  const Cx& at(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * dim() + j];
  }
  const std::vector<Cx>& data() const { return a_; }

  // y = A x.
  std::vector<Cx> apply(const std::vector<Cx>& x) const;

 private:
  int n_ = 0;
  std::vector<Cx> a_;
};

// Solution densities at the panelization nodes plus solver diagnostics.
// residual is the true relative residual ||A x - b|| / ||b|| of the returned
// iterate; condition is a 1-norm estimate from the factorization (direct
// solver only); iterations counts Krylov steps (iterative solver only).
struct DensitySolution {
  std::vector<Cx> rho1, rho2;
  double residual = 0.0;
  double condition = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Number of assembly threads: FLEXBIE_THREADS if set (clamped to [1, 64]),
// otherwise the hardware concurrency. Entries never depend on the thread
// count, so assembled matrices are bitwise reproducible.
int assembly_threads();

// Builds the dense system: the pointwise jump matrix on the 2x2 node
// diagonal plus quadrature-weighted kernel blocks. Pairs in the same
// component use chord-based invariants, with the hybrid smooth+log panel
// rule for source panels adjacent to the target; cross-component pairs use
// the plain smooth rule. Free-plate blocks include the compositions with the
// Hilbert transform and the squared double-layer operator per component.
// Throws std::invalid_argument for inadmissible material parameters, for
// components that touch or cross, or for an rhs of the wrong length.
SystemMatrix assemble(const BVProblem& problem);

// Direct dense solve (LU with partial pivoting). Attaches the 1-norm
// condition estimate of the matrix. Throws std::runtime_error when the
// factorization hits an exact zero pivot, which signals a problem outside
// the invertibility hypotheses of the boundary formulations.
DensitySolution solve_dense(const SystemMatrix& a, const std::vector<Cx>& rhs);

// GMRES (full, no restarts) to relative residual <= tol or max_iter steps.
// tol must be >= 1e-13. A zero right-hand side returns the zero solution in
// zero iterations. On max_iter exhaustion the best iterate is returned with
// converged = false.
DensitySolution solve_iterative(const SystemMatrix& a,
                                const std::vector<Cx>& rhs, double tol,
                                int max_iter);

// Interleaves per-node samples (f1, f2) into a system right-hand side.
std::vector<Cx> interleave(const std::vector<Cx>& f1,
                           const std::vector<Cx>& f2);

}  // namespace flexbie

#include "flexbie/system.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Core>

#include "flexbie/quadrature.hpp"
#include "flexbie/surfaceops.hpp"

namespace flexbie {

namespace {

double nrm2(const std::vector<Cx>& v) {
  double s = 0.0;
  for (const Cx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

// Components must neither touch nor cross. Exact node coincidence catches
// duplicated curves and tangency at the discretization's resolution; a
// transversal crossing puts nodes of one curve on both sides of the other.
void check_disjoint(const Panelization& p) {
  for (int a = 0; a < p.num_components(); ++a) {
    for (int b = a + 1; b < p.num_components(); ++b) {
      for (int i = p.node_begin(a); i < p.node_end(a); ++i) {
        const Vec2 xa = p.node(i).pos;
        for (int j = p.node_begin(b); j < p.node_end(b); ++j) {
          if (norm2(xa - p.node(j).pos) == 0.0)
            throw std::invalid_argument("assemble: boundary components touch");
        }
      }
      auto straddles = [&p](int host, int guest) {
        bool inside = false, outside = false;
        for (int j = p.node_begin(guest); j < p.node_end(guest); ++j) {
          const Vec2 x = p.node(j).pos;
          const CurvePoint cp = p.nearest_point(host, x);
          (dot(x - cp.pos, cp.nrm) > 0.0 ? outside : inside) = true;
        }
        return inside && outside;
      };
      if (straddles(a, b) || straddles(b, a))
        throw std::invalid_argument("assemble: boundary components cross");
    }
  }
}

// Reference coordinate of parameter t in a panel's frame, with t unwrapped
// by the component's parameter period so the nearest image is used.
double ref_coord(double t, const Panel& pan, double period) {
  const double mid = 0.5 * (pan.t0 + pan.t1);
  return std::remainder(t - mid, period) / (0.5 * (pan.t1 - pan.t0));
}

// Scratch rows for one target node. For clamped/supported only the first
// four are used; the free plate routes its Hilbert-composed factors through
// r11h (combined c11b same-component, raw k11b across) and r21h (k21b).
struct Rows {
  std::vector<Cx> r11, r12, r21, r22, r11h, r21h;
  std::vector<Cx> acc11, acc21;
  explicit Rows(int n)
      : r11(n), r12(n), r21(n), r22(n), r11h(n), r21h(n), acc11(n), acc21(n) {}
  void clear() {
    auto z = [](std::vector<Cx>& v) { std::fill(v.begin(), v.end(), Cx{}); };
    z(r11), z(r12), z(r21), z(r22), z(r11h), z(r21h);
  }
};

struct AssemblyContext {
  const Panelization& p;
  const BoundaryKernels& kb;
  Side side;
  const QuadRule& gl;
  const SurfaceOperator* hilbert = nullptr;  // free plate only
  const SurfaceOperator* dlp = nullptr;
};

// Fills the quadrature-weighted kernel rows of target node i. Source panels
// in the same component adjacent to the target's panel (including itself)
// use the hybrid rule: Gauss-Legendre weights on the log-free part plus
// log-corrected weights on the logarithmic coefficient; everything else uses
// the plain rule on the full kernel. Same-component pair invariants come
// from the curve's exact chord so that near-diagonal entries keep full
// relative accuracy.
void fill_rows(const AssemblyContext& ctx, int i, Rows& rows) {
  const Panelization& p = ctx.p;
  const BoundaryKernels& kb = ctx.kb;
  const bool is_free = kb.bc() == BCKind::kFree;
  const double beta = kb.coefficients().beta;

  const CurvePoint& X = p.node(i);
  const int ci = p.node_component(i);
  const int pi = p.node_panel(i);
  const Curve& curve_i = p.curve(ci);
  const double len_i = p.component_length(ci);
  const double s_i = p.node_arclen(i);
  const int npan = p.panels_per_curve();
  const int pbase = p.panel_begin(ci);
  const double period =
      p.panel(p.panel_end(ci) - 1).t1 - p.panel(pbase).t0;

  int near[3];
  int nnear = 0;
  for (int d : {0, 1, npan - 1}) {
    const int q = pbase + ((pi - pbase) + d) % npan;
    bool dup = false;
    for (int u = 0; u < nnear; ++u) dup = dup || near[u] == q;
    if (!dup) near[nnear++] = q;
  }

  rows.clear();
  std::vector<double> wlog;
  for (int q = 0; q < p.num_panels(); ++q) {
    const Panel& pan = p.panel(q);
    const int cq = pan.component;
    const bool same = cq == ci;
    bool use_log = false;
    if (same)
      for (int u = 0; u < nnear; ++u) use_log = use_log || near[u] == q;

    if (use_log) {
      const double xi0 =
          q == pi ? p.node_ref(i) : ref_coord(X.t, pan, period);
      wlog = log_quadrature_weights(ctx.gl, xi0);
    }

    for (int u = 0; u < p.order(); ++u) {
      const int j = pan.first_node + u;
      const CurvePoint& Y = p.node(j);
      const double w = p.weight(j);

      if (!use_log) {
        const PairInvariants iv = same ? pair_invariants(curve_i, X, Y)
                                       : pair_invariants(X, Y);
        if (!is_free) {
          const BlockValues bv = kb.block(iv, X.kappa, Y.kappa, Y.kappa_s);
          rows.r11[j] = w * bv.k11;
          rows.r12[j] = w * bv.k12;
          rows.r21[j] = w * bv.k21;
          rows.r22[j] = w * bv.k22;
        } else {
          const FreeBlockValues fv =
              kb.free_block(iv, X.kappa, Y.kappa, Y.kappa_s);
          rows.r11[j] = w * fv.k11a;
          rows.r12[j] = w * fv.k12;
          rows.r22[j] = w * fv.k22;
          rows.r21h[j] = w * fv.k21b;
          if (same) {
            rows.r11h[j] = w * fv.c11b;
            rows.r21[j] = w * fv.c21a;
          } else {
            // The Hilbert counterterms folded into c11b and c21a belong to
            // the same-component operator only; across components the raw
            // kernels act, so strip the counterterms again.
            rows.r11h[j] =
                w * (fv.c11b - 0.5 * beta * hilbert_kernel(iv));
            rows.r21[j] =
                w * (fv.c21a + 0.5 * beta * hilbert_prime_kernel(iv));
          }
        }
        continue;
      }

      // Hybrid rule. weight(j) already carries the Jacobian; the pure log
      // moments need the Jacobian explicitly.
      const double jac = w / ctx.gl.w[u];
      double logw;
      KernelSplit k11, k12, k21, k22, k11h, k21h;
      if (j == i) {
        // ln|x - y| ~ ln|jacobian at the node| + ln|xi - xi0| as y -> x.
        logw = wlog[u] * jac +
               w * std::log(X.speed * 0.5 * (pan.t1 - pan.t0));
        if (!is_free) {
          const BlockSplit d = kb.diagonal(X);
          k11 = d.k11, k12 = d.k12, k21 = d.k21, k22 = d.k22;
        } else {
          const FreeBlockSplit d = kb.free_diagonal(X);
          k11 = d.k11a, k12 = d.k12, k21 = d.c21a, k22 = d.k22;
          k11h = d.c11b, k21h = d.k21b;
        }
      } else {
        const PairInvariants iv = pair_invariants(curve_i, X, Y);
        const double s = std::remainder(s_i - p.node_arclen(j), len_i);
        const double dxi = p.node_ref(j) - (q == pi
                                                ? p.node_ref(i)
                                                : ref_coord(X.t, pan, period));
        logw = wlog[u] * jac +
               w * std::log(std::sqrt(iv.r2) / std::abs(dxi));
        if (!is_free) {
          const BlockSplit d =
              kb.block_split(iv, X.kappa, Y.kappa, Y.kappa_s, Y.kappa_ss, s);
          k11 = d.k11, k12 = d.k12, k21 = d.k21, k22 = d.k22;
        } else {
          const FreeBlockSplit d = kb.free_block_split(
              iv, X.kappa, Y.kappa, Y.kappa_s, Y.kappa_ss, s);
          k11 = d.k11a, k12 = d.k12, k21 = d.c21a, k22 = d.k22;
          k11h = d.c11b, k21h = d.k21b;
        }
      }
      rows.r11[j] = w * k11.psi + logw * k11.phi;
      rows.r12[j] = w * k12.psi + logw * k12.phi;
      rows.r21[j] = w * k21.psi + logw * k21.phi;
      rows.r22[j] = w * k22.psi + logw * k22.phi;
      if (is_free) {
        rows.r11h[j] = w * k11h.psi + logw * k11h.phi;
        rows.r21h[j] = w * k21h.psi + logw * k21h.phi;
      }
    }
  }
}

// Writes the four block entries of target node i into the matrix, composing
// the free-plate rows with the per-component Hilbert and double-layer
// operators, then adds the pointwise jump matrix on the node diagonal.
void emit_rows(const AssemblyContext& ctx, int i, Rows& rows,
               SystemMatrix& a) {
  const Panelization& p = ctx.p;
  const int n = p.num_nodes();
  const bool is_free = ctx.kb.bc() == BCKind::kFree;

  if (is_free) {
    const double beta = ctx.kb.coefficients().beta;
    const double sbeta = signed_beta(ctx.kb.material().nu, ctx.side);
    const SurfaceOperator& h = *ctx.hilbert;
    const SurfaceOperator& d = *ctx.dlp;
    const double* hdat = h.data().data();
    const double* ddat = d.data().data();

    std::fill(rows.acc11.begin(), rows.acc11.end(), Cx{});
    std::fill(rows.acc21.begin(), rows.acc21.end(), Cx{});
    for (int c = 0; c < p.num_components(); ++c) {
      const int b = h.block_begin(c), e = h.block_end(c);
      for (int z = b; z < e; ++z) {
        const Cx c11 = rows.r11h[z];
        const Cx c21 = rows.r21h[z];
        const double* hrow = hdat + static_cast<std::size_t>(z) * n;
        for (int j = b; j < e; ++j) {
          rows.acc11[j] += c11 * hrow[j];
          rows.acc21[j] += c21 * hrow[j];
        }
      }
    }
    // Row i of D^2; nonzero only inside the target's component.
    const int ci = p.node_component(i);
    const int cb = d.block_begin(ci), ce = d.block_end(ci);
    std::vector<double> dd(ce - cb, 0.0);
    {
      const double* drow_i = ddat + static_cast<std::size_t>(i) * n;
      for (int z = cb; z < ce; ++z) {
        const double diz = drow_i[z];
        const double* drow_z = ddat + static_cast<std::size_t>(z) * n;
        for (int j = cb; j < ce; ++j) dd[j - cb] += diz * drow_z[j];
      }
    }
    for (int j = 0; j < n; ++j) {
      Cx a11 = rows.r11[j] + sbeta * rows.acc11[j];
      if (j >= cb && j < ce) a11 -= 2.0 * beta * sbeta * dd[j - cb];
      a.at(2 * i, 2 * j) = a11;
      a.at(2 * i, 2 * j + 1) = rows.r12[j];
      a.at(2 * i + 1, 2 * j) = rows.r21[j] + sbeta * rows.acc21[j];
      a.at(2 * i + 1, 2 * j + 1) = rows.r22[j];
    }
  } else {
    for (int j = 0; j < n; ++j) {
      a.at(2 * i, 2 * j) = rows.r11[j];
      a.at(2 * i, 2 * j + 1) = rows.r12[j];
      a.at(2 * i + 1, 2 * j) = rows.r21[j];
      a.at(2 * i + 1, 2 * j + 1) = rows.r22[j];
    }
  }

  const JumpMatrix jm =
      jump_matrix(ctx.kb.bc(), ctx.side, ctx.kb.material(), p.node(i));
  a.at(2 * i, 2 * i) += jm.d11;
  a.at(2 * i, 2 * i + 1) += jm.d12;
  a.at(2 * i + 1, 2 * i) += jm.d21;
  a.at(2 * i + 1, 2 * i + 1) += jm.d22;
}

DensitySolution pack_solution(const SystemMatrix& a, std::vector<Cx> x,
                              const std::vector<Cx>& b) {
  DensitySolution out;
  const int n = a.num_nodes();
  out.rho1.resize(n);
  out.rho2.resize(n);
  for (int j = 0; j < n; ++j) {
    out.rho1[j] = x[2 * j];
    out.rho2[j] = x[2 * j + 1];
  }
  std::vector<Cx> r = a.apply(x);
  for (int i = 0; i < a.dim(); ++i) r[i] -= b[i];
  const double bn = nrm2(b);
  out.residual = bn > 0.0 ? nrm2(r) / bn : nrm2(r);
  return out;
}

}  // namespace

std::vector<Cx> SystemMatrix::apply(const std::vector<Cx>& x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("SystemMatrix::apply: size mismatch");
  std::vector<Cx> y(dim());
  if (n_ == 0) return y;
  using Mat =
      Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> ma(a_.data(), dim(), dim());
  Eigen::Map<const Eigen::VectorXcd> mx(x.data(), dim());
  Eigen::Map<Eigen::VectorXcd> my(y.data(), dim());
  my.noalias() = ma * mx;
  return y;
}

int assembly_threads() {
  if (const char* env = std::getenv("FLEXBIE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min(v, 64L));
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 64u));
}

SystemMatrix assemble(const BVProblem& problem) {
  if (problem.boundary == nullptr)
    throw std::invalid_argument("assemble: no boundary");
  const Panelization& p = *problem.boundary;
  const int n = p.num_nodes();
  if (!problem.rhs.empty() &&
      static_cast<int>(problem.rhs.size()) != 2 * n)
    throw std::invalid_argument("assemble: rhs length must be twice the node count");
  const BoundaryKernels kb(problem.bc, problem.mp);
  check_disjoint(p);

  std::optional<SurfaceOperator> h, d;
  if (problem.bc == BCKind::kFree) {
    h.emplace(hilbert_matrix(p));
    d.emplace(laplace_dlp_matrix(p));
  }
  const AssemblyContext ctx{p,           kb,
                            problem.side, gauss_legendre(p.order()),
                            h ? &*h : nullptr, d ? &*d : nullptr};

  SystemMatrix a(n);
  const int nthreads = std::max(1, std::min(assembly_threads(), n));
  auto worker = [&ctx, &a, n](int lo, int hi) {
    Rows rows(n);
    for (int i = lo; i < hi; ++i) {
      fill_rows(ctx, i, rows);
      emit_rows(ctx, i, rows, a);
    }
  };
  if (nthreads == 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
      const int lo = static_cast<int>(static_cast<long>(n) * t / nthreads);
      const int hi =
          static_cast<int>(static_cast<long>(n) * (t + 1) / nthreads);
      pool.emplace_back(worker, lo, hi);
    }
    for (std::thread& th : pool) th.join();
  }
  return a;
}

DensitySolution solve_dense(const SystemMatrix& a,
                            const std::vector<Cx>& rhs) {
  const int n = a.dim();
  if (static_cast<int>(rhs.size()) != n)
    throw std::invalid_argument("solve_dense: rhs size mismatch");
  if (n == 0) return {};

  std::vector<Cx> f(a.data().size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      f[static_cast<std::size_t>(j) * n + i] = a.at(i, j);
  const double anorm =
      LAPACKE_zlange(LAPACK_COL_MAJOR, '1', n, n, f.data(), n);
  std::vector<lapack_int> ipiv(n);
  const lapack_int info =
      LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, f.data(), n, ipiv.data());
  if (info > 0)
    throw std::runtime_error(
        "solve_dense: singular system; the boundary-value problem violates "
        "the unique-solvability hypotheses of the second-kind formulations");
  if (info < 0) throw std::runtime_error("solve_dense: invalid argument");

  double rcond = 0.0;
  LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, f.data(), n, anorm, &rcond);

  std::vector<Cx> x = rhs;
  LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, f.data(), n, ipiv.data(),
                 x.data(), n);
  DensitySolution out = pack_solution(a, std::move(x), rhs);
  out.condition = rcond > 0.0 ? 1.0 / rcond
                              : std::numeric_limits<double>::infinity();
  out.converged = true;
  return out;
}

DensitySolution solve_iterative(const SystemMatrix& a,
                                const std::vector<Cx>& rhs, double tol,
                                int max_iter) {
  if (tol < 1e-13)
    throw std::invalid_argument("solve_iterative: tol must be >= 1e-13");
  const int n = a.dim();
  if (static_cast<int>(rhs.size()) != n)
    throw std::invalid_argument("solve_iterative: rhs size mismatch");
  if (n == 0) return {};

  const double bnorm = nrm2(rhs);
  if (bnorm == 0.0) {
    DensitySolution out = pack_solution(a, std::vector<Cx>(n, Cx{}), rhs);
    out.converged = true;
    return out;
  }

  // Full GMRES with modified Gram-Schmidt (one reorthogonalization pass)
  // and Givens rotations on the Hessenberg columns.
  std::vector<std::vector<Cx>> basis;
  std::vector<std::vector<Cx>> hcols;
  std::vector<double> giv_c;
  std::vector<Cx> giv_s;
  std::vector<Cx> g{Cx{bnorm, 0.0}};

  {
    std::vector<Cx> v0 = rhs;
    for (Cx& z : v0) z /= bnorm;
    basis.push_back(std::move(v0));
  }

  int m = 0;
  bool breakdown = false;
  while (m < max_iter) {
    std::vector<Cx> w = a.apply(basis[m]);
    std::vector<Cx> h(m + 2, Cx{});
    for (int pass = 0; pass < 2; ++pass) {
      for (int l = 0; l <= m; ++l) {
        Cx proj{};
        const std::vector<Cx>& vl = basis[l];
        for (int r = 0; r < n; ++r) proj += std::conj(vl[r]) * w[r];
        h[l] += proj;
        for (int r = 0; r < n; ++r) w[r] -= proj * vl[r];
      }
    }
    const double wn = nrm2(w);
    h[m + 1] = Cx{wn, 0.0};

    for (int l = 0; l < m; ++l) {
      const Cx t = giv_c[l] * h[l] + giv_s[l] * h[l + 1];
      h[l + 1] = -std::conj(giv_s[l]) * h[l] + giv_c[l] * h[l + 1];
      h[l] = t;
    }
    const double den = std::hypot(std::abs(h[m]), wn);
    double c;
    Cx s;
    if (den == 0.0) {
      c = 1.0;
      s = Cx{};
    } else if (std::abs(h[m]) == 0.0) {
      c = 0.0;
      s = Cx{1.0, 0.0};
    } else {
      c = std::abs(h[m]) / den;
      s = (h[m] / std::abs(h[m])) * std::conj(h[m + 1]) / den;
    }
    giv_c.push_back(c);
    giv_s.push_back(s);
    h[m] = c * h[m] + s * h[m + 1];
    h[m + 1] = Cx{};
    g.push_back(-std::conj(s) * g[m]);
    g[m] *= c;
    hcols.push_back(std::move(h));
    ++m;

    const double arn = std::abs(g[m]) / bnorm;
    if (arn <= 0.5 * tol) break;
    if (wn == 0.0) {
      breakdown = true;
      break;
    }
    std::vector<Cx> vnext = std::move(w);
    for (Cx& z : vnext) z /= wn;
    basis.push_back(std::move(vnext));
  }
  (void)breakdown;

  std::vector<Cx> y(m, Cx{});
  for (int i = m - 1; i >= 0; --i) {
    Cx sum = g[i];
    for (int j = i + 1; j < m; ++j) sum -= hcols[j][i] * y[j];
    y[i] = std::abs(hcols[i][i]) > 0.0 ? sum / hcols[i][i] : Cx{};
  }
  std::vector<Cx> x(n, Cx{});
  for (int l = 0; l < m; ++l) {
    const std::vector<Cx>& vl = basis[l];
    for (int r = 0; r < n; ++r) x[r] += y[l] * vl[r];
  }

  DensitySolution out = pack_solution(a, std::move(x), rhs);
  out.iterations = m;
  out.converged = out.residual <= tol;
  return out;
}

std::vector<Cx> interleave(const std::vector<Cx>& f1,
                           const std::vector<Cx>& f2) {
  if (f1.size() != f2.size())
    throw std::invalid_argument("interleave: length mismatch");
  std::vector<Cx> out(2 * f1.size());
  for (std::size_t j = 0; j < f1.size(); ++j) {
    out[2 * j] = f1[j];
    out[2 * j + 1] = f2[j];
  }
  return out;
}

}  // namespace flexbie

#include "flexbie/surfaceops.hpp"

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "flexbie/kernels.hpp"

namespace flexbie {
namespace {

// Closed forms for the trigonometric sums behind the multiplier matrices:
// S1 = sum_{m=1..K} sin(m a), S2 = sum_{m=1..K} m sin(m a). Near a = 0
// (mod 2 pi) the quotient forms degenerate; the small-angle series takes
// over there.
double sin_sum(int K, double a) {
  const double half = std::sin(0.5 * a);
  if (std::abs(half) < 1e-9) {
    const double d = std::remainder(a, 2.0 * M_PI);
    return 0.5 * K * (K + 1.0) * d;
  }
  return std::sin(0.5 * K * a) * std::sin(0.5 * (K + 1.0) * a) / half;
}

double weighted_sin_sum(int K, double a) {
  const double half = std::sin(0.5 * a);
  if (std::abs(half) < 1e-9) {
    const double d = std::remainder(a, 2.0 * M_PI);
    return d * K * (K + 1.0) * (2.0 * K + 1.0) / 6.0;
  }
  const double kh = K + 0.5;
  return -kh * std::cos(kh * a) / (2.0 * half) +
         std::sin(kh * a) * std::cos(0.5 * a) / (4.0 * half * half);
}

std::vector<int> component_offsets(const Panelization& p) {
  std::vector<int> off(p.num_components() + 1);
  for (int c = 0; c <= p.num_components(); ++c)
    off[c] = c < p.num_components() ? p.node_begin(c) : p.num_nodes();
  return off;
}

// Barycentric interpolation weights for the reference nodes.
std::vector<double> bary_weights(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> w(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      if (l != j) w[j] /= x[j] - x[l];
  return w;
}

// Interpolation matrix (M x nc) from the component's panel nodes to the
// uniform arclength grid s_u = u L / M.
std::vector<double> uniform_from_nodes(const Panelization& p, int c, int M) {
  const int nc = p.node_end(c) - p.node_begin(c);
  const int ord = p.order();
  const double L = p.component_length(c);
  std::vector<double> ref(ord), P(static_cast<std::size_t>(M) * nc, 0.0);
  for (int k = 0; k < ord; ++k) ref[k] = p.node_ref(k);
  const std::vector<double> bw = bary_weights(ref);

  for (int u = 0; u < M; ++u) {
    const double t = p.param_at_arclen(c, L * u / M);
    // Locate the panel holding t (panels are contiguous in parameter).
    int pi = p.panel_end(c) - 1;
    for (int q = p.panel_begin(c); q < p.panel_end(c); ++q) {
      if (t < p.panel(q).t1) {
        pi = q;
        break;
      }
    }
    const Panel& pan = p.panel(pi);
    const double xi = (2.0 * t - pan.t0 - pan.t1) / (pan.t1 - pan.t0);
    int hit = -1;
    for (int k = 0; k < ord; ++k)
      if (std::abs(xi - ref[k]) < 1e-14) hit = k;
    double* row = &P[static_cast<std::size_t>(u) * nc];
    const int base = pan.first_node - p.node_begin(c);
    if (hit >= 0) {
      row[base + hit] = 1.0;
      continue;
    }
    double denom = 0.0;
    for (int k = 0; k < ord; ++k) denom += bw[k] / (xi - ref[k]);
    for (int k = 0; k < ord; ++k) row[base + k] = bw[k] / (xi - ref[k]) / denom;
  }
  return P;
}

// Node-to-node block applying the trig interpolant's multiplier transform:
// out = T * P with T the closed-form evaluation at the node arclengths.
// mode 0: conjugate function (-i sign m); mode 1: d/ds (i m 2 pi / L).
std::vector<double> spectral_block(const Panelization& p, int c, int mode) {
  const int nc = p.node_end(c) - p.node_begin(c);
  const int M = 2 * nc;
  const int K = nc - 1;  // highest retained mode below Nyquist
  const double L = p.component_length(c);
  const std::vector<double> P = uniform_from_nodes(p, c, M);

  std::vector<double> T(static_cast<std::size_t>(nc) * M);
  for (int i = 0; i < nc; ++i) {
    const double si = p.node_arclen(p.node_begin(c) + i);
    for (int u = 0; u < M; ++u) {
      const double a = 2.0 * M_PI * (si - L * u / M) / L;
      T[static_cast<std::size_t>(i) * M + u] =
          mode == 0 ? (2.0 / M) * sin_sum(K, a)
                    : -(4.0 * M_PI / (L * M)) * weighted_sin_sum(K, a);
    }
  }

  std::vector<double> B(static_cast<std::size_t>(nc) * nc, 0.0);
  for (int i = 0; i < nc; ++i)
    for (int u = 0; u < M; ++u) {
      const double tiu = T[static_cast<std::size_t>(i) * M + u];
      const double* prow = &P[static_cast<std::size_t>(u) * nc];
      double* brow = &B[static_cast<std::size_t>(i) * nc];
      for (int j = 0; j < nc; ++j) brow[j] += tiu * prow[j];
    }
  return B;
}

}  // namespace

SurfaceOperator::SurfaceOperator(Tag tag, std::vector<int> block_begin,
                                 std::vector<double> dense)
    : tag_(tag),
      n_(block_begin.empty() ? 0 : block_begin.back()),
      block_begin_(std::move(block_begin)),
      a_(std::move(dense)) {
  assert(a_.size() == static_cast<std::size_t>(n_) * n_);
}

std::vector<double> SurfaceOperator::apply(
    const std::vector<double>& rho) const {
  assert(static_cast<int>(rho.size()) == n_);
  std::vector<double> out(n_, 0.0);
  for (int c = 0; c + 1 < static_cast<int>(block_begin_.size()); ++c)
    for (int i = block_begin_[c]; i < block_begin_[c + 1]; ++i) {
      double acc = 0.0;
      const double* row = &a_[static_cast<std::size_t>(i) * n_];
      for (int j = block_begin_[c]; j < block_begin_[c + 1]; ++j)
        acc += row[j] * rho[j];
      out[i] = acc;
    }
  return out;
}

std::vector<std::complex<double>> SurfaceOperator::apply(
    const std::vector<std::complex<double>>& rho) const {
  assert(static_cast<int>(rho.size()) == n_);
  std::vector<std::complex<double>> out(n_, 0.0);
  for (int c = 0; c + 1 < static_cast<int>(block_begin_.size()); ++c)
    for (int i = block_begin_[c]; i < block_begin_[c + 1]; ++i) {
      std::complex<double> acc = 0.0;
      const double* row = &a_[static_cast<std::size_t>(i) * n_];
      for (int j = block_begin_[c]; j < block_begin_[c + 1]; ++j)
        acc += row[j] * rho[j];
      out[i] = acc;
    }
  return out;
}

SurfaceOperator SurfaceOperator::compose(const SurfaceOperator& other) const {
  if (block_begin_ != other.block_begin_)
    throw std::invalid_argument("compose: mismatched block structure");
  std::vector<double> out(a_.size(), 0.0);
  for (int c = 0; c + 1 < static_cast<int>(block_begin_.size()); ++c) {
    const int b = block_begin_[c], e = block_begin_[c + 1];
    for (int i = b; i < e; ++i)
      for (int k = b; k < e; ++k) {
        const double aik = entry(i, k);
        if (aik == 0.0) continue;
        const double* orow = &other.a_[static_cast<std::size_t>(k) * n_];
        double* out_row = &out[static_cast<std::size_t>(i) * n_];
        for (int j = b; j < e; ++j) out_row[j] += aik * orow[j];
      }
  }
  return SurfaceOperator(Tag::kComposite, block_begin_, std::move(out));
}

SurfaceOperator hilbert_matrix(const Panelization& p) {
  const int n = p.num_nodes();
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int c = 0; c < p.num_components(); ++c) {
    const int b = p.node_begin(c), e = p.node_end(c);
    const double L = p.component_length(c);
    const std::vector<double> spec = spectral_block(p, c, 0);
    const Curve& curve = p.curve(c);
    for (int i = b; i < e; ++i) {
      const CurvePoint& x = p.node(i);
      const double si = p.node_arclen(i);
      double* row = &a[static_cast<std::size_t>(i) * n];
      for (int j = b; j < e; ++j) {
        row[j] = spec[static_cast<std::size_t>(i - b) * (e - b) + (j - b)];
        if (j == i) continue;  // remainder kernel vanishes on the diagonal
        const PairInvariants iv = pair_invariants(curve, x, p.node(j));
        const double ds = si - p.node_arclen(j);
        const double rem =
            hilbert_kernel(iv) - 1.0 / (L * std::tan(M_PI * ds / L));
        row[j] += rem * p.weight(j);
      }
    }
  }
  return SurfaceOperator(SurfaceOperator::Tag::kHilbert,
                         component_offsets(p), std::move(a));
}

SurfaceOperator dds_matrix(const Panelization& p) {
  const int n = p.num_nodes();
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int c = 0; c < p.num_components(); ++c) {
    const int b = p.node_begin(c), e = p.node_end(c);
    const std::vector<double> spec = spectral_block(p, c, 1);
    for (int i = b; i < e; ++i)
      for (int j = b; j < e; ++j)
        a[static_cast<std::size_t>(i) * n + j] =
            spec[static_cast<std::size_t>(i - b) * (e - b) + (j - b)];
  }
  return SurfaceOperator(SurfaceOperator::Tag::kArclenDeriv,
                         component_offsets(p), std::move(a));
}

SurfaceOperator laplace_dlp_matrix(const Panelization& p) {
  const int n = p.num_nodes();
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int c = 0; c < p.num_components(); ++c) {
    const Curve& curve = p.curve(c);
    for (int i = p.node_begin(c); i < p.node_end(c); ++i) {
      const CurvePoint& x = p.node(i);
      double* row = &a[static_cast<std::size_t>(i) * n];
      for (int j = p.node_begin(c); j < p.node_end(c); ++j) {
        if (j == i) {
          row[j] = -x.kappa / (4.0 * M_PI) * p.weight(j);
          continue;
        }
        const PairInvariants iv = pair_invariants(curve, x, p.node(j));
        row[j] = dlp_kernel(iv) * p.weight(j);
      }
    }
  }
  return SurfaceOperator(SurfaceOperator::Tag::kLaplaceDlp,
                         component_offsets(p), std::move(a));
}

}  // namespace flexbie

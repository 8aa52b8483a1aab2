#pragma once

// Dense discrete surface operators on a panelization: the periodic Hilbert
// transform tied to the boundary, the arclength derivative, and the Laplace
// double layer. Every operator is block-diagonal over boundary components;
// applying one to a density supported on component i yields zero elsewhere.

#include <complex>
#include <vector>

#include "flexbie/geometry.hpp"

namespace flexbie {

class SurfaceOperator {
 public:
  enum class Tag { kHilbert, kArclenDeriv, kLaplaceDlp, kComposite };

  SurfaceOperator(Tag tag, std::vector<int> block_begin,
                  std::vector<double> dense);

  Tag tag() const { return tag_; }
  int size() const { return n_; }
  int num_blocks() const { return static_cast<int>(block_begin_.size()) - 1; }
  // Half-open node index range of component c.
  int block_begin(int c) const { return block_begin_[c]; }
  int block_end(int c) const { return block_begin_[c + 1]; }

  double entry(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }
  // Row-major size() x size(); cross-component entries are exactly zero.
  const std::vector<double>& data() const { return a_; }

  std::vector<double> apply(const std::vector<double>& rho) const;
  std::vector<std::complex<double>> apply(
      const std::vector<std::complex<double>>& rho) const;

  // Matrix product (this applied after other), multiplied block by block.
  // Block structures must match.
  SurfaceOperator compose(const SurfaceOperator& other) const;

 private:
  Tag tag_;
  int n_;
  std::vector<int> block_begin_;  // component offsets plus end sentinel
  std::vector<double> a_;
};

// Principal-value Hilbert transform on each component: the arclength
// periodization of the Cauchy kernel applied spectrally on an oversampled
// equispaced arclength grid (Fourier multiplier -i sign m, zero mode
// annihilated), plus the bounded remainder of the geometric kernel
// (x-y).tau_y / (pi |x-y|^2) integrated with the panel rule. Spectrally
// accurate on analytic curves.
SurfaceOperator hilbert_matrix(const Panelization& p);

// d/ds on each component via the spectral derivative on the same
// oversampled grid; exact for resolved Fourier modes.
SurfaceOperator dds_matrix(const Panelization& p);

// On-surface Laplace double layer (x-y).n_y / (2 pi |x-y|^2) with its
// continuous diagonal limit -kappa/(4 pi), one smooth Nystrom block per
// component.
SurfaceOperator laplace_dlp_matrix(const Panelization& p);

}  // namespace flexbie

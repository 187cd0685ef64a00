#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bfly/param.hpp"
#include "bfly/split_complex.hpp"

namespace bfly {

// Counts complex multiply-accumulates performed by a transform application.
struct MacCounter {
  unsigned long long complex_macs = 0;
};

bool is_power_of_two(std::size_t n);
std::size_t log2_exact(std::size_t n);

// Bit-reversal of log2(n)-bit indices: out[i] = reverse of i's bits.
// The one factor of the transform that is never trainable.
std::vector<std::size_t> bit_reversal_permutation(std::size_t n);

// Diagonal of the L/2 twiddle values w_L^k = exp(-2*pi*j*k/L), k = 0..L/2-1.
struct TwiddleDiagonal {
  std::size_t size = 0;  // L/2
  SplitComplexBuffer values;
};
TwiddleDiagonal build_twiddle_diagonal(std::size_t block_size);

// One factor of the radix-2 decimation-in-time factorization. Every row and
// every column holds exactly two nonzeros; the (row, col) pattern is fixed at
// construction and only the values may change under training.
//
// Storage: row r gathers from cols[2r] and cols[2r+1]; the matching complex
// weights live in vals at [4r .. 4r+3] as (w0.re, w0.im, w1.re, w1.im).
struct StackedDiagonalMatrix {
  std::size_t n = 0;
  std::size_t stage = 0;  // k in 1..log2(n); butterfly block size is 2^k
  std::vector<std::size_t> cols;
  ParamTensor vals;  // shape {n, 2, 2}

  struct Entry {
    std::size_t row, col;
    double re, im;
  };
  std::vector<Entry> entries() const;
};
StackedDiagonalMatrix build_stage_matrix(std::size_t n, std::size_t stage,
                                         const std::string& name_prefix = "fft");

// The full factorization: bit-reversal permutation followed by log2(n)
// stacked-diagonal factors, stage 1 applied first. At initialization the
// composite equals the DFT matrix.
struct ButterflyStack {
  std::size_t n = 0;
  std::vector<std::size_t> permutation;          // gather: xp[i] = x[permutation[i]]
  std::vector<std::size_t> inverse_permutation;  // scatter map for gradients
  std::vector<StackedDiagonalMatrix> factors;

  std::vector<ParamTensor*> parameters();
  void set_trainable(bool flag);
};
ButterflyStack build_butterfly_stack(std::size_t n, const std::string& name_prefix = "fft");

// y = W_m(...(W_1(permute(x)))...). Equals the DFT of x at initialization.
SplitComplexBuffer apply_forward(const ButterflyStack& stack, const SplitComplexBuffer& x,
                                 MacCounter* macs = nullptr);

// Conjugate trick: conj(forward(conj(X))) / n, using this stack's own values.
SplitComplexBuffer apply_inverse(const ButterflyStack& stack, const SplitComplexBuffer& X,
                                 MacCounter* macs = nullptr);

// Direct O(n^2) evaluation of X[k] = sum_n x[n] w_N^{kn}. The oracle every
// equivalence test measures against; works for any positive length.
SplitComplexBuffer naive_dft(const SplitComplexBuffer& x);

// Dense split-complex matrix, row-major.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> re, im;  // n*n each

  double& at_re(std::size_t r, std::size_t c) { return re[r * n + c]; }
  double& at_im(std::size_t r, std::size_t c) { return im[r * n + c]; }
  double at_re(std::size_t r, std::size_t c) const { return re[r * n + c]; }
  double at_im(std::size_t r, std::size_t c) const { return im[r * n + c]; }
};

// Explicit product of all factors and the permutation. Refuses n > 4096.
DenseMatrix to_dense(const ButterflyStack& stack);
DenseMatrix stage_to_dense(const StackedDiagonalMatrix& m);
DenseMatrix dft_matrix(std::size_t n);  // from naive_dft on identity columns

SplitComplexBuffer dense_matvec(const DenseMatrix& m, const SplitComplexBuffer& x,
                                MacCounter* macs = nullptr);

// CSV dump (row-major, "re+imj" cells) for eyeballing dense verifications.
std::string dense_to_csv(const DenseMatrix& m);

// Real trainable parameter count: 2 per complex entry, permutation excluded.
std::size_t count_parameters(const ButterflyStack& stack);
// What a dense trainable transform of the same size would cost: 2*n*n.
std::size_t dense_parameter_count(std::size_t n);

// Shared stage kernel: y[r] = w0[r]*x[cols[2r]] + w1[r]*x[cols[2r+1]],
// split-complex. Exactly 2 complex MACs per row.
void stage_apply(const StackedDiagonalMatrix& m, const double* xre, const double* xim,
                 double* yre, double* yim);

}  // namespace bfly

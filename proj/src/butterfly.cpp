#include "bfly/butterfly.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bfly {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::size_t kDenseLimit = 4096;

void check_transform_size(std::size_t n, const char* who) {
  if (n < 2 || !is_power_of_two(n))
    throw std::invalid_argument(std::string(who) + ": size must be a power of two >= 2, got " +
                                std::to_string(n));
}
}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t log2_exact(std::size_t n) {
  std::size_t m = 0;
  while ((std::size_t{1} << m) < n) ++m;
  return m;
}

std::vector<std::size_t> bit_reversal_permutation(std::size_t n) {
  check_transform_size(n, "bit_reversal_permutation");
  const std::size_t bits = log2_exact(n);
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r = (r << 1) | ((i >> b) & 1);
    out[i] = r;
  }
  return out;
}

TwiddleDiagonal build_twiddle_diagonal(std::size_t block_size) {
  check_transform_size(block_size, "build_twiddle_diagonal");
  const std::size_t half = block_size / 2;
  TwiddleDiagonal t;
  t.size = half;
  t.values = SplitComplexBuffer(half);
  for (std::size_t k = 0; k < half; ++k) {
    // Quarter-turn angles are exact so that small stage matrices match the
    // textbook integer forms bit-for-bit.
    if (k == 0) {
      t.values.re[k] = 1.0;
      t.values.im[k] = 0.0;
    } else if (4 * k == block_size) {
      t.values.re[k] = 0.0;
      t.values.im[k] = -1.0;
    } else {
      const double angle = -kTwoPi * static_cast<double>(k) / static_cast<double>(block_size);
      t.values.re[k] = std::cos(angle);
      t.values.im[k] = std::sin(angle);
    }
  }
  return t;
}

StackedDiagonalMatrix build_stage_matrix(std::size_t n, std::size_t stage,
                                         const std::string& name_prefix) {
  check_transform_size(n, "build_stage_matrix");
  const std::size_t m = log2_exact(n);
  if (stage < 1 || stage > m)
    throw std::invalid_argument("build_stage_matrix: stage " + std::to_string(stage) +
                                " out of range 1.." + std::to_string(m));

  const std::size_t block = std::size_t{1} << stage;  // L
  const std::size_t half = block / 2;
  const TwiddleDiagonal tw = build_twiddle_diagonal(block);

  StackedDiagonalMatrix w;
  w.n = n;
  w.stage = stage;
  w.cols.assign(2 * n, 0);
  w.vals = ParamTensor(name_prefix + "/stage" + std::to_string(stage), {n, 2, 2});

  for (std::size_t b = 0; b < n / block; ++b) {
    const std::size_t base = b * block;
    for (std::size_t i = 0; i < half; ++i) {
      const std::size_t top = base + i;
      const std::size_t bot = base + half + i;
      // Both rows of a butterfly read the same two columns.
      w.cols[2 * top] = top;
      w.cols[2 * top + 1] = bot;
      w.cols[2 * bot] = top;
      w.cols[2 * bot + 1] = bot;
      // top: 1 * x[top] + w * x[bot]; bottom: 1 * x[top] - w * x[bot]
      w.vals.values[4 * top + 0] = 1.0;
      w.vals.values[4 * top + 1] = 0.0;
      w.vals.values[4 * top + 2] = tw.values.re[i];
      w.vals.values[4 * top + 3] = tw.values.im[i];
      w.vals.values[4 * bot + 0] = 1.0;
      w.vals.values[4 * bot + 1] = 0.0;
      w.vals.values[4 * bot + 2] = -tw.values.re[i];
      w.vals.values[4 * bot + 3] = -tw.values.im[i];
    }
  }
  return w;
}

std::vector<StackedDiagonalMatrix::Entry> StackedDiagonalMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(2 * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < 2; ++j)
      out.push_back({r, cols[2 * r + j], vals.values[4 * r + 2 * j], vals.values[4 * r + 2 * j + 1]});
  return out;
}

std::vector<ParamTensor*> ButterflyStack::parameters() {
  std::vector<ParamTensor*> out;
  out.reserve(factors.size());
  for (auto& f : factors) out.push_back(&f.vals);
  return out;
}

void ButterflyStack::set_trainable(bool flag) {
  for (auto& f : factors) f.vals.trainable = flag;
}

ButterflyStack build_butterfly_stack(std::size_t n, const std::string& name_prefix) {
  check_transform_size(n, "build_butterfly_stack");
  ButterflyStack s;
  s.n = n;
  s.permutation = bit_reversal_permutation(n);
  s.inverse_permutation.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) s.inverse_permutation[s.permutation[i]] = i;
  const std::size_t m = log2_exact(n);
  s.factors.reserve(m);
  for (std::size_t k = 1; k <= m; ++k)
    s.factors.push_back(build_stage_matrix(n, k, name_prefix));
  return s;
}

void stage_apply(const StackedDiagonalMatrix& m, const double* xre, const double* xim,
                 double* yre, double* yim) {
  const std::size_t n = m.n;
  const double* v = m.vals.values.data();
  const std::size_t* c = m.cols.data();
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c0 = c[2 * r], c1 = c[2 * r + 1];
    const double a0 = v[4 * r + 0], b0 = v[4 * r + 1];
    const double a1 = v[4 * r + 2], b1 = v[4 * r + 3];
    yre[r] = a0 * xre[c0] - b0 * xim[c0] + a1 * xre[c1] - b1 * xim[c1];
    yim[r] = a0 * xim[c0] + b0 * xre[c0] + a1 * xim[c1] + b1 * xre[c1];
  }
}

SplitComplexBuffer apply_forward(const ButterflyStack& stack, const SplitComplexBuffer& x,
                                 MacCounter* macs) {
  if (x.size() != stack.n)
    throw std::invalid_argument("apply_forward: input length " + std::to_string(x.size()) +
                                " != transform size " + std::to_string(stack.n));
  if (!all_finite(x)) throw std::runtime_error("apply_forward: non-finite input");

  const std::size_t n = stack.n;
  SplitComplexBuffer cur(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    cur.re[i] = x.re[stack.permutation[i]];
    cur.im[i] = x.im[stack.permutation[i]];
  }
  for (const auto& f : stack.factors) {
    stage_apply(f, cur.re.data(), cur.im.data(), next.re.data(), next.im.data());
    std::swap(cur, next);
    if (macs) macs->complex_macs += 2ull * n;  // 2 complex MACs per row
  }
  return cur;
}

SplitComplexBuffer apply_inverse(const ButterflyStack& stack, const SplitComplexBuffer& X,
                                 MacCounter* macs) {
  SplitComplexBuffer conj(X.re, X.im);
  for (double& v : conj.im) v = -v;
  SplitComplexBuffer y = apply_forward(stack, conj, macs);
  const double inv = 1.0 / static_cast<double>(stack.n);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y.re[i] *= inv;
    y.im[i] = -y.im[i] * inv;
  }
  return y;
}

SplitComplexBuffer naive_dft(const SplitComplexBuffer& x) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("naive_dft: empty input");
  if (!all_finite(x)) throw std::runtime_error("naive_dft: non-finite input");

  // Table of w_n^m keeps every cos/sin argument in [0, 2pi).
  std::vector<double> tre(n), tim(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double angle = -kTwoPi * static_cast<double>(m) / static_cast<double>(n);
    tre[m] = std::cos(angle);
    tim[m] = std::sin(angle);
  }
  SplitComplexBuffer out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double sre = 0.0, sim = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t m = (k * t) % n;
      sre += x.re[t] * tre[m] - x.im[t] * tim[m];
      sim += x.re[t] * tim[m] + x.im[t] * tre[m];
    }
    out.re[k] = sre;
    out.im[k] = sim;
  }
  return out;
}

DenseMatrix stage_to_dense(const StackedDiagonalMatrix& m) {
  DenseMatrix d;
  d.n = m.n;
  d.re.assign(m.n * m.n, 0.0);
  d.im.assign(m.n * m.n, 0.0);
  for (const auto& e : m.entries()) {
    d.at_re(e.row, e.col) = e.re;
    d.at_im(e.row, e.col) = e.im;
  }
  return d;
}

DenseMatrix to_dense(const ButterflyStack& stack) {
  const std::size_t n = stack.n;
  if (n > kDenseLimit)
    throw std::invalid_argument("to_dense: refusing n = " + std::to_string(n) + " (limit " +
                                std::to_string(kDenseLimit) + ")");

  // Start from the permutation matrix, then left-multiply each factor using
  // its two-entries-per-row sparsity: (W * M)[r, :] = w0 * M[c0, :] + w1 * M[c1, :].
  DenseMatrix acc;
  acc.n = n;
  acc.re.assign(n * n, 0.0);
  acc.im.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) acc.at_re(i, stack.permutation[i]) = 1.0;

  DenseMatrix next = acc;
  for (const auto& f : stack.factors) {
    const double* v = f.vals.values.data();
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t c0 = f.cols[2 * r], c1 = f.cols[2 * r + 1];
      const double a0 = v[4 * r + 0], b0 = v[4 * r + 1];
      const double a1 = v[4 * r + 2], b1 = v[4 * r + 3];
      for (std::size_t c = 0; c < n; ++c) {
        const double r0 = acc.at_re(c0, c), i0 = acc.at_im(c0, c);
        const double r1 = acc.at_re(c1, c), i1 = acc.at_im(c1, c);
        next.at_re(r, c) = a0 * r0 - b0 * i0 + a1 * r1 - b1 * i1;
        next.at_im(r, c) = a0 * i0 + b0 * r0 + a1 * i1 + b1 * r1;
      }
    }
    std::swap(acc, next);
  }
  return acc;
}

DenseMatrix dft_matrix(std::size_t n) {
  DenseMatrix d;
  d.n = n;
  d.re.assign(n * n, 0.0);
  d.im.assign(n * n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    SplitComplexBuffer e(n);
    e.re[c] = 1.0;
    SplitComplexBuffer col = naive_dft(e);
    for (std::size_t r = 0; r < n; ++r) {
      d.at_re(r, c) = col.re[r];
      d.at_im(r, c) = col.im[r];
    }
  }
  return d;
}

SplitComplexBuffer dense_matvec(const DenseMatrix& m, const SplitComplexBuffer& x,
                                MacCounter* macs) {
  if (x.size() != m.n) throw std::invalid_argument("dense_matvec: length mismatch");
  SplitComplexBuffer y(m.n);
  for (std::size_t r = 0; r < m.n; ++r) {
    double sre = 0.0, sim = 0.0;
    for (std::size_t c = 0; c < m.n; ++c) {
      const double a = m.at_re(r, c), b = m.at_im(r, c);
      sre += a * x.re[c] - b * x.im[c];
      sim += a * x.im[c] + b * x.re[c];
    }
    y.re[r] = sre;
    y.im[r] = sim;
  }
  if (macs) macs->complex_macs += static_cast<unsigned long long>(m.n) * m.n;
  return y;
}

std::string dense_to_csv(const DenseMatrix& m) {
  std::string out;
  char cell[64];
  for (std::size_t r = 0; r < m.n; ++r) {
    for (std::size_t c = 0; c < m.n; ++c) {
      std::snprintf(cell, sizeof(cell), "%.17g%+.17gj", m.at_re(r, c), m.at_im(r, c));
      out += cell;
      out += (c + 1 == m.n) ? '\n' : ',';
    }
  }
  return out;
}

std::size_t count_parameters(const ButterflyStack& stack) {
  std::size_t total = 0;
  for (const auto& f : stack.factors) total += f.vals.size();
  return total;  // 4 * n * log2(n): two reals per complex entry
}

std::size_t dense_parameter_count(std::size_t n) { return 2 * n * n; }

}  // namespace bfly

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "bfly/butterfly.hpp"
#include "bfly/param.hpp"
#include "bfly/split_complex.hpp"

namespace bfly {

// An activation: value plus gradient accumulator of the same length.
struct Node {
  std::vector<double> val;
  std::vector<double> grad;

  explicit Node(std::size_t n) : val(n, 0.0), grad(n, 0.0) {}
  explicit Node(std::vector<double> v) : val(std::move(v)), grad(val.size(), 0.0) {}
  std::size_t size() const { return val.size(); }
};
using NodePtr = std::shared_ptr<Node>;

NodePtr make_node(std::vector<double> v);
NodePtr make_zero_node(std::size_t n);

// Split-complex activation pair.
struct CNode {
  NodePtr re, im;
  std::size_t size() const { return re ? re->size() : 0; }
};
CNode make_cnode(const SplitComplexBuffer& x);
SplitComplexBuffer cnode_values(const CNode& x);

// Reverse-mode tape: one recorded entry per layer application, replayed in
// exact reverse order. A tape drives exactly one backward pass and is cleared
// by it; parameter gradients accumulate additively across passes.
class Tape {
 public:
  void record(std::function<void()> op) { entries_.push_back(std::move(op)); }
  void backward();  // throws std::logic_error if nothing was recorded
  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::function<void()>> entries_;
};

// Seeds d(loss)/d(loss) = 1 on a scalar node and unwinds the tape.
void backward_scalar(const NodePtr& loss, Tape& tape);

// --- elementary taped operations (tape == nullptr -> forward only) ---

// y[i] = x[idx[i]]; backward scatters through the inverse index map.
NodePtr gather(const NodePtr& x, const std::vector<std::size_t>& idx, Tape* tape);

// One sparse butterfly factor on a split-complex activation.
CNode sparse_stage_forward(StackedDiagonalMatrix& layer, const CNode& x, Tape* tape);

// y = w (.) frame, w a trainable diagonal.
NodePtr window_forward(ParamTensor& w, const NodePtr& frame, Tape* tape);

// y = W x (+ b), W row-major with shape {out, in}.
NodePtr linear(ParamTensor& W, ParamTensor* b, const NodePtr& x, Tape* tape);

NodePtr add(const NodePtr& a, const NodePtr& b, Tape* tape);
NodePtr mul(const NodePtr& a, const NodePtr& b, Tape* tape);
NodePtr affine(const NodePtr& x, double scale, double shift, Tape* tape);
NodePtr sub_const(const NodePtr& x, const std::vector<double>& c, Tape* tape);
NodePtr sigmoid(const NodePtr& x, Tape* tape);
NodePtr tanh_act(const NodePtr& x, Tape* tape);
NodePtr concat(const NodePtr& a, const NodePtr& b, Tape* tape);
std::pair<NodePtr, NodePtr> split_half(const NodePtr& x, Tape* tape);

// Sums windowed frames at stride hop into a buffer of length out_len.
NodePtr overlap_add(const std::vector<NodePtr>& frames, std::size_t hop, std::size_t out_len,
                    Tape* tape);

// Scalar sum of squares over a set of nodes.
NodePtr sum_squares(const std::vector<NodePtr>& xs, Tape* tape);
// c = ca * a + cb * b on size-1 nodes.
NodePtr scalar_combine(const NodePtr& a, const NodePtr& b, double ca, double cb, Tape* tape);

CNode conjugate(const CNode& x, Tape* tape);

// Full butterfly stack, taped: permutation then each factor in order.
CNode stack_forward(ButterflyStack& stack, const CNode& x, Tape* tape);
// Conjugate trick through the same stack's parameters, then scale by 1/n.
CNode stack_inverse(ButterflyStack& stack, const CNode& X, Tape* tape);

// m = sqrt(re^2 + im^2 + eps^2); returns m^alpha.
NodePtr magnitude_compress(const CNode& x, double alpha, double eps, Tape* tape);
// m^(alpha-1) * (re, im): compressed magnitude, phase preserved.
CNode complex_compress_taped(const CNode& x, double alpha, double eps, Tape* tape);

}  // namespace bfly

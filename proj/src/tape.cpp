#include "bfly/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace bfly {

namespace {
void check_same_size(const NodePtr& a, const NodePtr& b, const char* who) {
  if (!a || !b || a->size() != b->size())
    throw std::invalid_argument(std::string(who) + ": operand size mismatch");
}
}  // namespace

NodePtr make_node(std::vector<double> v) { return std::make_shared<Node>(std::move(v)); }
NodePtr make_zero_node(std::size_t n) { return std::make_shared<Node>(n); }

CNode make_cnode(const SplitComplexBuffer& x) {
  return CNode{make_node(x.re), make_node(x.im)};
}

SplitComplexBuffer cnode_values(const CNode& x) {
  return SplitComplexBuffer(x.re->val, x.im->val);
}

void Tape::backward() {
  if (entries_.empty())
    throw std::logic_error("Tape::backward called without a recorded forward pass");
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) (*it)();
  entries_.clear();
}

void backward_scalar(const NodePtr& loss, Tape& tape) {
  if (!loss || loss->size() != 1)
    throw std::invalid_argument("backward_scalar: loss must be a scalar node");
  loss->grad[0] += 1.0;
  tape.backward();
}

NodePtr gather(const NodePtr& x, const std::vector<std::size_t>& idx, Tape* tape) {
  auto y = make_zero_node(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) y->val[i] = x->val[idx[i]];
  if (tape)
    tape->record([x, y, idx]() {  // indices copied: callers may pass temporaries
      for (std::size_t i = 0; i < idx.size(); ++i) x->grad[idx[i]] += y->grad[i];
    });
  return y;
}

CNode sparse_stage_forward(StackedDiagonalMatrix& layer, const CNode& x, Tape* tape) {
  if (x.size() != layer.n)
    throw std::invalid_argument("sparse_stage_forward: input length " + std::to_string(x.size()) +
                                " != layer size " + std::to_string(layer.n));
  const std::size_t n = layer.n;
  CNode y{make_zero_node(n), make_zero_node(n)};
  stage_apply(layer, x.re->val.data(), x.im->val.data(), y.re->val.data(), y.im->val.data());
  if (tape) {
    StackedDiagonalMatrix* lp = &layer;
    tape->record([lp, x, y]() {
      const std::size_t nn = lp->n;
      const double* v = lp->vals.values.data();
      const std::size_t* cols = lp->cols.data();
      const double* gre = y.re->grad.data();
      const double* gim = y.im->grad.data();
      const double* xre = x.re->val.data();
      const double* xim = x.im->val.data();
      double* xgre = x.re->grad.data();
      double* xgim = x.im->grad.data();
      const bool train = lp->vals.trainable;
      double* vg = lp->vals.grad.data();
      for (std::size_t r = 0; r < nn; ++r) {
        const double gr = gre[r], gi = gim[r];
        for (std::size_t j = 0; j < 2; ++j) {
          const std::size_t c = cols[2 * r + j];
          const double a = v[4 * r + 2 * j], b = v[4 * r + 2 * j + 1];
          if (train) {
            vg[4 * r + 2 * j] += gr * xre[c] + gi * xim[c];
            vg[4 * r + 2 * j + 1] += -gr * xim[c] + gi * xre[c];
          }
          xgre[c] += a * gr + b * gi;
          xgim[c] += -b * gr + a * gi;
        }
      }
    });
  }
  return y;
}

NodePtr window_forward(ParamTensor& w, const NodePtr& frame, Tape* tape) {
  if (w.size() != frame->size())
    throw std::invalid_argument("window_forward: window length " + std::to_string(w.size()) +
                                " != frame length " + std::to_string(frame->size()));
  auto y = make_zero_node(frame->size());
  for (std::size_t i = 0; i < y->size(); ++i) y->val[i] = w.values[i] * frame->val[i];
  if (tape) {
    ParamTensor* wp = &w;
    tape->record([wp, frame, y]() {
      for (std::size_t i = 0; i < y->size(); ++i) {
        if (wp->trainable) wp->grad[i] += y->grad[i] * frame->val[i];
        frame->grad[i] += y->grad[i] * wp->values[i];
      }
    });
  }
  return y;
}

NodePtr linear(ParamTensor& W, ParamTensor* b, const NodePtr& x, Tape* tape) {
  if (W.shape.size() != 2 || W.shape[1] != x->size())
    throw std::invalid_argument("linear: weight shape does not match input length");
  const std::size_t out = W.shape[0], in = W.shape[1];
  if (b && b->size() != out) throw std::invalid_argument("linear: bias length mismatch");

  auto y = make_zero_node(out);
  const double* wv = W.values.data();
  for (std::size_t r = 0; r < out; ++r) {
    double s = b ? b->values[r] : 0.0;
    const double* row = wv + r * in;
    for (std::size_t c = 0; c < in; ++c) s += row[c] * x->val[c];
    y->val[r] = s;
  }
  if (tape) {
    ParamTensor* Wp = &W;
    tape->record([Wp, b, x, y, out, in]() {
      const double* g = y->grad.data();
      const double* xv = x->val.data();
      double* xg = x->grad.data();
      const double* wv2 = Wp->values.data();
      double* wg = Wp->grad.data();
      const bool train_w = Wp->trainable;
      for (std::size_t r = 0; r < out; ++r) {
        const double gr = g[r];
        if (gr == 0.0) continue;
        const double* row = wv2 + r * in;
        double* grow = wg + r * in;
        for (std::size_t c = 0; c < in; ++c) {
          if (train_w) grow[c] += gr * xv[c];
          xg[c] += gr * row[c];
        }
        if (b && b->trainable) b->grad[r] += gr;
      }
    });
  }
  return y;
}

NodePtr add(const NodePtr& a, const NodePtr& b, Tape* tape) {
  check_same_size(a, b, "add");
  auto y = make_zero_node(a->size());
  for (std::size_t i = 0; i < y->size(); ++i) y->val[i] = a->val[i] + b->val[i];
  if (tape)
    tape->record([a, b, y]() {
      for (std::size_t i = 0; i < y->size(); ++i) {
        a->grad[i] += y->grad[i];
        b->grad[i] += y->grad[i];
      }
    });
  return y;
}

NodePtr mul(const NodePtr& a, const NodePtr& b, Tape* tape) {
  check_same_size(a, b, "mul");
  auto y = make_zero_node(a->size());
  for (std::size_t i = 0; i < y->size(); ++i) y->val[i] = a->val[i] * b->val[i];
  if (tape)
    tape->record([a, b, y]() {
      for (std::size_t i = 0; i < y->size(); ++i) {
        a->grad[i] += y->grad[i] * b->val[i];
        b->grad[i] += y->grad[i] * a->val[i];
      }
    });
  return y;
}

NodePtr affine(const NodePtr& x, double scale, double shift, Tape* tape) {
  auto y = make_zero_node(x->size());
  for (std::size_t i = 0; i < y->size(); ++i) y->val[i] = scale * x->val[i] + shift;
  if (tape)
    tape->record([x, y, scale]() {
      for (std::size_t i = 0; i < y->size(); ++i) x->grad[i] += scale * y->grad[i];
    });
  return y;
}

NodePtr sub_const(const NodePtr& x, const std::vector<double>& c, Tape* tape) {
  if (x->size() != c.size()) throw std::invalid_argument("sub_const: size mismatch");
  auto y = make_zero_node(x->size());
  for (std::size_t i = 0; i < y->size(); ++i) y->val[i] = x->val[i] - c[i];
  if (tape)
    tape->record([x, y]() {
      for (std::size_t i = 0; i < y->size(); ++i) x->grad[i] += y->grad[i];
    });
  return y;
}

NodePtr sigmoid(const NodePtr& x, Tape* tape) {
  auto y = make_zero_node(x->size());
  for (std::size_t i = 0; i < y->size(); ++i) y->val[i] = 1.0 / (1.0 + std::exp(-x->val[i]));
  if (tape)
    tape->record([x, y]() {
      for (std::size_t i = 0; i < y->size(); ++i)
        x->grad[i] += y->grad[i] * y->val[i] * (1.0 - y->val[i]);
    });
  return y;
}

NodePtr tanh_act(const NodePtr& x, Tape* tape) {
  auto y = make_zero_node(x->size());
  for (std::size_t i = 0; i < y->size(); ++i) y->val[i] = std::tanh(x->val[i]);
  if (tape)
    tape->record([x, y]() {
      for (std::size_t i = 0; i < y->size(); ++i)
        x->grad[i] += y->grad[i] * (1.0 - y->val[i] * y->val[i]);
    });
  return y;
}

NodePtr concat(const NodePtr& a, const NodePtr& b, Tape* tape) {
  auto y = make_zero_node(a->size() + b->size());
  for (std::size_t i = 0; i < a->size(); ++i) y->val[i] = a->val[i];
  for (std::size_t i = 0; i < b->size(); ++i) y->val[a->size() + i] = b->val[i];
  if (tape)
    tape->record([a, b, y]() {
      for (std::size_t i = 0; i < a->size(); ++i) a->grad[i] += y->grad[i];
      for (std::size_t i = 0; i < b->size(); ++i) b->grad[i] += y->grad[a->size() + i];
    });
  return y;
}

std::pair<NodePtr, NodePtr> split_half(const NodePtr& x, Tape* tape) {
  if (x->size() % 2 != 0) throw std::invalid_argument("split_half: odd length");
  const std::size_t h = x->size() / 2;
  auto a = make_zero_node(h);
  auto b = make_zero_node(h);
  for (std::size_t i = 0; i < h; ++i) {
    a->val[i] = x->val[i];
    b->val[i] = x->val[h + i];
  }
  if (tape)
    tape->record([x, a, b, h]() {
      for (std::size_t i = 0; i < h; ++i) {
        x->grad[i] += a->grad[i];
        x->grad[h + i] += b->grad[i];
      }
    });
  return {a, b};
}

NodePtr overlap_add(const std::vector<NodePtr>& frames, std::size_t hop, std::size_t out_len,
                    Tape* tape) {
  if (!frames.empty()) {
    const std::size_t n = frames.front()->size();
    const std::size_t last_end = (frames.size() - 1) * hop + n;
    if (out_len < last_end)
      throw std::invalid_argument("overlap_add: out_len " + std::to_string(out_len) +
                                  " shorter than last frame end " + std::to_string(last_end));
  }
  auto y = make_zero_node(out_len);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::size_t base = f * hop;
    for (std::size_t i = 0; i < frames[f]->size(); ++i) y->val[base + i] += frames[f]->val[i];
  }
  if (tape)
    tape->record([frames, y, hop]() {
      for (std::size_t f = 0; f < frames.size(); ++f) {
        const std::size_t base = f * hop;
        for (std::size_t i = 0; i < frames[f]->size(); ++i)
          frames[f]->grad[i] += y->grad[base + i];
      }
    });
  return y;
}

NodePtr sum_squares(const std::vector<NodePtr>& xs, Tape* tape) {
  auto y = make_zero_node(1);
  double s = 0.0;
  for (const auto& x : xs)
    for (double v : x->val) s += v * v;
  y->val[0] = s;
  if (tape)
    tape->record([xs, y]() {
      const double g = y->grad[0];
      for (const auto& x : xs)
        for (std::size_t i = 0; i < x->size(); ++i) x->grad[i] += 2.0 * x->val[i] * g;
    });
  return y;
}

NodePtr scalar_combine(const NodePtr& a, const NodePtr& b, double ca, double cb, Tape* tape) {
  if (a->size() != 1 || b->size() != 1)
    throw std::invalid_argument("scalar_combine: scalar nodes required");
  auto y = make_zero_node(1);
  y->val[0] = ca * a->val[0] + cb * b->val[0];
  if (tape)
    tape->record([a, b, y, ca, cb]() {
      a->grad[0] += ca * y->grad[0];
      b->grad[0] += cb * y->grad[0];
    });
  return y;
}

CNode conjugate(const CNode& x, Tape* tape) {
  // Real part passes through by aliasing; only the imaginary part flips.
  return CNode{x.re, affine(x.im, -1.0, 0.0, tape)};
}

CNode stack_forward(ButterflyStack& stack, const CNode& x, Tape* tape) {
  if (x.size() != stack.n)
    throw std::invalid_argument("stack_forward: input length " + std::to_string(x.size()) +
                                " != transform size " + std::to_string(stack.n));
  CNode cur{gather(x.re, stack.permutation, tape), gather(x.im, stack.permutation, tape)};
  for (auto& f : stack.factors) cur = sparse_stage_forward(f, cur, tape);
  return cur;
}

CNode stack_inverse(ButterflyStack& stack, const CNode& X, Tape* tape) {
  CNode conj_in = conjugate(X, tape);
  CNode y = stack_forward(stack, conj_in, tape);
  const double inv = 1.0 / static_cast<double>(stack.n);
  return CNode{affine(y.re, inv, 0.0, tape), affine(y.im, -inv, 0.0, tape)};
}

NodePtr magnitude_compress(const CNode& x, double alpha, double eps, Tape* tape) {
  const std::size_t n = x.size();
  auto y = make_zero_node(n);
  auto mags = std::make_shared<std::vector<double>>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m =
        std::sqrt(x.re->val[i] * x.re->val[i] + x.im->val[i] * x.im->val[i] + eps * eps);
    (*mags)[i] = m;
    y->val[i] = std::pow(m, alpha);
  }
  if (tape)
    tape->record([x, y, mags, alpha]() {
      for (std::size_t i = 0; i < y->size(); ++i) {
        // d m^a / d re = a * m^(a-2) * re
        const double coef = y->grad[i] * alpha * std::pow((*mags)[i], alpha - 2.0);
        x.re->grad[i] += coef * x.re->val[i];
        x.im->grad[i] += coef * x.im->val[i];
      }
    });
  return y;
}

CNode complex_compress_taped(const CNode& x, double alpha, double eps, Tape* tape) {
  const std::size_t n = x.size();
  CNode y{make_zero_node(n), make_zero_node(n)};
  auto mags = std::make_shared<std::vector<double>>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m =
        std::sqrt(x.re->val[i] * x.re->val[i] + x.im->val[i] * x.im->val[i] + eps * eps);
    (*mags)[i] = m;
    const double s = std::pow(m, alpha - 1.0);
    y.re->val[i] = s * x.re->val[i];
    y.im->val[i] = s * x.im->val[i];
  }
  if (tape)
    tape->record([x, y, mags, alpha]() {
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double m = (*mags)[i];
        const double s = std::pow(m, alpha - 1.0);
        const double q = (alpha - 1.0) * std::pow(m, alpha - 3.0);
        const double re = x.re->val[i], im = x.im->val[i];
        const double gre = y.re->grad[i], gim = y.im->grad[i];
        x.re->grad[i] += gre * (s + q * re * re) + gim * q * re * im;
        x.im->grad[i] += gre * q * re * im + gim * (s + q * im * im);
      }
    });
  return y;
}

}  // namespace bfly

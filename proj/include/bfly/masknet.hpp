#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bfly/tape.hpp"

namespace bfly {

// Causal masking network: linear -> unidirectional GRU -> linear -> sigmoid.
// Input is the real coefficients stacked on the imaginary (length 2n); the
// output splits into the real mask stacked on the imaginary mask.
struct MaskNetParams {
  std::size_t n = 0;  // transform size
  std::size_t d = 0;  // hidden size

  ParamTensor l1_w, l1_b;  // {d, 2n}, {d}
  ParamTensor wz, uz, bz;  // update gate: {d, d}, {d, d}, {d}
  ParamTensor wr, ur, br;  // reset gate
  ParamTensor wh, uh, bh;  // candidate
  ParamTensor l2_w, l2_b;  // {2n, d}, {2n}

  std::vector<ParamTensor*> parameters();
  std::size_t parameter_count() const;
};

// Weights ~ uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) from the given seed;
// biases zero. Deterministic per seed.
MaskNetParams init_masknet(std::size_t n, std::size_t d, std::uint64_t seed);

struct GruState {
  NodePtr h;  // zeros at sequence start
};
GruState make_gru_state(std::size_t d);

// z = sig(Wz x + Uz h + bz); r = sig(Wr x + Ur h + br);
// hc = tanh(Wh x + Uh (r.h) + bh); h' = (1-z).h + z.hc
NodePtr gru_step(MaskNetParams& p, const NodePtr& x, const NodePtr& h, Tape* tape);

struct MaskPair {
  NodePtr mr, mi;  // each length n, values in (0, 1)
};

// Runs the full network over a coefficient sequence, carrying GRU state.
std::vector<MaskPair> masknet_forward(MaskNetParams& p, const std::vector<CNode>& coeffs,
                                      Tape* tape);

// re' = re (.) M_r, im' = im (.) M_i: independent real/imaginary gains,
// not a complex multiply.
CNode apply_masks(const CNode& coeffs, const MaskPair& masks, Tape* tape);

}  // namespace bfly

#include "bfly/masknet.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace bfly {

std::vector<ParamTensor*> MaskNetParams::parameters() {
  return {&l1_w, &l1_b, &wz, &uz, &bz, &wr, &ur, &br, &wh, &uh, &bh, &l2_w, &l2_b};
}

std::size_t MaskNetParams::parameter_count() const {
  return l1_w.size() + l1_b.size() + wz.size() + uz.size() + bz.size() + wr.size() + ur.size() +
         br.size() + wh.size() + uh.size() + bh.size() + l2_w.size() + l2_b.size();
}

namespace {
void fill_uniform_fan_in(ParamTensor& t, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : t.values) v = dist(rng);
}
}  // namespace

MaskNetParams init_masknet(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d == 0) throw std::invalid_argument("init_masknet: n and d must be positive");
  MaskNetParams p;
  p.n = n;
  p.d = d;

  p.l1_w = ParamTensor("masknet/l1_w", {d, 2 * n});
  p.l1_b = ParamTensor("masknet/l1_b", {d});
  p.wz = ParamTensor("masknet/gru_wz", {d, d});
  p.uz = ParamTensor("masknet/gru_uz", {d, d});
  p.bz = ParamTensor("masknet/gru_bz", {d});
  p.wr = ParamTensor("masknet/gru_wr", {d, d});
  p.ur = ParamTensor("masknet/gru_ur", {d, d});
  p.br = ParamTensor("masknet/gru_br", {d});
  p.wh = ParamTensor("masknet/gru_wh", {d, d});
  p.uh = ParamTensor("masknet/gru_uh", {d, d});
  p.bh = ParamTensor("masknet/gru_bh", {d});
  p.l2_w = ParamTensor("masknet/l2_w", {2 * n, d});
  p.l2_b = ParamTensor("masknet/l2_b", {2 * n});

  std::mt19937_64 rng(seed);
  fill_uniform_fan_in(p.l1_w, 2 * n, rng);
  fill_uniform_fan_in(p.wz, d, rng);
  fill_uniform_fan_in(p.uz, d, rng);
  fill_uniform_fan_in(p.wr, d, rng);
  fill_uniform_fan_in(p.ur, d, rng);
  fill_uniform_fan_in(p.wh, d, rng);
  fill_uniform_fan_in(p.uh, d, rng);
  fill_uniform_fan_in(p.l2_w, d, rng);
  return p;
}

GruState make_gru_state(std::size_t d) { return GruState{make_zero_node(d)}; }

NodePtr gru_step(MaskNetParams& p, const NodePtr& x, const NodePtr& h, Tape* tape) {
  if (x->size() != p.d || h->size() != p.d)
    throw std::invalid_argument("gru_step: input/state length != hidden size");
  auto z = sigmoid(add(linear(p.wz, &p.bz, x, tape), linear(p.uz, nullptr, h, tape), tape), tape);
  auto r = sigmoid(add(linear(p.wr, &p.br, x, tape), linear(p.ur, nullptr, h, tape), tape), tape);
  auto rh = mul(r, h, tape);
  auto hc = tanh_act(add(linear(p.wh, &p.bh, x, tape), linear(p.uh, nullptr, rh, tape), tape), tape);
  // h' = (1 - z) . h + z . hc
  return add(mul(affine(z, -1.0, 1.0, tape), h, tape), mul(z, hc, tape), tape);
}

std::vector<MaskPair> masknet_forward(MaskNetParams& p, const std::vector<CNode>& coeffs,
                                      Tape* tape) {
  std::vector<MaskPair> out;
  out.reserve(coeffs.size());
  auto state = make_gru_state(p.d);
  for (const auto& c : coeffs) {
    if (c.size() != p.n)
      throw std::invalid_argument("masknet_forward: coefficient length != n");
    auto stacked = concat(c.re, c.im, tape);
    auto feat = linear(p.l1_w, &p.l1_b, stacked, tape);
    state.h = gru_step(p, feat, state.h, tape);
    auto logits = linear(p.l2_w, &p.l2_b, state.h, tape);
    auto masks = sigmoid(logits, tape);
    auto [mr, mi] = split_half(masks, tape);
    out.push_back(MaskPair{mr, mi});
  }
  return out;
}

CNode apply_masks(const CNode& coeffs, const MaskPair& masks, Tape* tape) {
  if (coeffs.size() != masks.mr->size() || coeffs.size() != masks.mi->size())
    throw std::invalid_argument("apply_masks: length mismatch");
  return CNode{mul(coeffs.re, masks.mr, tape), mul(coeffs.im, masks.mi, tape)};
}

}  // namespace bfly

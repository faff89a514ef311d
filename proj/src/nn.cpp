#include "coverpath/nn.hpp"

#include <cmath>

namespace coverpath {

namespace {

Tensor init_normal(std::vector<int> shape, Rng& rng, double std) {
  Tensor t = Tensor::zeros(std::move(shape));
  double* d = t.data();
  for (int i = 0; i < t.size(); ++i) d[i] = rng.normal(0.0, std);
  return t;
}

}  // namespace

LinearLayer::LinearLayer(int in, int out, Rng& rng, double init_std)
    : w(init_normal({in, out}, rng, init_std)), b(Tensor::zeros({out})) {}

Tensor LinearLayer::forward(const Tensor& x) const {
  return add_row_bias(matmul(x, w), b);
}

void LinearLayer::collect(std::vector<Tensor>& params) {
  params.push_back(w);
  params.push_back(b);
}

ConvLayer::ConvLayer(int cin, int cout, int kernel, Rng& rng, double init_std)
    : w(init_normal({cout, cin, kernel, kernel}, rng, init_std)),
      b(Tensor::zeros({cout})),
      pad(kernel / 2) {}

Tensor ConvLayer::forward(const Tensor& x) const { return conv2d(x, w, b, pad); }

void ConvLayer::collect(std::vector<Tensor>& params) {
  params.push_back(w);
  params.push_back(b);
}

MhsaLayer::MhsaLayer(int channels, int tokens_, int heads_, Rng& rng, double init_std)
    : pos(init_normal({tokens_, channels}, rng, init_std)),
      wq(init_normal({channels, channels}, rng, init_std)),
      wk(init_normal({channels, channels}, rng, init_std)),
      wv(init_normal({channels, channels}, rng, init_std)),
      wo(init_normal({channels, channels}, rng, init_std)),
      bq(Tensor::zeros({channels})),
      bk(Tensor::zeros({channels})),
      bv(Tensor::zeros({channels})),
      bo(Tensor::zeros({channels})),
      heads(heads_),
      tokens(tokens_) {}

Tensor MhsaLayer::forward(const Tensor& x) const {
  int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  int P = H * W;
  int dh = C / heads;
  // B x C x H x W -> (B*P) x C token matrix, positional embedding added once.
  Tensor tok = reshape(transpose_12(reshape(x, {B, C, P})), {B * P, C});
  tok = add_tiled_rows(tok, pos);

  Tensor q = split_heads(reshape(add_row_bias(matmul(tok, wq), bq), {B, P, C}), heads);
  Tensor k = split_heads(reshape(add_row_bias(matmul(tok, wk), bk), {B, P, C}), heads);
  Tensor v = split_heads(reshape(add_row_bias(matmul(tok, wv), bv), {B, P, C}), heads);

  Tensor scores = scale(bmm(q, k, /*trans_b=*/true), 1.0 / std::sqrt(static_cast<double>(dh)));
  Tensor attn = reshape(softmax_rows(reshape(scores, {B * heads * P, P})),
                        {B * heads, P, P});
  Tensor ctx = reshape(merge_heads(bmm(attn, v), heads), {B * P, C});
  Tensor out = add(tok, add_row_bias(matmul(ctx, wo), bo));  // residual
  return reshape(transpose_12(reshape(out, {B, P, C})), {B, C, H, W});
}

void MhsaLayer::collect(std::vector<Tensor>& params) {
  params.push_back(pos);
  params.push_back(wq);
  params.push_back(bq);
  params.push_back(wk);
  params.push_back(bk);
  params.push_back(wv);
  params.push_back(bv);
  params.push_back(wo);
  params.push_back(bo);
}

LstmLayer::LstmLayer(int in, int hidden_, Rng& rng, double init_std)
    : wx(init_normal({in, 4 * hidden_}, rng, init_std)),
      wh(init_normal({hidden_, 4 * hidden_}, rng, init_std)),
      b(Tensor::zeros({4 * hidden_})),
      hidden(hidden_) {}

LstmState LstmLayer::forward(const Tensor& x, const LstmState& prev) const {
  Tensor gates = add_row_bias(add(matmul(x, wx), matmul(prev.h, wh)), b);
  Tensor i = sigmoid(slice_cols(gates, 0, hidden));
  Tensor f = sigmoid(slice_cols(gates, hidden, hidden));
  Tensor g = tanh_op(slice_cols(gates, 2 * hidden, hidden));
  Tensor o = sigmoid(slice_cols(gates, 3 * hidden, hidden));
  Tensor c = add(mul(f, prev.c), mul(i, g));
  Tensor h = mul(o, tanh_op(c));
  return {h, c};
}

LstmState LstmLayer::zero_state(int batch) const {
  return {Tensor::zeros({batch, hidden}), Tensor::zeros({batch, hidden})};
}

void LstmLayer::collect(std::vector<Tensor>& params) {
  params.push_back(wx);
  params.push_back(wh);
  params.push_back(b);
}

TrunkNet::TrunkNet(const TrunkConfig& cfg_, Rng& rng)
    : cfg(cfg_),
      conv1(cfg_.in_channels, cfg_.channels, cfg_.kernel, rng, cfg_.init_std),
      conv2(cfg_.channels, cfg_.channels, cfg_.kernel, rng, cfg_.init_std),
      mhsa(cfg_.channels, cfg_.grid * cfg_.grid, cfg_.heads, rng, cfg_.init_std),
      lstm(cfg_.flat_dim(), cfg_.lstm_hidden, rng, cfg_.init_std),
      head(cfg_.lstm_hidden, cfg_.out_dim, rng, cfg_.init_std) {}

Tensor TrunkNet::forward(const Tensor& x, LstmState& state) const {
  int B = x.dim(0);
  Tensor f = relu(conv1.forward(x));
  f = mhsa.forward(f);
  f = relu(conv2.forward(f));
  f = maxpool2x2(f);
  Tensor flat = reshape(f, {B, cfg.flat_dim()});
  state = lstm.forward(flat, state);
  return head.forward(state.h);
}

std::vector<Tensor> TrunkNet::parameters() {
  std::vector<Tensor> params;
  conv1.collect(params);
  mhsa.collect(params);
  conv2.collect(params);
  lstm.collect(params);
  head.collect(params);
  return params;
}

void TrunkNet::set_requires_grad() {
  for (auto& p : parameters()) p.set_requires_grad();
}

void TrunkNet::zero_grad() {
  for (auto& p : parameters()) p.zero_grad();
}

void TrunkNet::blend_from(TrunkNet& other, double tau) {
  auto mine = parameters();
  auto theirs = other.parameters();
  for (size_t i = 0; i < mine.size(); ++i) {
    double* d = mine[i].data();
    const double* s = theirs[i].data();
    for (int j = 0; j < mine[i].size(); ++j) d[j] = tau * s[j] + (1.0 - tau) * d[j];
  }
}

void TrunkNet::copy_from(TrunkNet& other) { blend_from(other, 1.0); }

}  // namespace coverpath

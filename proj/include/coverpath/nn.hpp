#pragma once

#include <vector>

#include "coverpath/rng.hpp"
#include "coverpath/tensor.hpp"

namespace coverpath {

// Network used by both the policy and the critics: a convolutional encoder
// over the grid state, multi-head self-attention across cells, a second
// convolution, 2x2 max pooling, and an LSTM whose hidden state carries the
// coverage trajectory. A linear head maps the LSTM output to one value per
// action (logits for the policy, Q-values for a critic).

class LinearLayer {
 public:
  LinearLayer() = default;
  LinearLayer(int in, int out, Rng& rng, double init_std);
  Tensor forward(const Tensor& x) const;  // (B x in) -> (B x out)
  void collect(std::vector<Tensor>& params);

  Tensor w;  // in x out
  Tensor b;  // out
};

class ConvLayer {
 public:
  ConvLayer() = default;
  ConvLayer(int cin, int cout, int kernel, Rng& rng, double init_std);
  Tensor forward(const Tensor& x) const;  // same-size output
  void collect(std::vector<Tensor>& params);

  Tensor w;  // cout x cin x k x k
  Tensor b;  // cout
  int pad = 0;
};

// Self-attention over the N*N cell tokens of a feature map, with a learned
// positional embedding and a residual connection back onto the tokens.
class MhsaLayer {
 public:
  MhsaLayer() = default;
  MhsaLayer(int channels, int tokens, int heads, Rng& rng, double init_std);
  Tensor forward(const Tensor& x) const;  // (B x C x H x W) -> same shape
  void collect(std::vector<Tensor>& params);

  Tensor pos;                 // tokens x C
  Tensor wq, wk, wv, wo;      // C x C
  Tensor bq, bk, bv, bo;      // C
  int heads = 1;
  int tokens = 0;
};

struct LstmState {
  Tensor h, c;  // each B x hidden
};

class LstmLayer {
 public:
  LstmLayer() = default;
  LstmLayer(int in, int hidden, Rng& rng, double init_std);
  // One time step. Gate layout along the 4H axis: input, forget, cell, output.
  LstmState forward(const Tensor& x, const LstmState& prev) const;
  LstmState zero_state(int batch) const;
  void collect(std::vector<Tensor>& params);

  Tensor wx;  // in x 4H
  Tensor wh;  // H x 4H
  Tensor b;   // 4H
  int hidden = 0;
};

struct TrunkConfig {
  int grid = 15;
  int in_channels = 4;
  int channels = 16;
  int kernel = 5;
  int heads = 4;
  int lstm_hidden = 128;
  int out_dim = 4;
  double init_std = 0.01;

  int pooled_side() const { return (grid + 1) / 2; }
  int flat_dim() const { return channels * pooled_side() * pooled_side(); }
};

class TrunkNet {
 public:
  TrunkNet() = default;
  TrunkNet(const TrunkConfig& cfg, Rng& rng);

  // One recurrent step over a batch of grid states.
  // x: B x in_channels x N x N. Returns B x out_dim plus the new LSTM state.
  Tensor forward(const Tensor& x, LstmState& state) const;
  LstmState zero_state(int batch) const { return lstm.zero_state(batch); }

  // Stable parameter order; used by the optimizer and the checkpoint format.
  std::vector<Tensor> parameters();
  void set_requires_grad();
  void zero_grad();

  // this <- tau * other + (1 - tau) * this, parameter-wise (soft update).
  void blend_from(TrunkNet& other, double tau);
  // Hard copy of all parameter values.
  void copy_from(TrunkNet& other);

  TrunkConfig cfg;
  ConvLayer conv1, conv2;
  MhsaLayer mhsa;
  LstmLayer lstm;
  LinearLayer head;
};

}  // namespace coverpath

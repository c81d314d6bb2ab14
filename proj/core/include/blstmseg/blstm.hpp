#pragma once

#include <span>
#include <string>
#include <vector>

#include "blstmseg/errors.hpp"
#include "blstmseg/linalg.hpp"
#include "blstmseg/lstm.hpp"

namespace blstmseg {

// A forward-in-time and a backward-in-time LSTM over the same input. The
// output at position t is [h_fwd(t), h_bwd(t)].
struct BlstmLayer {
  LstmParams forward;
  LstmParams backward;

  static BlstmLayer zeros(std::size_t input_dim, std::size_t hidden_dim, bool use_peepholes);

  friend bool operator==(const BlstmLayer&, const BlstmLayer&) = default;
};

// Stacked BLSTM layers of width d. Layer l < depth-1 is followed by a d x 2d
// compression back to d; the top layer's 2d output is returned as is, so there
// are depth-1 compression matrices.
struct StackedBlstm {
  std::vector<BlstmLayer> layers;
  std::vector<Matrix> compressions;

  static StackedBlstm zeros(std::size_t dim, std::size_t depth, bool use_peepholes);

  std::size_t depth() const { return layers.size(); }
  std::size_t dim() const { return layers.empty() ? 0 : layers.front().forward.input_dim(); }
  bool use_peepholes() const { return !layers.empty() && layers.front().forward.use_peepholes; }
  void validate() const;

  friend bool operator==(const StackedBlstm&, const StackedBlstm&) = default;
};

// Canonical block order: for each layer, forward LSTM blocks, backward LSTM
// blocks, then the compression (absent on the top layer).
template <typename Stack, typename Fn>
  requires std::same_as<std::remove_const_t<Stack>, StackedBlstm>
void for_each_block(Stack& net, Fn&& fn) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for_each_block(net.layers[l].forward,
                   [&](std::string_view name, auto span) { fn(std::string_view(prefix + "fwd." + std::string(name)), span); });
    for_each_block(net.layers[l].backward,
                   [&](std::string_view name, auto span) { fn(std::string_view(prefix + "bwd." + std::string(name)), span); });
    if (l < net.compressions.size()) fn(std::string_view(prefix + "compress"), net.compressions[l].span());
  }
}

// Inverted-dropout masks for one sequence: layers[l][t] holds entries that are
// 0 or 1/keep_prob, length d below the top and 2d at the top.
struct DropoutMask {
  double keep_prob = 1.0;
  std::vector<std::vector<Vector>> layers;
};

DropoutMask make_dropout_mask(Rng& rng, const StackedBlstm& net, std::size_t length, double keep_prob);

struct BlstmTape {
  LstmTape forward;
  LstmTape backward;  // step k corresponds to position length-1-k
};

struct BlstmForwardResult {
  std::vector<Vector> outputs;
  BlstmTape tape;
};

BlstmForwardResult blstm_forward(const BlstmLayer& layer, std::span<const Vector> xs);

// Accumulates layer gradients into `grads` and input gradients into `grad_xs`.
void blstm_backward_accumulate(const BlstmLayer& layer, const BlstmTape& tape, std::span<const Vector> grad_out,
                               BlstmLayer& grads, std::span<Vector> grad_xs);

Vector compress(const Matrix& w, const Vector& v);

struct StackTape {
  std::size_t length = 0;
  std::vector<BlstmTape> layers;
  std::vector<std::vector<Vector>> concat_outputs;  // per layer, the 2d BLSTM outputs
  const DropoutMask* mask = nullptr;                // not owned; must outlive the tape
};

struct StackForwardResult {
  std::vector<Vector> outputs;  // 2d per position
  StackTape tape;
};

// mask == nullptr means inference (no dropout).
StackForwardResult stack_forward(const StackedBlstm& net, std::span<const Vector> xs, const DropoutMask* mask = nullptr);

struct StackGrads {
  StackedBlstm grads;
  std::vector<Vector> grad_xs;
};

StackGrads stack_backward(const StackedBlstm& net, const StackTape& tape, std::span<const Vector> grad_out);

void stack_backward_accumulate(const StackedBlstm& net, const StackTape& tape, std::span<const Vector> grad_out,
                               StackedBlstm& grads, std::span<Vector> grad_xs);

}  // namespace blstmseg

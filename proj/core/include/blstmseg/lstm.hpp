#pragma once

#include <concepts>
#include <span>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "blstmseg/linalg.hpp"

namespace blstmseg {

// One gate's parameters: input weights (hidden x input), recurrent weights
// (hidden x hidden) and bias.
struct LstmGate {
  Matrix w;
  Matrix r;
  Vector b;

  friend bool operator==(const LstmGate&, const LstmGate&) = default;
};

// Parameters of a unidirectional LSTM layer with optional peepholes.
//
//   z = tanh(Wz x + Rz y' + bz)
//   i = sigm(Wi x + Ri y' + pi * c' + bi)
//   f = sigm(Wf x + Rf y' + pf * c' + bf)
//   c = i * z + f * c'
//   o = sigm(Wo x + Ro y' + po * c + bo)
//   y = o * tanh(c)
//
// When use_peepholes is false the p vectors stay zero and are never visited,
// updated or serialized.
struct LstmParams {
  LstmGate z, i, f, o;
  Vector p_i, p_f, p_o;
  bool use_peepholes = false;

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim, bool use_peepholes);

  std::size_t input_dim() const { return z.w.cols(); }
  std::size_t hidden_dim() const { return z.w.rows(); }

  // Throws ShapeError if the blocks do not agree with each other.
  void validate() const;

  friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

// Visits every trainable block as (name, span) in the canonical order
// z{W,R,b}, i{W,R,b,p}, f{W,R,b,p}, o{W,R,b,p}; peepholes only when enabled.
// This order is shared by initialization, optimization and serialization.
template <typename Params, typename Fn>
  requires std::same_as<std::remove_const_t<Params>, LstmParams>
void for_each_block(Params& p, Fn&& fn) {
  fn(std::string_view("z.W"), p.z.w.span());
  fn(std::string_view("z.R"), p.z.r.span());
  fn(std::string_view("z.b"), p.z.b.span());
  fn(std::string_view("i.W"), p.i.w.span());
  fn(std::string_view("i.R"), p.i.r.span());
  fn(std::string_view("i.b"), p.i.b.span());
  if (p.use_peepholes) fn(std::string_view("i.p"), p.p_i.span());
  fn(std::string_view("f.W"), p.f.w.span());
  fn(std::string_view("f.R"), p.f.r.span());
  fn(std::string_view("f.b"), p.f.b.span());
  if (p.use_peepholes) fn(std::string_view("f.p"), p.p_f.span());
  fn(std::string_view("o.W"), p.o.w.span());
  fn(std::string_view("o.R"), p.o.r.span());
  fn(std::string_view("o.b"), p.o.b.span());
  if (p.use_peepholes) fn(std::string_view("o.p"), p.p_o.span());
}

struct LstmState {
  Vector c;
  Vector y;

  static LstmState zeros(std::size_t hidden_dim) { return {Vector(hidden_dim), Vector(hidden_dim)}; }
};

// Everything the backward pass needs about one timestep.
struct LstmStepRecord {
  Vector x;
  Vector c_prev, y_prev;
  Vector a_z, a_i, a_f, a_o;  // pre-activations
  Vector z, i, f, o;
  Vector c, tanh_c, y;
};

struct LstmTape {
  std::vector<LstmStepRecord> steps;
  std::size_t size() const { return steps.size(); }
};

std::pair<LstmState, LstmStepRecord> lstm_step(const LstmParams& params, const Vector& x, const LstmState& prev);

struct LstmForwardResult {
  std::vector<Vector> outputs;
  LstmTape tape;
};

// Runs left to right from `init` (zero state when omitted).
LstmForwardResult lstm_forward(const LstmParams& params, std::span<const Vector> xs);
LstmForwardResult lstm_forward(const LstmParams& params, std::span<const Vector> xs, const LstmState& init);

struct LstmBackwardResult {
  LstmParams grads;
  std::vector<Vector> grad_xs;
};

// Full BPTT over the tape. grad_ys[t] is dLoss/dy^t from outside the layer.
LstmBackwardResult lstm_backward(const LstmParams& params, const LstmTape& tape, std::span<const Vector> grad_ys);

// Same, accumulating parameter gradients into `grads` and input gradients into
// `grad_xs` (which must already hold tape.size() vectors of input_dim).
void lstm_backward_accumulate(const LstmParams& params, const LstmTape& tape, std::span<const Vector> grad_ys,
                              LstmParams& grads, std::span<Vector> grad_xs);

}  // namespace blstmseg

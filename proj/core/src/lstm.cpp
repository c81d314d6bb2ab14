#include "blstmseg/lstm.hpp"

#include <cmath>
#include <string>

namespace blstmseg {

namespace {

LstmGate zero_gate(std::size_t input_dim, std::size_t hidden_dim) {
  return {Matrix(hidden_dim, input_dim), Matrix(hidden_dim, hidden_dim), Vector(hidden_dim)};
}

// a = W x + R y' + b
Vector gate_preactivation(const LstmGate& g, const Vector& x, const Vector& y_prev) {
  Vector a = g.b;
  accumulate_matvec(a, g.w, x.span());
  accumulate_matvec(a, g.r, y_prev.span());
  return a;
}

void accumulate_gate_grads(LstmGate& grad, const LstmGate& gate, const Vector& da, const LstmStepRecord& rec,
                           Vector& dx, Vector& dy_prev) {
  accumulate_outer(grad.w, da.span(), rec.x.span());
  accumulate_outer(grad.r, da.span(), rec.y_prev.span());
  axpy(grad.b.span(), 1.0, da.span());
  accumulate_matvec_transposed(dx, gate.w, da.span());
  accumulate_matvec_transposed(dy_prev, gate.r, da.span());
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim, bool use_peepholes) {
  LstmParams p;
  p.z = zero_gate(input_dim, hidden_dim);
  p.i = zero_gate(input_dim, hidden_dim);
  p.f = zero_gate(input_dim, hidden_dim);
  p.o = zero_gate(input_dim, hidden_dim);
  p.p_i = Vector(hidden_dim);
  p.p_f = Vector(hidden_dim);
  p.p_o = Vector(hidden_dim);
  p.use_peepholes = use_peepholes;
  return p;
}

void LstmParams::validate() const {
  const std::size_t h = hidden_dim();
  const std::size_t d = input_dim();
  for (const LstmGate* g : {&z, &i, &f, &o}) {
    if (g->w.rows() != h || g->w.cols() != d || g->r.rows() != h || g->r.cols() != h || g->b.size() != h) {
      throw ShapeError("LstmParams: inconsistent gate shapes W" + shape_string(g->w) + " R" + shape_string(g->r) +
                       " b" + shape_string(g->b));
    }
  }
  if (p_i.size() != h || p_f.size() != h || p_o.size() != h) {
    throw ShapeError("LstmParams: peephole vectors must have length " + std::to_string(h));
  }
}

std::pair<LstmState, LstmStepRecord> lstm_step(const LstmParams& params, const Vector& x, const LstmState& prev) {
  const std::size_t h = params.hidden_dim();
  if (x.size() != params.input_dim()) {
    throw ShapeError("lstm_step: input " + shape_string(x) + " does not match W" + shape_string(params.z.w));
  }
  if (prev.c.size() != h || prev.y.size() != h) {
    throw ShapeError("lstm_step: state " + shape_string(prev.c) + "/" + shape_string(prev.y) +
                     " does not match hidden size " + std::to_string(h));
  }

  LstmStepRecord rec;
  rec.x = x;
  rec.c_prev = prev.c;
  rec.y_prev = prev.y;

  rec.a_z = gate_preactivation(params.z, x, prev.y);
  rec.a_i = gate_preactivation(params.i, x, prev.y);
  rec.a_f = gate_preactivation(params.f, x, prev.y);
  rec.a_o = gate_preactivation(params.o, x, prev.y);
  if (params.use_peepholes) {
    for (std::size_t k = 0; k < h; ++k) {
      rec.a_i[k] += params.p_i[k] * prev.c[k];
      rec.a_f[k] += params.p_f[k] * prev.c[k];
    }
  }

  rec.z = tanh(rec.a_z);
  rec.i = sigmoid(rec.a_i);
  rec.f = sigmoid(rec.a_f);
  rec.c = Vector(h);
  for (std::size_t k = 0; k < h; ++k) rec.c[k] = rec.i[k] * rec.z[k] + rec.f[k] * prev.c[k];

  // The output gate peeks at the new cell state.
  if (params.use_peepholes) {
    for (std::size_t k = 0; k < h; ++k) rec.a_o[k] += params.p_o[k] * rec.c[k];
  }
  rec.o = sigmoid(rec.a_o);
  rec.tanh_c = tanh(rec.c);
  rec.y = hadamard(rec.o, rec.tanh_c);

  LstmState next{rec.c, rec.y};
  return {std::move(next), std::move(rec)};
}

LstmForwardResult lstm_forward(const LstmParams& params, std::span<const Vector> xs) {
  return lstm_forward(params, xs, LstmState::zeros(params.hidden_dim()));
}

LstmForwardResult lstm_forward(const LstmParams& params, std::span<const Vector> xs, const LstmState& init) {
  LstmForwardResult result;
  result.outputs.reserve(xs.size());
  result.tape.steps.reserve(xs.size());
  LstmState state = init;
  for (const Vector& x : xs) {
    auto [next, rec] = lstm_step(params, x, state);
    result.outputs.push_back(next.y);
    result.tape.steps.push_back(std::move(rec));
    state = std::move(next);
  }
  return result;
}

LstmBackwardResult lstm_backward(const LstmParams& params, const LstmTape& tape, std::span<const Vector> grad_ys) {
  LstmBackwardResult result;
  result.grads = LstmParams::zeros(params.input_dim(), params.hidden_dim(), params.use_peepholes);
  result.grad_xs.assign(tape.size(), Vector(params.input_dim()));
  lstm_backward_accumulate(params, tape, grad_ys, result.grads, result.grad_xs);
  return result;
}

void lstm_backward_accumulate(const LstmParams& params, const LstmTape& tape, std::span<const Vector> grad_ys,
                              LstmParams& grads, std::span<Vector> grad_xs) {
  const std::size_t steps = tape.size();
  const std::size_t h = params.hidden_dim();
  if (grad_ys.size() != steps) {
    throw std::invalid_argument("lstm_backward: " + std::to_string(grad_ys.size()) + " output gradients for a tape of " +
                                std::to_string(steps) + " steps");
  }
  if (grad_xs.size() != steps) {
    throw std::invalid_argument("lstm_backward: grad_xs holds " + std::to_string(grad_xs.size()) +
                                " entries, expected " + std::to_string(steps));
  }

  Vector dy_next(h);  // dLoss/dy^t arriving through the recurrence
  Vector dc_next(h);  // dLoss/dc^t arriving through the cell path
  Vector da_z(h), da_i(h), da_f(h), da_o(h);

  for (std::size_t step = steps; step-- > 0;) {
    const LstmStepRecord& rec = tape.steps[step];
    const Vector& gy = grad_ys[step];
    if (gy.size() != h) throw ShapeError("lstm_backward: output gradient " + shape_string(gy));

    Vector dc = dc_next;
    for (std::size_t k = 0; k < h; ++k) {
      const double dy = gy[k] + dy_next[k];
      const double o = rec.o[k];
      const double tc = rec.tanh_c[k];
      da_o[k] = dy * tc * o * (1.0 - o);
      dc[k] += dy * o * (1.0 - tc * tc);
      if (params.use_peepholes) dc[k] += da_o[k] * params.p_o[k];

      const double z = rec.z[k];
      const double i = rec.i[k];
      const double f = rec.f[k];
      da_z[k] = dc[k] * i * (1.0 - z * z);
      da_i[k] = dc[k] * z * i * (1.0 - i);
      da_f[k] = dc[k] * rec.c_prev[k] * f * (1.0 - f);
    }

    Vector dy_prev(h);
    Vector& dx = grad_xs[step];
    accumulate_gate_grads(grads.z, params.z, da_z, rec, dx, dy_prev);
    accumulate_gate_grads(grads.i, params.i, da_i, rec, dx, dy_prev);
    accumulate_gate_grads(grads.f, params.f, da_f, rec, dx, dy_prev);
    accumulate_gate_grads(grads.o, params.o, da_o, rec, dx, dy_prev);

    for (std::size_t k = 0; k < h; ++k) {
      dc_next[k] = dc[k] * rec.f[k];
    }
    if (params.use_peepholes) {
      for (std::size_t k = 0; k < h; ++k) {
        dc_next[k] += da_i[k] * params.p_i[k] + da_f[k] * params.p_f[k];
        grads.p_i[k] += da_i[k] * rec.c_prev[k];
        grads.p_f[k] += da_f[k] * rec.c_prev[k];
        grads.p_o[k] += da_o[k] * rec.c[k];
      }
    }
    dy_next = std::move(dy_prev);
  }
}

}  // namespace blstmseg

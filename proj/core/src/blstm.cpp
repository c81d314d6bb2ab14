#include "blstmseg/blstm.hpp"

#include <algorithm>

namespace blstmseg {

BlstmLayer BlstmLayer::zeros(std::size_t input_dim, std::size_t hidden_dim, bool use_peepholes) {
  return {LstmParams::zeros(input_dim, hidden_dim, use_peepholes),
          LstmParams::zeros(input_dim, hidden_dim, use_peepholes)};
}

StackedBlstm StackedBlstm::zeros(std::size_t dim, std::size_t depth, bool use_peepholes) {
  if (dim == 0 || depth == 0) throw ConfigError("StackedBlstm: dim and depth must be positive");
  StackedBlstm net;
  for (std::size_t l = 0; l < depth; ++l) {
    net.layers.push_back(BlstmLayer::zeros(dim, dim, use_peepholes));
    if (l + 1 < depth) net.compressions.emplace_back(dim, 2 * dim);
  }
  return net;
}

void StackedBlstm::validate() const {
  if (layers.empty()) throw ShapeError("StackedBlstm: no layers");
  if (compressions.size() + 1 != layers.size()) {
    throw ShapeError("StackedBlstm: " + std::to_string(layers.size()) + " layers need " +
                     std::to_string(layers.size() - 1) + " compressions, found " + std::to_string(compressions.size()));
  }
  const std::size_t d = dim();
  for (const auto& layer : layers) {
    layer.forward.validate();
    layer.backward.validate();
    for (const LstmParams* p : {&layer.forward, &layer.backward}) {
      if (p->input_dim() != d || p->hidden_dim() != d) {
        throw ShapeError("StackedBlstm: every LSTM must be " + std::to_string(d) + "x" + std::to_string(d) +
                         ", found W" + shape_string(p->z.w));
      }
    }
  }
  for (const auto& c : compressions) {
    if (c.rows() != d || c.cols() != 2 * d) throw ShapeError("StackedBlstm: compression " + shape_string(c));
  }
}

DropoutMask make_dropout_mask(Rng& rng, const StackedBlstm& net, std::size_t length, double keep_prob) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw ConfigError("dropout keep_prob must lie in (0, 1], got " + std::to_string(keep_prob));
  }
  DropoutMask mask;
  mask.keep_prob = keep_prob;
  const std::size_t d = net.dim();
  const double scale = 1.0 / keep_prob;
  mask.layers.resize(net.depth());
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const std::size_t width = (l + 1 < net.depth()) ? d : 2 * d;
    auto& per_pos = mask.layers[l];
    per_pos.reserve(length);
    for (std::size_t t = 0; t < length; ++t) {
      Vector m(width);
      for (auto& v : m) v = rng.bernoulli(keep_prob) ? scale : 0.0;
      per_pos.push_back(std::move(m));
    }
  }
  return mask;
}

BlstmForwardResult blstm_forward(const BlstmLayer& layer, std::span<const Vector> xs) {
  const std::size_t n = xs.size();
  std::vector<Vector> reversed(xs.rbegin(), xs.rend());
  auto fwd = lstm_forward(layer.forward, xs);
  auto bwd = lstm_forward(layer.backward, reversed);

  BlstmForwardResult result;
  result.outputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) result.outputs.push_back(concat(fwd.outputs[t], bwd.outputs[n - 1 - t]));
  result.tape.forward = std::move(fwd.tape);
  result.tape.backward = std::move(bwd.tape);
  return result;
}

void blstm_backward_accumulate(const BlstmLayer& layer, const BlstmTape& tape, std::span<const Vector> grad_out,
                               BlstmLayer& grads, std::span<Vector> grad_xs) {
  const std::size_t n = tape.forward.size();
  const std::size_t h = layer.forward.hidden_dim();
  if (grad_out.size() != n || tape.backward.size() != n || grad_xs.size() != n) {
    throw std::invalid_argument("blstm_backward: tape/gradient length mismatch");
  }
  std::vector<Vector> g_fwd(n, Vector(h));
  std::vector<Vector> g_bwd(n, Vector(h));
  for (std::size_t t = 0; t < n; ++t) {
    if (grad_out[t].size() != 2 * h) throw ShapeError("blstm_backward: gradient " + shape_string(grad_out[t]));
    std::copy_n(grad_out[t].begin(), h, g_fwd[t].begin());
    std::copy_n(grad_out[t].begin() + static_cast<std::ptrdiff_t>(h), h, g_bwd[n - 1 - t].begin());
  }

  lstm_backward_accumulate(layer.forward, tape.forward, g_fwd, grads.forward, grad_xs);

  std::vector<Vector> gx_rev(n, Vector(layer.backward.input_dim()));
  lstm_backward_accumulate(layer.backward, tape.backward, g_bwd, grads.backward, gx_rev);
  for (std::size_t t = 0; t < n; ++t) axpy(grad_xs[t].span(), 1.0, gx_rev[n - 1 - t].span());
}

Vector compress(const Matrix& w, const Vector& v) {
  if (w.cols() != v.size() || w.cols() != 2 * w.rows()) {
    throw ShapeError("compress: matrix " + shape_string(w) + " with vector " + shape_string(v));
  }
  return matvec(w, v);
}

StackForwardResult stack_forward(const StackedBlstm& net, std::span<const Vector> xs, const DropoutMask* mask) {
  const std::size_t n = xs.size();
  const std::size_t depth = net.depth();
  if (mask) {
    if (!(mask->keep_prob > 0.0 && mask->keep_prob <= 1.0)) {
      throw ConfigError("dropout keep_prob must lie in (0, 1], got " + std::to_string(mask->keep_prob));
    }
    if (mask->layers.size() != depth) throw ShapeError("stack_forward: dropout mask depth mismatch");
    for (const auto& per_pos : mask->layers) {
      if (per_pos.size() != n) throw ShapeError("stack_forward: dropout mask length mismatch");
    }
  }
  for (const auto& x : xs) {
    if (x.size() != net.dim()) throw ShapeError("stack_forward: input " + shape_string(x));
  }

  StackForwardResult result;
  result.tape.length = n;
  result.tape.mask = mask;
  result.tape.layers.reserve(depth);

  std::vector<Vector> current(xs.begin(), xs.end());
  for (std::size_t l = 0; l < depth; ++l) {
    auto fwd = blstm_forward(net.layers[l], current);
    const bool top = (l + 1 == depth);
    std::vector<Vector> next;
    next.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      Vector v = top ? fwd.outputs[t] : compress(net.compressions[l], fwd.outputs[t]);
      if (mask) v = hadamard(v, mask->layers[l][t]);
      next.push_back(std::move(v));
    }
    result.tape.layers.push_back(std::move(fwd.tape));
    result.tape.concat_outputs.push_back(std::move(fwd.outputs));
    current = std::move(next);
  }
  result.outputs = std::move(current);
  return result;
}

StackGrads stack_backward(const StackedBlstm& net, const StackTape& tape, std::span<const Vector> grad_out) {
  StackGrads result;
  result.grads = StackedBlstm::zeros(net.dim(), net.depth(), net.use_peepholes());
  result.grad_xs.assign(tape.length, Vector(net.dim()));
  stack_backward_accumulate(net, tape, grad_out, result.grads, result.grad_xs);
  return result;
}

void stack_backward_accumulate(const StackedBlstm& net, const StackTape& tape, std::span<const Vector> grad_out,
                               StackedBlstm& grads, std::span<Vector> grad_xs) {
  const std::size_t n = tape.length;
  const std::size_t depth = net.depth();
  const std::size_t d = net.dim();
  if (tape.layers.size() != depth || tape.concat_outputs.size() != depth) {
    throw std::invalid_argument("stack_backward: tape covers " + std::to_string(tape.layers.size()) +
                                " layers, network has " + std::to_string(depth));
  }
  if (grad_out.size() != n || grad_xs.size() != n) {
    throw std::invalid_argument("stack_backward: gradient length mismatch");
  }

  std::vector<Vector> g(grad_out.begin(), grad_out.end());
  for (std::size_t l = depth; l-- > 0;) {
    const bool top = (l + 1 == depth);
    std::vector<Vector> g_concat;
    g_concat.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      Vector gt = tape.mask ? hadamard(g[t], tape.mask->layers[l][t]) : std::move(g[t]);
      if (top) {
        g_concat.push_back(std::move(gt));
      } else {
        accumulate_outer(grads.compressions[l], gt.span(), tape.concat_outputs[l][t].span());
        g_concat.push_back(matvec_transposed(net.compressions[l], gt));
      }
    }
    if (l == 0) {
      blstm_backward_accumulate(net.layers[l], tape.layers[l], g_concat, grads.layers[l], grad_xs);
    } else {
      std::vector<Vector> g_in(n, Vector(d));
      blstm_backward_accumulate(net.layers[l], tape.layers[l], g_concat, grads.layers[l], g_in);
      g = std::move(g_in);
    }
  }
}

}  // namespace blstmseg

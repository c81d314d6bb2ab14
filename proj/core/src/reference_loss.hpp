#pragma once

// Straight-line loss evaluation used as the finite-difference side of
// grad_check. It shares no code with the production forward pass: parameters
// are read from a flat copy of the model's blocks (canonical order) and all
// arithmetic is done in Real.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "blstmseg/training.hpp"

#ifdef BLSTMSEG_HAVE_QUADMATH
#include <quadmath.h>
#endif

namespace blstmseg::detail {

namespace fd {
template <typename Real>
Real tanh(Real x) { return std::tanh(x); }
template <typename Real>
Real exp(Real x) { return std::exp(x); }
template <typename Real>
Real log(Real x) { return std::log(x); }
#ifdef BLSTMSEG_HAVE_QUADMATH
template <>
inline __float128 tanh(__float128 x) { return tanhq(x); }
template <>
inline __float128 exp(__float128 x) { return expq(x); }
template <>
inline __float128 log(__float128 x) { return logq(x); }
#endif
}  // namespace fd

template <typename Real>
class ReferenceLoss {
 public:
  explicit ReferenceLoss(const StackedModel& model)
      : dim_(model.dim()),
        depth_(model.net.depth()),
        vocab_(model.vocab.size()),
        hidden_(model.head.hidden_dim()),
        peepholes_(model.net.use_peepholes()) {
    for_each_block(model, [&](std::string_view, std::span<const double> block) {
      blocks_.emplace_back(block.begin(), block.end());
    });
  }

  std::vector<std::vector<Real>>& blocks() { return blocks_; }

  Real operator()(const Example& ex) const {
    const std::size_t n = ex.ids.size();
    std::vector<std::vector<Real>> xs(n, std::vector<Real>(dim_));
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t r = 0; r < dim_; ++r) xs[t][r] = blocks_[0][r * vocab_ + static_cast<std::size_t>(ex.ids[t])];
    }

    std::size_t b = 1;
    const std::size_t lstm_blocks = peepholes_ ? 15 : 12;
    for (std::size_t l = 0; l < depth_; ++l) {
      const auto fwd = run_lstm(b, xs);
      b += lstm_blocks;
      const std::vector<std::vector<Real>> rev(xs.rbegin(), xs.rend());
      const auto bwd_rev = run_lstm(b, rev);
      b += lstm_blocks;
      std::vector<std::vector<Real>> cat(n, std::vector<Real>(2 * dim_));
      for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t k = 0; k < dim_; ++k) {
          cat[t][k] = fwd[t][k];
          cat[t][dim_ + k] = bwd_rev[n - 1 - t][k];
        }
      }
      if (l + 1 < depth_) {
        const auto& w = blocks_[b++];
        for (std::size_t t = 0; t < n; ++t) {
          for (std::size_t r = 0; r < dim_; ++r) {
            Real s = 0;
            for (std::size_t c = 0; c < 2 * dim_; ++c) s += w[r * 2 * dim_ + c] * cat[t][c];
            xs[t][r] = s;
          }
        }
      } else {
        xs = std::move(cat);
      }
    }

    const auto& hw = blocks_[b];
    const auto& hb = blocks_[b + 1];
    const auto& ow = blocks_[b + 2];
    const auto& ob = blocks_[b + 3];
    const std::size_t feat = 2 * dim_;
    Real total = 0;
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<Real> h(hidden_);
      for (std::size_t r = 0; r < hidden_; ++r) {
        Real s = hb[r];
        for (std::size_t c = 0; c < feat; ++c) s += hw[r * feat + c] * xs[t][c];
        h[r] = fd::tanh(s);
      }
      Real logits[kNumTags];
      Real mx = 0;
      for (std::size_t k = 0; k < kNumTags; ++k) {
        Real s = ob[k];
        for (std::size_t c = 0; c < hidden_; ++c) s += ow[k * hidden_ + c] * h[c];
        logits[k] = s;
        mx = (k == 0 || s > mx) ? s : mx;
      }
      Real z = 0;
      for (auto v : logits) z += fd::exp(v - mx);
      total += fd::log(z) + mx - logits[static_cast<std::size_t>(ex.tags[t])];
    }
    return total / static_cast<Real>(n);
  }

 private:
  static Real logistic(Real x) { return Real(1) / (Real(1) + fd::exp(-x)); }

  // Blocks from `base`: z{W,R,b} i{W,R,b[,p]} f{W,R,b[,p]} o{W,R,b[,p]}.
  std::vector<std::vector<Real>> run_lstm(std::size_t base, const std::vector<std::vector<Real>>& xs) const {
    const std::size_t h = dim_;
    const std::size_t in = dim_;
    std::size_t k = base;
    auto next = [&]() -> const std::vector<Real>& { return blocks_[k++]; };
    const auto &wz = next(), &rz = next(), &bz = next();
    const auto &wi = next(), &ri = next(), &bi = next();
    const std::vector<Real> zero(h, Real(0));
    const auto& pi = peepholes_ ? next() : zero;
    const auto &wf = next(), &rf = next(), &bf = next();
    const auto& pf = peepholes_ ? next() : zero;
    const auto &wo = next(), &ro = next(), &bo = next();
    const auto& po = peepholes_ ? next() : zero;

    auto affine = [&](const std::vector<Real>& w, const std::vector<Real>& r, const std::vector<Real>& bias,
                      const std::vector<Real>& x, const std::vector<Real>& y, std::size_t row) {
      Real s = bias[row];
      for (std::size_t c = 0; c < in; ++c) s += w[row * in + c] * x[c];
      for (std::size_t c = 0; c < h; ++c) s += r[row * h + c] * y[c];
      return s;
    };

    std::vector<Real> c(h, Real(0)), y(h, Real(0));
    std::vector<std::vector<Real>> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
      std::vector<Real> c_new(h), y_new(h);
      for (std::size_t r = 0; r < h; ++r) {
        const Real z = fd::tanh(affine(wz, rz, bz, x, y, r));
        const Real i = logistic(affine(wi, ri, bi, x, y, r) + pi[r] * c[r]);
        const Real f = logistic(affine(wf, rf, bf, x, y, r) + pf[r] * c[r]);
        c_new[r] = i * z + f * c[r];
      }
      for (std::size_t r = 0; r < h; ++r) {
        const Real o = logistic(affine(wo, ro, bo, x, y, r) + po[r] * c_new[r]);
        y_new[r] = o * fd::tanh(c_new[r]);
      }
      c = std::move(c_new);
      y = std::move(y_new);
      out.push_back(y);
    }
    return out;
  }

  std::size_t dim_, depth_, vocab_, hidden_;
  bool peepholes_;
  std::vector<std::vector<Real>> blocks_;
};

}  // namespace blstmseg::detail

#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "blstmseg/blstm.hpp"
#include "blstmseg/linalg.hpp"
#include "blstmseg/lstm.hpp"
#include "blstmseg/tagger.hpp"
#include "blstmseg/training.hpp"

namespace testing_support {

using namespace blstmseg;

inline Vector vec(std::initializer_list<double> values) { return Vector(std::vector<double>(values)); }

inline Vector random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  Vector v(n);
  fill_uniform(rng, v.span(), scale);
  return v;
}

inline std::vector<Vector> random_sequence(Rng& rng, std::size_t len, std::size_t n, double scale = 1.0) {
  std::vector<Vector> xs;
  for (std::size_t t = 0; t < len; ++t) xs.push_back(random_vector(rng, n, scale));
  return xs;
}

inline LstmParams random_lstm(Rng& rng, std::size_t in, std::size_t hid, bool peep, double scale = 0.5) {
  auto p = LstmParams::zeros(in, hid, peep);
  for_each_block(p, [&](std::string_view, std::span<double> b) { fill_uniform(rng, b, scale); });
  return p;
}

inline StackedBlstm random_stack(Rng& rng, std::size_t d, std::size_t depth, bool peep, double scale = 0.5) {
  auto net = StackedBlstm::zeros(d, depth, peep);
  for_each_block(net, [&](std::string_view, std::span<double> b) { fill_uniform(rng, b, scale); });
  return net;
}

inline OutputHead random_head(Rng& rng, std::size_t feat, std::size_t hidden, double scale = 0.5) {
  auto h = OutputHead::zeros(feat, hidden);
  for_each_block(h, [&](std::string_view, std::span<double> b) { fill_uniform(rng, b, scale); });
  return h;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline bool bit_equal(const std::vector<Vector>& a, const std::vector<Vector>& b) { return a == b; }

// Sum of <g_t, y_t>: a scalar loss with a known upstream gradient.
inline double linear_loss(std::span<const Vector> ys, std::span<const Vector> gs) {
  double s = 0.0;
  for (std::size_t t = 0; t < ys.size(); ++t) s += dot(ys[t].span(), gs[t].span());
  return s;
}

// Agreement test for plain double central differences, whose rounding floor is
// near 1e-10 absolute for O(1) losses.
inline bool fd_close(double analytic, double numeric) {
  return std::abs(analytic - numeric) <= 1e-7 * std::max(1.0, std::abs(numeric));
}

inline std::vector<std::u32string> random_segmentation(Rng& rng, std::size_t alphabet, std::size_t max_words,
                                                       std::size_t max_word_len) {
  std::vector<std::u32string> words(1 + rng.below(max_words));
  for (auto& w : words) {
    const std::size_t n = 1 + rng.below(max_word_len);
    for (std::size_t k = 0; k < n; ++k) w.push_back(static_cast<char32_t>(0x4E00 + rng.below(alphabet)));
  }
  return words;
}

}  // namespace testing_support

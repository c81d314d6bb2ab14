#include "blstmseg/tagger.hpp"

#include <cmath>
#include <stdexcept>

namespace blstmseg {

char tag_letter(Tag t) {
  static constexpr char kLetters[] = {'B', 'M', 'E', 'S'};
  return kLetters[static_cast<std::size_t>(t)];
}

Vocab::Vocab() : chars_{U'\0'} {}

std::int32_t Vocab::add(char32_t ch) {
  auto [it, inserted] = ids_.try_emplace(ch, static_cast<std::int32_t>(chars_.size()));
  if (inserted) chars_.push_back(ch);
  return it->second;
}

std::int32_t Vocab::id(char32_t ch) const {
  auto it = ids_.find(ch);
  return it == ids_.end() ? kUnkId : it->second;
}

char32_t Vocab::character(std::int32_t id) const {
  if (id <= kUnkId || static_cast<std::size_t>(id) >= chars_.size()) {
    throw std::out_of_range("Vocab: no character for id " + std::to_string(id));
  }
  return chars_[static_cast<std::size_t>(id)];
}

std::u32string Vocab::known_characters() const { return std::u32string(chars_.begin() + 1, chars_.end()); }

Vector EmbeddingTable::column(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= m.cols()) {
    throw std::out_of_range("EmbeddingTable: id " + std::to_string(id) + " outside table of " +
                            std::to_string(m.cols()) + " columns");
  }
  Vector v(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m(r, static_cast<std::size_t>(id));
  return v;
}

std::vector<std::int32_t> char_ids(const Vocab& vocab, std::u32string_view chars) {
  std::vector<std::int32_t> ids;
  ids.reserve(chars.size());
  for (char32_t ch : chars) ids.push_back(vocab.id(ch));
  return ids;
}

std::vector<Vector> embed(const Vocab& vocab, const EmbeddingTable& table, std::u32string_view chars) {
  if (table.vocab_size() != vocab.size()) {
    throw ShapeError("embed: table has " + std::to_string(table.vocab_size()) + " columns, vocab has " +
                     std::to_string(vocab.size()) + " entries");
  }
  const auto ids = char_ids(vocab, chars);
  return embed_ids(table, ids);
}

std::vector<Vector> embed_ids(const EmbeddingTable& table, std::span<const std::int32_t> ids) {
  std::vector<Vector> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(table.column(id));
  return out;
}

OutputHead OutputHead::zeros(std::size_t feature_dim, std::size_t hidden_dim) {
  return {Matrix(hidden_dim, feature_dim), Vector(hidden_dim), Matrix(kNumTags, hidden_dim), Vector(kNumTags)};
}

void OutputHead::validate() const {
  if (hidden.rows() != hidden_b.size() || out.rows() != kNumTags || out.cols() != hidden.rows() ||
      out_b.size() != kNumTags) {
    throw ShapeError("OutputHead: inconsistent shapes hidden" + shape_string(hidden) + " out" + shape_string(out));
  }
}

HeadRecord head_forward(const OutputHead& head, const Vector& feature) {
  if (feature.size() != head.feature_dim()) {
    throw ShapeError("head_forward: feature " + shape_string(feature) + " vs hidden layer " +
                     shape_string(head.hidden));
  }
  HeadRecord rec;
  Vector a = head.hidden_b;
  accumulate_matvec(a, head.hidden, feature.span());
  rec.hidden = tanh(a);
  rec.logits = head.out_b;
  accumulate_matvec(rec.logits, head.out, rec.hidden.span());
  rec.probs = softmax(rec.logits);
  return rec;
}

Vector head_backward_accumulate(const OutputHead& head, const Vector& feature, const HeadRecord& rec,
                                const Vector& grad_logits, OutputHead& grads) {
  accumulate_outer(grads.out, grad_logits.span(), rec.hidden.span());
  axpy(grads.out_b.span(), 1.0, grad_logits.span());

  Vector g_hidden = matvec_transposed(head.out, grad_logits);
  for (std::size_t k = 0; k < g_hidden.size(); ++k) g_hidden[k] *= 1.0 - rec.hidden[k] * rec.hidden[k];

  accumulate_outer(grads.hidden, g_hidden.span(), feature.span());
  axpy(grads.hidden_b.span(), 1.0, g_hidden.span());
  return matvec_transposed(head.hidden, g_hidden);
}

std::vector<TagPrediction> predict_tags(const OutputHead& head, std::span<const Vector> feats) {
  std::vector<TagPrediction> out;
  out.reserve(feats.size());
  for (const auto& f : feats) {
    auto rec = head_forward(head, f);
    const auto best = static_cast<Tag>(argmax(rec.probs));
    out.push_back({best, std::move(rec.probs)});
  }
  return out;
}

std::vector<Tag> label_from_segmentation(std::span<const std::u32string> words) {
  std::vector<Tag> tags;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto n = words[w].size();
    if (n == 0) throw CorpusFormatError("empty word at index " + std::to_string(w));
    if (n == 1) {
      tags.push_back(Tag::S);
      continue;
    }
    tags.push_back(Tag::B);
    tags.insert(tags.end(), n - 2, Tag::M);
    tags.push_back(Tag::E);
  }
  return tags;
}

std::vector<std::u32string> decode_segmentation(std::u32string_view chars, std::span<const Tag> tags) {
  if (chars.size() != tags.size()) {
    throw std::invalid_argument("decode_segmentation: " + std::to_string(chars.size()) + " characters but " +
                                std::to_string(tags.size()) + " tags");
  }
  std::vector<std::u32string> words;
  std::u32string current;
  for (std::size_t k = 0; k < chars.size(); ++k) {
    const Tag t = tags[k];
    if ((t == Tag::B || t == Tag::S) && !current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
    current.push_back(chars[k]);
    if (t == Tag::E || t == Tag::S) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace blstmseg

#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "blstmseg/errors.hpp"
#include "blstmseg/linalg.hpp"

namespace blstmseg {

// Position of a character inside its word.
enum class Tag : std::uint8_t { B = 0, M = 1, E = 2, S = 3 };

inline constexpr std::size_t kNumTags = 4;

char tag_letter(Tag t);

// Character dictionary. Id 0 is reserved for unknown characters; known
// characters get dense ids 1..size()-1 in insertion order.
class Vocab {
 public:
  static constexpr std::int32_t kUnkId = 0;

  Vocab();

  // Returns the existing id if the character is already present.
  std::int32_t add(char32_t ch);
  std::int32_t id(char32_t ch) const;
  bool contains(char32_t ch) const { return ids_.count(ch) != 0; }
  // Throws std::out_of_range for kUnkId or ids outside [1, size()).
  char32_t character(std::int32_t id) const;
  std::size_t size() const { return chars_.size(); }
  // Known characters in id order (excludes the unknown slot).
  std::u32string known_characters() const;

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.chars_ == b.chars_; }

 private:
  std::unordered_map<char32_t, std::int32_t> ids_;
  std::vector<char32_t> chars_;  // chars_[0] is a placeholder for unk
};

// Character embeddings stored as a d x |C| matrix; column k is the vector of id k.
struct EmbeddingTable {
  Matrix m;

  std::size_t dim() const { return m.rows(); }
  std::size_t vocab_size() const { return m.cols(); }
  Vector column(std::int32_t id) const;

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

std::vector<std::int32_t> char_ids(const Vocab& vocab, std::u32string_view chars);
std::vector<Vector> embed(const Vocab& vocab, const EmbeddingTable& table, std::u32string_view chars);
std::vector<Vector> embed_ids(const EmbeddingTable& table, std::span<const std::int32_t> ids);

// tanh hidden layer followed by the four-way tag projection.
struct OutputHead {
  Matrix hidden;    // d_hid x 2d
  Vector hidden_b;  // d_hid
  Matrix out;       // 4 x d_hid
  Vector out_b;     // 4

  static OutputHead zeros(std::size_t feature_dim, std::size_t hidden_dim);
  std::size_t feature_dim() const { return hidden.cols(); }
  std::size_t hidden_dim() const { return hidden.rows(); }
  void validate() const;

  friend bool operator==(const OutputHead&, const OutputHead&) = default;
};

template <typename Head, typename Fn>
  requires std::same_as<std::remove_const_t<Head>, OutputHead>
void for_each_block(Head& head, Fn&& fn) {
  fn(std::string_view("head.hidden.W"), head.hidden.span());
  fn(std::string_view("head.hidden.b"), head.hidden_b.span());
  fn(std::string_view("head.out.W"), head.out.span());
  fn(std::string_view("head.out.b"), head.out_b.span());
}

struct HeadRecord {
  Vector hidden;  // tanh activations
  Vector logits;
  Vector probs;
};

HeadRecord head_forward(const OutputHead& head, const Vector& feature);

// Accumulates parameter gradients and returns dLoss/dfeature.
Vector head_backward_accumulate(const OutputHead& head, const Vector& feature, const HeadRecord& rec,
                                const Vector& grad_logits, OutputHead& grads);

struct TagPrediction {
  Tag tag;
  Vector probs;
};

// Per-position argmax over softmax probabilities; ties go to the lowest tag index.
std::vector<TagPrediction> predict_tags(const OutputHead& head, std::span<const Vector> feats);

// BMES labels for a segmented sentence. Throws CorpusFormatError on an empty word.
std::vector<Tag> label_from_segmentation(std::span<const std::u32string> words);

// Inverse of label_from_segmentation. Invalid sequences are repaired: a word is
// closed before every B or S and after every E or S; other characters extend
// the open word. Never drops or duplicates characters.
std::vector<std::u32string> decode_segmentation(std::u32string_view chars, std::span<const Tag> tags);

}  // namespace blstmseg

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "blstmseg/errors.hpp"
#include "blstmseg/tagger.hpp"

namespace blstmseg {

// Gold and predicted corpora disagree on sentence count or characters.
class AlignmentError : public CorpusFormatError {
 public:
  using CorpusFormatError::CorpusFormatError;
};

// Strict UTF-8 decoding (rejects overlong forms, surrogates and values above
// U+10FFFF). Errors report the byte offset as base_offset + index in `bytes`.
std::u32string decode_utf8(std::string_view bytes, std::size_t base_offset = 0);
std::string encode_utf8(std::u32string_view text);
bool is_unicode_space(char32_t ch);

using Sentence = std::vector<std::u32string>;

struct Corpus {
  std::vector<Sentence> sentences;
  std::string source;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

// Splits a decoded line on runs of Unicode whitespace.
Sentence split_words(std::u32string_view line);
std::u32string sentence_text(const Sentence& words);
std::string join_words(const Sentence& words, std::string_view separator = " ");

// One sentence per line; blank lines are skipped. A leading byte-order mark is ignored.
Corpus parse_corpus(std::istream& in, std::string source = {});
Corpus parse_corpus_text(std::string_view text, std::string source = {});
Corpus read_corpus_file(const std::string& path);

std::unordered_map<char32_t, std::size_t> char_frequencies(const Corpus& corpus);

// Characters with frequency >= min_freq, ids assigned by first occurrence.
Vocab build_vocab(const Corpus& corpus, std::size_t min_freq = 1);

struct EvalReport {
  std::size_t correct_words = 0;
  std::size_t gold_words = 0;
  std::size_t pred_words = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static EvalReport from_counts(std::size_t correct, std::size_t gold, std::size_t pred);
};

// "P=<f> R=<f> F=<f> correct=<n> gold=<n> pred=<n>" with six decimals.
std::string format_report(const EvalReport& report);

// Word-interval counts for one sentence pair; throws AlignmentError if the
// character strings differ.
struct IntervalCounts {
  std::size_t correct = 0;
  std::size_t gold = 0;
  std::size_t pred = 0;
};
IntervalCounts count_matches(const Sentence& gold, const Sentence& pred);

// Micro-averaged word-level P/R/F over aligned corpora.
EvalReport score_prf(const Corpus& gold, const Corpus& pred);

}  // namespace blstmseg

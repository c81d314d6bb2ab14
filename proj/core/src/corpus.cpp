#include "blstmseg/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

namespace blstmseg {

namespace {

[[noreturn]] void utf8_error(std::size_t offset, const char* what) {
  throw CorpusFormatError("invalid UTF-8 at byte offset " + std::to_string(offset) + ": " + what);
}

void parse_line_into(Corpus& corpus, std::string_view line, std::size_t offset) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto text = decode_utf8(line, offset);
  auto words = split_words(text);
  if (!words.empty()) corpus.sentences.push_back(std::move(words));
}

std::string_view strip_bom(std::string_view line) {
  constexpr std::string_view kBom = "\xEF\xBB\xBF";
  if (line.substr(0, 3) == kBom) line.remove_prefix(3);
  return line;
}

}  // namespace

std::u32string decode_utf8(std::string_view bytes, std::size_t base_offset) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t k = 0;
  while (k < bytes.size()) {
    const auto b0 = static_cast<unsigned char>(bytes[k]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++k;
      continue;
    }
    std::size_t len;
    char32_t cp;
    char32_t min;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
      utf8_error(base_offset + k, "invalid lead byte");
    }
    if (k + len > bytes.size()) utf8_error(base_offset + k, "truncated sequence");
    for (std::size_t j = 1; j < len; ++j) {
      const auto b = static_cast<unsigned char>(bytes[k + j]);
      if ((b & 0xC0) != 0x80) utf8_error(base_offset + k + j, "expected continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min) utf8_error(base_offset + k, "overlong encoding");
    if (cp > 0x10FFFF) utf8_error(base_offset + k, "code point above U+10FFFF");
    if (cp >= 0xD800 && cp <= 0xDFFF) utf8_error(base_offset + k, "surrogate code point");
    out.push_back(cp);
    k += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_unicode_space(char32_t ch) {
  // White_Space property of the Unicode character database.
  switch (ch) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return ch >= 0x2000 && ch <= 0x200A;
  }
}

Sentence split_words(std::u32string_view line) {
  Sentence words;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && is_unicode_space(line[k])) ++k;
    const std::size_t start = k;
    while (k < line.size() && !is_unicode_space(line[k])) ++k;
    if (k > start) words.emplace_back(line.substr(start, k - start));
  }
  return words;
}

std::u32string sentence_text(const Sentence& words) {
  std::u32string out;
  for (const auto& w : words) out += w;
  return out;
}

std::string join_words(const Sentence& words, std::string_view separator) {
  std::string out;
  for (std::size_t k = 0; k < words.size(); ++k) {
    if (k) out += separator;
    out += encode_utf8(words[k]);
  }
  return out;
}

Corpus parse_corpus(std::istream& in, std::string source) {
  Corpus corpus;
  corpus.source = std::move(source);
  std::string line;
  std::size_t offset = 0;
  bool first = true;
  while (std::getline(in, line)) {
    std::string_view view = line;
    std::size_t line_offset = offset;
    if (first) {
      const auto stripped = strip_bom(view);
      line_offset += view.size() - stripped.size();
      view = stripped;
      first = false;
    }
    parse_line_into(corpus, view, line_offset);
    offset += line.size() + 1;
  }
  return corpus;
}

Corpus parse_corpus_text(std::string_view text, std::string source) {
  std::istringstream in{std::string(text)};
  return parse_corpus(in, std::move(source));
}

Corpus read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file " + path);
  return parse_corpus(in, path);
}

std::unordered_map<char32_t, std::size_t> char_frequencies(const Corpus& corpus) {
  std::unordered_map<char32_t, std::size_t> freq;
  for (const auto& s : corpus.sentences) {
    for (const auto& w : s) {
      for (char32_t ch : w) ++freq[ch];
    }
  }
  return freq;
}

Vocab build_vocab(const Corpus& corpus, std::size_t min_freq) {
  if (min_freq < 1) throw ConfigError("build_vocab: min_freq must be at least 1");
  if (corpus.empty()) throw CorpusFormatError("build_vocab: empty corpus");
  const auto freq = char_frequencies(corpus);
  Vocab vocab;
  for (const auto& s : corpus.sentences) {
    for (const auto& w : s) {
      for (char32_t ch : w) {
        if (freq.at(ch) >= min_freq) vocab.add(ch);
      }
    }
  }
  return vocab;
}

EvalReport EvalReport::from_counts(std::size_t correct, std::size_t gold, std::size_t pred) {
  EvalReport r;
  r.correct_words = correct;
  r.gold_words = gold;
  r.pred_words = pred;
  r.precision = pred == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(pred);
  r.recall = gold == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold);
  const double denom = r.precision + r.recall;
  r.f1 = denom == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / denom;
  return r;
}

std::string format_report(const EvalReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "P=%.6f R=%.6f F=%.6f correct=%zu gold=%zu pred=%zu", r.precision, r.recall, r.f1,
                r.correct_words, r.gold_words, r.pred_words);
  return buf;
}

IntervalCounts count_matches(const Sentence& gold, const Sentence& pred) {
  if (sentence_text(gold) != sentence_text(pred)) throw AlignmentError("character mismatch");
  // Both segmentations cover the same string, so walking them in parallel finds
  // every interval whose start and end coincide.
  IntervalCounts counts{0, gold.size(), pred.size()};
  std::size_t gi = 0, pi = 0, gpos = 0, ppos = 0;
  while (gi < gold.size() && pi < pred.size()) {
    const std::size_t gend = gpos + gold[gi].size();
    const std::size_t pend = ppos + pred[pi].size();
    if (gpos == ppos && gend == pend) ++counts.correct;
    if (gend <= pend) {
      gpos = gend;
      ++gi;
    }
    if (pend <= gend) {
      ppos = pend;
      ++pi;
    }
  }
  return counts;
}

EvalReport score_prf(const Corpus& gold, const Corpus& pred) {
  if (gold.size() != pred.size()) {
    throw AlignmentError("sentence count mismatch: gold has " + std::to_string(gold.size()) + ", prediction has " +
                         std::to_string(pred.size()));
  }
  std::size_t correct = 0, gold_words = 0, pred_words = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    IntervalCounts c;
    try {
      c = count_matches(gold.sentences[s], pred.sentences[s]);
    } catch (const AlignmentError&) {
      throw AlignmentError("character mismatch in sentence " + std::to_string(s));
    }
    correct += c.correct;
    gold_words += c.gold;
    pred_words += c.pred;
  }
  return EvalReport::from_counts(correct, gold_words, pred_words);
}

}  // namespace blstmseg

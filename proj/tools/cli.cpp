#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "blstmseg/corpus.hpp"
#include "blstmseg/model_io.hpp"
#include "blstmseg/training.hpp"

namespace blstmseg::cli {

namespace {

struct TrainOptions {
  std::string corpus;
  std::string dev;
  std::string out;
  std::size_t min_freq = 1;
  TrainConfig config;
};

struct SegmentOptions {
  std::string model;
  std::string input = "-";
  std::string output = "-";
  std::size_t threads = 1;
};

struct EvalOptions {
  std::string gold;
  std::string pred;
  std::string model;
  std::string input;
  std::size_t threads = 1;
};

struct GradCheckOptions {
  std::size_t dim = 4;
  std::size_t depth = 2;
  std::size_t length = 6;
  std::uint64_t seed = 1;
  bool peepholes = false;
  double scale = 0.5;
  double tolerance = 1e-6;
  std::string fd_precision = "quad";
};

// Whitespace is not part of the text to segment.
std::u32string strip_spaces(std::u32string_view line) {
  std::u32string out;
  out.reserve(line.size());
  for (char32_t ch : line) {
    if (!is_unicode_space(ch)) out.push_back(ch);
  }
  return out;
}

Sentence segment_line(const StackedModel& model, std::string_view line, std::size_t offset) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return segment_sentence(model, strip_spaces(decode_utf8(line, offset)));
}

// Segments `lines` in place order, fanning out over `threads` workers.
std::vector<Sentence> segment_lines(const StackedModel& model, const std::vector<std::string>& lines,
                                    std::size_t first_offset, std::size_t threads) {
  std::vector<std::size_t> offsets(lines.size());
  std::size_t off = first_offset;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    offsets[k] = off;
    off += lines[k].size() + 1;
  }
  std::vector<Sentence> out(lines.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, lines.size()));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t k = lines.size() * w / workers; k < lines.size() * (w + 1) / workers; ++k) {
        out[k] = segment_line(model, lines[k], offsets[k]);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::optional<StackedModel> load_or_report(const std::string& path, std::ostream& err) {
  try {
    return load_model(path);
  } catch (const ModelFormatError& e) {
    err << "error: corrupt model '" << path << "' (section " << e.section() << "): " << e.what() << "\n";
  }
  return std::nullopt;
}

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  const Corpus corpus = read_corpus_file(opt.corpus);
  const Corpus dev = opt.dev.empty() ? Corpus{} : read_corpus_file(opt.dev);
  if (corpus.empty()) {
    err << "error: training corpus " << opt.corpus << " has no sentences\n";
    return kExitFailure;
  }
  opt.config.validate();
  Rng rng(opt.config.seed);
  StackedModel model = StackedModel::create(build_vocab(corpus, opt.min_freq), opt.config, rng);
  auto result = train(
      model, corpus, dev, opt.config, [&](const EpochLog& log) { out << format_epoch_log(log) << std::endl; },
      [&](const std::string& msg) { err << "warning: " << msg << "\n"; });
  save_model(result.best, opt.out);
  return kExitOk;
}

int cmd_segment(const SegmentOptions& opt, std::istream& in, std::ostream& out, std::ostream& err) {
  auto model = load_or_report(opt.model, err);
  if (!model) return kExitBadModel;

  std::ifstream file_in;
  std::istream* src = &in;
  if (opt.input != "-") {
    file_in.open(opt.input, std::ios::binary);
    if (!file_in) {
      err << "error: cannot open input " << opt.input << "\n";
      return kExitFailure;
    }
    src = &file_in;
  }
  std::ofstream file_out;
  std::ostream* dst = &out;
  if (opt.output != "-") {
    file_out.open(opt.output, std::ios::binary | std::ios::trunc);
    if (!file_out) {
      err << "error: cannot open output " << opt.output << "\n";
      return kExitFailure;
    }
    dst = &file_out;
  }

  constexpr std::size_t kChunkLines = 1024;
  std::vector<std::string> lines;
  std::size_t offset = 0;
  std::string line;
  bool eof = false;
  while (!eof) {
    lines.clear();
    std::size_t chunk_offset = offset;
    while (lines.size() < kChunkLines) {
      if (!std::getline(*src, line)) {
        eof = true;
        break;
      }
      offset += line.size() + 1;
      lines.push_back(line);
    }
    if (lines.empty()) break;
    for (const auto& words : segment_lines(*model, lines, chunk_offset, opt.threads)) {
      *dst << join_words(words, " ") << '\n';
    }
  }
  dst->flush();
  return kExitOk;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  const Corpus gold = read_corpus_file(opt.gold);
  Corpus pred;
  if (!opt.pred.empty()) {
    pred = read_corpus_file(opt.pred);
  } else {
    auto model = load_or_report(opt.model, err);
    if (!model) return kExitBadModel;
    std::vector<std::string> lines;
    if (!opt.input.empty()) {
      std::ifstream raw(opt.input, std::ios::binary);
      if (!raw) {
        err << "error: cannot open input " << opt.input << "\n";
        return kExitFailure;
      }
      for (std::string l; std::getline(raw, l);) lines.push_back(std::move(l));
    } else {
      for (const auto& s : gold.sentences) lines.push_back(join_words(s, ""));
    }
    for (auto& words : segment_lines(*model, lines, 0, opt.threads)) {
      if (!words.empty()) pred.sentences.push_back(std::move(words));
    }
  }
  try {
    out << format_report(score_prf(gold, pred)) << "\n";
  } catch (const AlignmentError& e) {
    err << "error: gold and prediction are not aligned: " << e.what() << "\n";
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_gradcheck(const GradCheckOptions& opt, std::ostream& out) {
  auto inst = make_gradcheck_instance(opt.dim, opt.depth, opt.length, opt.peepholes, opt.seed, opt.scale);
  const auto report = grad_check(inst.model, inst.sentence, opt.tolerance,
                                 opt.fd_precision == "double"     ? FdPrecision::kDouble
                                 : opt.fd_precision == "extended" ? FdPrecision::kExtended
                                                                  : FdPrecision::kQuad);
  char buf[256];
  for (const auto& b : report.blocks) {
    std::snprintf(buf, sizeof buf, "block=%s checked=%zu max_rel_error=%.3e", b.name.c_str(), b.checked,
                  b.max_rel_error);
    out << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "max_rel_error=%.3e tolerance=%.3e result=%s", report.max_rel_error, opt.tolerance,
                report.passed() ? "PASS" : "FAIL");
  out << buf << "\n";
  return report.passed() ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chinese word segmentation with stacked bidirectional LSTMs", "blstmseg"};
  app.require_subcommand(1);

  TrainOptions train_opt;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write the best-dev snapshot");
  train_cmd->add_option("--corpus", train_opt.corpus, "Segmented training corpus (UTF-8)")->required();
  train_cmd->add_option("--dev", train_opt.dev, "Segmented development corpus");
  train_cmd->add_option("--out", train_opt.out, "Output model path")->required();
  auto& cfg = train_opt.config;
  train_cmd->add_option("--embed-dim", cfg.embed_dim, "Embedding and layer width")->capture_default_str();
  train_cmd->add_option("--layers", cfg.depth, "Number of stacked BLSTM layers")->capture_default_str();
  train_cmd->add_option("--hidden-dim", cfg.hidden_dim, "Output hidden layer size (0 = embed dim)")->capture_default_str();
  train_cmd->add_option("--dropout-keep", cfg.keep_prob, "Dropout keep probability")->capture_default_str();
  train_cmd->add_option("--lr", cfg.learning_rate, "SGD learning rate")->capture_default_str();
  train_cmd->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--batch-size", cfg.batch_size, "Sentences per mini-batch")->capture_default_str();
  train_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  train_cmd->add_flag("--peepholes", cfg.peepholes, "Enable peephole connections");
  train_cmd->add_option("--clip", cfg.clip, "Global gradient-norm clip")->capture_default_str();
  train_cmd->add_option("--init-scale", cfg.init_scale, "Uniform init range")->capture_default_str();
  train_cmd->add_option("--unk-replace", cfg.unk_replace_prob, "Singleton-to-unknown replacement rate")
      ->capture_default_str();
  train_cmd->add_option("--min-freq", train_opt.min_freq, "Minimum character frequency for the vocabulary")
      ->capture_default_str();
  train_cmd->add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();

  SegmentOptions seg_opt;
  auto* seg_cmd = app.add_subcommand("segment", "Segment unsegmented text, one sentence per line");
  seg_cmd->add_option("--model", seg_opt.model, "Model file")->required();
  seg_cmd->add_option("--input", seg_opt.input, "Input file ('-' for stdin)")->capture_default_str();
  seg_cmd->add_option("--output", seg_opt.output, "Output file ('-' for stdout)")->capture_default_str();
  seg_cmd->add_option("--threads", seg_opt.threads, "Worker threads")->capture_default_str();

  EvalOptions eval_opt;
  auto* eval_cmd = app.add_subcommand("eval", "Word-level precision/recall/F1 against a gold corpus");
  eval_cmd->add_option("--gold", eval_opt.gold, "Gold segmented corpus")->required();
  auto* pred_opt = eval_cmd->add_option("--pred", eval_opt.pred, "Predicted segmented corpus");
  auto* model_opt = eval_cmd->add_option("--model", eval_opt.model, "Model to segment with");
  eval_cmd->add_option("--input", eval_opt.input, "Raw input for --model (default: gold with spaces removed)")
      ->needs(model_opt);
  eval_cmd->add_option("--threads", eval_opt.threads, "Worker threads")->capture_default_str();
  pred_opt->excludes(model_opt);

  GradCheckOptions gc_opt;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  gc_cmd->add_option("--embed-dim", gc_opt.dim)->capture_default_str();
  gc_cmd->add_option("--layers", gc_opt.depth)->capture_default_str();
  gc_cmd->add_option("--length", gc_opt.length)->capture_default_str();
  gc_cmd->add_option("--seed", gc_opt.seed)->capture_default_str();
  gc_cmd->add_flag("--peepholes", gc_opt.peepholes);
  gc_cmd->add_option("--scale", gc_opt.scale, "Uniform parameter range")->capture_default_str();
  gc_cmd->add_option("--tolerance", gc_opt.tolerance)->capture_default_str();
  gc_cmd->add_option("--fd-precision", gc_opt.fd_precision, "Arithmetic for the finite differences")
      ->check(CLI::IsMember({"quad", "extended", "double"}))
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (eval_cmd->parsed() && eval_opt.pred.empty() && eval_opt.model.empty()) {
      throw CLI::RequiredError("eval needs --pred or --model");
    }
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_opt, out, err);
    if (seg_cmd->parsed()) return cmd_segment(seg_opt, in, out, err);
    if (eval_cmd->parsed()) return cmd_eval(eval_opt, out, err);
    if (gc_cmd->parsed()) return cmd_gradcheck(gc_opt, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModelFormatError& e) {
    err << "error: model " << e.section() << ": " << e.what() << "\n";
    return kExitBadModel;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace blstmseg::cli

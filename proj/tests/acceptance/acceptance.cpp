// One PASS/FAIL line per acceptance criterion. Usage: acceptance [N ...]
// (default: every criterion). Exit status is nonzero if any selected one fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blstmseg/blstm.hpp"
#include "blstmseg/corpus.hpp"
#include "blstmseg/model_io.hpp"
#include "blstmseg/tagger.hpp"
#include "blstmseg/training.hpp"
#include "cli.hpp"

using namespace blstmseg;

namespace {

// Tolerances and pinned figures.
constexpr double kGradTolerance = 1e-6;
constexpr double kGradBudgetSeconds = 120.0;
constexpr double kRoundTripBudgetSeconds = 10.0;
constexpr double kOverfitTagAccuracy = 0.995;
constexpr double kOverfitF1 = 0.99;
constexpr double kOverfitBudgetSeconds = 300.0;
constexpr double kSymmetryTolerance = 1e-14;
constexpr double kSoftmaxSumTolerance = 1e-12;
constexpr double kLearningFloorF1 = 0.80;
constexpr double kPinnedHeldoutF1 = 0.8867;  // one reference run of learning_config()
constexpr double kPinnedBand = 0.02;
constexpr double kLearningBudgetSeconds = 3600.0;

const std::string kData = BLSTMSEG_TEST_DATA_DIR;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<std::u32string> random_segmentation(Rng& rng, std::size_t alphabet, std::size_t max_words,
                                                std::size_t max_word_len) {
  std::vector<std::u32string> words(1 + rng.below(max_words));
  for (auto& w : words) {
    const std::size_t n = 1 + rng.below(max_word_len);
    for (std::size_t k = 0; k < n; ++k) w.push_back(static_cast<char32_t>(0x4E00 + rng.below(alphabet)));
  }
  return words;
}

std::vector<Vector> random_sequence(Rng& rng, std::size_t len, std::size_t n) {
  std::vector<Vector> xs(len, Vector(n));
  for (auto& x : xs) fill_uniform(rng, x.span(), 1.0);
  return xs;
}

StackedBlstm random_stack(Rng& rng, std::size_t d, std::size_t depth, bool peep) {
  auto net = StackedBlstm::zeros(d, depth, peep);
  for_each_block(net, [&](std::string_view, std::span<double> b) { fill_uniform(rng, b, 0.5); });
  return net;
}

// --- 1 ---
Outcome gradient_soundness() {
  const auto start = std::chrono::steady_clock::now();
  int configs = 0, failed = 0;
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t d : {3, 4, 5}) {
    for (std::size_t depth : {1, 2, 3}) {
      for (std::size_t len : {1, 5, 8}) {
        const bool peep = configs % 2 == 1;
        const auto inst = make_gradcheck_instance(d, depth, len, peep, 1000 + configs);
        const auto report = grad_check(inst.model, inst.sentence, kGradTolerance);
        if (!report.passed()) ++failed;
        if (report.max_rel_error >= worst) {
          worst = report.max_rel_error;
          worst_name = fmt("d=%zu depth=%zu T=%zu peep=%d", d, depth, len, peep);
        }
        ++configs;
      }
    }
  }
  const double secs = seconds_since(start);
  return {failed == 0 && configs >= 20 && secs < kGradBudgetSeconds,
          fmt("configs=%d failed=%d max_rel_error=%.2e (%s) tol=%.0e seconds=%.1f", configs, failed, worst,
              worst_name.c_str(), kGradTolerance, secs)};
}

// --- 2 ---
Outcome bmes_round_trip() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2);
  int bad_round_trip = 0, bad_conservation = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto s = random_segmentation(rng, 1 + rng.below(30), 12, 6);
    if (decode_segmentation(sentence_text(s), label_from_segmentation(s)) != s) ++bad_round_trip;
  }
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = rng.below(20);
    std::u32string text;
    std::vector<Tag> tags;
    for (std::size_t k = 0; k < n; ++k) {
      text.push_back(static_cast<char32_t>(0x4E00 + rng.below(50)));
      tags.push_back(static_cast<Tag>(rng.below(4)));
    }
    const auto words = decode_segmentation(text, tags);
    bool empty_word = false;
    for (const auto& w : words) empty_word |= w.empty();
    if (sentence_text(words) != text || empty_word) ++bad_conservation;
  }
  const double secs = seconds_since(start);
  return {bad_round_trip == 0 && bad_conservation == 0 && secs < kRoundTripBudgetSeconds,
          fmt("round_trip_failures=%d/10000 conservation_failures=%d/10000 seconds=%.2f", bad_round_trip,
              bad_conservation, secs)};
}

// --- 3 ---
EvalReport brute_force_prf(const Corpus& gold, const Corpus& pred) {
  auto intervals = [](const Sentence& s) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t pos = 0;
    for (const auto& w : s) {
      out.emplace_back(pos, pos + w.size());
      pos += w.size();
    }
    return out;
  };
  std::size_t correct = 0, g = 0, p = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto gi = intervals(gold.sentences[s]);
    const auto pi = intervals(pred.sentences[s]);
    g += gi.size();
    p += pi.size();
    for (const auto& a : gi) {
      for (const auto& b : pi) correct += a == b;
    }
  }
  return EvalReport::from_counts(correct, g, p);
}

Outcome scorer_oracle() {
  Rng rng(3);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Corpus gold, pred;
    const std::size_t n = 1 + rng.below(6);
    for (std::size_t s = 0; s < n; ++s) {
      auto g = random_segmentation(rng, 10, 8, 4);
      const auto text = sentence_text(g);
      Sentence p;
      for (std::size_t k = 0; k < text.size();) {
        const std::size_t len = std::min<std::size_t>(text.size() - k, 1 + rng.below(4));
        p.push_back(text.substr(k, len));
        k += len;
      }
      pred.sentences.push_back(rng.bernoulli(0.2) ? g : p);
      gold.sentences.push_back(std::move(g));
    }
    const auto got = score_prf(gold, pred);
    const auto want = brute_force_prf(gold, pred);
    if (got.correct_words != want.correct_words || got.gold_words != want.gold_words ||
        got.pred_words != want.pred_words || got.f1 != want.f1) {
      ++mismatches;
    }
  }
  const auto worked = score_prf(parse_corpus_text("ab\nc de\n"), parse_corpus_text("ab\ncd e\n"));
  const bool exact = worked.precision == 1.0 / 3 && worked.recall == 1.0 / 3 && worked.f1 == 1.0 / 3;
  return {mismatches == 0 && exact,
          fmt("oracle_mismatches=%d/1000 worked_example=\"%s\"", mismatches, format_report(worked).c_str())};
}

// --- 4 ---
TrainConfig overfit_config() {
  TrainConfig cfg;
  cfg.embed_dim = 16;
  cfg.depth = 1;
  cfg.epochs = 300;
  cfg.batch_size = 1;  // default lr 0.1 needs the extra updates to leave the uniform-prediction plateau
  cfg.seed = 4;
  return cfg;
}

Outcome overfit() {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = read_corpus_file(kData + "/toy_100.utf8");
  const auto cfg = overfit_config();
  auto run_once = [&] {
    Rng rng(cfg.seed);
    auto model = StackedModel::create(build_vocab(corpus), cfg, rng);
    train(model, corpus, Corpus{}, cfg);
    return model;
  };
  const auto model = run_once();
  const auto score = evaluate(model, corpus);
  const bool deterministic = run_once() == model;
  const double secs = seconds_since(start);
  return {score.tag_accuracy >= kOverfitTagAccuracy && score.report.f1 >= kOverfitF1 && deterministic &&
              secs < kOverfitBudgetSeconds,
          fmt("sentences=%zu epochs=%zu tag_acc=%.4f f1=%.4f deterministic=%s seconds=%.1f", corpus.size(),
              cfg.epochs, score.tag_accuracy, score.report.f1, deterministic ? "yes" : "no", secs)};
}

// --- 5 ---
StackedBlstm swap_directions(StackedBlstm net) {
  const std::size_t d = net.dim();
  for (auto& layer : net.layers) std::swap(layer.forward, layer.backward);
  for (auto& c : net.compressions) {
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t k = 0; k < d; ++k) std::swap(c(r, k), c(r, d + k));
    }
  }
  return net;
}

Outcome architecture_invariants() {
  Rng rng(5);
  constexpr int kTrials = 200;
  int dim_fail = 0, causal_fail = 0, swap_fail = 0, softmax_fail = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const std::size_t d = 1 + rng.below(5), depth = 1 + rng.below(3), len = 1 + rng.below(8);
    const auto net = random_stack(rng, d, depth, trial % 2 == 0);
    const auto xs = random_sequence(rng, len, d);
    const auto base = stack_forward(net, xs);

    bool dims = base.outputs.size() == len;
    for (const auto& v : base.outputs) dims &= v.size() == 2 * d;
    for (std::size_t l = 0; l + 1 < depth; ++l) {
      for (const auto& v : base.tape.concat_outputs[l]) dims &= compress(net.compressions[l], v).size() == d;
    }
    dim_fail += !dims;

    // Forward half at t ignores the future, backward half ignores the past
    // (per layer concatenation; depth 1 also on the stack output).
    const std::size_t t = rng.below(len);
    auto future = xs, past = xs;
    for (std::size_t u = t + 1; u < len; ++u) fill_uniform(rng, future[u].span(), 1.0);
    for (std::size_t u = 0; u < t; ++u) fill_uniform(rng, past[u].span(), 1.0);
    const auto f = stack_forward(net, future);
    const auto p = stack_forward(net, past);
    bool causal = true;
    for (std::size_t k = 0; k < d; ++k) {
      causal &= f.tape.concat_outputs[0][t][k] == base.tape.concat_outputs[0][t][k];
      causal &= p.tape.concat_outputs[0][t][d + k] == base.tape.concat_outputs[0][t][d + k];
      if (depth == 1) causal &= f.outputs[t][k] == base.outputs[t][k] && p.outputs[t][d + k] == base.outputs[t][d + k];
    }
    causal_fail += !causal;

    const std::vector<Vector> rev(xs.rbegin(), xs.rend());
    const auto swapped = stack_forward(swap_directions(net), rev);
    double err = 0.0;
    for (std::size_t l = 0; l < depth; ++l) {
      for (std::size_t u = 0; u < len; ++u) {
        const auto& a = base.tape.concat_outputs[l][len - 1 - u];
        const auto& b = swapped.tape.concat_outputs[l][u];
        for (std::size_t k = 0; k < d; ++k) {
          err = std::max({err, std::abs(b[k] - a[d + k]), std::abs(b[d + k] - a[k])});
        }
      }
    }
    swap_fail += err > kSymmetryTolerance;

    auto head = OutputHead::zeros(2 * d, 1 + rng.below(6));
    for_each_block(head, [&](std::string_view, std::span<double> b) { fill_uniform(rng, b, 3.0); });
    for (const auto& pred : predict_tags(head, base.outputs)) {
      double sum = 0.0;
      bool in_range = true;
      for (double q : pred.probs.span()) {
        sum += q;
        in_range &= q >= 0.0 && q <= 1.0;
      }
      softmax_fail += !in_range || std::abs(sum - 1.0) > kSoftmaxSumTolerance;
    }
  }
  return {dim_fail + causal_fail + swap_fail + softmax_fail == 0,
          fmt("models=%d dimension_failures=%d causality_failures=%d swap_failures=%d softmax_failures=%d", kTrials,
              dim_fail, causal_fail, swap_fail, softmax_fail)};
}

// --- 6 ---
TrainConfig learning_config() {
  TrainConfig cfg;
  cfg.embed_dim = 64;
  cfg.depth = 1;
  cfg.keep_prob = 0.8;
  cfg.batch_size = 1;
  cfg.learning_rate = 0.5;
  cfg.epochs = 20;
  cfg.seed = 6;
  return cfg;
}

Outcome learning_proxy() {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = read_corpus_file(kData + "/pku_train_3000.utf8");
  const auto heldout = read_corpus_file(kData + "/pku_heldout_500.utf8");
  const auto cfg = learning_config();
  Rng rng(cfg.seed);
  auto model = StackedModel::create(build_vocab(corpus), cfg, rng);
  train(model, corpus, Corpus{}, cfg, [](const EpochLog& log) {
    std::fprintf(stderr, "  %s\n", format_epoch_log(log).c_str());
  });
  const double f1 = evaluate(model, heldout).report.f1;
  const double secs = seconds_since(start);
  const bool pinned = std::abs(f1 - kPinnedHeldoutF1) <= kPinnedBand;
  return {f1 >= kLearningFloorF1 && pinned && secs <= kLearningBudgetSeconds,
          fmt("train=%zu heldout=%zu d=%zu epochs=%zu heldout_f1=%.4f pinned=%.4f+-%.2f seconds=%.0f", corpus.size(),
              heldout.size(), cfg.embed_dim, cfg.epochs, f1, kPinnedHeldoutF1, kPinnedBand, secs)};
}

// --- 7 ---
int run_cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::istringstream in;
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("blstmseg_acceptance_" + name)).string();
}

Outcome paper_configuration() {
  const auto path = temp_file("large.bin");
  const int code = run_cli({"train", "--corpus", kData + "/toy_100.utf8", "--out", path, "--embed-dim", "200",
                            "--layers", "3", "--dropout-keep", "0.8", "--epochs", "0"});
  bool shape = false;
  if (code == 0) {
    const auto m = load_model(path);
    shape = m.dim() == 200 && m.net.depth() == 3 && m.net.compressions.size() == 2 && m.config.keep_prob == 0.8;
  }
  std::filesystem::remove(path);
  return {code == 0 && shape,
          fmt("train --embed-dim 200 --layers 3 --dropout-keep 0.8 exit=%d model_shape=%s "
              "(full-corpus runs are launchable but not part of the suite)",
              code, shape ? "ok" : "wrong")};
}

// --- 8 ---
Outcome serialization() {
  Rng rng(8);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Vocab v;
    const std::size_t n = 1 + rng.below(20);
    for (std::size_t k = 0; k < n; ++k) v.add(static_cast<char32_t>(0x4E00 + rng.below(500)));
    TrainConfig cfg;
    cfg.embed_dim = 1 + rng.below(6);
    cfg.depth = 1 + rng.below(3);
    cfg.hidden_dim = rng.below(5);
    cfg.peepholes = rng.bernoulli(0.5);
    auto m = StackedModel::zeros(std::move(v), cfg);
    randomize_parameters(m, rng, 2.0);
    std::stringstream buf;
    write_model(m, buf);
    const auto back = read_model(buf);
    if (back != quantize_to_f32(m)) ++mismatches;
  }

  const auto good = temp_file("good.bin");
  const auto corpus = kData + "/toy_100.utf8";
  bool codes_ok = run_cli({"train", "--corpus", corpus, "--out", good, "--embed-dim", "4", "--layers", "1",
                           "--epochs", "0"}) == 0;
  std::string bytes;
  {
    std::ifstream f(good, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(f), {});
  }
  auto write = [](const std::string& path, const std::string& data) { std::ofstream(path, std::ios::binary) << data; };
  const auto bad_magic = temp_file("magic.bin"), truncated = temp_file("truncated.bin");
  auto flipped = bytes;
  flipped[0] ^= 0x20;
  write(bad_magic, flipped);
  write(truncated, bytes.substr(0, bytes.size() - 5));
  std::string magic_err, trunc_err;
  const int magic_code = run_cli({"segment", "--model", bad_magic}, &magic_err);
  const int trunc_code = run_cli({"segment", "--model", truncated}, &trunc_err);
  codes_ok &= magic_code == cli::kExitBadModel && magic_err.find("magic") != std::string::npos;
  codes_ok &= trunc_code == cli::kExitBadModel && trunc_err.find("payload") != std::string::npos;
  for (const auto& p : {good, bad_magic, truncated}) std::filesystem::remove(p);
  return {mismatches == 0 && codes_ok,
          fmt("round_trip_mismatches=%d/100 bad_magic_exit=%d truncated_exit=%d", mismatches, magic_code, trunc_code)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria = {
      {1, {"gradient soundness", gradient_soundness}},
      {2, {"BMES round trip", bmes_round_trip}},
      {3, {"scorer oracle equivalence", scorer_oracle}},
      {4, {"overfit toy corpus", overfit}},
      {5, {"architecture invariants", architecture_invariants}},
      {6, {"desk-scale learning proxy", learning_proxy}},
      {7, {"paper configuration launchable", paper_configuration}},
      {8, {"serialization", serialization}},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));
  if (selected.empty()) {
    for (const auto& [n, _] : criteria) selected.insert(n);
  }

  int failures = 0;
  for (int n : selected) {
    const auto it = criteria.find(n);
    if (it == criteria.end()) {
      std::printf("FAIL criterion %d: unknown\n", n);
      ++failures;
      continue;
    }
    Outcome o{false, ""};
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, it->second.first, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}

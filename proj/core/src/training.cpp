#include "blstmseg/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>
#include <unordered_set>

#include "reference_loss.hpp"

namespace blstmseg {

namespace {

// Runs fn(worker) for worker in [0, workers) and rethrows the first failure.
template <typename Fn>
void run_workers(std::size_t workers, Fn&& fn) {
  if (workers <= 1) {
    fn(std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        fn(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::pair<std::size_t, std::size_t> chunk_range(std::size_t n, std::size_t workers, std::size_t w) {
  return {n * w / workers, n * (w + 1) / workers};
}

std::vector<std::span<double>> dense_blocks(StackedBlstm& net, OutputHead& head) {
  std::vector<std::span<double>> out;
  for_each_block(net, [&](std::string_view, std::span<double> s) { out.push_back(s); });
  for_each_block(head, [&](std::string_view, std::span<double> s) { out.push_back(s); });
  return out;
}

std::vector<std::span<const double>> dense_blocks(const StackedBlstm& net, const OutputHead& head) {
  std::vector<std::span<const double>> out;
  for_each_block(net, [&](std::string_view, std::span<const double> s) { out.push_back(s); });
  for_each_block(head, [&](std::string_view, std::span<const double> s) { out.push_back(s); });
  return out;
}

bool is_weight_block(std::string_view name) {
  return name == "embeddings" || name.ends_with(".W") || name.ends_with(".R") || name.ends_with("compress");
}

// Loss of one row with normalizer `total`, gradients added into `grads`.
double row_loss_and_gradients(const StackedModel& model, const SequenceBatch& batch, std::size_t row,
                              const DropoutMask* mask, double total, ModelGrads* grads) {
  const std::size_t len = batch.effective_length(row);
  if (len == 0) return 0.0;
  const std::span<const std::int32_t> ids(batch.char_ids[row].data(), len);
  const auto xs = embed_ids(model.embeddings, ids);
  const auto stack = stack_forward(model.net, xs, mask);

  std::vector<HeadRecord> recs;
  std::vector<Vector> probs;
  recs.reserve(len);
  probs.reserve(len);
  for (std::size_t t = 0; t < len; ++t) {
    recs.push_back(head_forward(model.head, stack.outputs[t]));
    probs.push_back(recs.back().probs);
  }

  std::vector<Vector> grad_logits;
  double loss = 0.0;
  // cross_entropy normalizes by the row's own count; rescaling to the batch
  // normalizer keeps per-position weighting across rows.
  std::size_t row_valid = 0;
  for (std::size_t t = 0; t < len; ++t) row_valid += batch.mask[row][t] ? 1 : 0;
  if (row_valid == 0) return 0.0;
  auto ce = cross_entropy(probs, std::span<const Tag>(batch.gold_tags[row].data(), len),
                          std::span<const std::uint8_t>(batch.mask[row].data(), len));
  const double factor = static_cast<double>(row_valid) / total;
  loss = ce.loss * factor;
  if (!grads) return loss;

  std::vector<Vector> grad_feats;
  grad_feats.reserve(len);
  for (std::size_t t = 0; t < len; ++t) {
    for (auto& g : ce.grad_logits[t]) g *= factor;
    grad_feats.push_back(head_backward_accumulate(model.head, stack.outputs[t], recs[t], ce.grad_logits[t], grads->head));
  }
  std::vector<Vector> grad_xs(len, Vector(model.dim()));
  stack_backward_accumulate(model.net, stack.tape, grad_feats, grads->net, grad_xs);
  for (std::size_t t = 0; t < len; ++t) {
    auto [it, inserted] = grads->embeddings.try_emplace(ids[t], model.dim());
    axpy(it->second.span(), 1.0, grad_xs[t].span());
  }
  return loss;
}

double run_batch(const StackedModel& model, const SequenceBatch& batch, const std::vector<DropoutMask>* masks,
                 ModelGrads* grads, std::size_t threads) {
  const std::size_t n = batch.char_ids.size();
  if (masks && masks->size() != n) throw std::invalid_argument("batch: one dropout mask per row required");
  const std::size_t total = batch.valid_positions();
  if (total == 0) throw std::invalid_argument("cross_entropy: batch has no unmasked positions");

  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<double> row_losses(n, 0.0);
  std::vector<ModelGrads> local;
  if (grads && workers > 1) {
    for (std::size_t w = 1; w < workers; ++w) {
      local.push_back(ModelGrads::zeros_like(model));
    }
  }
  run_workers(workers, [&](std::size_t w) {
    ModelGrads* target = grads ? (w == 0 ? grads : &local[w - 1]) : nullptr;
    auto [lo, hi] = chunk_range(n, workers, w);
    for (std::size_t r = lo; r < hi; ++r) {
      const DropoutMask* mask = masks ? &(*masks)[r] : nullptr;
      row_losses[r] = row_loss_and_gradients(model, batch, r, mask, static_cast<double>(total), target);
    }
  });
  for (auto& g : local) grads->add(g);

  double loss = 0.0;
  for (double l : row_losses) loss += l;
  return loss;
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (embed_dim == 0) fail("embed_dim must be positive");
  if (depth == 0) fail("depth must be at least 1");
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) fail("dropout keep probability must lie in (0, 1]");
  if (!(learning_rate >= 0.0)) fail("learning rate must be non-negative");
  if (batch_size == 0) fail("batch size must be positive");
  if (!(clip > 0.0)) fail("clip threshold must be positive");
  if (!(init_scale > 0.0)) fail("init scale must be positive");
  if (!(unk_replace_prob >= 0.0 && unk_replace_prob <= 1.0)) fail("unk replacement probability must lie in [0, 1]");
  if (threads == 0) fail("threads must be positive");
}

StackedModel StackedModel::zeros(Vocab vocab, const TrainConfig& config) {
  config.validate();
  StackedModel m;
  const std::size_t d = config.embed_dim;
  m.embeddings.m = Matrix(d, vocab.size());
  m.vocab = std::move(vocab);
  m.net = StackedBlstm::zeros(d, config.depth, config.peepholes);
  m.head = OutputHead::zeros(2 * d, config.head_hidden_dim());
  m.config = config;
  return m;
}

StackedModel StackedModel::create(Vocab vocab, const TrainConfig& config, Rng& rng) {
  StackedModel m = zeros(std::move(vocab), config);
  for_each_block(m, [&](std::string_view name, std::span<double> block) {
    if (is_weight_block(name)) fill_uniform(rng, block, config.init_scale);
  });
  for (auto& layer : m.net.layers) {
    layer.forward.f.b.fill(config.forget_bias);
    layer.backward.f.b.fill(config.forget_bias);
  }
  return m;
}

void StackedModel::validate() const {
  net.validate();
  head.validate();
  if (embeddings.vocab_size() != vocab.size()) {
    throw ShapeError("model: embedding table has " + std::to_string(embeddings.vocab_size()) + " columns for " +
                     std::to_string(vocab.size()) + " vocabulary entries");
  }
  if (embeddings.dim() != net.dim()) throw ShapeError("model: embedding dim differs from network dim");
  if (head.feature_dim() != 2 * net.dim()) throw ShapeError("model: head input must be twice the network dim");
}

void randomize_parameters(StackedModel& model, Rng& rng, double scale) {
  for_each_block(model, [&](std::string_view, std::span<double> block) { fill_uniform(rng, block, scale); });
}

ModelGrads ModelGrads::zeros_like(const StackedModel& model) {
  ModelGrads g;
  g.net = StackedBlstm::zeros(model.net.dim(), model.net.depth(), model.net.use_peepholes());
  g.head = OutputHead::zeros(model.head.feature_dim(), model.head.hidden_dim());
  return g;
}

void ModelGrads::clear() {
  embeddings.clear();
  for (auto block : dense_blocks(net, head)) std::fill(block.begin(), block.end(), 0.0);
  // Peephole buffers are skipped by the visitor when disabled; they stay zero.
}

void ModelGrads::add(const ModelGrads& other) {
  auto mine = dense_blocks(net, head);
  auto theirs = dense_blocks(other.net, other.head);
  for (std::size_t k = 0; k < mine.size(); ++k) axpy(mine[k], 1.0, theirs[k]);
  for (const auto& [id, g] : other.embeddings) {
    auto [it, inserted] = embeddings.try_emplace(id, g.size());
    axpy(it->second.span(), 1.0, g.span());
  }
}

void ModelGrads::scale(double factor) {
  for (auto block : dense_blocks(net, head)) {
    for (auto& x : block) x *= factor;
  }
  for (auto& [id, g] : embeddings) {
    for (auto& x : g) x *= factor;
  }
}

double ModelGrads::norm() const {
  double sq = 0.0;
  for (auto block : dense_blocks(net, head)) {
    for (double x : block) sq += x * x;
  }
  for (const auto& [id, g] : embeddings) {
    for (double x : g) sq += x * x;
  }
  return std::sqrt(sq);
}

double ModelGrads::max_abs() const {
  double m = 0.0;
  for (auto block : dense_blocks(net, head)) {
    for (double x : block) m = std::max(m, std::abs(x));
  }
  for (const auto& [id, g] : embeddings) {
    for (double x : g) m = std::max(m, std::abs(x));
  }
  return m;
}

std::size_t SequenceBatch::effective_length(std::size_t row) const {
  const auto& m = mask[row];
  std::size_t len = m.size();
  while (len > 0 && !m[len - 1]) --len;
  return len;
}

std::size_t SequenceBatch::valid_positions() const {
  std::size_t n = 0;
  for (const auto& m : mask) {
    for (auto v : m) n += v ? 1 : 0;
  }
  return n;
}

Example make_example(const Vocab& vocab, const Sentence& words) {
  Example ex;
  ex.tags = label_from_segmentation(words);
  ex.ids = char_ids(vocab, sentence_text(words));
  return ex;
}

SequenceBatch make_batch(std::span<const Example> examples, std::span<const std::size_t> indices) {
  SequenceBatch batch;
  batch.batch_size = indices.size();
  for (auto i : indices) batch.max_len = std::max(batch.max_len, examples[i].ids.size());
  for (auto i : indices) {
    const auto& ex = examples[i];
    if (ex.ids.size() != ex.tags.size()) throw std::invalid_argument("make_batch: ids and tags differ in length");
    auto ids = ex.ids;
    auto tags = ex.tags;
    std::vector<std::uint8_t> mask(ex.ids.size(), 1);
    ids.resize(batch.max_len, Vocab::kUnkId);
    tags.resize(batch.max_len, Tag::B);
    mask.resize(batch.max_len, 0);
    batch.char_ids.push_back(std::move(ids));
    batch.gold_tags.push_back(std::move(tags));
    batch.mask.push_back(std::move(mask));
  }
  return batch;
}

CrossEntropyResult cross_entropy(std::span<const Vector> probs, std::span<const Tag> gold,
                                 std::span<const std::uint8_t> mask) {
  if (probs.size() != gold.size() || probs.size() != mask.size()) {
    throw std::invalid_argument("cross_entropy: probabilities, gold tags and mask differ in length");
  }
  std::size_t n = 0;
  for (auto m : mask) n += m ? 1 : 0;
  if (n == 0) throw std::invalid_argument("cross_entropy: no unmasked positions");

  CrossEntropyResult result;
  result.grad_logits.assign(probs.size(), Vector(kNumTags));
  const double inv = 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    if (!mask[t]) continue;
    if (probs[t].size() != kNumTags) throw ShapeError("cross_entropy: probability vector " + shape_string(probs[t]));
    const auto g = static_cast<std::size_t>(gold[t]);
    sum -= std::log(probs[t][g]);
    for (std::size_t k = 0; k < kNumTags; ++k) {
      result.grad_logits[t][k] = (probs[t][k] - (k == g ? 1.0 : 0.0)) * inv;
    }
  }
  result.loss = sum * inv;
  return result;
}

double batch_loss_and_gradients(const StackedModel& model, const SequenceBatch& batch,
                                const std::vector<DropoutMask>* masks, ModelGrads& grads, std::size_t threads) {
  return run_batch(model, batch, masks, &grads, threads);
}

double batch_loss(const StackedModel& model, const SequenceBatch& batch, std::size_t threads) {
  return run_batch(model, batch, nullptr, nullptr, threads);
}

double clip_global_norm(ModelGrads& grads, double clip) {
  const double norm = grads.norm();
  if (norm > clip) grads.scale(clip / norm);
  return norm;
}

void apply_sgd(StackedModel& model, const ModelGrads& grads, double learning_rate) {
  auto params = dense_blocks(model.net, model.head);
  auto g = dense_blocks(grads.net, grads.head);
  for (std::size_t k = 0; k < params.size(); ++k) axpy(params[k], -learning_rate, g[k]);
  Matrix& emb = model.embeddings.m;
  for (const auto& [id, col] : grads.embeddings) {
    for (std::size_t r = 0; r < emb.rows(); ++r) emb(r, static_cast<std::size_t>(id)) -= learning_rate * col[r];
  }
}

Trainer::Trainer(StackedModel& model, const TrainConfig& config)
    : model_(model), config_(config), grads_(ModelGrads::zeros_like(model)) {
  config_.validate();
}

double Trainer::step(const SequenceBatch& batch, Rng& rng) {
  grads_.clear();
  std::vector<DropoutMask> masks;
  const bool dropout = config_.keep_prob < 1.0;
  if (dropout) {
    masks.reserve(batch.char_ids.size());
    for (std::size_t r = 0; r < batch.char_ids.size(); ++r) {
      masks.push_back(make_dropout_mask(rng, model_.net, batch.effective_length(r), config_.keep_prob));
    }
  }
  const double loss = batch_loss_and_gradients(model_, batch, dropout ? &masks : nullptr, grads_, config_.threads);
  if (!std::isfinite(loss)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "non-finite loss at step %zu (max |grad| = %g)", steps_, grads_.max_abs());
    throw TrainingError(buf);
  }
  last_norm_ = clip_global_norm(grads_, config_.clip);
  apply_sgd(model_, grads_, config_.learning_rate);
  ++steps_;
  return loss;
}

double train_step(StackedModel& model, const SequenceBatch& batch, const TrainConfig& config, Rng& rng) {
  Trainer trainer(model, config);
  return trainer.step(batch, rng);
}

std::vector<Tag> tag_sentence(const StackedModel& model, std::u32string_view text) {
  if (text.empty()) return {};
  const auto xs = embed(model.vocab, model.embeddings, text);
  const auto stack = stack_forward(model.net, xs);
  std::vector<Tag> tags;
  tags.reserve(text.size());
  for (auto& p : predict_tags(model.head, stack.outputs)) tags.push_back(p.tag);
  return tags;
}

Sentence segment_sentence(const StackedModel& model, std::u32string_view text) {
  return decode_segmentation(text, tag_sentence(model, text));
}

TaggingScore evaluate(const StackedModel& model, const Corpus& gold, std::size_t threads) {
  const std::size_t n = gold.size();
  Corpus pred;
  pred.sentences.resize(n);
  std::vector<std::size_t> correct_tags(n, 0);
  std::vector<std::size_t> total_tags(n, 0);
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
  run_workers(workers, [&](std::size_t w) {
    auto [lo, hi] = chunk_range(n, workers, w);
    for (std::size_t s = lo; s < hi; ++s) {
      const auto& words = gold.sentences[s];
      const auto text = sentence_text(words);
      const auto want = label_from_segmentation(words);
      const auto got = tag_sentence(model, text);
      for (std::size_t t = 0; t < want.size(); ++t) correct_tags[s] += want[t] == got[t] ? 1 : 0;
      total_tags[s] = want.size();
      pred.sentences[s] = decode_segmentation(text, got);
    }
  });
  TaggingScore score;
  std::size_t correct = 0, total = 0;
  for (std::size_t s = 0; s < n; ++s) {
    correct += correct_tags[s];
    total += total_tags[s];
  }
  score.tag_accuracy = total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  score.report = score_prf(gold, pred);
  return score;
}

std::string format_epoch_log(const EpochLog& log) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  char buf[200];
  std::snprintf(buf, sizeof buf, "epoch=%zu loss=%.6f dev_acc=%.6f dev_f1=%.6f seconds=%.3f", log.epoch, log.loss,
                log.dev_accuracy.value_or(nan), log.dev_f1.value_or(nan), log.seconds);
  return buf;
}

TrainResult train(StackedModel& model, const Corpus& corpus, const Corpus& dev, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch,
                  const std::function<void(const std::string&)>& warn) {
  config.validate();
  if (corpus.empty()) throw CorpusFormatError("train: empty training corpus");
  if (dev.empty() && warn) warn("dev set is empty; skipping per-epoch evaluation");

  std::vector<Example> examples;
  examples.reserve(corpus.size());
  for (const auto& s : corpus.sentences) examples.push_back(make_example(model.vocab, s));

  std::unordered_set<std::int32_t> singletons;
  for (const auto& [ch, count] : char_frequencies(corpus)) {
    if (count == 1 && model.vocab.contains(ch)) singletons.insert(model.vocab.id(ch));
  }

  // Separate stream from model initialization.
  Rng rng(config.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  Trainer trainer(model, config);
  TrainResult result;
  result.best = model;
  std::optional<double> best_f1;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();

    std::vector<std::size_t> order(examples.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    rng.shuffle(order);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return examples[a].ids.size() < examples[b].ids.size(); });
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t k = 0; k < order.size(); k += config.batch_size) {
      const auto end = std::min(order.size(), k + config.batch_size);
      batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(k), order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    rng.shuffle(batches);

    double loss_sum = 0.0;
    std::size_t positions = 0;
    for (const auto& idx : batches) {
      std::vector<Example> noisy;
      noisy.reserve(idx.size());
      for (auto i : idx) {
        Example ex = examples[i];
        if (config.unk_replace_prob > 0.0) {
          for (auto& id : ex.ids) {
            if (singletons.count(id) && rng.bernoulli(config.unk_replace_prob)) id = Vocab::kUnkId;
          }
        }
        noisy.push_back(std::move(ex));
      }
      std::vector<std::size_t> local(noisy.size());
      for (std::size_t k = 0; k < local.size(); ++k) local[k] = k;
      const auto batch = make_batch(noisy, local);
      const double loss = trainer.step(batch, rng);
      const auto n = batch.valid_positions();
      loss_sum += loss * static_cast<double>(n);
      positions += n;
    }

    EpochLog log;
    log.epoch = epoch;
    log.loss = positions ? loss_sum / static_cast<double>(positions) : 0.0;
    if (!dev.empty()) {
      const auto score = evaluate(model, dev, config.threads);
      log.dev_accuracy = score.tag_accuracy;
      log.dev_f1 = score.report.f1;
      if (!best_f1 || score.report.f1 > *best_f1) {
        best_f1 = score.report.f1;
        result.best = model;
        result.best_epoch = epoch;
      }
    } else {
      result.best = model;
      result.best_epoch = epoch;
    }
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

namespace {

template <typename Real>
GradCheckReport grad_check_with(const StackedModel& model, const Example& sentence, double tolerance) {
  const std::size_t idx = 0;
  const auto batch = make_batch(std::span<const Example>(&sentence, 1), std::span<const std::size_t>(&idx, 1));

  ModelGrads analytic = ModelGrads::zeros_like(model);
  batch_loss_and_gradients(model, batch, nullptr, analytic);

  detail::ReferenceLoss<Real> reference(model);
  auto& blocks = reference.blocks();
  GradCheckReport report;
  report.tolerance = tolerance;

  auto rel_error = [](double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8}); };
  const Real eps = static_cast<Real>(kGradCheckEpsilon);
  auto numeric = [&](Real& slot) {
    const Real saved = slot;
    slot = saved + eps;
    const Real plus = reference(sentence);
    slot = saved - eps;
    const Real minus = reference(sentence);
    slot = saved;
    return static_cast<double>((plus - minus) / (2 * eps));
  };

  const std::size_t vocab = model.vocab.size();
  GradCheckBlock emb{"embeddings", 0, 0.0};
  for (const auto& [id, g] : analytic.embeddings) {
    for (std::size_t r = 0; r < model.dim(); ++r) {
      const double n = numeric(blocks[0][r * vocab + static_cast<std::size_t>(id)]);
      emb.max_rel_error = std::max(emb.max_rel_error, rel_error(g[r], n));
      ++emb.checked;
    }
  }
  report.blocks.push_back(emb);

  std::vector<std::string> names;
  for_each_block(model.net, [&](std::string_view name, std::span<const double>) { names.emplace_back(name); });
  for_each_block(model.head, [&](std::string_view name, std::span<const double>) { names.emplace_back(name); });
  const auto grads = dense_blocks(analytic.net, analytic.head);
  for (std::size_t b = 0; b < names.size(); ++b) {
    GradCheckBlock block{names[b], 0, 0.0};
    auto& values = blocks[b + 1];
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double n = numeric(values[k]);
      block.max_rel_error = std::max(block.max_rel_error, rel_error(grads[b][k], n));
      ++block.checked;
    }
    report.blocks.push_back(std::move(block));
  }
  for (const auto& b : report.blocks) report.max_rel_error = std::max(report.max_rel_error, b.max_rel_error);
  return report;
}

}  // namespace

GradCheckReport grad_check(const StackedModel& model, const Example& sentence, double tolerance,
                           FdPrecision precision) {
  switch (precision) {
    case FdPrecision::kDouble:
      return grad_check_with<double>(model, sentence, tolerance);
    case FdPrecision::kQuad:
#ifdef BLSTMSEG_HAVE_QUADMATH
      return grad_check_with<__float128>(model, sentence, tolerance);
#endif
    case FdPrecision::kExtended:
      break;
  }
  return grad_check_with<long double>(model, sentence, tolerance);
}

bool have_quad_precision() {
#ifdef BLSTMSEG_HAVE_QUADMATH
  return true;
#else
  return false;
#endif
}

GradCheckInstance make_gradcheck_instance(std::size_t dim, std::size_t depth, std::size_t length, bool peepholes,
                                          std::uint64_t seed, double scale) {
  constexpr std::size_t kAlphabet = 6;
  Rng rng(seed);
  Vocab vocab;
  for (std::size_t k = 0; k < kAlphabet; ++k) vocab.add(static_cast<char32_t>(U'a' + k));

  TrainConfig config;
  config.embed_dim = dim;
  config.depth = depth;
  config.peepholes = peepholes;
  config.keep_prob = 1.0;
  config.seed = seed;

  GradCheckInstance inst{StackedModel::zeros(std::move(vocab), config), {}};
  randomize_parameters(inst.model, rng, scale);

  // Random words of 1..3 characters drawn from the whole table, unknown id included.
  Sentence words;
  std::size_t remaining = length;
  while (remaining > 0) {
    const std::size_t n = std::min<std::size_t>(remaining, 1 + rng.below(3));
    std::u32string w;
    for (std::size_t k = 0; k < n; ++k) w.push_back(static_cast<char32_t>(U'a' + rng.below(kAlphabet + 1)));
    words.push_back(std::move(w));
    remaining -= n;
  }
  // U'a' + kAlphabet is outside the vocabulary and maps to the unknown id.
  inst.sentence = make_example(inst.model.vocab, words);
  return inst;
}

}  // namespace blstmseg

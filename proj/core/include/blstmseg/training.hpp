#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "blstmseg/blstm.hpp"
#include "blstmseg/corpus.hpp"
#include "blstmseg/linalg.hpp"
#include "blstmseg/tagger.hpp"

namespace blstmseg {

// Raised when a training step produces a non-finite loss.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::size_t embed_dim = 200;
  std::size_t depth = 3;
  std::size_t hidden_dim = 0;  // output head hidden layer; 0 means embed_dim
  double keep_prob = 0.8;
  double learning_rate = 0.1;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  bool peepholes = false;
  double clip = 5.0;
  double init_scale = 0.05;
  double forget_bias = 1.0;
  // Chance that an occurrence of a training-set singleton is fed as unknown.
  double unk_replace_prob = 0.5;
  std::size_t threads = 1;

  std::size_t head_hidden_dim() const { return hidden_dim == 0 ? embed_dim : hidden_dim; }
  // Throws ConfigError.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Embeddings -> stacked BLSTM -> output head, plus the vocabulary and the
// configuration it was built with.
struct StackedModel {
  Vocab vocab;
  EmbeddingTable embeddings;
  StackedBlstm net;
  OutputHead head;
  TrainConfig config;

  // Weights (embeddings, W, R, compressions, head matrices) uniform in
  // [-init_scale, init_scale], drawn in canonical block order; biases and
  // peepholes zero except the forget-gate bias, which is forget_bias.
  static StackedModel create(Vocab vocab, const TrainConfig& config, Rng& rng);
  // Same shapes, every parameter zero.
  static StackedModel zeros(Vocab vocab, const TrainConfig& config);

  std::size_t dim() const { return embeddings.dim(); }
  void validate() const;

  friend bool operator==(const StackedModel&, const StackedModel&) = default;
};

// Canonical order: embeddings, then the stack, then the head.
template <typename Model, typename Fn>
  requires std::same_as<std::remove_const_t<Model>, StackedModel>
void for_each_block(Model& model, Fn&& fn) {
  fn(std::string_view("embeddings"), model.embeddings.m.span());
  for_each_block(model.net, fn);
  for_each_block(model.head, fn);
}

// Overwrites every parameter (including biases and enabled peepholes) with
// uniform draws in [-scale, scale]. Used for randomized test instances.
void randomize_parameters(StackedModel& model, Rng& rng, double scale);

// Gradient buffers shaped like a model. Embedding gradients are sparse: only
// columns seen in the batch are present.
struct ModelGrads {
  std::map<std::int32_t, Vector> embeddings;
  StackedBlstm net;
  OutputHead head;

  static ModelGrads zeros_like(const StackedModel& model);
  void clear();
  void add(const ModelGrads& other);
  void scale(double factor);
  double norm() const;
  double max_abs() const;
};

// Padded batch. Rows shorter than max_len are padded with the unknown id and mask 0.
struct SequenceBatch {
  std::vector<std::vector<std::int32_t>> char_ids;
  std::vector<std::vector<Tag>> gold_tags;
  std::vector<std::vector<std::uint8_t>> mask;
  std::size_t batch_size = 0;
  std::size_t max_len = 0;

  // Positions past the last valid one are never fed to the network.
  std::size_t effective_length(std::size_t row) const;
  std::size_t valid_positions() const;
};

struct Example {
  std::vector<std::int32_t> ids;
  std::vector<Tag> tags;
};

Example make_example(const Vocab& vocab, const Sentence& words);
SequenceBatch make_batch(std::span<const Example> examples, std::span<const std::size_t> indices);

struct CrossEntropyResult {
  double loss = 0.0;
  std::vector<Vector> grad_logits;
};

// Mean negative log-likelihood over unmasked positions; gradient with respect
// to the logits is (probs - onehot) / N there and zero elsewhere. Throws
// std::invalid_argument when nothing is unmasked.
CrossEntropyResult cross_entropy(std::span<const Vector> probs, std::span<const Tag> gold,
                                 std::span<const std::uint8_t> mask);

// Mean loss of a batch and its gradients (added into `grads`). `masks` holds
// one dropout mask per row, or is null for a deterministic pass.
double batch_loss_and_gradients(const StackedModel& model, const SequenceBatch& batch,
                                const std::vector<DropoutMask>* masks, ModelGrads& grads, std::size_t threads = 1);

// Loss only; no dropout.
double batch_loss(const StackedModel& model, const SequenceBatch& batch, std::size_t threads = 1);

// Scales grads so their global norm is at most clip; returns the pre-clip norm.
double clip_global_norm(ModelGrads& grads, double clip);

void apply_sgd(StackedModel& model, const ModelGrads& grads, double learning_rate);

// Reusable training-step state.
class Trainer {
 public:
  Trainer(StackedModel& model, const TrainConfig& config);

  // One forward/backward pass with fresh dropout masks, clipping and an SGD
  // update. Returns the pre-update mean loss.
  double step(const SequenceBatch& batch, Rng& rng);

  std::size_t steps_taken() const { return steps_; }
  const ModelGrads& last_gradients() const { return grads_; }
  double last_gradient_norm() const { return last_norm_; }

 private:
  StackedModel& model_;
  TrainConfig config_;
  ModelGrads grads_;
  std::size_t steps_ = 0;
  double last_norm_ = 0.0;
};

double train_step(StackedModel& model, const SequenceBatch& batch, const TrainConfig& config, Rng& rng);

// Inference.
std::vector<Tag> tag_sentence(const StackedModel& model, std::u32string_view text);
Sentence segment_sentence(const StackedModel& model, std::u32string_view text);

struct TaggingScore {
  double tag_accuracy = 0.0;
  EvalReport report;
};

// Tag accuracy and word-level P/R/F of the model's segmentation of `gold`.
TaggingScore evaluate(const StackedModel& model, const Corpus& gold, std::size_t threads = 1);

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::optional<double> dev_accuracy;
  std::optional<double> dev_f1;
  double seconds = 0.0;
};

// "epoch=<n> loss=<f> dev_acc=<f> dev_f1=<f> seconds=<f>"; dev fields are nan when skipped.
std::string format_epoch_log(const EpochLog& log);

struct TrainResult {
  StackedModel best;
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
};

// Trains `model` in place for config.epochs epochs of seeded, length-bucketed
// mini-batches and returns the snapshot with the best dev F1 (the final model
// when dev is empty). `on_epoch` receives each log entry as it is produced;
// `warn` receives diagnostics.
TrainResult train(StackedModel& model, const Corpus& corpus, const Corpus& dev, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = {},
                  const std::function<void(const std::string&)>& warn = {});

struct GradCheckBlock {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_rel_error <= tolerance; }
};

inline constexpr double kGradCheckEpsilon = 1e-5;

// Arithmetic used for the finite-difference losses. In plain double the
// rounding noise of a loss difference divided by 2*eps is around 1e-11, and in
// long double around 1e-14; either swamps the relative error of gradient
// entries near the 1e-8 floor of the metric. kQuad uses __float128 where the
// toolchain provides it and falls back to long double otherwise.
enum class FdPrecision { kQuad, kExtended, kDouble };

// True when kQuad really is 113-bit arithmetic.
bool have_quad_precision();

// Central differences against the analytic (double) gradients for every
// parameter block, restricted to the embedding columns the sentence touches.
// The numeric side uses a separate straight-line forward pass. Error metric is
// |a - n| / max(|a|, |n|, 1e-8). Dropout is disabled.
GradCheckReport grad_check(const StackedModel& model, const Example& sentence, double tolerance,
                           FdPrecision precision = FdPrecision::kQuad);

// A random model (every parameter uniform in [-scale, scale]) over a small
// alphabet plus a random gold-tagged sentence of `length` characters.
struct GradCheckInstance {
  StackedModel model;
  Example sentence;
};
GradCheckInstance make_gradcheck_instance(std::size_t dim, std::size_t depth, std::size_t length, bool peepholes,
                                          std::uint64_t seed, double scale = 0.5);

}  // namespace blstmseg

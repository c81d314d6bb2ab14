#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "blstmseg/corpus.hpp"
#include "blstmseg/model_io.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace blstmseg;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "cli_" + name; }

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = temp_path(name);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string strip_ascii_spaces(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c != ' ') out.push_back(c);
  }
  return out;
}

const std::string kToy = std::string(BLSTMSEG_TEST_DATA_DIR) + "/toy_100.utf8";

// Small trained model shared by the segment/eval tests.
class CliModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    model_path_ = temp_path("small.bin");
    const auto r = run_cli({"train", "--corpus", kToy, "--out", model_path_, "--embed-dim", "8", "--layers", "1",
                            "--epochs", "2", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static std::string model_path_;
};
std::string CliModel::model_path_;

}  // namespace

TEST(CliTrain, MissingCorpusIsUsageError) {
  const auto r = run_cli({"train", "--out", temp_path("x.bin")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--corpus"), std::string::npos) << r.err;
}

TEST(CliTrain, NoSubcommandOrUnknownFlagIsUsageError) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"train", "--corpus", kToy, "--out", temp_path("y.bin"), "--bogus"}).code, 2);
  EXPECT_EQ(run_cli({"train", "--corpus", kToy, "--out", temp_path("y.bin"), "--dropout-keep", "0"}).code, 2);
}

TEST(CliTrain, MissingCorpusFileFails) {
  const auto r = run_cli({"train", "--corpus", temp_path("does_not_exist"), "--out", temp_path("z.bin")});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliTrain, ZeroEpochsWritesInitialModel) {
  const auto path = temp_path("epochs0.bin");
  const auto r = run_cli({"train", "--corpus", kToy, "--out", path, "--epochs", "0", "--embed-dim", "4", "--layers",
                          "2", "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = load_model(path);
  EXPECT_EQ(m.dim(), 4u);
  EXPECT_EQ(m.config.depth, 2u);

  TrainConfig cfg;
  cfg.embed_dim = 4;
  cfg.depth = 2;
  cfg.epochs = 0;
  cfg.seed = 9;
  Rng rng(cfg.seed);
  const auto fresh = StackedModel::create(build_vocab(read_corpus_file(kToy)), cfg, rng);
  EXPECT_EQ(m, quantize_to_f32(fresh));
}

TEST(CliTrain, DefaultRunOnToyCorpus) {
  // Every flag at its default except the paths; a short slice keeps it quick.
  std::istringstream toy(read_file(kToy));
  std::string slice, line;
  for (int k = 0; k < 10 && std::getline(toy, line); ++k) slice += line + "\n";
  const auto corpus = write_file("toy10.utf8", slice);
  const auto model = temp_path("default.bin");
  const auto r = run_cli({"train", "--corpus", corpus, "--dev", corpus, "--out", model});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("epoch=10 "), std::string::npos) << r.out;

  const auto m = load_model(model);
  EXPECT_EQ(m.dim(), 200u);
  EXPECT_EQ(m.config.depth, 3u);

  std::string raw;
  for (const auto& s : read_corpus_file(corpus).sentences) raw += encode_utf8(sentence_text(s)) + "\n";
  const auto seg = run_cli({"segment", "--model", model}, raw);
  ASSERT_EQ(seg.code, 0) << seg.err;
  const auto parsed = parse_corpus_text(seg.out);
  EXPECT_EQ(parsed.size(), 10u);
}

TEST(CliTrain, AcceptsLargeConfiguration) {
  const auto path = temp_path("large.bin");
  const auto r = run_cli({"train", "--corpus", kToy, "--out", path, "--embed-dim", "200", "--layers", "3",
                          "--dropout-keep", "0.8", "--epochs", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = load_model(path);
  EXPECT_EQ(m.dim(), 200u);
  EXPECT_EQ(m.net.depth(), 3u);
  EXPECT_EQ(m.config.keep_prob, 0.8);
}

TEST_F(CliModel, EmptyLineGivesEmptyLine) {
  const auto r = run_cli({"segment", "--model", model_path_}, "\n中国\n\n");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::vector<std::string> got;
  for (std::string l; std::getline(lines, l);) got.push_back(l);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0], "");
  EXPECT_EQ(strip_ascii_spaces(got[1]), "中国");
  EXPECT_EQ(got[2], "");
}

TEST_F(CliModel, ConservesCharactersAndIsDeterministic) {
  std::string raw;
  for (const auto& s : read_corpus_file(kToy).sentences) raw += encode_utf8(sentence_text(s)) + "\n";
  raw += "未见过的字符串ＸＹＺ\n";
  const auto a = run_cli({"segment", "--model", model_path_}, raw);
  const auto b = run_cli({"segment", "--model", model_path_, "--threads", "3"}, raw);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(strip_ascii_spaces(a.out), raw);
  EXPECT_EQ(a.out.find("  "), std::string::npos);
}

TEST_F(CliModel, FileInputAndOutput) {
  const auto in = write_file("seg_in.txt", "中华人民共和国\n");
  const auto out = temp_path("seg_out.txt");
  const auto r = run_cli({"segment", "--model", model_path_, "--input", in, "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(strip_ascii_spaces(read_file(out)), "中华人民共和国\n");
}

TEST_F(CliModel, CorruptModelNamesSection) {
  auto bytes = read_file(model_path_);
  auto magic = bytes;
  magic[0] = 'X';
  auto r = run_cli({"segment", "--model", write_file("bad_magic.bin", magic)}, "中\n");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("magic"), std::string::npos) << r.err;

  r = run_cli({"segment", "--model", write_file("truncated.bin", bytes.substr(0, bytes.size() - 10))}, "中\n");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("payload"), std::string::npos) << r.err;

  r = run_cli({"eval", "--gold", kToy, "--model", write_file("bad_magic2.bin", magic)});
  EXPECT_EQ(r.code, 3);
}

TEST(CliEval, IdenticalFilesScoreOne) {
  const auto r = run_cli({"eval", "--gold", kToy, "--pred", kToy});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("P=1.000000 R=1.000000 F=1.000000", 0), 0u) << r.out;
}

TEST(CliEval, WorkedExample) {
  const auto gold = write_file("gold.txt", "ab\nc de\n");
  const auto pred = write_file("pred.txt", "ab\ncd e\n");
  const auto r = run_cli({"eval", "--gold", gold, "--pred", pred});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "P=0.333333 R=0.333333 F=0.333333 correct=1 gold=3 pred=3\n");
}

TEST(CliEval, MismatchExitsFour) {
  const auto gold = write_file("gold_m.txt", "ab\nc de\n");
  EXPECT_EQ(run_cli({"eval", "--gold", gold, "--pred", write_file("pred_m1.txt", "ab\n")}).code, 4);
  EXPECT_EQ(run_cli({"eval", "--gold", gold, "--pred", write_file("pred_m2.txt", "ab\ncd f\n")}).code, 4);
}

TEST(CliEval, NeedsPredOrModel) {
  EXPECT_EQ(run_cli({"eval", "--gold", kToy}).code, 2);
  EXPECT_EQ(run_cli({"eval", "--gold", kToy, "--pred", kToy, "--model", "m.bin"}).code, 2);
}

TEST_F(CliModel, ModelModeEqualsSegmentThenEval) {
  const auto direct = run_cli({"eval", "--gold", kToy, "--model", model_path_});
  ASSERT_EQ(direct.code, 0) << direct.err;

  std::string raw;
  for (const auto& s : read_corpus_file(kToy).sentences) raw += encode_utf8(sentence_text(s)) + "\n";
  const auto seg = run_cli({"segment", "--model", model_path_}, raw);
  ASSERT_EQ(seg.code, 0) << seg.err;
  const auto two_step = run_cli({"eval", "--gold", kToy, "--pred", write_file("two_step.txt", seg.out)});
  ASSERT_EQ(two_step.code, 0) << two_step.err;
  EXPECT_EQ(direct.out, two_step.out);

  const auto with_input = run_cli({"eval", "--gold", kToy, "--model", model_path_, "--input", write_file("raw.txt", raw)});
  EXPECT_EQ(with_input.out, direct.out);
}

TEST(CliGradCheck, PassesOnDefaults) {
  const auto r = run_cli({"gradcheck", "--embed-dim", "3", "--layers", "2", "--length", "4"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("result=PASS"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("block=embeddings"), std::string::npos) << r.out;
  EXPECT_EQ(run_cli({"gradcheck", "--fd-precision", "octuple"}).code, 2);
}

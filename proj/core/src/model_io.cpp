#include "blstmseg/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "json.hpp"

namespace blstmseg {

namespace {

using nlohmann::json;

constexpr std::size_t kMagicSize = sizeof(kModelMagic) - 1;

json config_to_json(const TrainConfig& c) {
  return json{{"embed_dim", c.embed_dim},
              {"depth", c.depth},
              {"hidden_dim", c.hidden_dim},
              {"keep_prob", c.keep_prob},
              {"learning_rate", c.learning_rate},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"peepholes", c.peepholes},
              {"clip", c.clip},
              {"init_scale", c.init_scale},
              {"forget_bias", c.forget_bias},
              {"unk_replace_prob", c.unk_replace_prob},
              {"threads", c.threads}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.depth = j.at("depth").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.keep_prob = j.at("keep_prob").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.peepholes = j.at("peepholes").get<bool>();
  c.clip = j.at("clip").get<double>();
  c.init_scale = j.at("init_scale").get<double>();
  c.forget_bias = j.at("forget_bias").get<double>();
  c.unk_replace_prob = j.at("unk_replace_prob").get<double>();
  c.threads = j.at("threads").get<std::size_t>();
  return c;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string read_exact(std::istream& in, std::size_t n) {
  std::string buf(n, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(n));
  buf.resize(static_cast<std::size_t>(in.gcount()));
  return buf;
}

}  // namespace

void write_model(const StackedModel& model, std::ostream& out) {
  model.validate();
  json blocks = json::array();
  std::size_t total = 0;
  std::string payload;
  for_each_block(model, [&](std::string_view name, std::span<const double> block) {
    blocks.push_back(json{{"name", std::string(name)}, {"floats", block.size()}});
    total += block.size();
    for (double x : block) put_u32(payload, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
  });

  const json header{{"format_version", kModelFormatVersion},
                    {"embed_dim", model.dim()},
                    {"depth", model.net.depth()},
                    {"hidden_dim", model.head.hidden_dim()},
                    {"peepholes", model.net.use_peepholes()},
                    {"vocab", encode_utf8(model.vocab.known_characters())},
                    {"config", config_to_json(model.config)},
                    {"blocks", blocks},
                    {"payload_floats", total}};
  const std::string header_text = header.dump();

  std::string bytes(kModelMagic, kMagicSize);
  put_u32(bytes, static_cast<std::uint32_t>(header_text.size()));
  bytes += header_text;
  bytes += payload;
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelFormatError("io", "write failed");
}

StackedModel read_model(std::istream& in) {
  const std::string magic = read_exact(in, kMagicSize);
  if (magic != std::string_view(kModelMagic, kMagicSize)) {
    throw ModelFormatError("magic", "not a BLSTMSEG1 model file");
  }
  const std::string len_bytes = read_exact(in, 4);
  if (len_bytes.size() != 4) throw ModelFormatError("header", "missing header length");
  const std::uint32_t header_len = get_u32(reinterpret_cast<const unsigned char*>(len_bytes.data()));
  const std::string header_text = read_exact(in, header_len);
  if (header_text.size() != header_len) {
    throw ModelFormatError("header", "truncated: expected " + std::to_string(header_len) + " bytes, got " +
                                         std::to_string(header_text.size()));
  }

  json header;
  StackedModel model;
  std::size_t expected_floats = 0;
  std::vector<std::pair<std::string, std::size_t>> declared;
  try {
    header = json::parse(header_text);
    const int version = header.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelFormatError("header", "unsupported format version " + std::to_string(version));
    }
    TrainConfig config = config_from_json(header.at("config"));
    config.embed_dim = header.at("embed_dim").get<std::size_t>();
    config.depth = header.at("depth").get<std::size_t>();
    // The snapshot may say 0 ("same as embed_dim"); the top-level field is the resolved size.
    const auto hidden = header.at("hidden_dim").get<std::size_t>();
    if (config.head_hidden_dim() != hidden) config.hidden_dim = hidden;
    config.peepholes = header.at("peepholes").get<bool>();

    Vocab vocab;
    for (char32_t ch : decode_utf8(header.at("vocab").get<std::string>())) {
      if (vocab.contains(ch)) throw ModelFormatError("header", "duplicate vocabulary character");
      vocab.add(ch);
    }
    model = StackedModel::zeros(std::move(vocab), config);
    expected_floats = header.at("payload_floats").get<std::size_t>();
    for (const auto& b : header.at("blocks")) {
      declared.emplace_back(b.at("name").get<std::string>(), b.at("floats").get<std::size_t>());
    }
  } catch (const ModelFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelFormatError("header", e.what());
  }

  std::size_t total = 0;
  std::size_t k = 0;
  bool layout_ok = true;
  for_each_block(model, [&](std::string_view name, std::span<const double> block) {
    if (k >= declared.size() || declared[k].first != name || declared[k].second != block.size()) layout_ok = false;
    total += block.size();
    ++k;
  });
  if (!layout_ok || k != declared.size() || total != expected_floats) {
    throw ModelFormatError("header", "block layout does not match the declared dimensions");
  }

  const std::size_t expected_bytes = total * 4;
  const std::string payload{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (payload.size() < expected_bytes) {
    throw ModelFormatError("payload", "truncated: expected " + std::to_string(expected_bytes) + " bytes, got " +
                                          std::to_string(payload.size()));
  }
  if (payload.size() > expected_bytes) {
    throw ModelFormatError("payload", "trailing data: expected " + std::to_string(expected_bytes) + " bytes, got " +
                                          std::to_string(payload.size()));
  }

  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for_each_block(model, [&](std::string_view name, std::span<double> block) {
    for (auto& x : block) {
      const float f = std::bit_cast<float>(get_u32(p));
      if (!std::isfinite(f)) throw ModelFormatError("payload", "non-finite value in block " + std::string(name));
      x = static_cast<double>(f);
      p += 4;
    }
  });
  return model;
}

void save_model(const StackedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelFormatError("io", "cannot open " + path + " for writing");
  write_model(model, out);
}

StackedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("io", "cannot open " + path);
  return read_model(in);
}

StackedModel quantize_to_f32(const StackedModel& model) {
  StackedModel q = model;
  for_each_block(q, [](std::string_view, std::span<double> block) {
    for (auto& x : block) x = static_cast<double>(static_cast<float>(x));
  });
  return q;
}

}  // namespace blstmseg

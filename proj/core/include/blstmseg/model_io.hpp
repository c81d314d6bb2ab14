#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "blstmseg/training.hpp"

namespace blstmseg {

// Model file layout (version 1):
//
//   offset 0   9 bytes   magic "BLSTMSEG1"
//   offset 9   4 bytes   header length H, uint32 little-endian
//   offset 13  H bytes   UTF-8 JSON header:
//                          format_version, embed_dim, depth, hidden_dim,
//                          peepholes, vocab (known characters in id order
//                          1..|C|-1 as one string), config (training
//                          configuration snapshot), blocks ([{name, floats}]
//                          in payload order), payload_floats
//   offset 13+H          payload: IEEE-754 binary32 little-endian values,
//                        row-major, blocks in canonical order: embeddings
//                        (d x |C|); per layer forward LSTM then backward
//                        LSTM, each as z{W,R,b} i{W,R,b[,p]} f{W,R,b[,p]}
//                        o{W,R,b[,p]}, then the layer's d x 2d compression
//                        (not on the top layer); head hidden W, hidden b,
//                        out W, out b.
//
// Nothing may follow the payload. Parameters are rounded to binary32 on save
// and widened back to double on load.
class ModelFormatError : public std::runtime_error {
 public:
  ModelFormatError(std::string section, const std::string& message)
      : std::runtime_error(section + ": " + message), section_(std::move(section)) {}
  const std::string& section() const { return section_; }

 private:
  std::string section_;
};

inline constexpr char kModelMagic[] = "BLSTMSEG1";
inline constexpr int kModelFormatVersion = 1;

void write_model(const StackedModel& model, std::ostream& out);
StackedModel read_model(std::istream& in);

void save_model(const StackedModel& model, const std::string& path);
StackedModel load_model(const std::string& path);

// Copy of `model` with every parameter rounded through binary32.
StackedModel quantize_to_f32(const StackedModel& model);

}  // namespace blstmseg

// Token encoders: document tokens -> T x d contextual vectors.
#pragma once

#include "coref/autodiff.hpp"
#include "coref/corpus.hpp"
#include "coref/parameters.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coref {

enum class EncoderKind { Pretrained, Toy };

std::string_view to_string(EncoderKind kind);
/// "toy" or "pretrained".
EncoderKind parse_encoder_kind(std::string_view text);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::Toy;
  int dim = 32;
  int vocab_size = 5000;
  int window = 1;  // toy context radius
  std::uint64_t seed = 1;
  int segment_length = 512;  // pretrained kind only
};

/// Raised when an encoder kind cannot run in this environment.
struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void validate(const EncoderConfig& cfg);

/// Token -> id map; id 0 is reserved for out-of-vocabulary tokens.
class Vocabulary {
 public:
  Vocabulary() : tokens_{"<unk>"} {}
  /// Most frequent tokens first (ties alphabetical), capped at max_size entries including <unk>.
  static Vocabulary build(const std::vector<Document>& docs, int max_size);
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  int id(const std::string& token) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

struct ContextualEmbeddings {
  Matrix values;  // T x d, document token order
};

/// Non-overlapping [begin, end) windows of at most `length` tokens.
std::vector<std::pair<int, int>> segment_windows(int token_count, int length);

class Encoder {
 public:
  Encoder() = default;
  /// Registers the toy parameters (no-op for the pretrained kind).
  Encoder(const EncoderConfig& cfg, Vocabulary vocab, ParameterStore& store);

  ad::Var encode(ad::Tape& tape, ParameterStore& store, const Document& doc) const;

  const EncoderConfig& config() const { return cfg_; }
  const Vocabulary& vocabulary() const { return vocab_; }

 private:
  ad::Var encode_pretrained(ad::Tape& tape, const Document& doc) const;

  EncoderConfig cfg_;
  Vocabulary vocab_;
  std::size_t embedding_ = 0, mix_weight_ = 0, mix_bias_ = 0;
};

/// Forward pass without gradient bookkeeping.
ContextualEmbeddings encode(const Document& doc, const Encoder& encoder, ParameterStore& store);

}  // namespace coref

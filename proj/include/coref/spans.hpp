// Candidate spans and their vector representation g = [x_start; x_end; soft head; width].
#pragma once

#include "coref/autodiff.hpp"
#include "coref/corpus.hpp"
#include "coref/encoder.hpp"
#include "coref/parameters.hpp"

#include <random>
#include <vector>

namespace coref {

struct SpanCandidate {
  Span span;
  int sentence = 0;

  bool operator==(const SpanCandidate&) const = default;
};

/// Exact buckets for 1..4, then 5-7, 8-15, 16-31, 32+. Used for widths and distances.
int width_bucket(int width);
inline constexpr int kNumWidthBuckets = 8;

/// Every within-sentence span of width <= max_span_width, in (start, end) order.
std::vector<SpanCandidate> enumerate_spans(const Document& doc, int max_span_width);

struct SpanRepresentation {
  Vector g;
  SpanCandidate source;
  Vector head_attention;  // one weight per token of the span
};

class SpanEncoder {
 public:
  SpanEncoder() = default;
  SpanEncoder(ParameterStore& store, int token_dim, int feature_dim, std::mt19937_64& rng);

  /// S x output_dim() matrix, one row per candidate.
  ad::Var represent(ad::Tape& tape, ParameterStore& store, ad::Var tokens,
                    const std::vector<SpanCandidate>& spans) const;
  /// Per-token head scores (T x 1) the attention is computed from.
  ad::Var head_scores(ad::Tape& tape, ParameterStore& store, ad::Var tokens) const;

  int output_dim() const { return 3 * token_dim_ + feature_dim_; }
  int token_dim() const { return token_dim_; }
  int feature_dim() const { return feature_dim_; }

 private:
  int token_dim_ = 0;
  int feature_dim_ = 0;
  std::size_t head_weight_ = 0, width_embedding_ = 0;
};

std::vector<SpanRepresentation> represent_spans(const ContextualEmbeddings& emb, const std::vector<SpanCandidate>& spans,
                                                const SpanEncoder& encoder, ParameterStore& store);
SpanRepresentation represent_span(const ContextualEmbeddings& emb, const SpanCandidate& span,
                                  const SpanEncoder& encoder, ParameterStore& store);

}  // namespace coref

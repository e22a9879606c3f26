#include "coref/spans.hpp"

#include <stdexcept>

namespace coref {

int width_bucket(int width) {
  if (width <= 4) return std::max(width, 1) - 1;
  if (width <= 7) return 4;
  if (width <= 15) return 5;
  if (width <= 31) return 6;
  return 7;
}

std::vector<SpanCandidate> enumerate_spans(const Document& doc, int max_span_width) {
  if (max_span_width < 1) throw std::invalid_argument("max_span_width must be >= 1");
  std::vector<SpanCandidate> out;
  int offset = 0;
  for (int s = 0; s < static_cast<int>(doc.sentences.size()); ++s) {
    const int n = static_cast<int>(doc.sentences[s].size());
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n && j - i + 1 <= max_span_width; ++j) out.push_back(SpanCandidate{{offset + i, offset + j}, s});
    offset += n;
  }
  return out;
}

SpanEncoder::SpanEncoder(ParameterStore& store, int token_dim, int feature_dim, std::mt19937_64& rng)
    : token_dim_(token_dim), feature_dim_(feature_dim) {
  head_weight_ = store.add("span.head.weight", glorot(token_dim, 1, rng), ParamGroup::Coreference);
  width_embedding_ =
      store.add("span.width_embedding", glorot(kNumWidthBuckets, feature_dim, rng), ParamGroup::Coreference);
}

ad::Var SpanEncoder::head_scores(ad::Tape& tape, ParameterStore& store, ad::Var tokens) const {
  return ad::matmul(tokens, tape.parameter(store.at(head_weight_)));
}

ad::Var SpanEncoder::represent(ad::Tape& tape, ParameterStore& store, ad::Var tokens,
                               const std::vector<SpanCandidate>& spans) const {
  ad::IndexList starts, ends, buckets;
  std::vector<ad::SpanBounds> bounds;
  for (const auto& c : spans) {
    starts.push_back(c.span.start);
    ends.push_back(c.span.end);
    buckets.push_back(width_bucket(c.span.width()));
    bounds.push_back({c.span.start, c.span.end});
  }
  ad::Var head = ad::span_attention(tokens, head_scores(tape, store, tokens), std::move(bounds));
  ad::Var width = ad::gather_rows(tape.parameter(store.at(width_embedding_)), std::move(buckets));
  return ad::hcat({ad::gather_rows(tokens, std::move(starts)), ad::gather_rows(tokens, std::move(ends)), head, width});
}

std::vector<SpanRepresentation> represent_spans(const ContextualEmbeddings& emb, const std::vector<SpanCandidate>& spans,
                                                const SpanEncoder& encoder, ParameterStore& store) {
  ad::Tape tape;
  ad::Var tokens = tape.constant(emb.values);
  const Matrix g = encoder.represent(tape, store, tokens, spans).value();
  std::vector<ad::SpanBounds> bounds;
  for (const auto& c : spans) bounds.push_back({c.span.start, c.span.end});
  auto alphas = ad::span_attention_weights(encoder.head_scores(tape, store, tokens).value(), bounds);
  std::vector<SpanRepresentation> out;
  out.reserve(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i)
    out.push_back(SpanRepresentation{g.row(static_cast<Eigen::Index>(i)).transpose(), spans[i], std::move(alphas[i])});
  return out;
}

SpanRepresentation represent_span(const ContextualEmbeddings& emb, const SpanCandidate& span,
                                  const SpanEncoder& encoder, ParameterStore& store) {
  return represent_spans(emb, {span}, encoder, store).front();
}

}  // namespace coref

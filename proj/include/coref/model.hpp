// The full span-ranking model: encoder -> span representations -> dual unary
// scorer -> pruning -> coarse shortlist -> pairwise scores, with the three
// auxiliary heads on the pruned spans.
#pragma once

#include "coref/autodiff.hpp"
#include "coref/corpus.hpp"
#include "coref/encoder.hpp"
#include "coref/mtl_loss.hpp"
#include "coref/parameters.hpp"
#include "coref/scoring.hpp"
#include "coref/spans.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace coref {

struct ModelConfig {
  EncoderConfig encoder;
  ScorerConfig scorer;
  int max_span_width = 30;
  double prune_ratio = 0.4;
  int max_antecedents = 50;
  std::uint64_t seed = 1;

  bool operator==(const ModelConfig&) const;
};

void validate(const ModelConfig& cfg);

/// Discrete choices of a forward pass. Reusing them pins the pass to a fixed
/// structure, which makes the loss a smooth function of the parameters.
struct ForwardStructure {
  std::vector<int> kept;                     // indices into the candidate list
  std::vector<std::vector<int>> shortlists;  // per kept span, indices into kept
};

struct ForwardOptions {
  TaskWeights weights;
  /// Build the auxiliary heads and their losses. When false the pass is the
  /// coreference-only objective.
  bool auxiliary = true;
  /// Dropout source; no dropout when null.
  std::mt19937_64* rng = nullptr;
  const ForwardStructure* structure = nullptr;
};

struct ForwardResult {
  ad::Var total;
  ad::Var coref;
  AuxLossVars aux;  // invalid vars when auxiliary is off
  TaskLosses losses;

  std::vector<SpanCandidate> candidates;
  ForwardStructure structure;
  std::vector<Span> kept_spans;
  std::vector<double> kept_mention_scores;  // s_m of each kept span
  std::vector<AntecedentScoreRow> rows;     // one per kept span, indices into kept
  HeadLogits logits;                        // empty when auxiliary is off
  AuxiliaryLabels labels;
};

class CorefModel {
 public:
  CorefModel(const ModelConfig& cfg, Vocabulary vocab, std::vector<std::string> genres);

  ForwardResult forward(ad::Tape& tape, const Document& doc, const ForwardOptions& opts);

  ParameterStore& parameters() { return store_; }
  const ParameterStore& parameters() const { return store_; }
  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocabulary() const { return encoder_.vocabulary(); }
  /// Known genres; index 0 is the fallback for unseen ones.
  const std::vector<std::string>& genres() const { return genres_; }
  int genre_id(const std::string& genre) const;

  const Encoder& encoder() const { return encoder_; }
  const SpanEncoder& span_encoder() const { return span_encoder_; }
  const UnaryScorer& unary_scorer() const { return unary_; }
  const PairScorer& pair_scorer() const { return pair_; }
  const AuxiliaryHeads& auxiliary_heads() const { return heads_; }

 private:
  ModelConfig cfg_;
  std::vector<std::string> genres_;
  ParameterStore store_;
  Encoder encoder_;
  SpanEncoder span_encoder_;
  UnaryScorer unary_;
  PairScorer pair_;
  AuxiliaryHeads heads_;
};

/// Genre list for a corpus, "<unk>" first.
std::vector<std::string> collect_genres(const std::vector<Document>& docs);

}  // namespace coref

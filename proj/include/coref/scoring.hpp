// Mention and antecedent scoring.
//
//   s_m(i)   = beta1 * s_markable(i) + beta2 * s_mention(i)
//   s(i, j)  = s_m(i) + s_m(j) + s_c(i, j)   for a real antecedent j
//   s(i, eps) = 0
//
// s_c is the bilinear coarse score g_i' M g_j plus the pairwise FFNN over
// [g_i; g_j; g_i * g_j; phi(i, j)]. The coarse score alone picks the top-K
// shortlist of antecedents.
#pragma once

#include "coref/autodiff.hpp"
#include "coref/corpus.hpp"
#include "coref/parameters.hpp"
#include "coref/spans.hpp"

#include <random>
#include <string>
#include <vector>

namespace coref {

struct UnaryScore {
  double markable = 0.0;
  double mention = 0.0;
  double combined = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// Scores of span i against its shortlisted antecedents; s(i, eps) is
/// implicitly 0 and is not stored.
struct AntecedentScoreRow {
  int span = 0;
  std::vector<int> candidates;  // strictly smaller span indices
  std::vector<double> scores;   // s(i, j) per candidate

  static constexpr double epsilon_score() { return 0.0; }
};

struct ScorerConfig {
  int ffnn_hidden = 1000;
  int ffnn_layers = 2;
  int feature_dim = 20;
  double dropout = 0.0;
};

class UnaryScorer {
 public:
  struct Output {
    ad::Var markable;  // S x 1
    ad::Var mention;   // S x 1
    ad::Var combined;  // S x 1
  };

  UnaryScorer() = default;
  UnaryScorer(ParameterStore& store, int span_dim, const ScorerConfig& cfg, std::mt19937_64& rng);

  Output apply(ad::Tape& tape, ParameterStore& store, ad::Var spans, double dropout = 0.0,
               std::mt19937_64* rng = nullptr) const;

  const Ffnn& markable_ffnn() const { return markable_; }
  const Ffnn& mention_ffnn() const { return mention_; }
  std::size_t beta1_index() const { return beta1_; }
  std::size_t beta2_index() const { return beta2_; }

 private:
  Ffnn markable_, mention_;
  std::size_t beta1_ = 0, beta2_ = 0;
};

std::vector<UnaryScore> unary_scores(const std::vector<SpanRepresentation>& reps, const UnaryScorer& scorer,
                                     ParameterStore& store);

/// Keeps the ceil(ratio * token_count) best spans by combined score, then drops
/// (greedily, best first) any kept span partially crossing a better kept span.
/// Returned indices are sorted by span position.
std::vector<int> prune_spans(const std::vector<double>& scores, const std::vector<Span>& spans, int token_count,
                             double ratio);
std::vector<int> prune_spans(const std::vector<UnaryScore>& scores, const std::vector<Span>& spans, int token_count,
                             double ratio);

/// Per-span context the pair features are computed from.
struct PairContext {
  std::vector<std::string> speakers;  // speaker of each span's first token
  int genre = 0;
};

/// Same-speaker flag; empty or "-" speakers never match.
bool same_speaker(const std::string& a, const std::string& b);

struct CoarseResult {
  Matrix scores;                               // n x n, -inf where j >= i
  std::vector<std::vector<int>> shortlists;    // ascending antecedent indices
};

class PairScorer {
 public:
  PairScorer() = default;
  PairScorer(ParameterStore& store, int span_dim, int num_genres, const ScorerConfig& cfg, std::mt19937_64& rng);

  /// s_m(i) + s_m(j) + g_i' M g_j for all j < i, and the top-k shortlist per i.
  CoarseResult coarse(const ParameterStore& store, const Matrix& spans, const Vector& mention_scores, int k) const;

  /// s_c(i, j) for the listed pairs (P x 1).
  ad::Var pairwise(ad::Tape& tape, ParameterStore& store, ad::Var spans, const ad::IndexList& anaphors,
                   const ad::IndexList& antecedents, const PairContext& ctx, double dropout = 0.0,
                   std::mt19937_64* rng = nullptr) const;

  /// Full s(i, j) for the listed pairs (P x 1).
  ad::Var full(ad::Tape& tape, ParameterStore& store, ad::Var spans, ad::Var mention_scores,
               const ad::IndexList& anaphors, const ad::IndexList& antecedents, const PairContext& ctx,
               double dropout = 0.0, std::mt19937_64* rng = nullptr) const;

  std::size_t bilinear_index() const { return bilinear_; }
  const Ffnn& ffnn() const { return ffnn_; }

 private:
  Ffnn ffnn_;
  std::size_t bilinear_ = 0, distance_ = 0, speaker_ = 0, genre_ = 0;
  int num_genres_ = 1;
};

/// Antecedent-distance bucket for kept-span indices i > j.
int distance_bucket(int anaphor, int antecedent);

/// Value-level shortlist for already represented spans.
CoarseResult coarse_scores(const std::vector<SpanRepresentation>& reps, const std::vector<UnaryScore>& unary,
                           const PairScorer& scorer, const ParameterStore& store, int k);

/// Value-level score row for span i over its shortlist.
AntecedentScoreRow full_scores(int i, const std::vector<int>& shortlist, const std::vector<SpanRepresentation>& reps,
                               const std::vector<UnaryScore>& unary, const PairContext& ctx, const PairScorer& scorer,
                               ParameterStore& store);

}  // namespace coref

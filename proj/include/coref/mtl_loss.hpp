// Auxiliary mention heads and the weighted multi-task objective
//   L_total = W_coref * L_coref + W_sg * L_sg + W_ent * L_ent + W_infs * L_infs.
//
// All auxiliary supervision applies to pruned spans only. Mention detection
// ("singleton" head) is a yes/no decision over every kept span; entity type and
// information status are trained on kept spans that match a gold mention whose
// label is known.
#pragma once

#include "coref/autodiff.hpp"
#include "coref/corpus.hpp"
#include "coref/parameters.hpp"
#include "coref/scoring.hpp"
#include "coref/spans.hpp"

#include <optional>
#include <random>
#include <vector>

namespace coref {

struct TaskWeights {
  double coref = 1.0;
  double singleton = 0.0;
  double entity_type = 0.0;
  double info_status = 0.0;

  bool any_auxiliary() const { return singleton > 0.0 || entity_type > 0.0 || info_status > 0.0; }
  bool operator==(const TaskWeights&) const = default;
};

/// Throws std::invalid_argument unless all weights are >= 0 and coref > 0.
void validate(const TaskWeights& w);

struct AuxiliaryLabels {
  std::vector<bool> is_mention;
  std::vector<std::optional<EntityType>> entity_type;
  std::vector<std::optional<InfoStatus>> info_status;
};

/// Exact-boundary match of each kept span against the gold mentions.
AuxiliaryLabels assign_aux_labels(const std::vector<Span>& kept, const Document& doc);

inline constexpr int kSingletonClasses = 2;  // 0 = not a mention, 1 = mention

/// Mention detection reads the mention-candidate score s_mention of the unary
/// scorer: its logits are [0, s_mention(i)], so this supervision shapes the
/// score used for pruning. Entity type and information status have their own
/// feed-forward networks.
class AuxiliaryHeads {
 public:
  struct Logits {
    ad::Var singleton;    // n x 2
    ad::Var entity_type;  // n x 10
    ad::Var info_status;  // n x 6
  };

  AuxiliaryHeads() = default;
  AuxiliaryHeads(ParameterStore& store, int span_dim, const ScorerConfig& cfg, std::mt19937_64& rng);

  /// `mention_scores` is the n x 1 s_mention column of the same spans.
  Logits apply(ad::Tape& tape, ParameterStore& store, ad::Var spans, ad::Var mention_scores) const;

  const Ffnn& entity_type_ffnn() const { return entity_type_; }
  const Ffnn& info_status_ffnn() const { return info_status_; }

 private:
  Ffnn entity_type_, info_status_;
};

struct HeadLogits {
  Matrix singleton;
  Matrix entity_type;
  Matrix info_status;
};

HeadLogits head_logits(const std::vector<SpanRepresentation>& reps, const UnaryScorer& unary,
                       const AuxiliaryHeads& heads, ParameterStore& store);

/// Where every (anaphor, candidate) pair lands in the n x (1 + K) antecedent
/// matrix (column 0 is epsilon) and which entries are valid / gold.
struct AntecedentLayout {
  ad::IndexList rows, cols;
  Eigen::Index width = 1;
  std::vector<char> valid, gold;  // row-major n x width
};

/// A candidate is gold when it shares a gold cluster with the anaphor;
/// epsilon is gold exactly when no candidate is.
AntecedentLayout antecedent_layout(const std::vector<std::vector<int>>& shortlists, const std::vector<Span>& kept,
                                   const std::vector<Cluster>& gold_clusters);

/// Marginal log-likelihood loss over the antecedent rows.
ad::Var coref_loss(ad::Var pair_scores, const AntecedentLayout& layout, Eigen::Index kept_count);
double coref_loss(const std::vector<AntecedentScoreRow>& rows, const std::vector<Span>& kept,
                  const std::vector<Cluster>& gold_clusters);

struct AuxLosses {
  double singleton = 0.0;
  double entity_type = 0.0;
  double info_status = 0.0;
};

struct AuxLossVars {
  ad::Var singleton, entity_type, info_status;
};

AuxLossVars aux_loss(const AuxiliaryHeads::Logits& logits, const AuxiliaryLabels& labels);
AuxLosses aux_loss(const HeadLogits& logits, const AuxiliaryLabels& labels);

struct TaskLosses {
  double coref = 0.0;
  double singleton = 0.0;
  double entity_type = 0.0;
  double info_status = 0.0;
};

double total_loss(const TaskLosses& losses, const TaskWeights& w);
/// Weighted sum on the tape. Auxiliary vars may be invalid (skipped).
ad::Var total_loss(ad::Var coref, const AuxLossVars* aux, const TaskWeights& w);

}  // namespace coref

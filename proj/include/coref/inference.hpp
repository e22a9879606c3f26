// Decoding antecedent scores into clusters, typed mentions and singletons.
#pragma once

#include "coref/corpus.hpp"
#include "coref/model.hpp"
#include "coref/mtl_loss.hpp"
#include "coref/scoring.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coref {

struct AntecedentLink {
  int span = 0;
  std::optional<int> antecedent;  // nullopt = epsilon

  bool operator==(const AntecedentLink&) const = default;
};

/// Argmax over {eps} and the shortlist; ties prefer eps, then the nearer antecedent.
std::vector<AntecedentLink> decode_antecedents(const std::vector<AntecedentScoreRow>& rows);

struct PredictionResult {
  std::string doc_key;
  std::vector<Cluster> clusters;  // every cluster has >= 2 spans
  std::vector<Span> singletons;
  std::map<Span, EntityType> mention_types;
  std::map<Span, InfoStatus> mention_status;
  std::vector<EntityType> cluster_types;  // parallel to clusters when types are known
};

struct DecodeOptions {
  /// Minimum singleton-head probability for emitting an unlinked span. Values
  /// above 1 disable singleton output.
  double singleton_threshold = 0.5;
  bool emit_info_status = false;
};

/// Union-find over the non-epsilon links. `spans` are the kept spans the link
/// indices refer to. Logit matrices may have zero rows (no typing, no singletons).
PredictionResult build_clusters(const std::vector<Span>& spans, const std::vector<AntecedentLink>& links,
                                const HeadLogits& logits, const DecodeOptions& opts);

/// Majority vote; ties go to the type occurring first.
EntityType majority_type(const std::vector<EntityType>& member_types);

PredictionResult predict(CorefModel& model, const Document& doc, const DecodeOptions& opts);

/// Document view of a prediction (tokens from `source`, mentions typed).
Document to_document(const PredictionResult& pred, const Document& source);
/// Prediction view of a document: clusters of size >= 2 plus singleton mentions.
PredictionResult prediction_from_document(const Document& doc);

}  // namespace coref

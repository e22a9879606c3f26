// Coreference metrics (MUC, B-cubed, CEAF-phi4) and markable detection, pooled
// over documents.
#pragma once

#include "coref/corpus.hpp"

#include <string>
#include <vector>

namespace coref {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Set when the corresponding denominator was zero; the value is then 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

/// Numerators and denominators, additive across documents.
struct MetricCounts {
  double recall_num = 0.0;
  double recall_den = 0.0;
  double precision_num = 0.0;
  double precision_den = 0.0;

  MetricCounts& operator+=(const MetricCounts& o);
  Prf prf() const;
};

MetricCounts muc_counts(const std::vector<Cluster>& key, const std::vector<Cluster>& response);
MetricCounts b_cubed_counts(const std::vector<Cluster>& key, const std::vector<Cluster>& response);
MetricCounts ceaf_phi4_counts(const std::vector<Cluster>& key, const std::vector<Cluster>& response);
MetricCounts mention_counts(const std::vector<Span>& key, const std::vector<Span>& response);

Prf score_muc(const std::vector<Cluster>& key, const std::vector<Cluster>& response);
Prf score_b_cubed(const std::vector<Cluster>& key, const std::vector<Cluster>& response);
Prf score_ceaf_phi4(const std::vector<Cluster>& key, const std::vector<Cluster>& response);

enum class MentionMode { Coreferent, All };

std::string_view to_string(MentionMode mode);
MentionMode parse_mention_mode(std::string_view text);

/// Set P/R/F1 over exact spans. Coreferent mode keeps only spans of clusters
/// with at least two members, so `key` and `response` are given as clusters;
/// unclustered mentions are passed as size-1 clusters.
Prf markable_detection_prf(const std::vector<Cluster>& key, const std::vector<Cluster>& response, MentionMode mode);

struct EvaluationOptions {
  bool keep_singletons = false;
  MentionMode mention_mode = MentionMode::Coreferent;
};

struct EvaluationReport {
  Prf markable_detection;
  Prf muc;
  Prf b3;
  Prf ceaf_phi4;
  double avg_f1 = 0.0;
  EvaluationOptions options;
  int documents = 0;

  std::string to_text() const;
  std::string to_json() const;
};

/// Entity clusters of a document: its clusters plus every unclustered mention as
/// a size-1 cluster. Size-1 clusters are dropped unless keep_singletons.
std::vector<Cluster> entity_clusters(const Document& doc, bool keep_singletons);

/// Documents are matched by doc_key; throws DataError naming unmatched keys.
EvaluationReport evaluate(const std::vector<Document>& gold, const std::vector<Document>& predictions,
                          const EvaluationOptions& options);

}  // namespace coref

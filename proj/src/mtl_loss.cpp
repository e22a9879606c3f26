#include "coref/mtl_loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace coref {
namespace {

std::map<Span, std::vector<int>> cluster_index(const std::vector<Cluster>& clusters) {
  std::map<Span, std::vector<int>> out;
  for (int c = 0; c < static_cast<int>(clusters.size()); ++c)
    for (const auto& s : clusters[c]) out[s].push_back(c);
  return out;
}

bool share_cluster(const std::map<Span, std::vector<int>>& index, const Span& a, const Span& b) {
  auto ia = index.find(a), ib = index.find(b);
  if (ia == index.end() || ib == index.end()) return false;
  for (int x : ia->second)
    if (std::find(ib->second.begin(), ib->second.end(), x) != ib->second.end()) return true;
  return false;
}

double logsumexp(const std::vector<double>& xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double mean_cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
  double total = 0.0;
  int n = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    if (labels[i] < 0) continue;
    const double m = logits.row(i).maxCoeff();
    total += m + std::log((logits.row(i).array() - m).exp().sum()) - logits(i, labels[i]);
    ++n;
  }
  return n == 0 ? 0.0 : total / n;
}

struct LabelIds {
  std::vector<int> singleton, entity_type, info_status;
};

LabelIds label_ids(const AuxiliaryLabels& labels) {
  LabelIds ids;
  for (std::size_t i = 0; i < labels.is_mention.size(); ++i) {
    ids.singleton.push_back(labels.is_mention[i] ? 1 : 0);
    ids.entity_type.push_back(labels.entity_type[i] ? static_cast<int>(*labels.entity_type[i]) : -1);
    ids.info_status.push_back(labels.info_status[i] ? static_cast<int>(*labels.info_status[i]) : -1);
  }
  return ids;
}

}  // namespace

void validate(const TaskWeights& w) {
  if (w.coref <= 0.0) throw std::invalid_argument("coreference task weight must be > 0");
  if (w.singleton < 0.0 || w.entity_type < 0.0 || w.info_status < 0.0)
    throw std::invalid_argument("auxiliary task weights must be >= 0");
}

AuxiliaryLabels assign_aux_labels(const std::vector<Span>& kept, const Document& doc) {
  std::map<Span, const Mention*> gold;
  for (const auto& m : doc.gold_mentions) gold.emplace(m.span, &m);
  for (const auto& c : doc.gold_clusters)
    for (const auto& s : c) gold.emplace(s, nullptr);
  AuxiliaryLabels out;
  for (const auto& s : kept) {
    auto it = gold.find(s);
    const bool hit = it != gold.end();
    out.is_mention.push_back(hit);
    out.entity_type.push_back(hit && it->second ? it->second->entity_type : std::nullopt);
    out.info_status.push_back(hit && it->second ? it->second->info_status : std::nullopt);
  }
  return out;
}

AuxiliaryHeads::AuxiliaryHeads(ParameterStore& store, int span_dim, const ScorerConfig& cfg, std::mt19937_64& rng) {
  entity_type_ = Ffnn(store, "aux.entity_type", span_dim, cfg.ffnn_hidden, cfg.ffnn_layers, kNumEntityTypes,
                      ParamGroup::Auxiliary, rng);
  info_status_ = Ffnn(store, "aux.info_status", span_dim, cfg.ffnn_hidden, cfg.ffnn_layers, kNumInfoStatuses,
                      ParamGroup::Auxiliary, rng);
}

AuxiliaryHeads::Logits AuxiliaryHeads::apply(ad::Tape& tape, ParameterStore& store, ad::Var spans,
                                             ad::Var mention_scores) const {
  ad::Var no = tape.constant(Matrix::Zero(mention_scores.rows(), 1));
  return Logits{ad::hcat({no, mention_scores}), entity_type_.apply(tape, store, spans),
                info_status_.apply(tape, store, spans)};
}

HeadLogits head_logits(const std::vector<SpanRepresentation>& reps, const UnaryScorer& unary,
                       const AuxiliaryHeads& heads, ParameterStore& store) {
  const Eigen::Index dim = reps.empty() ? 0 : reps.front().g.size();
  if (reps.empty()) return HeadLogits{Matrix(0, kSingletonClasses), Matrix(0, kNumEntityTypes), Matrix(0, kNumInfoStatuses)};
  Matrix g(static_cast<Eigen::Index>(reps.size()), dim);
  for (std::size_t i = 0; i < reps.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = reps[i].g.transpose();
  ad::Tape tape;
  ad::Var spans = tape.constant(std::move(g));
  auto out = heads.apply(tape, store, spans, unary.apply(tape, store, spans).mention);
  return HeadLogits{out.singleton.value(), out.entity_type.value(), out.info_status.value()};
}

AntecedentLayout antecedent_layout(const std::vector<std::vector<int>>& shortlists, const std::vector<Span>& kept,
                                   const std::vector<Cluster>& gold_clusters) {
  const auto index = cluster_index(gold_clusters);
  AntecedentLayout layout;
  std::size_t widest = 0;
  for (const auto& s : shortlists) widest = std::max(widest, s.size());
  layout.width = static_cast<Eigen::Index>(widest) + 1;
  const auto n = shortlists.size();
  layout.valid.assign(n * layout.width, 0);
  layout.gold.assign(n * layout.width, 0);
  for (std::size_t i = 0; i < n; ++i) {
    char* valid = layout.valid.data() + i * layout.width;
    char* gold = layout.gold.data() + i * layout.width;
    valid[0] = 1;
    bool any = false;
    for (std::size_t c = 0; c < shortlists[i].size(); ++c) {
      const int j = shortlists[i][c];
      layout.rows.push_back(static_cast<Eigen::Index>(i));
      layout.cols.push_back(static_cast<Eigen::Index>(c) + 1);
      valid[c + 1] = 1;
      if (share_cluster(index, kept[i], kept[j])) {
        gold[c + 1] = 1;
        any = true;
      }
    }
    if (!any) gold[0] = 1;
  }
  return layout;
}

ad::Var coref_loss(ad::Var pair_scores, const AntecedentLayout& layout, Eigen::Index kept_count) {
  ad::Tape& tape = *pair_scores.tape();
  if (layout.rows.empty()) return tape.constant(Matrix::Zero(1, 1));
  ad::Var matrix = ad::scatter(pair_scores, layout.rows, layout.cols, kept_count, layout.width, 0.0);
  return ad::marginal_nll(matrix, layout.valid, layout.gold);
}

double coref_loss(const std::vector<AntecedentScoreRow>& rows, const std::vector<Span>& kept,
                  const std::vector<Cluster>& gold_clusters) {
  const auto index = cluster_index(gold_clusters);
  double loss = 0.0;
  for (const auto& row : rows) {
    std::vector<double> all{AntecedentScoreRow::epsilon_score()}, gold;
    for (std::size_t c = 0; c < row.candidates.size(); ++c) {
      all.push_back(row.scores[c]);
      if (share_cluster(index, kept[row.span], kept[row.candidates[c]])) gold.push_back(row.scores[c]);
    }
    if (gold.empty()) gold.push_back(AntecedentScoreRow::epsilon_score());
    loss += logsumexp(all) - logsumexp(gold);
  }
  return loss;
}

AuxLossVars aux_loss(const AuxiliaryHeads::Logits& logits, const AuxiliaryLabels& labels) {
  auto ids = label_ids(labels);
  return AuxLossVars{ad::softmax_cross_entropy(logits.singleton, std::move(ids.singleton)),
                     ad::softmax_cross_entropy(logits.entity_type, std::move(ids.entity_type)),
                     ad::softmax_cross_entropy(logits.info_status, std::move(ids.info_status))};
}

AuxLosses aux_loss(const HeadLogits& logits, const AuxiliaryLabels& labels) {
  const auto ids = label_ids(labels);
  return AuxLosses{mean_cross_entropy(logits.singleton, ids.singleton),
                   mean_cross_entropy(logits.entity_type, ids.entity_type),
                   mean_cross_entropy(logits.info_status, ids.info_status)};
}

double total_loss(const TaskLosses& l, const TaskWeights& w) {
  return w.coref * l.coref + w.singleton * l.singleton + w.entity_type * l.entity_type + w.info_status * l.info_status;
}

ad::Var total_loss(ad::Var coref, const AuxLossVars* aux, const TaskWeights& w) {
  std::vector<ad::Var> terms{ad::scale(coref, w.coref)};
  if (aux != nullptr) {
    terms.push_back(ad::scale(aux->singleton, w.singleton));
    terms.push_back(ad::scale(aux->entity_type, w.entity_type));
    terms.push_back(ad::scale(aux->info_status, w.info_status));
  }
  return ad::add_scalars(terms);
}

}  // namespace coref

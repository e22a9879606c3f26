#include "coref/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace coref {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

int argmax_row(const Matrix& m, Eigen::Index row) {
  Eigen::Index best = 0;
  m.row(row).maxCoeff(&best);
  return static_cast<int>(best);
}

double mention_probability(const Matrix& singleton_logits, Eigen::Index row) {
  const double a = singleton_logits(row, 0), b = singleton_logits(row, 1);
  return 1.0 / (1.0 + std::exp(a - b));
}

}  // namespace

std::vector<AntecedentLink> decode_antecedents(const std::vector<AntecedentScoreRow>& rows) {
  std::vector<AntecedentLink> links;
  links.reserve(rows.size());
  for (const auto& row : rows) {
    AntecedentLink link{row.span, std::nullopt};
    double best = AntecedentScoreRow::epsilon_score();
    for (std::size_t c = 0; c < row.candidates.size(); ++c) {
      const double s = row.scores[c];
      if (s > best || (s == best && link.antecedent && row.candidates[c] > *link.antecedent)) {
        best = s;
        link.antecedent = row.candidates[c];
      }
    }
    links.push_back(link);
  }
  return links;
}

EntityType majority_type(const std::vector<EntityType>& member_types) {
  std::array<int, kNumEntityTypes> counts{};
  for (auto t : member_types) ++counts[static_cast<int>(t)];
  const int top = *std::max_element(counts.begin(), counts.end());
  for (auto t : member_types)
    if (counts[static_cast<int>(t)] == top) return t;
  return EntityType::Abstract;
}

PredictionResult build_clusters(const std::vector<Span>& spans, const std::vector<AntecedentLink>& links,
                                const HeadLogits& logits, const DecodeOptions& opts) {
  const int n = static_cast<int>(spans.size());
  DisjointSets sets(n);
  std::vector<bool> linked(static_cast<std::size_t>(n), false);
  for (const auto& l : links) {
    if (!l.antecedent) continue;
    sets.unite(l.span, *l.antecedent);
    linked[l.span] = linked[*l.antecedent] = true;
  }

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i)
    if (linked[i]) groups[sets.find(i)].push_back(i);

  PredictionResult out;
  const bool typed = logits.entity_type.rows() == n && n > 0;
  const bool with_status = opts.emit_info_status && logits.info_status.rows() == n && n > 0;
  std::vector<std::vector<int>> members;
  for (auto& [root, idx] : groups) {
    if (idx.size() < 2) continue;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return spans[a] < spans[b]; });
    members.push_back(idx);
  }
  std::sort(members.begin(), members.end(),
            [&](const auto& a, const auto& b) { return spans[a.front()] < spans[b.front()]; });
  for (const auto& idx : members) {
    Cluster c;
    std::vector<EntityType> types;
    for (int i : idx) {
      c.push_back(spans[i]);
      if (typed) {
        auto t = static_cast<EntityType>(argmax_row(logits.entity_type, i));
        out.mention_types[spans[i]] = t;
        types.push_back(t);
      }
      if (with_status) out.mention_status[spans[i]] = static_cast<InfoStatus>(argmax_row(logits.info_status, i));
    }
    out.clusters.push_back(std::move(c));
    if (typed) out.cluster_types.push_back(majority_type(types));
  }

  if (logits.singleton.rows() == n) {
    for (const auto& l : links) {
      const int i = l.span;
      if (l.antecedent || linked[i]) continue;
      if (mention_probability(logits.singleton, i) < opts.singleton_threshold) continue;
      out.singletons.push_back(spans[i]);
      if (typed) out.mention_types[spans[i]] = static_cast<EntityType>(argmax_row(logits.entity_type, i));
      if (with_status) out.mention_status[spans[i]] = static_cast<InfoStatus>(argmax_row(logits.info_status, i));
    }
    std::sort(out.singletons.begin(), out.singletons.end());
  }
  return out;
}

PredictionResult predict(CorefModel& model, const Document& doc, const DecodeOptions& opts) {
  ad::Tape tape;
  ForwardOptions fo;
  fo.auxiliary = true;
  auto fwd = model.forward(tape, doc, fo);
  auto result = build_clusters(fwd.kept_spans, decode_antecedents(fwd.rows), fwd.logits, opts);
  result.doc_key = doc.doc_key;
  return result;
}

Document to_document(const PredictionResult& pred, const Document& source) {
  Document doc;
  doc.doc_key = source.doc_key;
  doc.genre = source.genre;
  doc.sentences = source.sentences;
  doc.speakers = source.speakers;
  doc.gold_clusters = pred.clusters;
  auto typed = [&](const Span& s, std::optional<int> cluster) {
    Mention m{s, std::nullopt, std::nullopt, cluster};
    if (auto it = pred.mention_types.find(s); it != pred.mention_types.end()) m.entity_type = it->second;
    if (auto it = pred.mention_status.find(s); it != pred.mention_status.end()) m.info_status = it->second;
    return m;
  };
  std::set<Span> seen;
  for (int c = 0; c < static_cast<int>(pred.clusters.size()); ++c)
    for (const auto& s : pred.clusters[c])
      if (seen.insert(s).second) doc.gold_mentions.push_back(typed(s, c));
  for (const auto& s : pred.singletons)
    if (seen.insert(s).second) doc.gold_mentions.push_back(typed(s, std::nullopt));
  std::sort(doc.gold_mentions.begin(), doc.gold_mentions.end(),
            [](const Mention& a, const Mention& b) { return a.span < b.span; });
  return doc;
}

PredictionResult prediction_from_document(const Document& doc) {
  PredictionResult out;
  out.doc_key = doc.doc_key;
  std::set<Span> in_chain;
  for (const auto& c : doc.gold_clusters) {
    if (c.size() < 2) continue;
    out.clusters.push_back(c);
    in_chain.insert(c.begin(), c.end());
  }
  std::set<Span> singles;
  for (const auto& c : doc.gold_clusters)
    if (c.size() == 1 && !in_chain.contains(c.front())) singles.insert(c.front());
  for (const auto& m : doc.gold_mentions) {
    if (!in_chain.contains(m.span)) singles.insert(m.span);
    if (m.entity_type) out.mention_types[m.span] = *m.entity_type;
    if (m.info_status) out.mention_status[m.span] = *m.info_status;
  }
  out.singletons.assign(singles.begin(), singles.end());
  return out;
}

}  // namespace coref

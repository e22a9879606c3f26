#include "coref/evaluation.hpp"

#include "coref/hungarian.hpp"

#include "json.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace coref {
namespace {

double ratio(double num, double den, bool& undefined) {
  undefined = den == 0.0;
  return undefined ? 0.0 : num / den;
}

std::map<Span, int> membership(const std::vector<Cluster>& clusters) {
  std::map<Span, int> owner;
  for (int c = 0; c < static_cast<int>(clusters.size()); ++c)
    for (const auto& s : clusters[c]) owner.emplace(s, c);
  return owner;
}

/// Sum over key clusters of (|K| - partitions of K by the response), and of (|K| - 1).
std::pair<double, double> muc_side(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  const auto owner = membership(response);
  double num = 0.0, den = 0.0;
  for (const auto& k : key) {
    if (k.empty()) continue;
    std::set<int> parts;
    int unaligned = 0;
    for (const auto& s : k) {
      auto it = owner.find(s);
      if (it == owner.end())
        ++unaligned;
      else
        parts.insert(it->second);
    }
    const double size = static_cast<double>(k.size());
    num += size - static_cast<double>(parts.size() + unaligned);
    den += size - 1.0;
  }
  return {num, den};
}

std::size_t overlap(const Cluster& a, const Cluster& b) {
  std::set<Span> sa(a.begin(), a.end());
  std::size_t n = 0;
  for (const auto& s : std::set<Span>(b.begin(), b.end())) n += sa.count(s);
  return n;
}

std::pair<double, double> b_cubed_side(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  double num = 0.0, den = 0.0;
  for (const auto& k : key) {
    if (k.empty()) continue;
    double correct = 0.0;
    for (const auto& r : response) {
      const double o = static_cast<double>(overlap(k, r));
      correct += o * o;
    }
    num += correct / static_cast<double>(k.size());
    den += static_cast<double>(k.size());
  }
  return {num, den};
}

std::string format_prf(const char* name, const Prf& p) {
  std::ostringstream out;
  out << std::left << std::setw(20) << name << std::right << std::fixed << std::setprecision(2) << std::setw(8)
      << 100.0 * p.recall << std::setw(8) << 100.0 * p.precision << std::setw(8) << 100.0 * p.f1;
  if (p.recall_undefined || p.precision_undefined) out << "  (empty " << (p.recall_undefined ? "key" : "response") << ")";
  out << '\n';
  return out.str();
}

nlohmann::json prf_json(const Prf& p) {
  return {{"precision", p.precision},
          {"recall", p.recall},
          {"f1", p.f1},
          {"precision_undefined", p.precision_undefined},
          {"recall_undefined", p.recall_undefined}};
}

}  // namespace

MetricCounts& MetricCounts::operator+=(const MetricCounts& o) {
  recall_num += o.recall_num;
  recall_den += o.recall_den;
  precision_num += o.precision_num;
  precision_den += o.precision_den;
  return *this;
}

Prf MetricCounts::prf() const {
  Prf p;
  p.recall = ratio(recall_num, recall_den, p.recall_undefined);
  p.precision = ratio(precision_num, precision_den, p.precision_undefined);
  p.f1 = (p.precision + p.recall > 0.0) ? 2.0 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
  return p;
}

MetricCounts muc_counts(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  MetricCounts c;
  std::tie(c.recall_num, c.recall_den) = muc_side(key, response);
  std::tie(c.precision_num, c.precision_den) = muc_side(response, key);
  return c;
}

MetricCounts b_cubed_counts(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  MetricCounts c;
  std::tie(c.recall_num, c.recall_den) = b_cubed_side(key, response);
  std::tie(c.precision_num, c.precision_den) = b_cubed_side(response, key);
  return c;
}

MetricCounts ceaf_phi4_counts(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(key.size()),
                                              static_cast<Eigen::Index>(response.size()));
  for (std::size_t i = 0; i < key.size(); ++i)
    for (std::size_t j = 0; j < response.size(); ++j) {
      const double size = static_cast<double>(key[i].size() + response[j].size());
      if (size > 0.0) phi(i, j) = 2.0 * static_cast<double>(overlap(key[i], response[j])) / size;
    }
  const double similarity = max_assignment_value(phi);
  MetricCounts c;
  c.recall_num = c.precision_num = similarity;
  c.recall_den = static_cast<double>(key.size());
  c.precision_den = static_cast<double>(response.size());
  return c;
}

MetricCounts mention_counts(const std::vector<Span>& key, const std::vector<Span>& response) {
  const std::set<Span> k(key.begin(), key.end()), r(response.begin(), response.end());
  double hits = 0.0;
  for (const auto& s : r) hits += static_cast<double>(k.count(s));
  return {hits, static_cast<double>(k.size()), hits, static_cast<double>(r.size())};
}

Prf score_muc(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  return muc_counts(key, response).prf();
}
Prf score_b_cubed(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  return b_cubed_counts(key, response).prf();
}
Prf score_ceaf_phi4(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  return ceaf_phi4_counts(key, response).prf();
}

std::string_view to_string(MentionMode mode) { return mode == MentionMode::All ? "all" : "coreferent"; }

MentionMode parse_mention_mode(std::string_view text) {
  if (text == "all") return MentionMode::All;
  if (text == "coreferent") return MentionMode::Coreferent;
  throw std::invalid_argument("unknown mention mode '" + std::string(text) + "' (expected coreferent or all)");
}

namespace {
std::vector<Span> markables(const std::vector<Cluster>& clusters, MentionMode mode) {
  std::vector<Span> out;
  for (const auto& c : clusters)
    if (mode == MentionMode::All || c.size() >= 2) out.insert(out.end(), c.begin(), c.end());
  return out;
}
}  // namespace

Prf markable_detection_prf(const std::vector<Cluster>& key, const std::vector<Cluster>& response, MentionMode mode) {
  return mention_counts(markables(key, mode), markables(response, mode)).prf();
}

std::vector<Cluster> entity_clusters(const Document& doc, bool keep_singletons) {
  std::vector<Cluster> out;
  std::set<Span> clustered;
  for (const auto& c : doc.gold_clusters) {
    if (c.empty()) continue;
    clustered.insert(c.begin(), c.end());
    if (keep_singletons || c.size() >= 2) out.push_back(c);
  }
  if (keep_singletons) {
    std::set<Span> extra;
    for (const auto& m : doc.gold_mentions)
      if (!clustered.contains(m.span)) extra.insert(m.span);
    for (const auto& s : extra) out.push_back({s});
  }
  return out;
}

EvaluationReport evaluate(const std::vector<Document>& gold, const std::vector<Document>& predictions,
                          const EvaluationOptions& options) {
  std::map<std::string, const Document*> by_key;
  for (const auto& d : predictions) by_key.emplace(d.doc_key, &d);
  std::vector<std::string> missing, extra;
  std::set<std::string> gold_keys;
  for (const auto& d : gold) {
    gold_keys.insert(d.doc_key);
    if (!by_key.contains(d.doc_key)) missing.push_back(d.doc_key);
  }
  for (const auto& d : predictions)
    if (!gold_keys.contains(d.doc_key)) extra.push_back(d.doc_key);
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "document keys do not match;";
    if (!missing.empty()) {
      msg += " missing from response:";
      for (const auto& k : missing) msg += " " + k;
      if (!extra.empty()) msg += ";";
    }
    if (!extra.empty()) {
      msg += " not in key:";
      for (const auto& k : extra) msg += " " + k;
    }
    throw DataError(msg);
  }

  MetricCounts md, muc, b3, ceaf;
  for (const auto& g : gold) {
    const Document& p = *by_key.at(g.doc_key);
    const auto key = entity_clusters(g, options.keep_singletons);
    const auto response = entity_clusters(p, options.keep_singletons);
    muc += muc_counts(key, response);
    b3 += b_cubed_counts(key, response);
    ceaf += ceaf_phi4_counts(key, response);
    md += mention_counts(markables(entity_clusters(g, true), options.mention_mode),
                         markables(entity_clusters(p, true), options.mention_mode));
  }
  EvaluationReport r;
  r.options = options;
  r.documents = static_cast<int>(gold.size());
  r.markable_detection = md.prf();
  r.muc = muc.prf();
  r.b3 = b3.prf();
  r.ceaf_phi4 = ceaf.prf();
  r.avg_f1 = (r.muc.f1 + r.b3.f1 + r.ceaf_phi4.f1) / 3.0;
  return r;
}

std::string EvaluationReport::to_text() const {
  std::ostringstream out;
  out << std::left << std::setw(20) << "metric" << std::right << std::setw(8) << "R" << std::setw(8) << "P"
      << std::setw(8) << "F1" << '\n';
  out << format_prf(options.mention_mode == MentionMode::All ? "mentions (all)" : "mentions (coref)",
                    markable_detection);
  out << format_prf("MUC", muc) << format_prf("B3", b3) << format_prf("CEAF-phi4", ceaf_phi4);
  out << std::left << std::setw(20) << "average F1" << std::right << std::fixed << std::setprecision(2)
      << std::setw(24) << 100.0 * avg_f1 << '\n';
  out << "documents: " << documents << "  singletons: " << (options.keep_singletons ? "kept" : "dropped") << '\n';
  return out.str();
}

std::string EvaluationReport::to_json() const {
  nlohmann::json j = {{"markable_detection", prf_json(markable_detection)},
                      {"muc", prf_json(muc)},
                      {"b3", prf_json(b3)},
                      {"ceaf_phi4", prf_json(ceaf_phi4)},
                      {"avg_f1", avg_f1},
                      {"documents", documents},
                      {"keep_singletons", options.keep_singletons},
                      {"mention_mode", std::string(to_string(options.mention_mode))}};
  return j.dump();
}

}  // namespace coref

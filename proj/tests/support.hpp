// Shared helpers for the unit and acceptance suites: fixture access, small
// model configurations and brute-force metric oracles.
#pragma once

#include "coref/corpus.hpp"
#include "coref/evaluation.hpp"
#include "coref/model.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using coref::Cluster;
using coref::Span;

inline std::string fixture(const std::string& name) { return std::string(COREF_FIXTURE_DIR) + "/" + name; }

/// CoNLL text for one part from per-token coref cells, one vector per sentence.
inline std::string conll_doc(const std::string& key, const std::vector<std::vector<std::string>>& tokens,
                             const std::vector<std::vector<std::string>>& cells, int part = 0) {
  std::string out = "#begin document (" + key + "); part " + std::to_string(part) + "\n";
  for (std::size_t s = 0; s < tokens.size(); ++s) {
    for (std::size_t t = 0; t < tokens[s].size(); ++t)
      out += key + "\t" + std::to_string(part) + "\t" + std::to_string(t) + "\t" + tokens[s][t] +
             "\t-\t-\t-\t-\t-\t-\t*\t" + cells[s][t] + "\n";
    out += "\n";
  }
  out += "#end document\n";
  return out;
}

/// Two-sentence document used by the model-level tests.
inline coref::Document two_sentence_doc() {
  coref::Document d;
  d.doc_key = "fx/two_0";
  d.genre = "fx";
  d.sentences = {{"Anna", "met", "the", "farmer", "."}, {"She", "thanked", "him", "in", "the", "end", "."}};
  d.speakers.assign(12, "A");
  d.gold_clusters = {{{0, 0}, {5, 5}}, {{2, 3}, {7, 7}}};
  d.gold_mentions = {
      {{0, 0}, coref::EntityType::Person, coref::InfoStatus::New, 0},
      {{2, 3}, coref::EntityType::Person, coref::InfoStatus::New, 1},
      {{5, 5}, coref::EntityType::Person, coref::InfoStatus::GivenActive, 0},
      {{7, 7}, coref::EntityType::Person, coref::InfoStatus::GivenActive, 1},
      {{9, 10}, coref::EntityType::Time, coref::InfoStatus::AccessibleInferrable, std::nullopt},
  };
  return d;
}

inline coref::ModelConfig tiny_model(int dim = 6) {
  coref::ModelConfig m;
  m.encoder.dim = dim;
  m.encoder.vocab_size = 50;
  m.scorer.ffnn_hidden = 7;
  m.scorer.ffnn_layers = 1;
  m.scorer.feature_dim = 3;
  m.max_span_width = 3;
  m.prune_ratio = 0.6;
  m.max_antecedents = 4;
  return m;
}

// ---- Brute-force metric oracles ---------------------------------------------

struct OraclePrf {
  double p = 0, r = 0, f = 0;
};

inline OraclePrf oracle_prf(double rn, double rd, double pn, double pd) {
  OraclePrf o;
  o.r = rd > 0 ? rn / rd : 0.0;
  o.p = pd > 0 ? pn / pd : 0.0;
  o.f = (o.p + o.r) > 0 ? 2 * o.p * o.r / (o.p + o.r) : 0.0;
  return o;
}

/// Cluster id per span; spans absent from `clusters` are missing from the map.
inline std::map<Span, int> membership(const std::vector<Cluster>& clusters) {
  std::map<Span, int> m;
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (const auto& s : clusters[c]) m[s] = static_cast<int>(c);
  return m;
}

/// Link-edit counts: |S| minus the number of pieces S falls into under `other`,
/// where a span outside `other` is its own piece.
inline std::pair<double, double> muc_side(const std::vector<Cluster>& a, const std::vector<Cluster>& b) {
  const auto mb = membership(b);
  double num = 0, den = 0;
  for (const auto& s : a) {
    std::vector<std::string> pieces;
    for (const auto& m : s) {
      auto it = mb.find(m);
      pieces.push_back(it == mb.end() ? "x" + std::to_string(m.start) + "_" + std::to_string(m.end)
                                      : "c" + std::to_string(it->second));
    }
    std::sort(pieces.begin(), pieces.end());
    const double parts = static_cast<double>(std::unique(pieces.begin(), pieces.end()) - pieces.begin());
    num += static_cast<double>(s.size()) - parts;
    den += static_cast<double>(s.size()) - 1.0;
  }
  return {num, den};
}

inline OraclePrf oracle_muc(const std::vector<Cluster>& key, const std::vector<Cluster>& resp) {
  auto [rn, rd] = muc_side(key, resp);
  auto [pn, pd] = muc_side(resp, key);
  return oracle_prf(rn, rd, pn, pd);
}

inline std::pair<double, double> b3_side(const std::vector<Cluster>& a, const std::vector<Cluster>& b) {
  const auto mb = membership(b);
  double num = 0, den = 0;
  for (const auto& s : a)
    for (const auto& m : s) {
      den += 1.0;
      auto it = mb.find(m);
      if (it == mb.end()) continue;
      const auto& other = b[static_cast<std::size_t>(it->second)];
      double shared = 0;
      for (const auto& x : s)
        if (std::find(other.begin(), other.end(), x) != other.end()) shared += 1.0;
      num += shared / static_cast<double>(s.size());
    }
  return {num, den};
}

inline OraclePrf oracle_b3(const std::vector<Cluster>& key, const std::vector<Cluster>& resp) {
  auto [rn, rd] = b3_side(key, resp);
  auto [pn, pd] = b3_side(resp, key);
  return oracle_prf(rn, rd, pn, pd);
}

inline double phi4(const Cluster& a, const Cluster& b) {
  double shared = 0;
  for (const auto& x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) shared += 1.0;
  return 2.0 * shared / static_cast<double>(a.size() + b.size());
}

/// Exhaustive search over every injective map from the smaller side into the larger.
inline double exhaustive_alignment(const std::vector<Cluster>& key, const std::vector<Cluster>& resp) {
  const bool key_small = key.size() <= resp.size();
  const auto& small = key_small ? key : resp;
  const auto& large = key_small ? resp : key;
  if (small.empty()) return 0.0;
  std::vector<int> perm(large.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small.size(); ++i) total += phi4(small[i], large[static_cast<std::size_t>(perm[i])]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline OraclePrf oracle_ceaf(const std::vector<Cluster>& key, const std::vector<Cluster>& resp) {
  const double v = exhaustive_alignment(key, resp);
  return oracle_prf(v, static_cast<double>(key.size()), v, static_cast<double>(resp.size()));
}

/// Random partition of a random subset of `universe` (each span kept with probability keep).
inline std::vector<Cluster> random_partition(const std::vector<Span>& universe, double keep, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Cluster> out;
  for (const auto& s : universe) {
    if (u(rng) >= keep) continue;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(out.size()));
    const int c = pick(rng);
    if (c == static_cast<int>(out.size())) out.push_back({s});
    else out[static_cast<std::size_t>(c)].push_back(s);
  }
  return out;
}

/// Connected components of the link graph, by brute-force reachability.
inline std::vector<std::vector<int>> closure_components(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<char>> reach(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) reach[i][i] = 1;
  for (auto [a, b] : edges) reach[a][b] = reach[b][a] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = 1;
  std::vector<std::vector<int>> comps;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<int> comp;
    for (int j = 0; j < n; ++j)
      if (reach[i][j]) {
        comp.push_back(j);
        seen[j] = 1;
      }
    comps.push_back(comp);
  }
  return comps;
}

}  // namespace testing_support

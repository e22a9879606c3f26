#include "coref/error_analysis.hpp"

#include "coref/pronoun_lists.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace coref {
namespace {

std::set<std::string, std::less<>> word_set(std::string_view text) {
  std::set<std::string, std::less<>> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.insert(w);
  return out;
}

const auto& first_second_person() {
  static const auto words = word_set(kPronouns1st2nd);
  return words;
}
const auto& third_person() {
  static const auto words = word_set(kPronouns3rd);
  return words;
}

const std::set<std::string, std::less<>> kDefinite = {"the", "this", "that", "these", "those"};
const std::set<std::string, std::less<>> kIndefinite = {"a", "an", "some"};
const std::set<std::string, std::less<>> kPossessive = {"my", "your", "his", "her", "its", "our", "their"};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool capitalized(const std::string& w) { return !w.empty() && std::isupper(static_cast<unsigned char>(w[0])); }

bool possessive_marker(const std::string& w) {
  return w == "'s" || w == "'" || (w.size() > 2 && w.ends_with("'s"));
}

using ErrorKey = std::tuple<std::string, Span, ErrorKind>;

ErrorKey key_of(const ErrorRecord& r) { return {r.doc_key, r.anaphor, r.kind}; }

std::string percent(const ErrorTable& t, int count) {
  std::ostringstream out;
  const int total = t.total();
  out << std::fixed << std::setprecision(1) << (total > 0 ? 100.0 * count / total : 0.0) << '%';
  return out.str();
}

}  // namespace

std::string_view to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::Pronoun1st2nd: return "pronoun_1st_2nd";
    case ErrorClass::Pronoun3rd: return "pronoun_3rd";
    case ErrorClass::DefiniteNoun: return "definite_noun";
    case ErrorClass::IndefiniteNoun: return "indefinite_noun";
    case ErrorClass::ProperNoun: return "proper_noun";
    case ErrorClass::Other: return "other";
  }
  return "other";
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::MissingLink: return "missing-link";
    case ErrorKind::WrongLink: return "wrong-link";
    case ErrorKind::SpuriousLink: return "spurious-link";
  }
  return "missing-link";
}

ErrorClass classify_anaphor(const Document& doc, const Span& span) {
  const auto tokens = doc.tokens();
  if (span.start < 0 || span.end >= static_cast<int>(tokens.size()) || span.end < span.start)
    throw RangeError("span out of range in " + doc.doc_key);
  std::vector<std::string> words(tokens.begin() + span.start, tokens.begin() + span.end + 1);
  const std::string first = lower(words.front());

  if (words.size() == 1 && first_second_person().contains(first)) return ErrorClass::Pronoun1st2nd;
  if (words.size() == 1 && third_person().contains(first)) return ErrorClass::Pronoun3rd;

  if (kDefinite.contains(first) || kPossessive.contains(first) ||
      std::any_of(words.begin(), words.end(), possessive_marker))
    return ErrorClass::DefiniteNoun;

  const std::string& head = words.back();
  const bool bare_plural = !capitalized(words.front()) && head.size() > 2 && lower(head).ends_with('s') &&
                           !lower(head).ends_with("ss");
  if (kIndefinite.contains(first) || bare_plural) return ErrorClass::IndefiniteNoun;

  const auto starts = doc.sentence_starts();
  const bool head_initial = std::binary_search(starts.begin(), starts.end(), span.end);
  if (capitalized(head) && !head_initial) return ErrorClass::ProperNoun;
  return ErrorClass::Other;
}

std::vector<ErrorRecord> extract_errors(const Document& gold, const PredictionResult& pred) {
  // Gold chain of every gold mention; unclustered mentions get a chain of their own.
  std::map<Span, int> chain;
  int next = 0;
  for (const auto& c : gold.gold_clusters) {
    for (const auto& s : c) chain.emplace(s, next);
    ++next;
  }
  for (const auto& m : gold.gold_mentions)
    if (chain.emplace(m.span, next).second) ++next;

  std::map<Span, int> predicted;
  std::vector<Cluster> clusters = pred.clusters;
  for (int c = 0; c < static_cast<int>(clusters.size()); ++c) {
    std::sort(clusters[c].begin(), clusters[c].end());
    for (const auto& s : clusters[c]) predicted.emplace(s, c);
  }

  std::vector<ErrorRecord> out;
  std::set<Span> wrong;
  auto record = [&](const Span& s, ErrorKind kind) {
    out.push_back({gold.doc_key, s, classify_anaphor(gold, s), kind});
  };

  for (const auto& c : clusters) {
    for (std::size_t k = 1; k < c.size(); ++k) {
      auto it = chain.find(c[k]);
      const bool found = it != chain.end() && std::any_of(c.begin(), c.begin() + k, [&](const Span& e) {
                           auto je = chain.find(e);
                           return je != chain.end() && je->second == it->second;
                         });
      if (found) continue;
      if (it == chain.end()) {
        record(c[k], ErrorKind::SpuriousLink);
      } else {
        record(c[k], ErrorKind::WrongLink);
        wrong.insert(c[k]);
      }
    }
  }

  for (Cluster c : gold.gold_clusters) {
    if (c.size() < 2) continue;
    std::sort(c.begin(), c.end());
    for (std::size_t k = 1; k < c.size(); ++k) {
      auto it = predicted.find(c[k]);
      const bool linked = it != predicted.end() && std::any_of(c.begin(), c.begin() + k, [&](const Span& e) {
                            auto je = predicted.find(e);
                            return je != predicted.end() && je->second == it->second;
                          });
      if (!linked && !wrong.contains(c[k])) record(c[k], ErrorKind::MissingLink);
    }
  }

  std::sort(out.begin(), out.end(), [](const ErrorRecord& a, const ErrorRecord& b) {
    return std::tie(a.anaphor, a.kind) < std::tie(b.anaphor, b.kind);
  });
  return out;
}

int ErrorTable::total() const {
  int t = 0;
  for (int c : counts) t += c;
  return t;
}

std::array<double, kNumErrorClasses> ErrorTable::percentages() const {
  std::array<double, kNumErrorClasses> p{};
  const int t = total();
  if (t == 0) return p;
  for (int i = 0; i < kNumErrorClasses; ++i) p[i] = 100.0 * counts[i] / t;
  return p;
}

Contrast contrast(const std::vector<Document>& gold, const std::vector<Document>& pred_a,
                  const std::vector<Document>& pred_b) {
  auto errors_of = [&](const std::vector<Document>& preds) {
    std::map<std::string, const Document*> by_key;
    for (const auto& d : preds) by_key.emplace(d.doc_key, &d);
    std::vector<ErrorRecord> all;
    for (const auto& g : gold) {
      PredictionResult p;
      if (auto it = by_key.find(g.doc_key); it != by_key.end()) p = prediction_from_document(*it->second);
      auto e = extract_errors(g, p);
      all.insert(all.end(), e.begin(), e.end());
    }
    return all;
  };
  const auto ea = errors_of(pred_a), eb = errors_of(pred_b);
  std::set<ErrorKey> ka, kb;
  for (const auto& e : ea) ka.insert(key_of(e));
  for (const auto& e : eb) kb.insert(key_of(e));

  Contrast out;
  for (const auto& e : ea)
    if (!kb.contains(key_of(e))) {
      out.a_only.push_back(e);
      ++out.a_avoided_by_b.counts[static_cast<int>(e.error_class)];
    }
  for (const auto& e : eb)
    if (!ka.contains(key_of(e))) {
      out.b_only.push_back(e);
      ++out.b_avoided_by_a.counts[static_cast<int>(e.error_class)];
    }
  return out;
}

std::string Contrast::to_text(std::string_view name_a, std::string_view name_b) const {
  using C = ErrorClass;
  auto n = [](const ErrorTable& t, C c) { return t.counts[static_cast<int>(c)]; };
  struct Row {
    std::string label;
    std::vector<C> classes;
  };
  const std::vector<Row> rows = {
      {"Pronouns", {C::Pronoun1st2nd, C::Pronoun3rd}},
      {"  1st & 2nd person", {C::Pronoun1st2nd}},
      {"  3rd person", {C::Pronoun3rd}},
      {"Definiteness", {C::DefiniteNoun, C::IndefiniteNoun}},
      {"  Definite nouns", {C::DefiniteNoun}},
      {"  Indefinite nouns", {C::IndefiniteNoun}},
      {"Proper nouns", {C::ProperNoun}},
      {"Others", {C::Other}},
  };
  const std::string head_a = std::string(name_a) + " errors avoided by " + std::string(name_b);
  const std::string head_b = std::string(name_b) + " errors avoided by " + std::string(name_a);
  const int wa = std::max<int>(18, static_cast<int>(head_a.size()) + 2);
  const int wb = std::max<int>(18, static_cast<int>(head_b.size()) + 2);

  std::ostringstream out;
  out << std::left << std::setw(22) << "" << std::right << std::setw(wa) << head_a << std::setw(wb) << head_b << '\n';
  auto cell = [](const ErrorTable& t, int count) { return std::to_string(count) + " (" + percent(t, count) + ")"; };
  for (const auto& r : rows) {
    int ca = 0, cb = 0;
    for (auto c : r.classes) {
      ca += n(a_avoided_by_b, c);
      cb += n(b_avoided_by_a, c);
    }
    out << std::left << std::setw(22) << r.label << std::right << std::setw(wa) << cell(a_avoided_by_b, ca)
        << std::setw(wb) << cell(b_avoided_by_a, cb) << '\n';
  }
  out << std::left << std::setw(22) << "Total" << std::right << std::setw(wa) << a_avoided_by_b.total()
      << std::setw(wb) << b_avoided_by_a.total() << '\n';
  return out.str();
}

std::string Contrast::to_json() const {
  auto table = [](const ErrorTable& t) {
    nlohmann::json j = nlohmann::json::object();
    const auto pct = t.percentages();
    for (int i = 0; i < kNumErrorClasses; ++i)
      j[std::string(to_string(static_cast<ErrorClass>(i)))] = {{"count", t.counts[i]}, {"percent", pct[i]}};
    j["total"] = t.total();
    return j;
  };
  auto records = [](const std::vector<ErrorRecord>& rs) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rs)
      j.push_back({{"doc_key", r.doc_key},
                   {"start", r.anaphor.start},
                   {"end", r.anaphor.end},
                   {"class", std::string(to_string(r.error_class))},
                   {"kind", std::string(to_string(r.kind))}});
    return j;
  };
  nlohmann::json j = {{"a_avoided_by_b", table(a_avoided_by_b)},
                      {"b_avoided_by_a", table(b_avoided_by_a)},
                      {"a_only", records(a_only)},
                      {"b_only", records(b_only)}};
  return j.dump();
}

}  // namespace coref

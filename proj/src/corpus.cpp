#include "coref/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace coref {
namespace {

constexpr std::array<std::string_view, kNumEntityTypes> kEntityLabels = {
    "abstract", "animal", "event", "object", "organization",
    "person",   "place",  "plant", "substance", "time",
};

constexpr std::array<std::string_view, kNumInfoStatuses> kInfoLabels = {
    "new",
    "given:active",
    "given:inactive",
    "accessible:inferrable",
    "accessible:commonground",
    "accessible:aggregate",
};

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    auto pos = text.find(sep, begin);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(begin));
      return out;
    }
    out.push_back(text.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  auto lines = split_on(text, '\n');
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  return lines;
}

std::optional<int> to_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string span_str(const Span& s) {
  return "(" + std::to_string(s.start) + "," + std::to_string(s.end) + ")";
}

void sort_unique(std::vector<Span>& spans) {
  std::sort(spans.begin(), spans.end());
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
}

// Mentions are rebuilt from clusters; the first cluster owning a span wins.
std::vector<Mention> mentions_from_clusters(const std::vector<Cluster>& clusters) {
  std::map<Span, int> owner;
  for (int c = 0; c < static_cast<int>(clusters.size()); ++c)
    for (const auto& s : clusters[c]) owner.emplace(s, c);
  std::vector<Mention> out;
  out.reserve(owner.size());
  for (const auto& [span, c] : owner) out.push_back(Mention{span, std::nullopt, std::nullopt, c});
  return out;
}

void sort_clusters(std::vector<Cluster>& clusters) {
  for (auto& c : clusters) sort_unique(c);
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const Cluster& a, const Cluster& b) { return a < b; });
}

std::pair<std::string, int> split_doc_key(const std::string& doc_key) {
  auto pos = doc_key.rfind('_');
  if (pos != std::string::npos && pos + 1 < doc_key.size()) {
    if (auto part = to_int(std::string_view(doc_key).substr(pos + 1)); part && *part >= 0)
      return {doc_key.substr(0, pos), *part};
  }
  return {doc_key, 0};
}

// Coref column state while reading one document.
struct OpenMention {
  int start;
  int sentence;
};

class ConllReader {
 public:
  std::vector<Document> read(std::string_view text) {
    int line_no = 0;
    for (auto line : split_lines(text)) {
      ++line_no;
      if (line.rfind("#begin document", 0) == 0) {
        begin(line, line_no);
      } else if (line.rfind("#end document", 0) == 0) {
        end(line_no);
      } else if (!line.empty() && line[0] == '#') {
        continue;
      } else if (split_whitespace(line).empty()) {
        close_sentence();
      } else {
        if (!doc_) throw FramingError("line " + std::to_string(line_no) + ": token outside of #begin/#end document");
        token(line);
      }
    }
    if (doc_) throw FramingError("document " + doc_->doc_key + " has no #end document");
    return std::move(docs_);
  }

 private:
  void begin(std::string_view line, int line_no) {
    if (doc_)
      throw FramingError("line " + std::to_string(line_no) + ": #begin document inside document " + doc_->doc_key +
                         " without #end");
    auto open = line.find('(');
    auto close = line.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      throw FramingError("line " + std::to_string(line_no) + ": malformed #begin document");
    std::string key(line.substr(open + 1, close - open - 1));
    int part = 0;
    if (auto p = line.find("part", close); p != std::string_view::npos) {
      auto fields = split_whitespace(line.substr(p + 4));
      if (!fields.empty())
        if (auto v = to_int(fields[0])) part = *v;
    }
    doc_.emplace();
    doc_->doc_key = key + "_" + std::to_string(part);
    doc_->genre = genre_from_key(key);
    open_.clear();
    cluster_spans_.clear();
    cluster_order_.clear();
    sentence_.clear();
    sentence_index_ = 0;
    token_index_ = 0;
  }

  void end(int line_no) {
    if (!doc_) throw FramingError("line " + std::to_string(line_no) + ": #end document without #begin");
    close_sentence();
    for (const auto& [id, stack] : open_) {
      if (!stack.empty()) {
        throw ParseError("document " + doc_->doc_key + ", sentence " + std::to_string(stack.back().sentence) +
                         ", token " + std::to_string(stack.back().start) + ": unclosed mention for cluster " + id);
      }
    }
    for (const auto& id : cluster_order_) doc_->gold_clusters.push_back(cluster_spans_[id]);
    sort_clusters(doc_->gold_clusters);
    doc_->gold_mentions = mentions_from_clusters(doc_->gold_clusters);
    docs_.push_back(std::move(*doc_));
    doc_.reset();
  }

  void close_sentence() {
    if (!doc_ || sentence_.empty()) return;
    doc_->sentences.push_back(std::move(sentence_));
    sentence_.clear();
    ++sentence_index_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("document " + doc_->doc_key + ", sentence " + std::to_string(sentence_index_) + ", token " +
                     std::to_string(token_index_) + ": " + what);
  }

  void add_span(const std::string& id, Span span) {
    auto [it, inserted] = cluster_spans_.try_emplace(id);
    if (inserted) cluster_order_.push_back(id);
    it->second.push_back(span);
  }

  void token(std::string_view line) {
    auto cols = split_whitespace(line);
    if (cols.size() < 5) fail("expected at least 5 columns, got " + std::to_string(cols.size()));
    sentence_.emplace_back(cols[3]);
    doc_->speakers.emplace_back(cols.size() >= 12 ? cols[9] : "-");
    const int t = token_index_;
    std::string_view cell = cols.back();
    if (cell != "-") {
      for (auto part : split_on(cell, '|')) {
        if (part.empty()) fail("empty coreference entry in '" + std::string(cell) + "'");
        const bool opens = part.front() == '(';
        const bool closes = part.back() == ')';
        std::string_view id = part;
        if (opens) id.remove_prefix(1);
        if (closes && !id.empty()) id.remove_suffix(1);
        if (id.empty() || (!opens && !closes)) fail("malformed coreference entry '" + std::string(part) + "'");
        std::string key(id);
        if (opens && closes) {
          add_span(key, Span{t, t});
        } else if (opens) {
          open_[key].push_back(OpenMention{t, sentence_index_});
        } else {
          auto& stack = open_[key];
          if (stack.empty()) fail("unbalanced parentheses: '" + std::string(part) + "' closes nothing");
          OpenMention m = stack.back();
          stack.pop_back();
          if (m.sentence != sentence_index_) fail("mention of cluster " + key + " crosses a sentence boundary");
          add_span(key, Span{m.start, t});
        }
      }
    }
    ++token_index_;
  }

  std::vector<Document> docs_;
  std::optional<Document> doc_;
  std::map<std::string, std::vector<OpenMention>> open_;
  std::map<std::string, Cluster> cluster_spans_;
  std::vector<std::string> cluster_order_;
  std::vector<std::string> sentence_;
  int sentence_index_ = 0;
  int token_index_ = 0;
};

void check_span(const Document& doc, const std::vector<int>& sentence_of, const Span& s) {
  if (s.start < 0 || s.end < s.start || s.end >= doc.token_count())
    throw RangeError("document " + doc.doc_key + ": span " + span_str(s) + " outside document of " +
                     std::to_string(doc.token_count()) + " tokens");
  if (sentence_of[s.start] != sentence_of[s.end])
    throw RangeError("document " + doc.doc_key + ": span " + span_str(s) + " crosses a sentence boundary");
}

}  // namespace

std::string_view to_string(EntityType type) { return kEntityLabels[static_cast<int>(type)]; }
std::string_view to_string(InfoStatus status) { return kInfoLabels[static_cast<int>(status)]; }

std::string label_or_unknown(const std::optional<EntityType>& type) {
  return type ? std::string(to_string(*type)) : "unknown";
}
std::string label_or_unknown(const std::optional<InfoStatus>& status) {
  return status ? std::string(to_string(*status)) : "unknown";
}

std::optional<EntityType> parse_entity_type(std::string_view label) {
  if (label == "unknown") return std::nullopt;
  for (int i = 0; i < kNumEntityTypes; ++i)
    if (kEntityLabels[i] == label) return static_cast<EntityType>(i);
  throw DataError("unknown entity type label '" + std::string(label) + "'");
}

std::optional<InfoStatus> parse_info_status(std::string_view label) {
  if (label == "unknown") return std::nullopt;
  for (int i = 0; i < kNumInfoStatuses; ++i)
    if (kInfoLabels[i] == label) return static_cast<InfoStatus>(i);
  throw DataError("unknown information status label '" + std::string(label) + "'");
}

int Document::token_count() const {
  int n = 0;
  for (const auto& s : sentences) n += static_cast<int>(s.size());
  return n;
}

std::vector<std::string> Document::tokens() const {
  std::vector<std::string> out;
  out.reserve(token_count());
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<int> Document::sentence_map() const {
  std::vector<int> out;
  out.reserve(token_count());
  for (int i = 0; i < static_cast<int>(sentences.size()); ++i) out.insert(out.end(), sentences[i].size(), i);
  return out;
}

std::vector<int> Document::sentence_starts() const {
  std::vector<int> out;
  int t = 0;
  for (const auto& s : sentences) {
    out.push_back(t);
    t += static_cast<int>(s.size());
  }
  return out;
}

const Mention* Document::find_mention(const Span& span) const {
  auto it = std::find_if(gold_mentions.begin(), gold_mentions.end(), [&](const Mention& m) { return m.span == span; });
  return it == gold_mentions.end() ? nullptr : &*it;
}

std::vector<std::string> check_invariants(const Document& doc) {
  std::vector<std::string> problems;
  const int n = doc.token_count();
  const auto sentence_of = doc.sentence_map();
  auto valid = [&](const Span& s) {
    if (s.start < 0 || s.end < s.start || s.end >= n) {
      problems.push_back("span " + span_str(s) + " out of range");
      return false;
    }
    if (sentence_of[s.start] != sentence_of[s.end]) {
      problems.push_back("span " + span_str(s) + " crosses a sentence boundary");
      return false;
    }
    return true;
  };
  if (static_cast<int>(doc.speakers.size()) != n) problems.push_back("speaker count differs from token count");
  std::map<Span, int> owner;
  for (int c = 0; c < static_cast<int>(doc.gold_clusters.size()); ++c) {
    std::set<Span> seen;
    for (const auto& s : doc.gold_clusters[c]) {
      valid(s);
      if (!seen.insert(s).second) problems.push_back("span " + span_str(s) + " repeated in cluster " + std::to_string(c));
      auto [it, fresh] = owner.emplace(s, c);
      if (!fresh && it->second != c)
        problems.push_back("span " + span_str(s) + " shared by clusters " + std::to_string(it->second) + " and " +
                           std::to_string(c));
      if (!doc.find_mention(s)) problems.push_back("cluster span " + span_str(s) + " missing from mentions");
    }
  }
  for (const auto& m : doc.gold_mentions) {
    valid(m.span);
    if (m.cluster_id) {
      const int c = *m.cluster_id;
      if (c < 0 || c >= static_cast<int>(doc.gold_clusters.size()) ||
          std::find(doc.gold_clusters[c].begin(), doc.gold_clusters[c].end(), m.span) == doc.gold_clusters[c].end())
        problems.push_back("mention " + span_str(m.span) + " names cluster " + std::to_string(c) +
                           " which does not contain it");
    }
  }
  return problems;
}

std::string genre_from_key(std::string_view doc_key) {
  if (auto slash = doc_key.find('/'); slash != std::string_view::npos) return std::string(doc_key.substr(0, slash));
  if (doc_key.rfind("GUM_", 0) == 0) {
    auto rest = doc_key.substr(4);
    return std::string(rest.substr(0, rest.find('_')));
  }
  return "-";
}

std::vector<Document> parse_conll(std::string_view text) { return ConllReader{}.read(text); }

std::string write_conll(const std::vector<Document>& docs, bool include_singletons) {
  std::ostringstream out;
  for (const auto& doc : docs) {
    // Assign output ids: chains first, then singletons.
    std::vector<std::pair<Span, int>> entries;
    int next_id = 0;
    for (const auto& cluster : doc.gold_clusters) {
      if (cluster.size() < 2 && !include_singletons) continue;
      for (const auto& s : cluster) entries.emplace_back(s, next_id);
      ++next_id;
    }
    if (include_singletons) {
      for (const auto& m : doc.gold_mentions) {
        if (m.cluster_id) continue;
        entries.emplace_back(m.span, next_id++);
      }
    }

    const int n = doc.token_count();
    std::vector<std::vector<std::string>> closes(n), singles(n), opens(n);
    // closes: innermost first; opens: outermost first.
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      if (a.first.start != b.first.start) return a.first.start > b.first.start;
      if (a.first.end != b.first.end) return a.first.end < b.first.end;
      return a.second < b.second;
    });
    for (const auto& [s, id] : entries) {
      const auto tag = std::to_string(id);
      if (s.start == s.end) continue;
      closes[s.end].push_back(tag + ")");
    }
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      if (a.first.start != b.first.start) return a.first.start < b.first.start;
      return a.first.end > b.first.end;
    });
    for (const auto& [s, id] : entries) {
      const auto tag = std::to_string(id);
      if (s.start == s.end)
        singles[s.start].push_back("(" + tag + ")");
      else
        opens[s.start].push_back("(" + tag);
    }

    auto [key, part] = split_doc_key(doc.doc_key);
    char part_buf[16];
    std::snprintf(part_buf, sizeof part_buf, "%03d", part);
    out << "#begin document (" << key << "); part " << part_buf << "\n";
    int t = 0;
    for (const auto& sentence : doc.sentences) {
      for (int w = 0; w < static_cast<int>(sentence.size()); ++w, ++t) {
        std::string cell;
        for (const auto* group : {&closes[t], &singles[t], &opens[t]})
          for (const auto& e : *group) cell += (cell.empty() ? "" : "|") + e;
        if (cell.empty()) cell = "-";
        const std::string& speaker = t < static_cast<int>(doc.speakers.size()) && !doc.speakers[t].empty()
                                         ? doc.speakers[t]
                                         : std::string("-");
        out << key << '\t' << part << '\t' << w << '\t' << sentence[w] << "\t-\t-\t-\t-\t-\t" << speaker << "\t*\t"
            << cell << '\n';
      }
      out << '\n';
    }
    out << "#end document\n";
  }
  return out.str();
}

std::vector<SidecarRow> parse_sidecar(std::string_view text) {
  std::vector<SidecarRow> rows;
  auto lines = split_lines(text);
  bool header_seen = false;
  int line_no = 0;
  for (auto line : lines) {
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kSidecarHeader) throw ParseError("sidecar line 1: expected header '" + std::string(kSidecarHeader) + "'");
      header_seen = true;
      continue;
    }
    auto fields = split_on(line, '\t');
    auto where = "sidecar line " + std::to_string(line_no) + ": ";
    if (fields.size() != 6) throw ParseError(where + "expected 6 tab-separated fields");
    auto start = to_int(fields[1]);
    auto end = to_int(fields[2]);
    if (!start || !end) throw ParseError(where + "non-integer span bounds");
    SidecarRow row;
    row.doc_key = std::string(fields[0]);
    row.span = Span{*start, *end};
    try {
      row.entity_type = parse_entity_type(fields[3]);
      row.info_status = parse_info_status(fields[4]);
    } catch (const DataError& e) {
      throw ParseError(where + e.what());
    }
    if (fields[5] != "_") {
      auto c = to_int(fields[5]);
      if (!c) throw ParseError(where + "cluster_id must be an integer or '_'");
      row.cluster_id = *c;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string write_sidecar(const std::vector<SidecarRow>& rows) {
  std::ostringstream out;
  out << kSidecarHeader << '\n';
  for (const auto& r : rows) {
    out << r.doc_key << '\t' << r.span.start << '\t' << r.span.end << '\t' << label_or_unknown(r.entity_type) << '\t'
        << label_or_unknown(r.info_status) << '\t' << (r.cluster_id ? std::to_string(*r.cluster_id) : "_") << '\n';
  }
  return out.str();
}

std::vector<SidecarRow> sidecar_rows(const Document& doc) {
  std::vector<SidecarRow> rows;
  for (const auto& m : doc.gold_mentions)
    rows.push_back(SidecarRow{doc.doc_key, m.span, m.entity_type, m.info_status, m.cluster_id});
  return rows;
}

Document merge_sidecar(const Document& doc, const std::vector<SidecarRow>& rows) {
  Document out = doc;
  const auto sentence_of = doc.sentence_map();
  std::map<Span, std::size_t> index;
  for (std::size_t i = 0; i < out.gold_mentions.size(); ++i) index.emplace(out.gold_mentions[i].span, i);

  for (const auto& row : rows) {
    if (row.doc_key != doc.doc_key) continue;
    check_span(doc, sentence_of, row.span);
    auto it = index.find(row.span);
    if (it == index.end()) {
      out.gold_mentions.push_back(Mention{row.span, std::nullopt, std::nullopt, std::nullopt});
      it = index.emplace(row.span, out.gold_mentions.size() - 1).first;
    }
    Mention& m = out.gold_mentions[it->second];
    if (row.entity_type) {
      if (m.entity_type && *m.entity_type != *row.entity_type)
        throw ConflictError("document " + doc.doc_key + ": span " + span_str(row.span) + " has entity types " +
                            std::string(to_string(*m.entity_type)) + " and " +
                            std::string(to_string(*row.entity_type)));
      m.entity_type = row.entity_type;
    }
    if (row.info_status) {
      if (m.info_status && *m.info_status != *row.info_status)
        throw ConflictError("document " + doc.doc_key + ": span " + span_str(row.span) +
                            " has information statuses " + std::string(to_string(*m.info_status)) + " and " +
                            std::string(to_string(*row.info_status)));
      m.info_status = row.info_status;
    }
    if (row.cluster_id) {
      const int c = *row.cluster_id;
      if (c < 0 || c >= static_cast<int>(out.gold_clusters.size()))
        throw RangeError("document " + doc.doc_key + ": span " + span_str(row.span) + " names cluster " +
                         std::to_string(c) + " but the document has " + std::to_string(out.gold_clusters.size()));
      if (m.cluster_id && *m.cluster_id != c)
        throw ConflictError("document " + doc.doc_key + ": span " + span_str(row.span) + " belongs to cluster " +
                            std::to_string(*m.cluster_id) + " but the sidecar says " + std::to_string(c));
      if (!m.cluster_id) {
        auto& cluster = out.gold_clusters[c];
        cluster.insert(std::lower_bound(cluster.begin(), cluster.end(), row.span), row.span);
        m.cluster_id = c;
      }
    }
  }
  std::sort(out.gold_mentions.begin(), out.gold_mentions.end(),
            [](const Mention& a, const Mention& b) { return a.span < b.span; });
  return out;
}

std::vector<Document> merge_sidecar(std::vector<Document> docs, const std::vector<SidecarRow>& rows) {
  for (auto& d : docs) d = merge_sidecar(d, rows);
  return docs;
}

std::vector<std::pair<Span, Span>> boundary_conflicts(const Document& doc) {
  std::vector<std::pair<Span, Span>> out;
  const auto& ms = doc.gold_mentions;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j)
      if (ms[i].span.crosses(ms[j].span)) out.emplace_back(ms[i].span, ms[j].span);
  return out;
}

std::string write_jsonl(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    nlohmann::json j;
    j["doc_key"] = doc.doc_key;
    j["genre"] = doc.genre;
    j["sentences"] = doc.sentences;
    nlohmann::json speakers = nlohmann::json::array();
    std::size_t t = 0;
    for (const auto& s : doc.sentences) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t w = 0; w < s.size(); ++w, ++t) row.push_back(t < doc.speakers.size() ? doc.speakers[t] : "-");
      speakers.push_back(std::move(row));
    }
    j["speakers"] = std::move(speakers);
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : doc.gold_clusters) {
      nlohmann::json cj = nlohmann::json::array();
      for (const auto& s : c) cj.push_back({s.start, s.end});
      clusters.push_back(std::move(cj));
    }
    j["clusters"] = std::move(clusters);
    nlohmann::json mentions = nlohmann::json::array();
    for (const auto& m : doc.gold_mentions)
      mentions.push_back({m.span.start, m.span.end, label_or_unknown(m.entity_type), label_or_unknown(m.info_status)});
    j["mentions"] = std::move(mentions);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Document> parse_jsonl(std::string_view text) {
  std::vector<Document> docs;
  int line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (split_whitespace(line).empty()) continue;
    const auto where = "jsonl line " + std::to_string(line_no) + ": ";
    try {
      auto j = nlohmann::json::parse(line);
      Document doc;
      doc.doc_key = j.at("doc_key").get<std::string>();
      doc.genre = j.contains("genre") ? j["genre"].get<std::string>() : genre_from_key(doc.doc_key);
      doc.sentences = j.at("sentences").get<std::vector<std::vector<std::string>>>();
      if (j.contains("speakers")) {
        for (const auto& s : j["speakers"]) {
          if (s.is_array())
            for (const auto& x : s) doc.speakers.push_back(x.get<std::string>());
          else
            doc.speakers.push_back(s.get<std::string>());
        }
      }
      if (doc.speakers.empty()) doc.speakers.assign(doc.token_count(), "-");
      if (static_cast<int>(doc.speakers.size()) != doc.token_count())
        throw ParseError(where + "speaker count differs from token count");
      for (const auto& c : j.value("clusters", nlohmann::json::array())) {
        Cluster cluster;
        for (const auto& s : c) cluster.push_back(Span{s.at(0).get<int>(), s.at(1).get<int>()});
        doc.gold_clusters.push_back(std::move(cluster));
      }
      for (auto& c : doc.gold_clusters) sort_unique(c);
      doc.gold_mentions = mentions_from_clusters(doc.gold_clusters);
      std::vector<SidecarRow> rows;
      for (const auto& m : j.value("mentions", nlohmann::json::array())) {
        SidecarRow row{doc.doc_key, Span{m.at(0).get<int>(), m.at(1).get<int>()}, std::nullopt, std::nullopt,
                       std::nullopt};
        if (m.size() > 2) row.entity_type = parse_entity_type(m.at(2).get<std::string>());
        if (m.size() > 3) row.info_status = parse_info_status(m.at(3).get<std::string>());
        rows.push_back(std::move(row));
      }
      docs.push_back(merge_sidecar(doc, rows));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + e.what());
    }
  }
  return docs;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

std::vector<Document> load_documents(const std::string& path, const std::string& sidecar_path) {
  const auto text = read_file(path);
  const bool json = path.ends_with(".jsonl") || path.ends_with(".json");
  auto docs = json ? parse_jsonl(text) : parse_conll(text);
  if (!sidecar_path.empty()) docs = merge_sidecar(std::move(docs), parse_sidecar(read_file(sidecar_path)));
  return docs;
}

}  // namespace coref

// Documents, mention layers and the on-disk formats they travel in:
// CoNLL-2012 coreference columns, the mention sidecar TSV and JSONL.
#pragma once

#include <array>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coref {

/// Inclusive token interval, addressed at document level.
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  bool contains(const Span& other) const { return start <= other.start && other.end <= end; }
  /// Overlap without nesting.
  bool crosses(const Span& other) const {
    return (start < other.start && other.start <= end && end < other.end) ||
           (other.start < start && start <= other.end && other.end < end);
  }
  auto operator<=>(const Span&) const = default;
};

enum class EntityType {
  Abstract,
  Animal,
  Event,
  Object,
  Organization,
  Person,
  Place,
  Plant,
  Substance,
  Time,
};
inline constexpr int kNumEntityTypes = 10;

enum class InfoStatus {
  New,
  GivenActive,
  GivenInactive,
  AccessibleInferrable,
  AccessibleCommonground,
  AccessibleAggregate,
};
inline constexpr int kNumInfoStatuses = 6;

std::string_view to_string(EntityType type);
std::string_view to_string(InfoStatus status);
/// "unknown" for an absent label.
std::string label_or_unknown(const std::optional<EntityType>& type);
std::string label_or_unknown(const std::optional<InfoStatus>& status);
/// Parses a label; "unknown" yields nullopt, anything else outside the set throws DataError.
std::optional<EntityType> parse_entity_type(std::string_view label);
std::optional<InfoStatus> parse_info_status(std::string_view label);

struct Mention {
  Span span;
  std::optional<EntityType> entity_type;
  std::optional<InfoStatus> info_status;
  std::optional<int> cluster_id;  // absent for singletons

  bool operator==(const Mention&) const = default;
};

using Cluster = std::vector<Span>;

struct Document {
  std::string doc_key;
  std::string genre;
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> speakers;  // one per token
  std::vector<Cluster> gold_clusters;
  std::vector<Mention> gold_mentions;

  int token_count() const;
  std::vector<std::string> tokens() const;
  /// Sentence index of every token.
  std::vector<int> sentence_map() const;
  /// First token of every sentence.
  std::vector<int> sentence_starts() const;
  const Mention* find_mention(const Span& span) const;

  bool operator==(const Document&) const = default;
};

// Error taxonomy. DataError is the common base so callers can map any input
// problem onto a single exit code.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : DataError {
  using DataError::DataError;
};
struct FramingError : DataError {
  using DataError::DataError;
};
struct RangeError : DataError {
  using DataError::DataError;
};
struct ConflictError : DataError {
  using DataError::DataError;
};

/// Lists violated Document invariants; empty when the document is valid.
std::vector<std::string> check_invariants(const Document& doc);

/// Genre derived from a document key ("bc/cctv/00/x" -> "bc", "GUM_news_x" -> "news").
std::string genre_from_key(std::string_view doc_key);

// ---- CoNLL-2012 ----------------------------------------------------------

/// Documents are keyed "<key>_<part>". Mentions are built from the coref
/// column with unknown entity type and information status.
std::vector<Document> parse_conll(std::string_view text);

/// Singleton mentions (no cluster, or a cluster of size one) are written as
/// "(id)" only when include_singletons is set.
std::string write_conll(const std::vector<Document>& docs, bool include_singletons);

// ---- Mention sidecar ------------------------------------------------------

struct SidecarRow {
  std::string doc_key;
  Span span;
  std::optional<EntityType> entity_type;
  std::optional<InfoStatus> info_status;
  std::optional<int> cluster_id;

  bool operator==(const SidecarRow&) const = default;
};

inline constexpr std::string_view kSidecarHeader =
    "doc_key\tstart\tend\tentity_type\tinfo_status\tcluster_id";

std::vector<SidecarRow> parse_sidecar(std::string_view text);
std::string write_sidecar(const std::vector<SidecarRow>& rows);
/// Sidecar rows carrying every mention of the document.
std::vector<SidecarRow> sidecar_rows(const Document& doc);

/// Rows for other documents are ignored. Spans only present in the sidecar
/// become singletons unless the row names a cluster.
Document merge_sidecar(const Document& doc, const std::vector<SidecarRow>& rows);
std::vector<Document> merge_sidecar(std::vector<Document> docs, const std::vector<SidecarRow>& rows);

/// Pairs of mentions whose spans partially overlap. Not an error: the mention
/// layers are allowed to disagree on boundaries, callers decide what to do.
std::vector<std::pair<Span, Span>> boundary_conflicts(const Document& doc);

// ---- JSONL ------------------------------------------------------------------

std::string write_jsonl(const std::vector<Document>& docs);
std::vector<Document> parse_jsonl(std::string_view text);

// ---- Files ------------------------------------------------------------------

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);
/// Reads CoNLL or JSONL by extension, optionally merging a sidecar.
std::vector<Document> load_documents(const std::string& path, const std::string& sidecar_path = {});

}  // namespace coref

#include "coref/encoder.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace coref {
namespace {

std::string cache_name(const std::string& doc_key) {
  std::string out = doc_key;
  std::replace(out.begin(), out.end(), '/', '_');
  return out;
}

Matrix read_matrix(const std::filesystem::path& path, int dim) {
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (row.empty()) continue;
    if (static_cast<int>(row.size()) != dim)
      throw CapabilityError(path.string() + ": expected " + std::to_string(dim) + " values per row");
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][j];
  return m;
}

}  // namespace

std::string_view to_string(EncoderKind kind) { return kind == EncoderKind::Toy ? "toy" : "pretrained"; }

EncoderKind parse_encoder_kind(std::string_view text) {
  if (text == "toy") return EncoderKind::Toy;
  if (text == "pretrained") return EncoderKind::Pretrained;
  throw std::invalid_argument("unknown encoder kind '" + std::string(text) + "' (expected toy or pretrained)");
}

void validate(const EncoderConfig& cfg) {
  if (cfg.dim <= 0) throw std::invalid_argument("encoder dim must be positive");
  if (cfg.kind == EncoderKind::Toy && cfg.window < 0) throw std::invalid_argument("encoder window must be >= 0");
  if (cfg.kind == EncoderKind::Toy && cfg.vocab_size < 1) throw std::invalid_argument("vocab_size must be >= 1");
  if (cfg.segment_length <= 0) throw std::invalid_argument("segment_length must be positive");
}

Vocabulary Vocabulary::build(const std::vector<Document>& docs, int max_size) {
  std::map<std::string, long> counts;
  for (const auto& d : docs)
    for (const auto& s : d.sentences)
      for (const auto& t : s) ++counts[t];
  std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens{"<unk>"};
  for (const auto& [tok, n] : ranked) {
    if (static_cast<int>(tokens.size()) >= max_size) break;
    tokens.push_back(tok);
  }
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  if (tokens.empty() || tokens[0] != "<unk>") tokens.insert(tokens.begin(), "<unk>");
  v.tokens_ = std::move(tokens);
  for (int i = 1; i < static_cast<int>(v.tokens_.size()); ++i) v.ids_.emplace(v.tokens_[i], i);
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? 0 : it->second;
}

std::vector<std::pair<int, int>> segment_windows(int token_count, int length) {
  std::vector<std::pair<int, int>> out;
  for (int b = 0; b < token_count; b += length) out.emplace_back(b, std::min(token_count, b + length));
  return out;
}

Encoder::Encoder(const EncoderConfig& cfg, Vocabulary vocab, ParameterStore& store)
    : cfg_(cfg), vocab_(std::move(vocab)) {
  validate(cfg_);
  if (cfg_.kind != EncoderKind::Toy) return;
  std::mt19937_64 rng(cfg_.seed);
  const int d = cfg_.dim;
  embedding_ = store.add("encoder.embedding", glorot(vocab_.size(), d, rng), ParamGroup::Encoder);
  mix_weight_ = store.add("encoder.mix.weight", glorot(2 * d, d, rng), ParamGroup::Encoder);
  mix_bias_ = store.add("encoder.mix.bias", Matrix::Zero(1, d), ParamGroup::Encoder);
}

ad::Var Encoder::encode(ad::Tape& tape, ParameterStore& store, const Document& doc) const {
  if (cfg_.kind == EncoderKind::Pretrained) return encode_pretrained(tape, doc);
  ad::IndexList ids;
  for (const auto& s : doc.sentences)
    for (const auto& t : s) ids.push_back(vocab_.id(t));
  ad::Var emb = ad::gather_rows(tape.parameter(store.at(embedding_)), std::move(ids));
  ad::Var context = ad::window_mean(emb, cfg_.window);
  ad::Var mixed = ad::matmul(ad::hcat({emb, context}), tape.parameter(store.at(mix_weight_)));
  return ad::tanh(ad::add_row(mixed, tape.parameter(store.at(mix_bias_))));
}

// Pretrained vectors are produced offline, one file per document or one per
// segment_windows() segment, under $COREF_MTL_CACHE.
ad::Var Encoder::encode_pretrained(ad::Tape& tape, const Document& doc) const {
  const char* cache = std::getenv("COREF_MTL_CACHE");
  const std::string hint =
      "pretrained encoder assets are not available; set COREF_MTL_CACHE to a directory of precomputed "
      "embeddings or use the toy encoder (encoder.kind = toy)";
  if (cache == nullptr || *cache == '\0') throw CapabilityError(hint);
  const std::filesystem::path dir(cache);
  const auto name = cache_name(doc.doc_key);
  const int n = doc.token_count();
  Matrix values;
  if (std::filesystem::exists(dir / (name + ".emb"))) {
    values = read_matrix(dir / (name + ".emb"), cfg_.dim);
  } else {
    const auto windows = segment_windows(n, cfg_.segment_length);
    values.resize(n, cfg_.dim);
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const auto path = dir / (name + ".seg" + std::to_string(k) + ".emb");
      if (!std::filesystem::exists(path)) throw CapabilityError(hint + " (missing " + path.string() + ")");
      Matrix seg = read_matrix(path, cfg_.dim);
      const int len = windows[k].second - windows[k].first;
      if (seg.rows() != len) throw CapabilityError(path.string() + ": wrong row count");
      values.middleRows(windows[k].first, len) = seg;
    }
  }
  if (values.rows() != n) throw CapabilityError(doc.doc_key + ": cached embeddings have wrong row count");
  return tape.constant(std::move(values));
}

ContextualEmbeddings encode(const Document& doc, const Encoder& encoder, ParameterStore& store) {
  ad::Tape tape;
  return ContextualEmbeddings{encoder.encode(tape, store, doc).value()};
}

}  // namespace coref

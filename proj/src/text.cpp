#include "patentrec/text.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace patentrec {
namespace {

bool is_token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool all_digits(const std::string& token) {
  return std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void push_token(std::vector<std::string>& out, std::string& current) {
  if (current.size() >= 2 && !all_digits(current)) out.push_back(current);
  current.clear();
}

std::vector<TokenId> lookup(const Vocabulary& vocab, std::string_view text) {
  std::vector<TokenId> ids;
  for (const auto& token : tokenize_text(text)) {
    if (auto id = vocab.find(token)) ids.push_back(*id);
  }
  return ids;
}

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    } else {
      push_token(out, current);
    }
  }
  push_token(out, current);
  return out;
}

Vocabulary::Vocabulary(const std::map<std::string, std::size_t>& doc_freq, std::size_t n_docs,
                       std::size_t min_df)
    : n_docs_(n_docs), min_df_(min_df) {
  if (min_df == 0) throw ValidationError("min_df must be at least 1");
  for (const auto& [token, df] : doc_freq) {
    if (df > n_docs) throw ValidationError("document frequency exceeds document count");
    if (df < min_df) continue;
    ids_.emplace(token, static_cast<TokenId>(tokens_.size()));
    tokens_.push_back(token);
    doc_freq_.push_back(df);
  }
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::fingerprint() const {
  Fingerprint fp;
  fp.add(static_cast<std::uint64_t>(kTokenizerVersion));
  fp.add(static_cast<std::uint64_t>(min_df_));
  for (const auto& token : tokens_) fp.add(token);
  return fp.hex();
}

void Vocabulary::save(std::ostream& out) const {
  ArtifactHeader header{"vocabulary", 1, {}};
  header.fields["tokenizer"] = std::to_string(kTokenizerVersion);
  header.fields["min_df"] = std::to_string(min_df_);
  header.fields["n_docs"] = std::to_string(n_docs_);
  header.fields["size"] = std::to_string(tokens_.size());
  header.fields["fingerprint"] = fingerprint();
  write_header(out, header);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << tokens_[i] << '\t' << i << '\t' << doc_freq_[i] << '\n';
  }
}

Vocabulary Vocabulary::load(std::istream& in) {
  ArtifactHeader header = read_header(in, "vocabulary", 1);
  if (std::stoi(header.at("tokenizer")) != kTokenizerVersion) {
    throw ArtifactError("vocabulary built with a different tokenizer version");
  }
  const std::size_t size = std::stoull(header.at("size"));
  std::map<std::string, std::size_t> doc_freq;
  std::string line;
  std::size_t expected_id = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto parts = split_whitespace(line);
    if (parts.size() != 3) throw ArtifactError("malformed vocabulary row: " + line);
    if (std::stoull(std::string(parts[1])) != expected_id) {
      throw ArtifactError("vocabulary ids are not dense");
    }
    ++expected_id;
    doc_freq.emplace(std::string(parts[0]), std::stoull(std::string(parts[2])));
  }
  Vocabulary vocab(doc_freq, std::stoull(header.at("n_docs")), std::stoull(header.at("min_df")));
  if (vocab.size() != size || vocab.fingerprint() != header.at("fingerprint")) {
    throw ArtifactError("vocabulary contents do not match header fingerprint");
  }
  return vocab;
}

Vocabularies build_vocabulary(const CorpusStore& store, std::span<const PatentId> documents,
                              std::size_t min_df) {
  if (min_df == 0) throw ValidationError("min_df must be at least 1");
  std::map<std::string, std::size_t> word_df;
  std::map<std::string, std::size_t> cpc_df;
  for (const auto& id : documents) {
    const PatentRecord& record = store.record(id);
    std::set<std::string> seen;
    for (auto& token : tokenize_text(record.title)) seen.insert(std::move(token));
    for (auto& token : tokenize_text(record.abstract_text)) seen.insert(std::move(token));
    for (const auto& token : seen) ++word_df[token];
    for (const auto& code : record.cpc) ++cpc_df[code];
  }
  Vocabularies vocab{Vocabulary(word_df, documents.size(), min_df),
                     Vocabulary(cpc_df, documents.size(), 1)};
  if (vocab.words.empty()) throw ValidationError("empty vocabulary");
  return vocab;
}

Vocabularies build_vocabulary(const CorpusStore& store, std::size_t min_df) {
  std::vector<PatentId> ids;
  ids.reserve(store.size());
  for (const auto& record : store.records()) ids.push_back(record.id);
  return build_vocabulary(store, ids, min_df);
}

TokenizedPatent tokenize_patent(const PatentRecord& record, const Vocabularies& vocab) {
  TokenizedPatent out;
  out.title_ids = lookup(vocab.words, record.title);
  out.abstract_ids = lookup(vocab.words, record.abstract_text);
  for (const auto& code : record.cpc) {
    if (auto id = vocab.cpc.find(normalize_code(code))) out.cpc_ids.push_back(*id);
  }
  std::sort(out.cpc_ids.begin(), out.cpc_ids.end());
  out.cpc_ids.erase(std::unique(out.cpc_ids.begin(), out.cpc_ids.end()), out.cpc_ids.end());
  return out;
}

std::vector<TokenizedPatent> tokenize_corpus(const CorpusStore& store, const Vocabularies& vocab) {
  std::vector<TokenizedPatent> out;
  out.reserve(store.size());
  for (const auto& record : store.records()) out.push_back(tokenize_patent(record, vocab));
  return out;
}

BowVector to_bow(std::span<const TokenId> ids) {
  BowVector bow;
  for (TokenId id : ids) ++bow[id];
  return bow;
}

BowVector merge_bow(const BowVector& a, const BowVector& b) {
  BowVector out = a;
  for (const auto& [id, count] : b) out[id] += count;
  return out;
}

double bow_cosine(const BowVector& a, const BowVector& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [id, count] : a) {
    na += static_cast<double>(count) * count;
    auto it = b.find(id);
    if (it != b.end()) dot += static_cast<double>(count) * it->second;
  }
  for (const auto& [id, count] : b) nb += static_cast<double>(count) * count;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace patentrec

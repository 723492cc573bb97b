#include "patentrec/knn.hpp"

#include <algorithm>
#include <queue>

namespace patentrec {

EmbeddingIndex::EmbeddingIndex(std::vector<PatentId> ids, std::vector<double> vectors,
                               std::size_t dim, std::string model_fingerprint)
    : ids_(std::move(ids)),
      vectors_(std::move(vectors)),
      dim_(dim),
      model_fingerprint_(std::move(model_fingerprint)) {
  if (ids_.empty()) throw ValidationError("empty index");
  if (dim_ == 0 || vectors_.size() != ids_.size() * dim_) {
    throw ValidationError("index vectors do not match ids x dim");
  }
  std::unordered_set<PatentId> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw ValidationError("duplicate id in index: " + id);
  }
}

void EmbeddingIndex::save(std::ostream& out) const {
  ArtifactHeader header{"index", 1, {}};
  header.fields["dim"] = std::to_string(dim_);
  header.fields["size"] = std::to_string(ids_.size());
  header.fields["csnet"] = model_fingerprint_;
  write_header(out, header);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    out << ids_[i];
    for (double v : row(i)) out << ' ' << format_hex(v);
    out << '\n';
  }
}

EmbeddingIndex EmbeddingIndex::load(std::istream& in, const std::string& expected_fingerprint) {
  ArtifactHeader header = read_header(in, "index", 1);
  if (header.at("csnet") != expected_fingerprint) {
    throw ArtifactError("fingerprint mismatch: index was built from another csnet model");
  }
  const std::size_t dim = std::stoull(header.at("dim"));
  const std::size_t size = std::stoull(header.at("size"));
  std::vector<PatentId> ids;
  std::vector<double> vectors;
  std::string line;
  while (ids.size() < size && std::getline(in, line)) {
    auto parts = split_whitespace(line);
    if (parts.size() != dim + 1) throw ArtifactError("malformed index row");
    ids.emplace_back(parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) vectors.push_back(parse_hex(parts[i]));
  }
  if (ids.size() != size) throw ArtifactError("truncated index artifact");
  return EmbeddingIndex(std::move(ids), std::move(vectors), dim, header.at("csnet"));
}

EmbeddingIndex build_index(const CsnetModel& model, const CorpusStore& store,
                           const std::vector<TokenizedPatent>& tokens,
                           std::span<const PatentId> pool) {
  if (pool.empty()) throw ValidationError("empty index");
  std::vector<PatentId> ids;
  std::vector<double> vectors;
  vectors.reserve(pool.size() * model.dim());
  for (const auto& id : pool) {
    const RecordIndex r = store.index_of(id);
    const auto e = embed_patent(model, tokens.at(r));
    ids.push_back(id);
    vectors.insert(vectors.end(), e.begin(), e.end());
  }
  return EmbeddingIndex(std::move(ids), std::move(vectors), model.dim(), model.fingerprint());
}

CandidateSet top_k(const EmbeddingIndex& index, const PatentId& query_id,
                   std::span<const double> query, std::size_t k,
                   const std::unordered_set<PatentId>& exclude) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (query.size() != index.dim()) throw ValidationError("query dimension does not match index");
  // Max-heap on "worse than": the top is the weakest of the current best k.
  auto worse = [](const ScoredId& a, const ScoredId& b) { return ranks_before(a, b); };
  std::priority_queue<ScoredId, std::vector<ScoredId>, decltype(worse)> heap(worse);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const PatentId& id = index.ids()[i];
    if (id == query_id || exclude.count(id) > 0) continue;
    ScoredId candidate{id, cosine_sim(query, index.row(i))};
    if (heap.size() < k) {
      heap.push(std::move(candidate));
    } else if (ranks_before(candidate, heap.top())) {
      heap.pop();
      heap.push(std::move(candidate));
    }
  }
  CandidateSet result{query_id, {}};
  result.items.reserve(heap.size());
  while (!heap.empty()) {
    result.items.push_back(heap.top());
    heap.pop();
  }
  std::reverse(result.items.begin(), result.items.end());
  return result;
}

}  // namespace patentrec

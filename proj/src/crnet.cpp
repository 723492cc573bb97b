#include "patentrec/crnet.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace patentrec {
namespace {

std::vector<TokenId> distinct(std::span<const TokenId> ids) {
  std::vector<TokenId> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double sorted_intersection_weight(const std::vector<TokenId>& a, const std::vector<TokenId>& b,
                                  const EmbeddingTableView& table) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      sum += table.magnitude[static_cast<std::size_t>(*ia)];
      ++ia;
      ++ib;
    }
  }
  return sum;
}

}  // namespace

std::size_t feature_width(std::size_t dim, const FeatureOptions& options) {
  return (options.use_cpc ? 3 : 2) + 2 + 2 * dim;
}

double field_similarity(const CsnetModel& model, const TokenizedPatent& q,
                        const TokenizedPatent& c, Field field) {
  const FieldSums a = field_sums(model, q);
  const FieldSums b = field_sums(model, c);
  switch (field) {
    case Field::kTitle:
      return cosine_sim(a.title, b.title);
    case Field::kAbstract:
      return cosine_sim(a.abstract_text, b.abstract_text);
    case Field::kCpc:
      break;
  }
  return cosine_sim(a.cpc, b.cpc);
}

double intersection_weight(std::span<const TokenId> q_field, std::span<const TokenId> c_field,
                           const EmbeddingTableView& table) {
  return sorted_intersection_weight(distinct(q_field), distinct(c_field), table);
}

PreparedPatent prepare_patent(const CsnetModel& model, const TokenizedPatent& patent) {
  PreparedPatent out;
  out.sums = field_sums(model, patent);
  out.embedding = combine_fields(model, out.sums);
  out.title_set = distinct(patent.title_ids);
  out.abstract_set = distinct(patent.abstract_ids);
  out.title_bow = to_bow(patent.title_ids);
  out.abstract_bow = to_bow(patent.abstract_ids);
  out.cpc_bow = to_bow(patent.cpc_ids);
  return out;
}

PreparedCorpus::PreparedCorpus(const CsnetModel& model, const std::vector<TokenizedPatent>& tokens) {
  patents_.reserve(tokens.size());
  for (const auto& patent : tokens) patents_.push_back(prepare_patent(model, patent));
}

std::vector<double> build_features(const CsnetModel& model, const PreparedPatent& q,
                                   const PreparedPatent& c, const FeatureOptions& options) {
  if (options.use_cpc && !model.use_cpc()) {
    throw ValidationError("cpc features requested from a csnet trained without cpc");
  }
  if (q.embedding.size() != model.dim() || c.embedding.size() != model.dim()) {
    throw ValidationError("embedding dimension does not match the csnet model");
  }
  std::vector<double> x;
  x.reserve(feature_width(model.dim(), options));
  if (options.raw_bow_similarity) {
    x.push_back(bow_cosine(q.title_bow, c.title_bow));
    x.push_back(bow_cosine(q.abstract_bow, c.abstract_bow));
    if (options.use_cpc) x.push_back(bow_cosine(q.cpc_bow, c.cpc_bow));
  } else {
    x.push_back(cosine_sim(q.sums.title, c.sums.title));
    x.push_back(cosine_sim(q.sums.abstract_text, c.sums.abstract_text));
    if (options.use_cpc) x.push_back(cosine_sim(q.sums.cpc, c.sums.cpc));
  }
  const EmbeddingTableView words = model.word_table();
  x.push_back(sorted_intersection_weight(q.title_set, c.title_set, words));
  x.push_back(sorted_intersection_weight(q.abstract_set, c.abstract_set, words));
  x.insert(x.end(), q.embedding.begin(), q.embedding.end());
  x.insert(x.end(), c.embedding.begin(), c.embedding.end());
  return x;
}

std::vector<double> build_features(const CsnetModel& model, const TokenizedPatent& q,
                                   const TokenizedPatent& c, std::span<const double> e_q,
                                   std::span<const double> e_c, const FeatureOptions& options) {
  if (e_q.size() != model.dim() || e_c.size() != model.dim()) {
    throw ValidationError("embedding dimension does not match the csnet model");
  }
  PreparedPatent pq = prepare_patent(model, q);
  PreparedPatent pc = prepare_patent(model, c);
  pq.embedding.assign(e_q.begin(), e_q.end());
  pc.embedding.assign(e_c.begin(), e_c.end());
  return build_features(model, pq, pc, options);
}

double CrnetModel::score(std::span<const double> features) const {
  return mlp.forward(features).at(0);
}

void CrnetModel::save(std::ostream& out, std::uint64_t seed) const {
  ArtifactHeader header{"crnet", 1, {}};
  header.fields["dim"] = std::to_string(dim);
  header.fields["use_cpc"] = options.use_cpc ? "1" : "0";
  header.fields["raw_bow"] = options.raw_bow_similarity ? "1" : "0";
  header.fields["csnet"] = csnet_fingerprint;
  header.fields["seed"] = std::to_string(seed);
  write_header(out, header);
  mlp.save(out);
}

CrnetModel CrnetModel::load(std::istream& in, const CsnetModel& csnet) {
  ArtifactHeader header = read_header(in, "crnet", 1);
  CrnetModel model;
  model.dim = std::stoull(header.at("dim"));
  model.options.use_cpc = header.at("use_cpc") == "1";
  model.options.raw_bow_similarity = header.at("raw_bow") == "1";
  model.csnet_fingerprint = header.at("csnet");
  if (model.dim != csnet.dim()) {
    throw ArtifactError("fingerprint mismatch: crnet expects embedding dim " +
                        std::to_string(model.dim) + ", csnet has " + std::to_string(csnet.dim()));
  }
  if (model.csnet_fingerprint != csnet.fingerprint()) {
    throw ArtifactError("fingerprint mismatch: crnet was trained on another csnet model");
  }
  model.mlp = nn::Mlp::load(in);
  if (model.mlp.input_size() != feature_width(model.dim, model.options)) {
    throw ArtifactError("crnet input width does not match its feature layout");
  }
  return model;
}

CrnetModel initialize_crnet(const CsnetModel& csnet, const FeatureOptions& options,
                            std::uint64_t seed) {
  const std::size_t widths[] = {feature_width(csnet.dim(), options), kCrnetHiddenWidth,
                                kCrnetHiddenWidth, kCrnetHiddenWidth, 1};
  Rng rng(Rng::derive(seed, 11));
  return CrnetModel{
      nn::Mlp::glorot(widths, nn::Activation::kElu, nn::Activation::kSigmoid, rng),
      csnet.dim(), options, csnet.fingerprint()};
}

CrnetTrainResult train_crnet(const CorpusStore& store, const std::vector<CandidateSet>& candsets,
                             const CsnetModel& csnet, const PreparedCorpus& prepared,
                             const CrnetTrainConfig& config) {
  if (config.batch_size == 0) throw ValidationError("batch size must be positive");
  if (prepared.size() != store.size()) throw ValidationError("prepared corpus does not match store");
  const std::size_t width = feature_width(csnet.dim(), config.features);

  std::vector<double> features;
  std::vector<int> labels;
  for (const auto& candset : candsets) {
    const RecordIndex q = store.index_of(candset.query_id);
    const auto& cited = store.record(q).cited;
    std::unordered_set<PatentId> relevant(cited.begin(), cited.end());
    std::vector<PatentId> ids = candset.ids();
    if (config.inject_positives) {
      std::unordered_set<PatentId> present(ids.begin(), ids.end());
      for (const auto& c : cited) {
        if (present.insert(c).second) ids.push_back(c);
      }
    }
    for (const auto& id : ids) {
      auto x = build_features(csnet, prepared[q], prepared[store.index_of(id)], config.features);
      features.insert(features.end(), x.begin(), x.end());
      labels.push_back(relevant.count(id) > 0 ? 1 : 0);
    }
  }
  const std::size_t n = labels.size();
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) throw ValidationError("no positive labels in crnet training data");
  if (positives == n) throw ValidationError("degenerate labels: no negative examples");

  CrnetTrainResult result{initialize_crnet(csnet, config.features, config.seed), 0.0, {}};
  nn::Mlp& mlp = result.model.mlp;
  auto sample = [&](std::size_t i) {
    return std::span<const double>(features.data() + i * width, width);
  };
  auto weight_of = [&](std::size_t i) { return labels[i] == 1 ? config.positive_weight : 1.0; };

  double initial = 0.0;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    initial += weight_of(i) * nn::bce_loss(mlp.forward(sample(i))[0], labels[i]).loss;
    total_weight += weight_of(i);
  }
  result.initial_loss = initial / total_weight;
  if (config.epochs == 0) return result;

  nn::Adam adam(mlp.parameter_count(), nn::AdamConfig{config.lr, 0.9, 0.999, 1e-8});
  std::vector<double> grad(mlp.parameter_count());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  nn::ForwardCache cache;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(Rng::derive(config.seed, 1000 + epoch));
    rng.shuffle(order);
    double epoch_loss = 0.0;
    double epoch_weight = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_weight = 0.0;
      for (std::size_t j = start; j < end; ++j) batch_weight += weight_of(order[j]);
      for (std::size_t j = start; j < end; ++j) {
        const std::size_t i = order[j];
        const double p = mlp.forward(sample(i), cache)[0];
        const nn::LossAndGrad bce = nn::bce_loss(p, labels[i]);
        const double w = weight_of(i);
        epoch_loss += w * bce.loss;
        const double upstream = w * bce.grad / batch_weight;
        mlp.backward(cache, std::span<const double>(&upstream, 1), grad);
      }
      epoch_weight += batch_weight;
      if (!std::isfinite(epoch_loss)) {
        throw NumericError("crnet diverged at epoch " + std::to_string(epoch));
      }
      adam.step(mlp.mutable_parameters(), grad);
    }
    result.epoch_losses.push_back(epoch_loss / epoch_weight);
  }
  return result;
}

RankedList rerank(const CrnetModel& model, const CsnetModel& csnet, const PreparedPatent& query,
                  const CandidateSet& candidates, const CorpusStore& store,
                  const PreparedCorpus& prepared) {
  if (model.csnet_fingerprint != csnet.fingerprint()) {
    throw ArtifactError("fingerprint mismatch: crnet was trained on another csnet model");
  }
  RankedList out{candidates.query_id, {}};
  out.items.reserve(candidates.items.size());
  nn::ForwardCache cache;
  for (const auto& candidate : candidates.items) {
    const auto x =
        build_features(csnet, query, prepared[store.index_of(candidate.id)], model.options);
    out.items.push_back({candidate.id, model.mlp.forward(x, cache)[0]});
  }
  std::sort(out.items.begin(), out.items.end(), ranks_before);
  return out;
}

}  // namespace patentrec

#include "patentrec/pipeline.hpp"

#include <algorithm>
#include <set>

namespace patentrec {
namespace {

void note(std::ostream* progress, const std::string& message) {
  if (progress != nullptr) *progress << message << '\n' << std::flush;
}

std::set<PatentId> query_set(const std::vector<RankedList>& lists) {
  std::set<PatentId> ids;
  for (const auto& list : lists) ids.insert(list.query_id);
  return ids;
}

// Either loads a cached artifact or computes and (optionally) stores it.
template <typename T>
T cached(const AblationOptions& options, const std::filesystem::path& path,
         const std::function<T(std::istream&)>& load, const std::function<T()>& compute,
         const std::function<void(std::ostream&, const T&)>& save) {
  if (options.artifact_dir && options.reuse_artifacts && std::filesystem::exists(path)) {
    std::ifstream in(path);
    return load(in);
  }
  T value = compute();
  if (options.artifact_dir) write_artifact(path, [&](std::ostream& out) { save(out, value); });
  return value;
}

}  // namespace

std::ifstream open_artifact(const std::filesystem::path& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("missing artifact: " + what + " (" + path.string() + ")");
  return in;
}

void write_artifact(const std::filesystem::path& path,
                    const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError("cannot write artifact " + path.string());
    writer(out);
    out.flush();
    if (!out) throw ArtifactError("failed writing artifact " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

Vocabularies pool_vocabulary(const CorpusStore& store, const DatasetSplit& split,
                             std::size_t min_df) {
  return build_vocabulary(store, split.candidate_pool_ids, min_df);
}

std::vector<CandidateSet> generate_candidates(const CsnetModel& model, const EmbeddingIndex& index,
                                              const CorpusStore& store,
                                              const std::vector<TokenizedPatent>& tokens,
                                              std::span<const PatentId> queries, std::size_t k) {
  if (index.model_fingerprint() != model.fingerprint()) {
    throw ArtifactError("fingerprint mismatch: index was built from another csnet model");
  }
  std::vector<CandidateSet> out;
  out.reserve(queries.size());
  for (const auto& id : queries) {
    const auto embedding = embed_patent(model, tokens.at(store.index_of(id)));
    out.push_back(top_k(index, id, embedding, k));
  }
  return out;
}

std::vector<RankedList> rerank_all(const CrnetModel& crnet, const CsnetModel& csnet,
                                   const CorpusStore& store, const PreparedCorpus& prepared,
                                   const std::vector<CandidateSet>& candidates) {
  std::vector<RankedList> out;
  out.reserve(candidates.size());
  for (const auto& candset : candidates) {
    out.push_back(rerank(crnet, csnet, prepared[store.index_of(candset.query_id)], candset, store,
                         prepared));
  }
  return out;
}

std::vector<RankedList> bm25_all(const Bm25Index& index, const CorpusStore& store,
                                 std::span<const PatentId> queries, std::size_t k) {
  std::vector<RankedList> out;
  out.reserve(queries.size());
  for (const auto& id : queries) out.push_back(bm25_rank(index, store.record(id), k));
  return out;
}

std::vector<MetricsReport> evaluate_arms(
    const std::vector<std::pair<Arm, std::vector<RankedList>>>& runs, const GroundTruth& truth,
    std::span<const std::size_t> ks) {
  std::vector<MetricsReport> reports;
  std::set<PatentId> reference;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto queries = query_set(runs[i].second);
    if (queries.size() != runs[i].second.size()) {
      throw ValidationError("arm " + arm_key(runs[i].first) + " ranks a query twice");
    }
    if (i == 0) {
      reference = queries;
    } else if (queries != reference) {
      throw ValidationError("inconsistent test sets between arms: " + arm_key(runs[0].first) +
                            " and " + arm_key(runs[i].first));
    }
    reports.push_back(evaluate_run(arm_name(runs[i].first), runs[i].second, truth, ks));
  }
  return reports;
}

AblationResult ablation_run(const CorpusStore& store, const DatasetSplit& split,
                            const PipelineConfig& config, const AblationOptions& options) {
  if (split.test_query_ids.empty()) throw ValidationError("split has no test queries");
  const ArtifactLayout layout{options.artifact_dir.value_or(".")};
  AblationResult result;

  if (options.artifact_dir) {
    write_artifact(layout.split(), [&](std::ostream& out) { save_split(out, split); });
  }
  Vocabularies vocab;
  if (options.artifact_dir && options.reuse_artifacts &&
      std::filesystem::exists(layout.word_vocab()) && std::filesystem::exists(layout.cpc_vocab())) {
    std::ifstream words(layout.word_vocab());
    std::ifstream codes(layout.cpc_vocab());
    vocab = {Vocabulary::load(words), Vocabulary::load(codes)};
  } else {
    vocab = pool_vocabulary(store, split, config.min_df);
    if (options.artifact_dir) {
      write_artifact(layout.word_vocab(), [&](std::ostream& out) { vocab.words.save(out); });
      write_artifact(layout.cpc_vocab(), [&](std::ostream& out) { vocab.cpc.save(out); });
    }
  }
  note(options.progress, "vocabulary: " + std::to_string(vocab.words.size()) + " words, " +
                             std::to_string(vocab.cpc.size()) + " codes");
  const auto tokens = tokenize_corpus(store, vocab);
  const GroundTruth truth = ground_truth(store, split.test_query_ids);

  auto wants = [&](Arm arm) {
    return std::find(config.arms.begin(), config.arms.end(), arm) != config.arms.end();
  };

  for (bool use_cpc : {false, true}) {
    const Arm csnet_arm = use_cpc ? Arm::kCsnetCpc : Arm::kCsnetNoCpc;
    const Arm crnet_arm = use_cpc ? Arm::kCrnetCpc : Arm::kCrnetNoCpc;
    if (!wants(csnet_arm) && !wants(crnet_arm)) continue;
    const std::string tag = ArtifactLayout::variant("csnet", use_cpc);

    CsnetTrainConfig csnet_cfg = config.csnet;
    csnet_cfg.use_cpc = use_cpc;
    const CsnetModel csnet = cached<CsnetModel>(
        options, layout.csnet(use_cpc),
        [&](std::istream& in) { return CsnetModel::load(in, vocab); },
        [&] {
          auto trained = train_csnet(store, split, vocab, tokens, csnet_cfg);
          if (!trained.epoch_losses.empty()) result.final_losses[tag] = trained.epoch_losses.back();
          return std::move(trained.model);
        },
        [&](std::ostream& out, const CsnetModel& m) { m.save(out, config.seed); });
    note(options.progress, tag + ": trained");

    const EmbeddingIndex index = cached<EmbeddingIndex>(
        options, layout.index(use_cpc),
        [&](std::istream& in) { return EmbeddingIndex::load(in, csnet.fingerprint()); },
        [&] { return build_index(csnet, store, tokens, split.candidate_pool_ids); },
        [](std::ostream& out, const EmbeddingIndex& i) { i.save(out); });

    using Lists = std::vector<RankedList>;
    auto save_lists = [](std::ostream& out, const Lists& lists) { write_ranked_rows(out, lists); };
    auto load_lists = [](std::istream& in) { return read_ranked_rows(in); };
    const Lists test_candidates = cached<Lists>(
        options, layout.candidates(use_cpc, "test"), load_lists,
        [&] {
          return generate_candidates(csnet, index, store, tokens, split.test_query_ids,
                                     config.knn_k);
        },
        save_lists);
    if (wants(csnet_arm)) result.rankings[csnet_arm] = test_candidates;
    if (!wants(crnet_arm)) continue;

    const Lists train_candidates = cached<Lists>(
        options, layout.candidates(use_cpc, "train"), load_lists,
        [&] {
          return generate_candidates(csnet, index, store, tokens, split.train_query_ids,
                                     config.knn_k);
        },
        save_lists);
    const PreparedCorpus prepared(csnet, tokens);
    CrnetTrainConfig crnet_cfg = config.crnet;
    crnet_cfg.features.use_cpc = use_cpc;
    const std::string crnet_tag = ArtifactLayout::variant("crnet", use_cpc);
    const CrnetModel crnet = cached<CrnetModel>(
        options, layout.crnet(use_cpc),
        [&](std::istream& in) { return CrnetModel::load(in, csnet); },
        [&] {
          auto trained = train_crnet(store, train_candidates, csnet, prepared, crnet_cfg);
          if (!trained.epoch_losses.empty()) {
            result.final_losses[crnet_tag] = trained.epoch_losses.back();
          }
          return std::move(trained.model);
        },
        [&](std::ostream& out, const CrnetModel& m) { m.save(out, config.seed); });
    note(options.progress, crnet_tag + ": trained");
    result.rankings[crnet_arm] = rerank_all(crnet, csnet, store, prepared, test_candidates);
  }

  if (wants(Arm::kBm25)) {
    const Bm25Index bm25 = build_bm25(store, split.candidate_pool_ids, config.bm25);
    result.rankings[Arm::kBm25] = bm25_all(bm25, store, split.test_query_ids, config.knn_k);
  }

  std::vector<std::pair<Arm, std::vector<RankedList>>> runs;
  for (Arm arm : config.arms) {
    runs.emplace_back(arm, result.rankings.at(arm));
    if (options.artifact_dir) {
      write_artifact(layout.ranking(arm),
                     [&](std::ostream& out) { write_ranked_rows(out, result.rankings.at(arm)); });
    }
  }
  result.reports = evaluate_arms(runs, truth, config.eval_ks);
  return result;
}

}  // namespace patentrec

#include "patentrec/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "patentrec/config.hpp"
#include "patentrec/pipeline.hpp"
#include "patentrec/synthetic.hpp"

namespace patentrec {
namespace {

namespace fs = std::filesystem;

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

// Exclusive lock on an artifact directory for commands that write into it.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) : path_(dir / ".lock") {
    fs::create_directories(dir);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) {
      if (errno == EEXIST) throw ArtifactError("artifact directory is locked: " + path_.string());
      throw ArtifactError("cannot create lock file " + path_.string());
    }
    std::fclose(f);
  }
  ~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
};

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string artifacts;
  std::string corpus;
};

// Resolved configuration plus lazily loaded stage artifacts.
class Session {
 public:
  explicit Session(const GlobalOptions& global) {
    if (!global.config_path.empty()) config_ = load_config(global.config_path);
    if (global.seed) config_.seed = *global.seed;
    const bool reports_follow = config_.paths.reports == config_.paths.artifacts;
    if (!global.artifacts.empty()) {
      config_.paths.artifacts = global.artifacts;
    } else if (config_.paths.artifacts.empty()) {
      const char* env = std::getenv(kArtifactDirEnv);
      config_.paths.artifacts = env != nullptr && *env != '\0' ? env : "artifacts";
    }
    if (!global.corpus.empty()) config_.paths.corpus = global.corpus;
    if (config_.paths.corpus.empty()) config_.paths.corpus = config_.paths.artifacts / "corpus.jsonl";
    if (reports_follow) config_.paths.reports = config_.paths.artifacts;
    config_.propagate();
    layout_.dir = config_.paths.artifacts;
  }

  PipelineConfig& config() { return config_; }
  const ArtifactLayout& layout() const { return layout_; }

  const CorpusStore& store() {
    if (!store_) {
      if (!fs::exists(config_.paths.corpus)) {
        throw ArtifactError("missing artifact: corpus (" + config_.paths.corpus.string() + ")");
      }
      store_ = load_corpus(config_.paths.corpus);
    }
    return *store_;
  }

  const DatasetSplit& split() {
    if (!split_) {
      auto in = open_artifact(layout_.split(), "split");
      split_ = load_split(in);
      for (const auto& id : split_->candidate_pool_ids) {
        if (!store().contains(id)) throw ArtifactError("split does not match corpus: unknown id " + id);
      }
    }
    return *split_;
  }

  const Vocabularies& vocab() {
    if (!vocab_) {
      auto words = open_artifact(layout_.word_vocab(), "vocabulary");
      auto codes = open_artifact(layout_.cpc_vocab(), "cpc vocabulary");
      vocab_ = Vocabularies{Vocabulary::load(words), Vocabulary::load(codes)};
    }
    return *vocab_;
  }

  const std::vector<TokenizedPatent>& tokens() {
    if (!tokens_) tokens_ = tokenize_corpus(store(), vocab());
    return *tokens_;
  }

  const CsnetModel& csnet(bool use_cpc) {
    auto& slot = csnet_[use_cpc];
    if (!slot) {
      auto in = open_artifact(layout_.csnet(use_cpc), use_cpc ? "csnet model" : "csnet model without cpc");
      slot = CsnetModel::load(in, vocab());
    }
    return *slot;
  }

  const EmbeddingIndex& index(bool use_cpc) {
    auto& slot = index_[use_cpc];
    if (!slot) {
      const CsnetModel& model = csnet(use_cpc);
      auto in = open_artifact(layout_.index(use_cpc), "embedding index");
      slot = EmbeddingIndex::load(in, model.fingerprint());
    }
    return *slot;
  }

  const CrnetModel& crnet(bool use_cpc) {
    auto& slot = crnet_[use_cpc];
    if (!slot) {
      auto in = open_artifact(layout_.crnet(use_cpc), "crnet model");
      slot = CrnetModel::load(in, csnet(use_cpc));
    }
    return *slot;
  }

  std::vector<CandidateSet> candidates(bool use_cpc, const std::string& set) {
    auto in = open_artifact(layout_.candidates(use_cpc, set), set + " candidates");
    return read_ranked_rows(in);
  }

  std::vector<PatentId> query_ids(const std::string& set) {
    if (set == "train") return split().train_query_ids;
    if (set == "val") return split().val_query_ids;
    if (set == "test") return split().test_query_ids;
    throw ValidationError("unknown query set " + set + " (expected train, val or test)");
  }

 private:
  PipelineConfig config_;
  ArtifactLayout layout_;
  std::optional<CorpusStore> store_;
  std::optional<DatasetSplit> split_;
  std::optional<Vocabularies> vocab_;
  std::optional<std::vector<TokenizedPatent>> tokens_;
  std::map<bool, std::optional<CsnetModel>> csnet_;
  std::map<bool, std::optional<EmbeddingIndex>> index_;
  std::map<bool, std::optional<CrnetModel>> crnet_;
};

std::string truncate(const std::string& text, std::size_t width) {
  if (text.size() <= width) return text;
  return text.substr(0, width - 3) + "...";
}

void print_recommendations(std::ostream& out, const CorpusStore& store, const PatentRecord& query,
                           const RankedList& ranked, const std::optional<RelevantSet>& truth) {
  out << "Query: " << query.id << "  " << query.title << '\n';
  std::vector<std::vector<std::string>> rows = {{"Rank", "Patent ID", "Title", "Score"}};
  if (truth) rows[0].push_back("Cited");
  for (std::size_t i = 0; i < ranked.items.size(); ++i) {
    const auto& item = ranked.items[i];
    const auto found = store.find(item.id);
    const std::string title = found ? store.record(*found).title : "";
    std::vector<std::string> row = {std::to_string(i + 1), item.id, truncate(title, 60),
                                    format_fixed(item.score, 4)};
    if (truth) row.push_back(truth->count(item.id) > 0 ? "[O]" : "[X]");
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> widths(rows[0].size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(widths[c] - row[c].size() + 2, ' ');
    }
    out << '\n';
  }
}

void write_reports(Session& session, const std::vector<MetricsReport>& reports, std::ostream& out) {
  const auto& ks = session.config().eval_ks;
  const std::size_t headline = std::find(ks.begin(), ks.end(), 20) != ks.end() ? 20 : ks.front();
  std::ostringstream text;
  text << format_comparison_table(reports, headline) << '\n'
       << format_metric_table(reports, "recall") << '\n'
       << format_metric_table(reports, "precision") << '\n'
       << format_metric_table(reports, "f1");
  out << text.str();
  const fs::path dir = session.config().paths.reports;
  write_artifact(dir / "report.txt", [&](std::ostream& o) { o << text.str(); });
  write_artifact(dir / "report.tsv", [&](std::ostream& o) { o << format_metric_rows(reports); });
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patent citation recommendation: candidate selection, reranking, evaluation",
               "patentrec"};
  app.require_subcommand(1);
  // Global options may also follow the subcommand name.
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  GlobalOptions global;
  std::uint64_t seed_value = 0;
  app.add_option("--config", global.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed_value, "Root seed for every stochastic stage");
  app.add_option("--artifacts", global.artifacts,
                 std::string("Artifact directory (default: $") + kArtifactDirEnv + " or ./artifacts)");
  app.add_option("--corpus", global.corpus, "Corpus JSONL (default: <artifacts>/corpus.jsonl)");

  bool use_cpc = true;
  std::size_t k = 0;
  std::size_t topn = 10;
  std::string set = "test";
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> min_df;
  std::vector<double> ratios;
  bool print_rows = false;
  auto add_cpc_flag = [&](CLI::App* sub) {
    sub->add_flag("--with-cpc,!--no-cpc", use_cpc, "Use CPC codes (default) or not");
  };
  auto add_k = [&](CLI::App* sub) {
    sub->add_option("--k", k, "Candidates per query (default 100)")->check(CLI::PositiveNumber);
  };

  auto* stats = app.add_subcommand("stats", "Print corpus statistics");
  auto* split_cmd = app.add_subcommand("split", "Split base patents into train/val/test queries");
  split_cmd->add_option("--ratios", ratios, "train,val,test fractions")->delimiter(',')->expected(3);
  auto* vocab_cmd = app.add_subcommand("build-vocab", "Build word and CPC vocabularies over the pool");
  vocab_cmd->add_option("--min-df", min_df, "Minimum document frequency of a word");
  auto* train_csnet_cmd = app.add_subcommand("train-csnet", "Train the candidate selection network");
  add_cpc_flag(train_csnet_cmd);
  train_csnet_cmd->add_option("--epochs", epochs, "Training epochs (default 50)");
  bool hard_negatives = false;
  train_csnet_cmd->add_flag("--hard-negatives", hard_negatives, "Sample negatives near the query");
  auto* index_cmd = app.add_subcommand("build-index", "Embed the candidate pool");
  add_cpc_flag(index_cmd);
  auto* cand_cmd = app.add_subcommand("candidates", "Select K nearest pool patents per query");
  add_cpc_flag(cand_cmd);
  add_k(cand_cmd);
  cand_cmd->add_option("--set", set, "Query set: train, val or test")->check(CLI::IsMember({"train", "val", "test"}));
  cand_cmd->add_flag("--print", print_rows, "Also write the rows to stdout");
  auto* train_crnet_cmd = app.add_subcommand("train-crnet", "Train the candidate reranking network");
  add_cpc_flag(train_crnet_cmd);
  train_crnet_cmd->add_option("--epochs", epochs, "Training epochs (default 400)");
  bool inject_positives = false;
  bool raw_bow = false;
  std::optional<double> positive_weight;
  train_crnet_cmd->add_flag("--inject-positives", inject_positives,
                            "Add cited patents missing from the candidates");
  train_crnet_cmd->add_flag("--raw-bow", raw_bow, "Field similarity over raw token counts");
  train_crnet_cmd->add_option("--positive-weight", positive_weight, "Loss weight of cited pairs");
  auto* rec_cmd = app.add_subcommand("recommend", "Recommend citations for one patent");
  add_cpc_flag(rec_cmd);
  add_k(rec_cmd);
  std::string query_id;
  std::string record_path;
  std::string format = "table";
  auto* query_opt = rec_cmd->add_option("--query", query_id, "Patent id from the corpus");
  auto* record_opt = rec_cmd->add_option("--record", record_path, "JSON file holding an unseen patent");
  query_opt->excludes(record_opt);
  rec_cmd->add_option("--topn", topn, "Rows to show")->check(CLI::PositiveNumber);
  rec_cmd->add_option("--format", format, "table or rows")->check(CLI::IsMember({"table", "rows"}));
  auto* bm25_cmd = app.add_subcommand("bm25-baseline", "Rank the pool with BM25");
  add_k(bm25_cmd);
  bm25_cmd->add_option("--set", set, "Query set: train, val or test")->check(CLI::IsMember({"train", "val", "test"}));
  bm25_cmd->add_flag("--print", print_rows, "Also write the rows to stdout");
  auto* eval_cmd = app.add_subcommand("evaluate", "Score one method on the test queries");
  add_cpc_flag(eval_cmd);
  add_k(eval_cmd);
  std::string method = "crnet";
  eval_cmd->add_option("--method", method, "crnet, csnet or bm25")->check(CLI::IsMember({"crnet", "csnet", "bm25"}));
  auto* ablate_cmd = app.add_subcommand("ablate", "Run every arm and print the comparison tables");
  add_k(ablate_cmd);
  bool fresh = false;
  std::string plot_path;
  ablate_cmd->add_flag("--fresh", fresh, "Recompute every stage instead of reusing artifacts");
  ablate_cmd->add_option("--emit-plot-data", plot_path, "Write (method, K, recall) rows here");
  auto* synth_cmd = app.add_subcommand("synth", "Generate a clustered synthetic corpus");
  SyntheticSpec spec;
  bool cpc_cluster = true;
  std::string synth_out;
  synth_cmd->add_option("--clusters", spec.n_clusters, "Number of clusters");
  synth_cmd->add_option("--per-cluster", spec.per_cluster, "Patents per cluster");
  synth_cmd->add_option("--vocab", spec.vocab_per_cluster, "Private words per cluster");
  synth_cmd->add_option("--shared-fraction", spec.shared_fraction, "Share of tokens from the common pool");
  synth_cmd->add_option("--citations", spec.citations, "Citations per patent");
  synth_cmd->add_flag("--cpc-cluster,!--no-cpc-cluster", cpc_cluster, "CPC subclass encodes the cluster");
  synth_cmd->add_option("--out", synth_out, "Output path, '-' for stdout (default: the corpus path)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }
  if (seed_opt->count() > 0) global.seed = seed_value;

  try {
    Session session(global);
    PipelineConfig& config = session.config();
    if (k > 0) {
      config.knn_k = k;
      config.propagate();
    }
    const ArtifactLayout& layout = session.layout();
    const fs::path artifacts = config.paths.artifacts;

    if (stats->parsed()) {
      out << format_stats_table(corpus_stats(session.store()));
    } else if (split_cmd->parsed()) {
      std::array<double, 3> r = config.split_ratios;
      if (!ratios.empty()) r = {ratios[0], ratios[1], ratios[2]};
      const DatasetSplit split = split_corpus(session.store(), r, config.seed);
      DirectoryLock lock(artifacts);
      write_artifact(layout.split(), [&](std::ostream& o) { save_split(o, split); });
      out << "split: " << split.train_query_ids.size() << " train, " << split.val_query_ids.size()
          << " val, " << split.test_query_ids.size() << " test, pool "
          << split.candidate_pool_ids.size() << '\n';
    } else if (vocab_cmd->parsed()) {
      const Vocabularies vocab =
          pool_vocabulary(session.store(), session.split(), min_df.value_or(config.min_df));
      DirectoryLock lock(artifacts);
      write_artifact(layout.word_vocab(), [&](std::ostream& o) { vocab.words.save(o); });
      write_artifact(layout.cpc_vocab(), [&](std::ostream& o) { vocab.cpc.save(o); });
      out << "vocabulary: " << vocab.words.size() << " words, " << vocab.cpc.size() << " codes\n";
    } else if (train_csnet_cmd->parsed()) {
      CsnetTrainConfig cfg = config.csnet;
      cfg.use_cpc = use_cpc;
      if (epochs) cfg.epochs = *epochs;
      cfg.hard_negatives = cfg.hard_negatives || hard_negatives;
      const auto result =
          train_csnet(session.store(), session.split(), session.vocab(), session.tokens(), cfg);
      DirectoryLock lock(artifacts);
      write_artifact(layout.csnet(use_cpc), [&](std::ostream& o) { result.model.save(o, config.seed); });
      for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) {
        out << "epoch " << e + 1 << " loss " << format_fixed(result.epoch_losses[e], 6) << '\n';
      }
      out << "csnet: " << layout.csnet(use_cpc).string() << '\n';
    } else if (index_cmd->parsed()) {
      const CsnetModel& model = session.csnet(use_cpc);
      const EmbeddingIndex index =
          build_index(model, session.store(), session.tokens(), session.split().candidate_pool_ids);
      DirectoryLock lock(artifacts);
      write_artifact(layout.index(use_cpc), [&](std::ostream& o) { index.save(o); });
      out << "index: " << index.size() << " patents, dim " << index.dim() << '\n';
    } else if (cand_cmd->parsed()) {
      const auto queries = session.query_ids(set);
      const auto lists = generate_candidates(session.csnet(use_cpc), session.index(use_cpc),
                                             session.store(), session.tokens(), queries, config.knn_k);
      DirectoryLock lock(artifacts);
      write_artifact(layout.candidates(use_cpc, set), [&](std::ostream& o) { write_ranked_rows(o, lists); });
      if (print_rows) write_ranked_rows(out, lists);
      out << "candidates: " << lists.size() << " queries, k " << config.knn_k << '\n';
    } else if (train_crnet_cmd->parsed()) {
      CrnetTrainConfig cfg = config.crnet;
      cfg.features.use_cpc = use_cpc;
      if (epochs) cfg.epochs = *epochs;
      cfg.inject_positives = cfg.inject_positives || inject_positives;
      cfg.features.raw_bow_similarity = cfg.features.raw_bow_similarity || raw_bow;
      if (positive_weight) cfg.positive_weight = *positive_weight;
      const CsnetModel& csnet = session.csnet(use_cpc);
      const auto candsets = session.candidates(use_cpc, "train");
      const PreparedCorpus prepared(csnet, session.tokens());
      const auto result = train_crnet(session.store(), candsets, csnet, prepared, cfg);
      DirectoryLock lock(artifacts);
      write_artifact(layout.crnet(use_cpc), [&](std::ostream& o) { result.model.save(o, config.seed); });
      out << "initial loss " << format_fixed(result.initial_loss, 6) << '\n';
      if (!result.epoch_losses.empty()) {
        out << "final loss " << format_fixed(result.epoch_losses.back(), 6) << '\n';
      }
      out << "crnet: " << layout.crnet(use_cpc).string() << '\n';
    } else if (rec_cmd->parsed()) {
      if (query_id.empty() && record_path.empty()) {
        throw ValidationError("recommend needs --query or --record");
      }
      const CorpusStore& store = session.store();
      const CrnetModel& crnet = session.crnet(use_cpc);
      const CsnetModel& csnet = session.csnet(use_cpc);
      PatentRecord query;
      if (!record_path.empty()) {
        auto in = open_artifact(record_path, "query record");
        std::string line;
        std::getline(in, line);
        query = parse_record(line, 1);
      } else {
        query = store.record(query_id);
      }
      std::optional<RelevantSet> truth;
      if (!query.cited.empty()) truth = RelevantSet(query.cited.begin(), query.cited.end());
      const TokenizedPatent tokens = tokenize_patent(query, session.vocab());
      const PreparedPatent prepared_query = prepare_patent(csnet, tokens);
      const CandidateSet candset =
          top_k(session.index(use_cpc), query.id, prepared_query.embedding, config.knn_k);
      const PreparedCorpus prepared(csnet, session.tokens());
      RankedList ranked = rerank(crnet, csnet, prepared_query, candset, store, prepared);
      ranked.items.resize(std::min(ranked.items.size(), topn));
      if (format == "rows") {
        write_ranked_rows(out, {ranked});
      } else {
        print_recommendations(out, store, query, ranked, truth);
      }
    } else if (bm25_cmd->parsed()) {
      const auto queries = session.query_ids(set);
      const Bm25Index index = build_bm25(session.store(), session.split().candidate_pool_ids, config.bm25);
      const auto lists = bm25_all(index, session.store(), queries, config.knn_k);
      DirectoryLock lock(artifacts);
      write_artifact(layout.ranking(Arm::kBm25), [&](std::ostream& o) { write_ranked_rows(o, lists); });
      if (print_rows) write_ranked_rows(out, lists);
      out << "bm25: " << lists.size() << " queries, k " << config.knn_k << '\n';
    } else if (eval_cmd->parsed()) {
      Arm arm = Arm::kBm25;
      std::vector<RankedList> lists;
      if (method == "crnet") {
        arm = use_cpc ? Arm::kCrnetCpc : Arm::kCrnetNoCpc;
        const CrnetModel& crnet = session.crnet(use_cpc);
        const CsnetModel& csnet = session.csnet(use_cpc);
        const auto candsets = generate_candidates(csnet, session.index(use_cpc), session.store(),
                                                  session.tokens(), session.split().test_query_ids,
                                                  config.knn_k);
        const PreparedCorpus prepared(csnet, session.tokens());
        lists = rerank_all(crnet, csnet, session.store(), prepared, candsets);
      } else if (method == "csnet") {
        arm = use_cpc ? Arm::kCsnetCpc : Arm::kCsnetNoCpc;
        lists = generate_candidates(session.csnet(use_cpc), session.index(use_cpc), session.store(),
                                    session.tokens(), session.split().test_query_ids, config.knn_k);
      } else {
        const Bm25Index index =
            build_bm25(session.store(), session.split().candidate_pool_ids, config.bm25);
        lists = bm25_all(index, session.store(), session.split().test_query_ids, config.knn_k);
      }
      const GroundTruth truth = ground_truth(session.store(), session.split().test_query_ids);
      const MetricsReport report = evaluate_run(arm_name(arm), lists, truth, config.eval_ks);
      out << format_comparison_table({report}, config.eval_ks.front()) << format_metric_rows({report});
    } else if (ablate_cmd->parsed()) {
      const CorpusStore& store = session.store();
      DatasetSplit split;
      if (fs::exists(layout.split()) && !fresh) {
        split = session.split();
      } else {
        split = split_corpus(store, config.split_ratios, config.seed);
      }
      DirectoryLock lock(artifacts);
      AblationOptions options;
      options.artifact_dir = artifacts;
      options.reuse_artifacts = !fresh;
      options.progress = &err;
      const AblationResult result = ablation_run(store, split, config, options);
      write_reports(session, result.reports, out);
      if (!plot_path.empty()) {
        write_artifact(plot_path, [&](std::ostream& o) { o << format_plot_data(result.reports); });
      }
    } else if (synth_cmd->parsed()) {
      spec.cpc_encodes_cluster = cpc_cluster;
      spec.seed = config.seed;
      const CorpusStore store = generate_synthetic(spec);
      if (synth_out == "-") {
        write_corpus(out, store);
      } else {
        const fs::path path = synth_out.empty() ? config.paths.corpus : fs::path(synth_out);
        write_artifact(path, [&](std::ostream& o) { write_corpus(o, store); });
        out << "synthetic corpus: " << store.size() << " patents -> " << path.string() << '\n';
      }
    }
    return kExitOk;
  } catch (const ArtifactError& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
    return kExitArtifact;
  } catch (const NumericError& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << one_line(e.what()) << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << '\n';
    return kExitFailure;
  }
}

}  // namespace patentrec

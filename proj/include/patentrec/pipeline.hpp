#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "patentrec/bm25.hpp"
#include "patentrec/config.hpp"
#include "patentrec/corpus.hpp"
#include "patentrec/crnet.hpp"
#include "patentrec/csnet.hpp"
#include "patentrec/eval.hpp"
#include "patentrec/knn.hpp"
#include "patentrec/text.hpp"

namespace patentrec {

// File names of every stage artifact inside one artifact directory.
struct ArtifactLayout {
  std::filesystem::path dir;

  std::filesystem::path split() const { return dir / "split.json"; }
  std::filesystem::path word_vocab() const { return dir / "vocab.words.tsv"; }
  std::filesystem::path cpc_vocab() const { return dir / "vocab.cpc.tsv"; }
  std::filesystem::path csnet(bool use_cpc) const { return dir / (variant("csnet", use_cpc) + ".model"); }
  std::filesystem::path index(bool use_cpc) const { return dir / (variant("index", use_cpc) + ".txt"); }
  std::filesystem::path candidates(bool use_cpc, const std::string& set) const {
    return dir / (variant("candidates", use_cpc) + "." + set + ".tsv");
  }
  std::filesystem::path crnet(bool use_cpc) const { return dir / (variant("crnet", use_cpc) + ".model"); }
  std::filesystem::path ranking(Arm arm) const { return dir / ("ranking." + arm_key(arm) + ".tsv"); }

  static std::string variant(const std::string& stem, bool use_cpc) {
    return use_cpc ? stem : stem + "-nocpc";
  }
};

// Opens an artifact for reading; a missing file raises
// "missing artifact: <what> (<path>)".
std::ifstream open_artifact(const std::filesystem::path& path, const std::string& what);
// Writes through a temporary file renamed into place.
void write_artifact(const std::filesystem::path& path,
                    const std::function<void(std::ostream&)>& writer);

// Vocabulary over the title/abstract text of the candidate pool.
Vocabularies pool_vocabulary(const CorpusStore& store, const DatasetSplit& split,
                             std::size_t min_df);

// CSNet top-k candidates for each query, excluding the query itself.
std::vector<CandidateSet> generate_candidates(const CsnetModel& model, const EmbeddingIndex& index,
                                              const CorpusStore& store,
                                              const std::vector<TokenizedPatent>& tokens,
                                              std::span<const PatentId> queries, std::size_t k);

std::vector<RankedList> rerank_all(const CrnetModel& crnet, const CsnetModel& csnet,
                                   const CorpusStore& store, const PreparedCorpus& prepared,
                                   const std::vector<CandidateSet>& candidates);

std::vector<RankedList> bm25_all(const Bm25Index& index, const CorpusStore& store,
                                 std::span<const PatentId> queries, std::size_t k);

// One report per arm, in the given order. Every arm must rank exactly the
// same queries.
std::vector<MetricsReport> evaluate_arms(const std::vector<std::pair<Arm, std::vector<RankedList>>>& runs,
                                         const GroundTruth& truth,
                                         std::span<const std::size_t> ks);

struct AblationResult {
  std::vector<MetricsReport> reports;
  std::map<Arm, std::vector<RankedList>> rankings;
  // Final-epoch training losses, for diagnostics.
  std::map<std::string, double> final_losses;
};

struct AblationOptions {
  // When set, stage artifacts are written here.
  std::optional<std::filesystem::path> artifact_dir;
  // Load stage artifacts already present in artifact_dir instead of
  // recomputing them.
  bool reuse_artifacts = false;
  std::ostream* progress = nullptr;
};

// Runs every configured arm on the split's test queries.
AblationResult ablation_run(const CorpusStore& store, const DatasetSplit& split,
                            const PipelineConfig& config, const AblationOptions& options = {});

}  // namespace patentrec

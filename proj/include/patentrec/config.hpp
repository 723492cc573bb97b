#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "patentrec/bm25.hpp"
#include "patentrec/crnet.hpp"
#include "patentrec/csnet.hpp"
#include "patentrec/knn.hpp"

namespace patentrec {

// Evaluation arms, in report order.
enum class Arm { kBm25, kCsnetNoCpc, kCrnetNoCpc, kCsnetCpc, kCrnetCpc };

std::string arm_name(Arm arm);
Arm parse_arm(const std::string& key);  // bm25, csnet-nocpc, crnet-nocpc, csnet, crnet
std::string arm_key(Arm arm);
inline const std::vector<Arm> kAllArms = {Arm::kBm25, Arm::kCsnetNoCpc, Arm::kCrnetNoCpc,
                                          Arm::kCsnetCpc, Arm::kCrnetCpc};

struct PipelinePaths {
  std::filesystem::path corpus;
  // Every stage artifact (vocabularies, models, index, candidates, rankings).
  std::filesystem::path artifacts;
  // Metric tables; defaults to the artifact directory.
  std::filesystem::path reports;
};

struct PipelineConfig {
  PipelinePaths paths;
  std::uint64_t seed = 0;
  std::array<double, 3> split_ratios = {0.8, 0.1, 0.1};
  std::size_t min_df = 1;
  CsnetTrainConfig csnet;
  CrnetTrainConfig crnet;
  Bm25Params bm25;
  std::size_t knn_k = kDefaultCandidateCount;
  std::vector<std::size_t> eval_ks = {10, 20, 30, 40, 50};
  std::vector<Arm> arms = kAllArms;

  // Copies the root seed and K into every stage config.
  void propagate();
};

// JSON document; every key is optional and unknown keys are rejected:
//   seed, embedding_dim, k, min_df, split [3], eval_ks [...], arms [...],
//   paths {corpus, artifacts, reports},
//   csnet {epochs, lr, margin, beta, batch_size, negatives_per_positive,
//          hard_negatives, hard_negative_pool, freeze_cpc},
//   crnet {epochs, lr, batch_size, inject_positives, positive_weight, raw_bow},
//   bm25 {k1, b}
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace patentrec

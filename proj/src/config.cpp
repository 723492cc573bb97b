#include "patentrec/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace patentrec {
namespace {

using nlohmann::json;

void reject_unknown(const json& object, std::initializer_list<const char*> known,
                    const std::string& prefix) {
  if (!object.is_object()) throw ValidationError("config section " + prefix + " must be an object");
  for (const auto& [key, value] : object.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw ValidationError("unknown config key: " + prefix + key);
  }
}

template <typename T>
void read(const json& object, const char* key, T& out, const std::string& prefix) {
  if (!object.contains(key)) return;
  try {
    out = object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("bad value for config key: " + prefix + key);
  }
}

std::size_t positive(std::size_t value, const std::string& key) {
  if (value == 0) throw ValidationError("config key " + key + " must be positive");
  return value;
}

}  // namespace

std::string arm_name(Arm arm) {
  switch (arm) {
    case Arm::kBm25:
      return "BM25";
    case Arm::kCsnetNoCpc:
      return "CSNet w/o CPC";
    case Arm::kCrnetNoCpc:
      return "CRNet w/o CPC";
    case Arm::kCsnetCpc:
      return "CSNet with CPC";
    case Arm::kCrnetCpc:
      break;
  }
  return "CRNet with CPC";
}

std::string arm_key(Arm arm) {
  switch (arm) {
    case Arm::kBm25:
      return "bm25";
    case Arm::kCsnetNoCpc:
      return "csnet-nocpc";
    case Arm::kCrnetNoCpc:
      return "crnet-nocpc";
    case Arm::kCsnetCpc:
      return "csnet";
    case Arm::kCrnetCpc:
      break;
  }
  return "crnet";
}

Arm parse_arm(const std::string& key) {
  for (Arm arm : kAllArms) {
    if (arm_key(arm) == key) return arm;
  }
  throw ValidationError("unknown arm: " + key);
}

void PipelineConfig::propagate() {
  csnet.seed = seed;
  crnet.seed = seed;
  crnet.k = knn_k;
  if (paths.reports.empty()) paths.reports = paths.artifacts;
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig config;
  json root;
  try {
    root = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  reject_unknown(root,
                 {"seed", "embedding_dim", "k", "min_df", "split", "eval_ks", "arms", "paths",
                  "csnet", "crnet", "bm25"},
                 "");
  read(root, "seed", config.seed, "");
  read(root, "embedding_dim", config.csnet.dim, "");
  positive(config.csnet.dim, "embedding_dim");
  read(root, "k", config.knn_k, "");
  positive(config.knn_k, "k");
  read(root, "min_df", config.min_df, "");
  positive(config.min_df, "min_df");
  read(root, "split", config.split_ratios, "");
  read(root, "eval_ks", config.eval_ks, "");
  for (std::size_t k : config.eval_ks) positive(k, "eval_ks");
  if (root.contains("arms")) {
    std::vector<std::string> keys;
    read(root, "arms", keys, "");
    config.arms.clear();
    for (const auto& key : keys) config.arms.push_back(parse_arm(key));
  }
  if (root.contains("paths")) {
    const json& p = root["paths"];
    reject_unknown(p, {"corpus", "artifacts", "reports"}, "paths.");
    std::string corpus = config.paths.corpus.string();
    std::string artifacts = config.paths.artifacts.string();
    std::string reports = config.paths.reports.string();
    read(p, "corpus", corpus, "paths.");
    read(p, "artifacts", artifacts, "paths.");
    read(p, "reports", reports, "paths.");
    config.paths = {corpus, artifacts, reports};
  }
  if (root.contains("csnet")) {
    const json& c = root["csnet"];
    const std::string prefix = "csnet.";
    reject_unknown(c,
                   {"epochs", "lr", "margin", "beta", "batch_size", "negatives_per_positive",
                    "hard_negatives", "hard_negative_pool", "freeze_cpc"},
                   prefix);
    read(c, "epochs", config.csnet.epochs, prefix);
    read(c, "lr", config.csnet.lr, prefix);
    read(c, "margin", config.csnet.margin, prefix);
    read(c, "beta", config.csnet.beta, prefix);
    read(c, "batch_size", config.csnet.batch_size, prefix);
    positive(config.csnet.batch_size, "csnet.batch_size");
    read(c, "negatives_per_positive", config.csnet.negatives_per_positive, prefix);
    read(c, "hard_negatives", config.csnet.hard_negatives, prefix);
    read(c, "hard_negative_pool", config.csnet.hard_negative_pool, prefix);
    read(c, "freeze_cpc", config.csnet.freeze_cpc, prefix);
  }
  if (root.contains("crnet")) {
    const json& c = root["crnet"];
    const std::string prefix = "crnet.";
    reject_unknown(c,
                   {"epochs", "lr", "batch_size", "inject_positives", "positive_weight", "raw_bow"},
                   prefix);
    read(c, "epochs", config.crnet.epochs, prefix);
    read(c, "lr", config.crnet.lr, prefix);
    read(c, "batch_size", config.crnet.batch_size, prefix);
    positive(config.crnet.batch_size, "crnet.batch_size");
    read(c, "inject_positives", config.crnet.inject_positives, prefix);
    read(c, "positive_weight", config.crnet.positive_weight, prefix);
    read(c, "raw_bow", config.crnet.features.raw_bow_similarity, prefix);
  }
  if (root.contains("bm25")) {
    const json& b = root["bm25"];
    reject_unknown(b, {"k1", "b"}, "bm25.");
    read(b, "k1", config.bm25.k1, "bm25.");
    read(b, "b", config.bm25.b, "bm25.");
  }
  config.propagate();
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("missing artifact: config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace patentrec

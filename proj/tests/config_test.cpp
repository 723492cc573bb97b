#include <gtest/gtest.h>

#include <fstream>

#include "patentrec/config.hpp"
#include "test_util.hpp"

namespace patentrec {
namespace {

TEST(Config, EmptyDocumentGivesReferenceDefaults) {
  PipelineConfig c = parse_config("");
  c.propagate();
  EXPECT_EQ(c.csnet.dim, 75u);
  EXPECT_EQ(c.csnet.epochs, 50u);
  EXPECT_EQ(c.csnet.lr, 1e-4);
  EXPECT_EQ(c.csnet.beta, 1e-4);
  EXPECT_EQ(c.csnet.margin, 1.0);
  EXPECT_EQ(c.crnet.epochs, 400u);
  EXPECT_EQ(c.crnet.lr, 1e-2);
  EXPECT_EQ(c.knn_k, 100u);
  EXPECT_EQ(c.crnet.k, 100u);
  EXPECT_EQ(c.bm25.k1, 1.2);
  EXPECT_EQ(c.bm25.b, 0.75);
  EXPECT_EQ(c.eval_ks, (std::vector<std::size_t>{10, 20, 30, 40, 50}));
  EXPECT_EQ(c.arms, kAllArms);
  EXPECT_EQ(parse_config("{}").csnet.dim, 75u);
}

TEST(Config, ValuesPropagateToStages) {
  PipelineConfig c = parse_config(R"({
    "seed": 13, "embedding_dim": 32, "k": 40, "min_df": 2,
    "split": [0.6, 0.2, 0.2], "eval_ks": [5, 10],
    "arms": ["bm25", "crnet"],
    "paths": {"corpus": "c.jsonl", "artifacts": "art"},
    "csnet": {"epochs": 3, "lr": 0.01, "hard_negatives": true, "freeze_cpc": true},
    "crnet": {"epochs": 7, "inject_positives": true, "raw_bow": true, "positive_weight": 2.5},
    "bm25": {"k1": 1.5, "b": 0.5}
  })");
  c.propagate();
  EXPECT_EQ(c.seed, 13u);
  EXPECT_EQ(c.csnet.seed, 13u);
  EXPECT_EQ(c.crnet.seed, 13u);
  EXPECT_EQ(c.csnet.dim, 32u);
  EXPECT_EQ(c.knn_k, 40u);
  EXPECT_EQ(c.crnet.k, 40u);
  EXPECT_EQ(c.min_df, 2u);
  EXPECT_EQ(c.split_ratios[0], 0.6);
  EXPECT_EQ(c.eval_ks, (std::vector<std::size_t>{5, 10}));
  EXPECT_EQ(c.arms, (std::vector<Arm>{Arm::kBm25, Arm::kCrnetCpc}));
  EXPECT_EQ(c.paths.reports, c.paths.artifacts);
  EXPECT_EQ(c.csnet.epochs, 3u);
  EXPECT_TRUE(c.csnet.hard_negatives);
  EXPECT_TRUE(c.csnet.freeze_cpc);
  EXPECT_EQ(c.crnet.epochs, 7u);
  EXPECT_TRUE(c.crnet.inject_positives);
  EXPECT_TRUE(c.crnet.features.raw_bow_similarity);
  EXPECT_EQ(c.crnet.positive_weight, 2.5);
  EXPECT_EQ(c.bm25.k1, 1.5);
}

void expect_invalid(const std::string& text, const std::string& fragment) {
  try {
    parse_config(text);
    FAIL() << text;
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Config, UnknownKeysAreErrors) {
  expect_invalid(R"({"epochs": 3})", "unknown config key: epochs");
  expect_invalid(R"({"csnet": {"learning_rate": 0.1}})", "unknown config key: csnet.learning_rate");
  expect_invalid(R"({"paths": {"output": "x"}})", "unknown config key: paths.output");
}

TEST(Config, BadValuesAreErrors) {
  expect_invalid(R"({"embedding_dim": 0})", "embedding_dim");
  expect_invalid(R"({"csnet": {"lr": "fast"}})", "csnet.lr");
  expect_invalid(R"({"arms": ["gpt"]})", "gpt");
  expect_invalid(R"({"split": [0.5, 0.5]})", "split");
  EXPECT_THROW(parse_config("{oops"), ParseError);
}

TEST(Config, ArmNamesRoundTrip) {
  for (Arm arm : kAllArms) EXPECT_EQ(parse_arm(arm_key(arm)), arm);
  EXPECT_EQ(arm_name(Arm::kCrnetNoCpc), "CRNet w/o CPC");
  EXPECT_EQ(arm_name(Arm::kCsnetCpc), "CSNet with CPC");
}

TEST(Config, LoadFromFile) {
  testing::TempDir dir("config");
  {
    std::ofstream out(dir / "c.json");
    out << R"({"seed": 4})";
  }
  EXPECT_EQ(load_config(dir / "c.json").seed, 4u);
  try {
    load_config(dir / "absent.json");
    FAIL();
  } catch (const ArtifactError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("missing artifact: config", 0), 0u);
  }
}

}  // namespace
}  // namespace patentrec

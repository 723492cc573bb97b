#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "patentrec/common.hpp"

namespace patentrec {

// One patent in the corpus. Classification codes are stored at subclass level
// (first four characters, uppercased), sorted and deduplicated. `cited` keeps
// first-occurrence order.
struct PatentRecord {
  PatentId id;
  std::string title;
  std::string abstract_text;
  std::vector<std::string> cpc;
  std::vector<std::string> ipc;
  std::vector<std::string> uspc;
  int year = 0;
  std::vector<PatentId> cited;

  bool operator==(const PatentRecord&) const = default;
};

enum class DanglingPolicy { kDrop, kReject };

struct LoadOptions {
  DanglingPolicy dangling = DanglingPolicy::kDrop;
  // Restrict years to 1971-2016.
  bool strict_years = false;
};

std::string normalize_code(std::string_view code);

// Immutable after construction.
class CorpusStore {
 public:
  CorpusStore() = default;
  // Validates every invariant; dangling citations are handled per `options`.
  CorpusStore(std::vector<PatentRecord> records, const LoadOptions& options = {});

  std::size_t size() const { return records_.size(); }
  const std::vector<PatentRecord>& records() const { return records_; }
  const PatentRecord& record(RecordIndex index) const { return records_[index]; }
  const PatentRecord& record(const PatentId& id) const;
  std::optional<RecordIndex> find(const PatentId& id) const;
  RecordIndex index_of(const PatentId& id) const;
  bool contains(const PatentId& id) const { return index_.count(id) > 0; }

  // Patents with at least one citation, in file order.
  const std::vector<PatentId>& base_ids() const { return base_ids_; }
  // Union of all cited ids, in first-seen order.
  const std::vector<PatentId>& cited_universe() const { return cited_universe_; }
  std::size_t dropped_citations() const { return dropped_citations_; }

 private:
  std::vector<PatentRecord> records_;
  std::unordered_map<PatentId, RecordIndex> index_;
  std::vector<PatentId> base_ids_;
  std::vector<PatentId> cited_universe_;
  std::size_t dropped_citations_ = 0;
};

// Parses one JSON-object-per-line corpus. Blank lines are skipped.
CorpusStore parse_corpus(std::istream& in, const LoadOptions& options = {});
CorpusStore load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});
PatentRecord parse_record(std::string_view line, std::size_t line_number = 0);
void write_record(std::ostream& out, const PatentRecord& record);
void write_corpus(std::ostream& out, const CorpusStore& store);

struct CorpusStats {
  std::size_t n_total = 0;
  std::size_t n_base = 0;
  std::size_t n_cited = 0;
  std::size_t n_citations = 0;
  int year_min = 0;
  int year_max = 0;
  std::size_t n_cpc = 0;
  std::size_t n_ipc = 0;
  std::size_t n_uspc = 0;

  bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(const CorpusStore& store);
// Two-column "Feature / Value" table.
std::string format_stats_table(const CorpusStats& stats);

struct DatasetSplit {
  std::vector<PatentId> train_query_ids;
  std::vector<PatentId> val_query_ids;
  std::vector<PatentId> test_query_ids;
  std::vector<PatentId> candidate_pool_ids;
  std::uint64_t seed = 0;

  bool operator==(const DatasetSplit&) const = default;
};

// Shuffles base ids by `seed` and partitions them. Validation and test sizes
// are floor(ratio * n); the remainder goes to training.
DatasetSplit split_corpus(const CorpusStore& store, std::array<double, 3> ratios,
                          std::uint64_t seed);

void save_split(std::ostream& out, const DatasetSplit& split);
DatasetSplit load_split(std::istream& in);

}  // namespace patentrec

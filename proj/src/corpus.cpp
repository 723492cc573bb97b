#include "patentrec/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace patentrec {
namespace {

using nlohmann::json;

constexpr int kFirstYear = 1971;
constexpr int kLastYear = 2016;

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::vector<std::string> read_string_array(const json& object, const char* key,
                                           std::size_t line) {
  std::vector<std::string> out;
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return out;
  if (!it->is_array()) throw ParseError(std::string("field '") + key + "' must be an array", line);
  for (const auto& item : *it) {
    if (!item.is_string()) {
      throw ParseError(std::string("field '") + key + "' must hold strings", line);
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string read_string(const json& object, const char* key, std::size_t line) {
  auto it = object.find(key);
  if (it == object.end()) throw ParseError(std::string("missing field '") + key + "'", line);
  if (!it->is_string()) throw ParseError(std::string("field '") + key + "' must be a string", line);
  return it->get<std::string>();
}

std::vector<std::string> normalize_codes(const std::vector<std::string>& codes) {
  std::vector<std::string> out;
  for (const auto& code : codes) {
    auto normalized = normalize_code(code);
    if (!normalized.empty()) out.push_back(std::move(normalized));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void validate_record(const PatentRecord& record, const LoadOptions& options, std::size_t line) {
  if (record.id.empty()) throw ParseError("empty required field 'id'", line);
  if (is_blank(record.title)) throw ParseError("empty required field 'title' in " + record.id, line);
  if (is_blank(record.abstract_text)) {
    throw ParseError("empty required field 'abstract' in " + record.id, line);
  }
  if (record.year <= 0) throw ParseError("year must be positive in " + record.id, line);
  if (options.strict_years && (record.year < kFirstYear || record.year > kLastYear)) {
    throw ParseError("year " + std::to_string(record.year) + " outside " +
                         std::to_string(kFirstYear) + "-" + std::to_string(kLastYear) + " in " +
                         record.id,
                     line);
  }
  if (std::find(record.cited.begin(), record.cited.end(), record.id) != record.cited.end()) {
    throw ParseError("self-citation in " + record.id, line);
  }
}

std::string with_thousands(std::size_t value) {
  std::string digits = std::to_string(value);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace

std::string normalize_code(std::string_view code) {
  std::string out;
  for (char c : code) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (out.size() == 4) break;
  }
  return out;
}

PatentRecord parse_record(std::string_view line, std::size_t line_number) {
  json object;
  try {
    object = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed record: ") + e.what(), line_number);
  }
  if (!object.is_object()) throw ParseError("record must be a JSON object", line_number);

  PatentRecord record;
  record.id = read_string(object, "id", line_number);
  record.title = read_string(object, "title", line_number);
  record.abstract_text = read_string(object, "abstract", line_number);
  auto year = object.find("year");
  if (year == object.end() || !year->is_number_integer()) {
    throw ParseError("field 'year' must be an integer", line_number);
  }
  record.year = year->get<int>();
  record.cpc = normalize_codes(read_string_array(object, "cpc", line_number));
  record.ipc = normalize_codes(read_string_array(object, "ipc", line_number));
  record.uspc = normalize_codes(read_string_array(object, "uspc", line_number));

  std::unordered_set<std::string> seen;
  for (auto& cited : read_string_array(object, "cited", line_number)) {
    if (cited.empty()) throw ParseError("empty cited id", line_number);
    if (seen.insert(cited).second) record.cited.push_back(std::move(cited));
  }
  return record;
}

CorpusStore::CorpusStore(std::vector<PatentRecord> records, const LoadOptions& options)
    : records_(std::move(records)) {
  if (records_.empty()) throw ValidationError("empty corpus");
  for (std::size_t i = 0; i < records_.size(); ++i) {
    validate_record(records_[i], options, 0);
    if (!index_.emplace(records_[i].id, static_cast<RecordIndex>(i)).second) {
      throw ValidationError("duplicate id " + records_[i].id);
    }
  }

  std::unordered_set<PatentId> universe;
  for (auto& record : records_) {
    std::vector<PatentId> kept;
    for (auto& cited : record.cited) {
      if (index_.count(cited) == 0) {
        if (options.dangling == DanglingPolicy::kReject) {
          throw ValidationError("dangling citation " + record.id + " -> " + cited);
        }
        ++dropped_citations_;
        continue;
      }
      kept.push_back(std::move(cited));
    }
    record.cited = std::move(kept);
    if (!record.cited.empty()) base_ids_.push_back(record.id);
    for (const auto& cited : record.cited) {
      if (universe.insert(cited).second) cited_universe_.push_back(cited);
    }
  }
}

const PatentRecord& CorpusStore::record(const PatentId& id) const {
  return records_[index_of(id)];
}

std::optional<RecordIndex> CorpusStore::find(const PatentId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RecordIndex CorpusStore::index_of(const PatentId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown patent id " + id);
  return it->second;
}

CorpusStore parse_corpus(std::istream& in, const LoadOptions& options) {
  std::vector<PatentRecord> records;
  std::unordered_set<PatentId> ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    PatentRecord record = parse_record(line, line_number);
    validate_record(record, options, line_number);
    if (!ids.insert(record.id).second) {
      throw ParseError("duplicate id " + record.id, line_number);
    }
    records.push_back(std::move(record));
  }
  if (records.empty()) throw ValidationError("empty corpus");
  CorpusStore store(std::move(records), options);
  if (store.dropped_citations() > 0) {
    std::cerr << "warning: dropped " << store.dropped_citations()
              << " dangling citation(s)\n";
  }
  return store;
}

CorpusStore load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("missing artifact: corpus " + path.string());
  return parse_corpus(in, options);
}

void write_record(std::ostream& out, const PatentRecord& record) {
  nlohmann::ordered_json object;
  object["id"] = record.id;
  object["title"] = record.title;
  object["abstract"] = record.abstract_text;
  object["cpc"] = record.cpc;
  object["ipc"] = record.ipc;
  object["uspc"] = record.uspc;
  object["year"] = record.year;
  object["cited"] = record.cited;
  out << object.dump() << '\n';
}

void write_corpus(std::ostream& out, const CorpusStore& store) {
  for (const auto& record : store.records()) write_record(out, record);
}

CorpusStats corpus_stats(const CorpusStore& store) {
  CorpusStats stats;
  stats.n_total = store.size();
  stats.n_base = store.base_ids().size();
  stats.n_cited = store.cited_universe().size();
  bool first = true;
  for (const auto& record : store.records()) {
    stats.n_citations += record.cited.size();
    stats.n_cpc += record.cpc.size();
    stats.n_ipc += record.ipc.size();
    stats.n_uspc += record.uspc.size();
    if (first || record.year < stats.year_min) stats.year_min = record.year;
    if (first || record.year > stats.year_max) stats.year_max = record.year;
    first = false;
  }
  return stats;
}

std::string format_stats_table(const CorpusStats& stats) {
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"Feature", "Value"},
      {"# of total patents", with_thousands(stats.n_total)},
      {"# of base patents", with_thousands(stats.n_base)},
      {"# of cited patents", with_thousands(stats.n_cited)},
      {"# of citation number", with_thousands(stats.n_citations)},
      {"Patent registration year",
       std::to_string(stats.year_min) + "-" + std::to_string(stats.year_max)},
      {"# of CPC code", with_thousands(stats.n_cpc)},
      {"# of IPC code", with_thousands(stats.n_ipc)},
      {"# of USPC code", with_thousands(stats.n_uspc)},
  };
  std::size_t width = 0;
  for (const auto& row : rows) width = std::max(width, row.first.size());
  std::ostringstream out;
  for (const auto& [feature, value] : rows) {
    out << feature << std::string(width - feature.size() + 2, ' ') << value << '\n';
  }
  return out.str();
}

DatasetSplit split_corpus(const CorpusStore& store, std::array<double, 3> ratios,
                          std::uint64_t seed) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("split ratios must lie in [0, 1]");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");

  std::vector<PatentId> ids = store.base_ids();
  const std::size_t n = ids.size();
  const bool all_positive = ratios[0] > 0 && ratios[1] > 0 && ratios[2] > 0;
  if (n < 3 && all_positive) throw ValidationError("too few base patents to split");

  // floor with a small tolerance so 0.1 * 10 lands on 1
  auto part = [n](double ratio) {
    return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_val = part(ratios[1]);
  const std::size_t n_test = part(ratios[2]);
  const std::size_t n_train = n - n_val - n_test;
  if (all_positive && (n_val == 0 || n_test == 0 || n_train == 0)) {
    throw ValidationError("too few base patents for three nonempty partitions");
  }

  Rng rng(seed);
  rng.shuffle(ids);

  DatasetSplit split;
  split.seed = seed;
  split.train_query_ids.assign(ids.begin(), ids.begin() + n_train);
  split.val_query_ids.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  split.test_query_ids.assign(ids.begin() + n_train + n_val, ids.end());
  for (const auto& record : store.records()) split.candidate_pool_ids.push_back(record.id);
  return split;
}

void save_split(std::ostream& out, const DatasetSplit& split) {
  nlohmann::ordered_json object;
  object["format"] = "patentrec-split";
  object["version"] = 1;
  object["seed"] = split.seed;
  object["train"] = split.train_query_ids;
  object["val"] = split.val_query_ids;
  object["test"] = split.test_query_ids;
  object["pool"] = split.candidate_pool_ids;
  out << object.dump(1) << '\n';
}

DatasetSplit load_split(std::istream& in) {
  json object;
  try {
    object = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ArtifactError(std::string("malformed split file: ") + e.what());
  }
  if (object.value("format", "") != "patentrec-split" || object.value("version", 0) != 1) {
    throw ArtifactError("not a version-1 split file");
  }
  DatasetSplit split;
  split.seed = object.at("seed").get<std::uint64_t>();
  split.train_query_ids = object.at("train").get<std::vector<PatentId>>();
  split.val_query_ids = object.at("val").get<std::vector<PatentId>>();
  split.test_query_ids = object.at("test").get<std::vector<PatentId>>();
  split.candidate_pool_ids = object.at("pool").get<std::vector<PatentId>>();
  return split;
}

}  // namespace patentrec

#include "patentrec/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

namespace patentrec {
namespace {

std::string private_word(std::size_t cluster, std::size_t word) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%03zuw%03zu", cluster, word);
  return buf;
}

std::string shared_word(std::size_t word) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%04zu", word);
  return buf;
}

// Distinct four-character subclass for an index, e.g. 0 -> "A00A".
std::string subclass_code(std::size_t index) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%c%02zu%c", static_cast<char>('A' + index % 8),
                (index / 8) % 100, static_cast<char>('A' + (index / 800) % 26));
  return buf;
}

std::string patent_id(std::size_t cluster, std::size_t serial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "C%03zu-%04zu", cluster, serial);
  return buf;
}

std::string draw_text(const SyntheticSpec& spec, std::size_t cluster, std::size_t position,
                      std::size_t length, Rng& rng) {
  const double center = static_cast<double>(position) * static_cast<double>(spec.vocab_per_cluster) /
                        static_cast<double>(spec.per_cluster);
  const auto span = static_cast<std::int64_t>(2 * spec.window + 1);
  const auto vocab = static_cast<std::int64_t>(spec.vocab_per_cluster);
  std::string text;
  for (std::size_t i = 0; i < length; ++i) {
    std::string word;
    if (spec.shared_vocab > 0 && rng.uniform(0.0, 1.0) < spec.shared_fraction) {
      word = shared_word(rng.uniform_index(spec.shared_vocab));
    } else {
      const std::int64_t offset =
          static_cast<std::int64_t>(rng.uniform_index(static_cast<std::size_t>(span))) -
          static_cast<std::int64_t>(spec.window);
      const std::int64_t slot = ((static_cast<std::int64_t>(center) + offset) % vocab + vocab) % vocab;
      word = private_word(cluster, static_cast<std::size_t>(slot));
    }
    if (!text.empty()) text.push_back(' ');
    text += word;
  }
  return text;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  if (spec.n_clusters == 0 || spec.per_cluster == 0 || spec.vocab_per_cluster == 0) {
    throw ValidationError("synthetic spec sizes must be positive");
  }
  if (spec.citations == 0) throw ValidationError("synthetic spec needs at least one citation");
  if (spec.citations + 1 > spec.per_cluster) {
    throw ValidationError("infeasible synthetic spec: " + std::to_string(spec.citations) +
                          " citations exceed cluster size - 1 = " +
                          std::to_string(spec.per_cluster - 1));
  }
  if (!(spec.shared_fraction >= 0.0 && spec.shared_fraction <= 1.0)) {
    throw ValidationError("shared fraction must lie in [0, 1]");
  }
  if (spec.shared_fraction > 0.0 && spec.shared_vocab == 0) {
    throw ValidationError("shared fraction requires a shared vocabulary");
  }
  if (spec.title_length == 0) throw ValidationError("synthetic titles must be nonempty");
  if (2 * spec.window + 1 > spec.vocab_per_cluster) {
    throw ValidationError("word window exceeds the cluster vocabulary");
  }
}

CorpusStore generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const std::size_t n = spec.per_cluster;
  std::vector<PatentRecord> records;
  records.reserve(spec.n_clusters * n);
  for (std::size_t c = 0; c < spec.n_clusters; ++c) {
    // Serial numbers are shuffled so that ids carry no ring order.
    std::vector<std::size_t> serial(n);
    for (std::size_t j = 0; j < n; ++j) serial[j] = j;
    rng.shuffle(serial);
    for (std::size_t j = 0; j < n; ++j) {
      PatentRecord record;
      record.id = patent_id(c, serial[j]);
      record.title = draw_text(spec, c, j, spec.title_length, rng);
      record.abstract_text = draw_text(spec, c, j, spec.abstract_length, rng);
      if (spec.cpc_encodes_cluster) {
        record.cpc = {subclass_code(c)};
      } else {
        record.cpc = {subclass_code(rng.uniform_index(spec.n_clusters))};
      }
      record.ipc = record.cpc;
      record.uspc = {std::to_string(100 + rng.uniform_index(800))};
      record.year = 1971 + static_cast<int>(rng.uniform_index(46));

      // Ring neighbours, closest first; ties alternate right, left.
      std::vector<std::size_t> near;
      for (std::size_t d = 1; near.size() < n - 1 && d < n; ++d) {
        const std::size_t right = (j + d) % n;
        const std::size_t left = (j + n - d) % n;
        near.push_back(right);
        if (left != right && near.size() < n - 1) near.push_back(left);
      }
      const std::size_t pool = std::max(spec.citations, spec.neighbour_pool);
      near.resize(std::min(near.size(), pool));
      if (pool > spec.citations) rng.shuffle(near);
      near.resize(spec.citations);
      std::sort(near.begin(), near.end());
      for (std::size_t t : near) record.cited.push_back(patent_id(c, serial[t]));
      records.push_back(std::move(record));
    }
  }
  for (auto& record : records) {
    std::sort(record.cpc.begin(), record.cpc.end());
    std::sort(record.ipc.begin(), record.ipc.end());
  }
  return CorpusStore(std::move(records));
}

std::size_t synthetic_cluster(const PatentRecord& record) {
  if (record.id.size() < 4 || record.id[0] != 'C') {
    throw ValidationError("not a synthetic id: " + record.id);
  }
  return static_cast<std::size_t>(std::stoul(record.id.substr(1, 3)));
}

}  // namespace patentrec

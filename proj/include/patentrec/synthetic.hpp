#pragma once

#include <cstdint>

#include "patentrec/corpus.hpp"

namespace patentrec {

// Clustered toy corpus for desk-scale runs. Inside a cluster the patents sit
// on a ring; each draws its private words from a window of the cluster
// vocabulary centred on its ring position, so ring neighbours share words.
// Every patent cites patents among its nearest ring neighbours, hence all
// patents are base patents.
struct SyntheticSpec {
  std::size_t n_clusters = 20;
  std::size_t per_cluster = 25;
  std::size_t vocab_per_cluster = 60;
  // Probability that a token comes from the vocabulary shared by all clusters.
  double shared_fraction = 0.3;
  std::size_t shared_vocab = 200;
  std::size_t citations = 3;
  // Citations are drawn from this many nearest ring neighbours; 0 means
  // exactly the `citations` nearest ones.
  std::size_t neighbour_pool = 0;
  bool cpc_encodes_cluster = true;
  std::size_t title_length = 8;
  std::size_t abstract_length = 40;
  // Half width of the private-word window around a patent's ring position.
  std::size_t window = 5;
  std::uint64_t seed = 0;
};

// Throws ValidationError on an infeasible spec.
void validate(const SyntheticSpec& spec);

CorpusStore generate_synthetic(const SyntheticSpec& spec);

// Cluster label encoded in a synthetic id, for tests.
std::size_t synthetic_cluster(const PatentRecord& record);

}  // namespace patentrec

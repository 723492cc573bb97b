#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace patentrec {

using PatentId = std::string;
using TokenId = std::int32_t;
using RecordIndex = std::uint32_t;

// Base class for every error raised by the library. The CLI prints
// `error: <kind>: <message>` on a single line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0)
      : Error("parse", line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error("invalid", message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message) : Error("numeric", message) {}
};

class ArtifactError : public Error {
 public:
  explicit ArtifactError(const std::string& message) : Error("artifact", message) {}
};

// Deterministic random source. Only the raw 64-bit engine output is used, so
// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Seed for an independent sub-stream, e.g. derive(seed, epoch).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  // Uniform real in [lo, hi).
  double uniform(double lo, double hi);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// 64-bit FNV-1a, used for vocabulary and model fingerprints.
class Fingerprint {
 public:
  void add(std::string_view bytes);
  void add(std::uint64_t value);
  void add(double value);
  void add(std::span<const double> values);
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 14695981039346656037ULL;
};

// Exact, locale-independent text encoding of doubles (C99 hexfloat).
std::string format_hex(double value);
double parse_hex(std::string_view text);

// Fixed-point decimal formatting for reports.
std::string format_fixed(double value, int digits);

// Every persisted artifact starts with one header line:
//   patentrec kind=<kind> version=<n> key=value ...
struct ArtifactHeader {
  std::string kind;
  int version = 1;
  std::map<std::string, std::string> fields;

  const std::string& at(const std::string& key) const;
};

void write_header(std::ostream& out, const ArtifactHeader& header);
ArtifactHeader read_header(std::istream& in, std::string_view expected_kind,
                           int expected_version);

std::vector<std::string_view> split_whitespace(std::string_view line);

struct ScoredId {
  PatentId id;
  double score = 0.0;

  bool operator==(const ScoredId&) const = default;
};

// Ordering shared by every ranked output: score descending, id ascending.
inline bool ranks_before(const ScoredId& a, const ScoredId& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

struct RankedList {
  PatentId query_id;
  std::vector<ScoredId> items;

  std::vector<PatentId> ids() const;
  bool operator==(const RankedList&) const = default;
};

// Nearest neighbours of a query in embedding space, scored by cosine.
using CandidateSet = RankedList;

// Row format shared by `candidates`, `recommend --format rows` and
// `bm25-baseline`: query_id <TAB> rank <TAB> candidate_id <TAB> score.
void write_ranked_rows(std::ostream& out, const std::vector<RankedList>& lists);
std::vector<RankedList> read_ranked_rows(std::istream& in);

}  // namespace patentrec

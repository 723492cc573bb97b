#include "patentrec/common.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <limits>
#include <sstream>

namespace patentrec {

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw = next();
  while (draw >= limit) draw = next();
  return static_cast<std::size_t>(draw % range);
}

double Rng::uniform(double lo, double hi) {
  const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

void Fingerprint::add(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 1099511628211ULL;
  }
  // length terminator keeps ("ab","c") distinct from ("a","bc")
  add(static_cast<std::uint64_t>(bytes.size()));
}

void Fingerprint::add(std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (value >> (8 * i)) & 0xFFU;
    state_ *= 1099511628211ULL;
  }
}

void Fingerprint::add(double value) { add(std::bit_cast<std::uint64_t>(value)); }

void Fingerprint::add(std::span<const double> values) {
  for (double v : values) add(v);
}

std::string Fingerprint::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

std::string format_hex(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::hex);
  if (ec != std::errc()) throw std::runtime_error("format_hex failed");
  return std::string(buf, ptr);
}

double parse_hex(std::string_view text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value, std::chars_format::hex);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("bad number '" + std::string(text) + "'");
  }
  return value;
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

const std::string& ArtifactHeader::at(const std::string& key) const {
  auto it = fields.find(key);
  if (it == fields.end()) throw ArtifactError(kind + " header lacks field '" + key + "'");
  return it->second;
}

void write_header(std::ostream& out, const ArtifactHeader& header) {
  out << "patentrec kind=" << header.kind << " version=" << header.version;
  for (const auto& [key, value] : header.fields) out << ' ' << key << '=' << value;
  out << '\n';
}

ArtifactHeader read_header(std::istream& in, std::string_view expected_kind,
                           int expected_version) {
  std::string line;
  if (!std::getline(in, line)) throw ArtifactError("empty artifact");
  auto parts = split_whitespace(line);
  if (parts.empty() || parts[0] != "patentrec") {
    throw ArtifactError("not a patentrec artifact");
  }
  ArtifactHeader header;
  bool have_kind = false;
  bool have_version = false;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    auto eq = parts[i].find('=');
    if (eq == std::string_view::npos) throw ArtifactError("malformed artifact header");
    std::string key(parts[i].substr(0, eq));
    std::string value(parts[i].substr(eq + 1));
    if (key == "kind") {
      header.kind = value;
      have_kind = true;
    } else if (key == "version") {
      header.version = std::stoi(value);
      have_version = true;
    } else {
      header.fields[key] = value;
    }
  }
  if (!have_kind || !have_version) throw ArtifactError("artifact header lacks kind/version");
  if (header.kind != expected_kind) {
    throw ArtifactError("expected " + std::string(expected_kind) + " artifact, found " +
                        header.kind);
  }
  if (header.version != expected_version) {
    throw ArtifactError(header.kind + " version mismatch: file has " +
                        std::to_string(header.version) + ", expected " +
                        std::to_string(expected_version));
  }
  return header;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) parts.push_back(line.substr(start, i - start));
  }
  return parts;
}

std::vector<PatentId> RankedList::ids() const {
  std::vector<PatentId> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.id);
  return out;
}

void write_ranked_rows(std::ostream& out, const std::vector<RankedList>& lists) {
  for (const auto& list : lists) {
    for (std::size_t r = 0; r < list.items.size(); ++r) {
      char score[64];
      std::snprintf(score, sizeof(score), "%.17g", list.items[r].score);
      out << list.query_id << '\t' << (r + 1) << '\t' << list.items[r].id << '\t' << score << '\n';
    }
  }
}

std::vector<RankedList> read_ranked_rows(std::istream& in) {
  std::vector<RankedList> lists;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    auto parts = split_whitespace(line);
    if (parts.size() != 4) throw ParseError("expected 4 columns in ranking row", line_number);
    PatentId query(parts[0]);
    std::size_t rank = 0;
    try {
      rank = std::stoull(std::string(parts[1]));
    } catch (const std::exception&) {
      throw ParseError("bad rank", line_number);
    }
    if (lists.empty() || lists.back().query_id != query) {
      lists.push_back(RankedList{query, {}});
    }
    if (rank != lists.back().items.size() + 1) {
      throw ParseError("ranks must be consecutive from 1 per query", line_number);
    }
    char* end = nullptr;
    std::string score_text(parts[3]);
    const double score = std::strtod(score_text.c_str(), &end);
    if (end != score_text.c_str() + score_text.size()) throw ParseError("bad score", line_number);
    lists.back().items.push_back(ScoredId{PatentId(parts[2]), score});
  }
  return lists;
}

}  // namespace patentrec

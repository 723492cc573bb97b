#include "patentrec/eval.hpp"

#include <algorithm>
#include <sstream>

namespace patentrec {
namespace {

std::size_t hits_at(std::span<const PatentId> ranked, const RelevantSet& relevant, std::size_t k) {
  const std::size_t depth = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += relevant.count(ranked[i]);
  return hits;
}

std::string trim_number(double value) {
  std::string text = format_fixed(value, 4);
  while (!text.empty() && text.back() == '0') text.pop_back();
  if (!text.empty() && text.back() == '.') text.push_back('0');
  return text;
}

std::string render(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(widths[c] - row[c].size() + 2, ' ');
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

double recall_at_k(std::span<const PatentId> ranked, const RelevantSet& relevant, std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (relevant.empty()) throw ValidationError("recall is undefined without relevant items");
  return static_cast<double>(hits_at(ranked, relevant, k)) / static_cast<double>(relevant.size());
}

double precision_at_k(std::span<const PatentId> ranked, const RelevantSet& relevant, std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
  const std::size_t depth = std::min(k, ranked.size());
  if (depth == 0) return 0.0;
  return static_cast<double>(hits_at(ranked, relevant, k)) / static_cast<double>(depth);
}

double f1_at_k(double recall, double precision) {
  if (recall + precision == 0.0) return 0.0;
  return 2.0 * recall * precision / (recall + precision);
}

double reciprocal_rank(std::span<const PatentId> ranked, const RelevantSet& relevant) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (relevant.count(ranked[i]) > 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double mrr(const std::vector<std::vector<PatentId>>& ranked_lists,
           const std::vector<RelevantSet>& relevant) {
  if (ranked_lists.size() != relevant.size()) throw ValidationError("mrr: input size mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t q = 0; q < ranked_lists.size(); ++q) {
    if (relevant[q].empty()) continue;
    sum += reciprocal_rank(ranked_lists[q], relevant[q]);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

MetricsReport evaluate_run(const std::string& method, const std::vector<RankedList>& ranked,
                           const GroundTruth& truth, std::span<const std::size_t> ks) {
  MetricsReport report;
  report.method = method;
  std::map<std::size_t, std::pair<double, double>> sums;
  for (std::size_t k : ks) {
    if (k == 0) throw ValidationError("k must be at least 1");
    sums[k] = {0.0, 0.0};
  }
  double rr_sum = 0.0;
  for (const auto& list : ranked) {
    auto it = truth.find(list.query_id);
    if (it == truth.end()) throw ValidationError("ranked query " + list.query_id + " has no ground truth");
    if (it->second.empty()) {
      ++report.n_excluded;
      continue;
    }
    const auto ids = list.ids();
    for (auto& [k, acc] : sums) {
      acc.first += recall_at_k(ids, it->second, k);
      acc.second += precision_at_k(ids, it->second, k);
    }
    rr_sum += reciprocal_rank(ids, it->second);
    ++report.n_queries;
  }
  const double n = report.n_queries == 0 ? 1.0 : static_cast<double>(report.n_queries);
  for (const auto& [k, acc] : sums) {
    KMetrics m;
    m.recall = acc.first / n;
    m.precision = acc.second / n;
    m.f1 = f1_at_k(m.recall, m.precision);
    report.at_k[k] = m;
  }
  report.mrr = rr_sum / n;
  return report;
}

GroundTruth ground_truth(const CorpusStore& store, std::span<const PatentId> queries) {
  GroundTruth truth;
  for (const auto& id : queries) {
    const auto& cited = store.record(id).cited;
    truth[id] = RelevantSet(cited.begin(), cited.end());
  }
  return truth;
}

double random_recall_expectation(std::size_t pool_size, std::size_t k) {
  if (pool_size == 0) return 0.0;
  return static_cast<double>(std::min(k, pool_size)) / static_cast<double>(pool_size);
}

std::string format_comparison_table(const std::vector<MetricsReport>& reports, std::size_t k) {
  const std::string suffix = "@" + std::to_string(k);
  std::vector<std::vector<std::string>> rows = {
      {"Method", "Recall" + suffix, "Precision" + suffix, "F1-Score" + suffix, "MRR"}};
  for (const auto& report : reports) {
    auto it = report.at_k.find(k);
    if (it == report.at_k.end()) throw ValidationError("report lacks K=" + std::to_string(k));
    rows.push_back({report.method, trim_number(it->second.recall),
                    trim_number(it->second.precision), trim_number(it->second.f1),
                    trim_number(report.mrr)});
  }
  return render(rows);
}

std::string format_metric_table(const std::vector<MetricsReport>& reports,
                                const std::string& metric) {
  std::string label;
  if (metric == "recall") {
    label = "Recall";
  } else if (metric == "precision") {
    label = "Precision";
  } else if (metric == "f1") {
    label = "F1-score";
  } else {
    throw ValidationError("unknown metric " + metric);
  }
  std::vector<std::vector<std::string>> rows(1, {"Method"});
  if (!reports.empty()) {
    for (const auto& [k, m] : reports.front().at_k) rows[0].push_back(label + "@" + std::to_string(k));
  }
  for (const auto& report : reports) {
    std::vector<std::string> row{report.method};
    for (const auto& [k, m] : report.at_k) {
      const double value = metric == "recall" ? m.recall : metric == "precision" ? m.precision : m.f1;
      row.push_back(trim_number(value));
    }
    rows.push_back(std::move(row));
  }
  return render(rows);
}

std::string format_metric_rows(const std::vector<MetricsReport>& reports) {
  std::ostringstream out;
  out << "method\tmetric\tk\tvalue\n";
  for (const auto& report : reports) {
    for (const auto& [k, m] : report.at_k) {
      out << report.method << "\trecall\t" << k << '\t' << format_fixed(m.recall, 6) << '\n';
      out << report.method << "\tprecision\t" << k << '\t' << format_fixed(m.precision, 6) << '\n';
      out << report.method << "\tf1\t" << k << '\t' << format_fixed(m.f1, 6) << '\n';
    }
    out << report.method << "\tmrr\t0\t" << format_fixed(report.mrr, 6) << '\n';
  }
  return out.str();
}

std::string format_plot_data(const std::vector<MetricsReport>& reports) {
  std::ostringstream out;
  out << "method\tk\trecall\n";
  for (const auto& report : reports) {
    for (const auto& [k, m] : report.at_k) {
      out << report.method << '\t' << k << '\t' << format_fixed(m.recall, 6) << '\n';
    }
  }
  return out.str();
}

}  // namespace patentrec

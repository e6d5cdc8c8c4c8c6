#pragma once

// Term-graph classifier: Apriori mining over document transactions, a
// max-support co-occurrence graph, all-pairs Dijkstra distances and a
// graph similarity with a calibrated decision threshold.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "docmine/corpus.hpp"
#include "docmine/error.hpp"
#include "docmine/text.hpp"

namespace docmine {

struct Transaction {
  DocId doc_id = 0;
  std::vector<TermIndex> items;  // sorted, distinct
};

inline Transaction make_transaction(DocId id, std::vector<TermIndex> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return {id, std::move(items)};
}

struct FrequentItemset {
  std::vector<TermIndex> items;  // sorted
  std::uint32_t support = 0;

  friend bool operator==(const FrequentItemset&, const FrequentItemset&) = default;
  friend auto operator<=>(const FrequentItemset& a, const FrequentItemset& b) {
    if (a.items.size() != b.items.size()) return a.items.size() <=> b.items.size();
    if (auto c = a.items <=> b.items; c != 0) return c;
    return a.support <=> b.support;
  }
};

namespace tg_detail {

class TidSet {
 public:
  explicit TidSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  std::uint32_t count() const {
    std::uint32_t c = 0;
    for (auto w : words_) c += static_cast<std::uint32_t>(std::popcount(w));
    return c;
  }
  TidSet operator&(const TidSet& o) const {
    TidSet r;
    r.words_.resize(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & o.words_[i];
    return r;
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct Level {
  std::vector<std::vector<TermIndex>> itemsets;  // lexicographically sorted
  std::vector<TidSet> tids;
};

}  // namespace tg_detail

// Level-wise Apriori: candidates of size k join two frequent (k-1)-sets
// sharing a (k-2)-prefix and are pruned unless every (k-1)-subset is
// frequent. max_size = 0 mines every level.
inline std::vector<FrequentItemset> mine_frequent_itemsets(const std::vector<Transaction>& transactions,
                                                           std::uint32_t minsup, std::size_t max_size = 0) {
  if (minsup < 1) throw UsageError("minsup must be >= 1");
  std::vector<FrequentItemset> out;
  const std::size_t n = transactions.size();
  if (n == 0) return out;

  std::map<TermIndex, tg_detail::TidSet> singles;
  for (std::size_t t = 0; t < n; ++t) {
    for (auto item : transactions[t].items) {
      auto [it, inserted] = singles.try_emplace(item, n);
      it->second.set(t);
    }
  }

  tg_detail::Level level;
  for (auto& [item, tids] : singles) {
    const auto support = tids.count();
    if (support >= minsup) {
      out.push_back({{item}, support});
      level.itemsets.push_back({item});
      level.tids.push_back(std::move(tids));
    }
  }

  for (std::size_t k = 2; !level.itemsets.empty() && (max_size == 0 || k <= max_size); ++k) {
    tg_detail::Level next;
    const auto& prev = level.itemsets;
    const auto is_frequent = [&prev](const std::vector<TermIndex>& s) {
      return std::binary_search(prev.begin(), prev.end(), s);
    };
    for (std::size_t i = 0; i < prev.size(); ++i) {
      for (std::size_t j = i + 1; j < prev.size(); ++j) {
        if (!std::equal(prev[i].begin(), prev[i].end() - 1, prev[j].begin())) break;
        std::vector<TermIndex> cand = prev[i];
        cand.push_back(prev[j].back());
        bool keep = true;
        // Subsets dropping one of the first k-2 items; the two dropping
        // the last positions are the parents themselves.
        std::vector<TermIndex> sub(k - 1);
        for (std::size_t drop = 0; keep && drop + 2 < k; ++drop) {
          std::size_t w = 0;
          for (std::size_t p = 0; p < k; ++p) {
            if (p != drop) sub[w++] = cand[p];
          }
          keep = is_frequent(sub);
        }
        if (!keep) continue;
        auto tids = level.tids[i] & level.tids[j];
        const auto support = tids.count();
        if (support >= minsup) {
          out.push_back({cand, support});
          next.itemsets.push_back(std::move(cand));
          next.tids.push_back(std::move(tids));
        }
      }
    }
    level = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct TermGraph {
  std::vector<TermIndex> nodes;  // sorted
  std::map<std::pair<TermIndex, TermIndex>, std::uint32_t> edges;  // key: (u, v) with u < v
  std::uint32_t max_support = 0;

  std::optional<std::uint32_t> weight(TermIndex u, TermIndex v) const {
    if (u > v) std::swap(u, v);
    const auto it = edges.find({u, v});
    if (it == edges.end()) return std::nullopt;
    return it->second;
  }

  bool has_node(TermIndex u) const { return std::binary_search(nodes.begin(), nodes.end(), u); }

  std::uint64_t edge_length(std::uint32_t w) const { return 1 + static_cast<std::uint64_t>(max_support - w); }

  friend bool operator==(const TermGraph&, const TermGraph&) = default;
};

inline TermGraph build_term_graph(const std::vector<FrequentItemset>& itemsets) {
  TermGraph g;
  std::set<TermIndex> nodes;
  for (const auto& s : itemsets) {
    nodes.insert(s.items.begin(), s.items.end());
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      for (std::size_t j = i + 1; j < s.items.size(); ++j) {
        auto u = s.items[i], v = s.items[j];
        if (u > v) std::swap(u, v);
        auto& w = g.edges[{u, v}];
        w = std::max(w, s.support);
      }
    }
  }
  g.nodes.assign(nodes.begin(), nodes.end());
  for (const auto& [k, w] : g.edges) g.max_support = std::max(g.max_support, w);
  return g;
}

class DistanceMatrix {
 public:
  static constexpr std::uint64_t kUnreachable = std::numeric_limits<std::uint64_t>::max();

  DistanceMatrix() = default;
  DistanceMatrix(std::vector<TermIndex> nodes, std::vector<std::uint64_t> dist)
      : nodes_(std::move(nodes)), dist_(std::move(dist)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) pos_.emplace(nodes_[i], i);
  }

  const std::vector<TermIndex>& nodes() const { return nodes_; }

  std::optional<std::size_t> position(TermIndex u) const {
    const auto it = pos_.find(u);
    if (it == pos_.end()) return std::nullopt;
    return it->second;
  }

  // Raw lookup by node positions; kUnreachable if no path.
  std::uint64_t at(std::size_t i, std::size_t j) const { return dist_[i * nodes_.size() + j]; }

  std::optional<std::uint64_t> distance(TermIndex u, TermIndex v) const {
    const auto i = position(u);
    const auto j = position(v);
    if (!i || !j) return std::nullopt;
    const auto d = at(*i, *j);
    if (d == kUnreachable) return std::nullopt;
    return d;
  }

  friend bool operator==(const DistanceMatrix& a, const DistanceMatrix& b) {
    return a.nodes_ == b.nodes_ && a.dist_ == b.dist_;
  }

 private:
  std::vector<TermIndex> nodes_;
  std::vector<std::uint64_t> dist_;
  std::unordered_map<TermIndex, std::size_t> pos_;
};

// Dijkstra from every node with edge length 1 + (max_support - weight).
inline DistanceMatrix all_pairs_distance(const TermGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::unordered_map<TermIndex, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos.emplace(graph.nodes[i], i);
  std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> adj(n);
  for (const auto& [key, w] : graph.edges) {
    const auto a = pos.at(key.first);
    const auto b = pos.at(key.second);
    const auto len = graph.edge_length(w);
    adj[a].emplace_back(b, len);
    adj[b].emplace_back(a, len);
  }

  std::vector<std::uint64_t> dist(n * n, DistanceMatrix::kUnreachable);
  using Item = std::pair<std::uint64_t, std::size_t>;
  for (std::size_t src = 0; src < n; ++src) {
    auto* row = dist.data() + src * n;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    row[src] = 0;
    heap.emplace(0, src);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d != row[u]) continue;
      for (const auto& [v, len] : adj[u]) {
        if (d + len < row[v]) {
          row[v] = d + len;
          heap.emplace(row[v], v);
        }
      }
    }
  }
  return DistanceMatrix(graph.nodes, std::move(dist));
}

// coverage * (1 + mean over matched pairs of 1/(1+dist)), unreachable
// pairs contributing 0.
inline double graph_similarity(const std::vector<TermIndex>& doc_terms, const DistanceMatrix& dm) {
  if (doc_terms.empty()) return 0.0;
  std::vector<std::size_t> matched;
  for (auto t : doc_terms) {
    if (auto p = dm.position(t)) matched.push_back(*p);
  }
  if (matched.empty()) return 0.0;
  const double coverage = static_cast<double>(matched.size()) / static_cast<double>(doc_terms.size());
  double pair_score = 0.0;
  if (matched.size() > 1) {
    double total = 0.0;
    for (std::size_t i = 0; i < matched.size(); ++i) {
      for (std::size_t j = i + 1; j < matched.size(); ++j) {
        const auto d = dm.at(matched[i], matched[j]);
        if (d != DistanceMatrix::kUnreachable) total += 1.0 / (1.0 + static_cast<double>(d));
      }
    }
    const double pairs = static_cast<double>(matched.size()) * static_cast<double>(matched.size() - 1) / 2.0;
    pair_score = total / pairs;
  }
  return coverage * (1.0 + pair_score);
}

inline double graph_similarity(const std::vector<TermIndex>& doc_terms, const TermGraph& /*graph*/,
                               const DistanceMatrix& dm) {
  return graph_similarity(doc_terms, dm);
}

// Threshold maximizing training accuracy of "positive iff score >= t"
// over the observed scores plus +inf (all negative). Ties go to the
// larger threshold.
inline double calibrate_threshold(const std::vector<double>& scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw UsageError("scores/labels length mismatch");
  std::vector<std::pair<double, bool>> items;
  items.reserve(scores.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    items.emplace_back(scores[i], labels[i]);
    positives += labels[i] ? 1 : 0;
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  // Start at +inf: everything negative.
  std::size_t correct = items.size() - positives;
  std::size_t best_correct = correct;
  double best = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < items.size()) {
    const double t = items[i].first;
    while (i < items.size() && items[i].first == t) {
      correct += items[i].second ? 1 : 0;
      correct -= items[i].second ? 0 : 1;
      ++i;
    }
    if (correct > best_correct) {
      best_correct = correct;
      best = t;
    }
  }
  return best;
}

struct TermGraphConfig {
  double minsup_fraction = 0.05;
  std::uint32_t minsup_floor = 5;
  std::size_t term_cap = 500;
  std::size_t max_itemset_size = 2;

  friend bool operator==(const TermGraphConfig&, const TermGraphConfig&) = default;
};

struct TermGraphModel {
  TermGraph graph;
  DistanceMatrix distances;
  double threshold = std::numeric_limits<double>::infinity();
  std::uint32_t minsup = 0;

  double similarity(const std::vector<TermIndex>& doc_terms) const { return graph_similarity(doc_terms, distances); }
  bool predict(const std::vector<TermIndex>& doc_terms) const { return similarity(doc_terms) >= threshold; }
};

inline std::uint32_t family_minsup(std::size_t positive_docs, const TermGraphConfig& config) {
  const auto scaled = static_cast<std::uint32_t>(std::floor(config.minsup_fraction * static_cast<double>(positive_docs)));
  return std::max(config.minsup_floor, scaled);
}

// Graph from one family's positive documents, restricted to its
// term_cap most document-frequent terms; threshold calibrated over all
// training documents.
inline TermGraphModel train_term_graph(const std::vector<std::vector<TermIndex>>& doc_terms,
                                       const std::vector<bool>& labels, const TermGraphConfig& config) {
  if (doc_terms.size() != labels.size()) throw UsageError("doc_terms/labels length mismatch");
  std::map<TermIndex, std::uint32_t> df;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < doc_terms.size(); ++i) {
    if (!labels[i]) continue;
    ++positives;
    for (auto t : doc_terms[i]) ++df[t];
  }
  if (positives == 0) throw DataError("degenerate training set: no positive documents");

  std::vector<std::pair<TermIndex, std::uint32_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > config.term_cap) ranked.resize(config.term_cap);
  std::set<TermIndex> kept;
  for (const auto& [t, d] : ranked) kept.insert(t);

  std::vector<Transaction> transactions;
  for (std::size_t i = 0; i < doc_terms.size(); ++i) {
    if (!labels[i]) continue;
    std::vector<TermIndex> items;
    for (auto t : doc_terms[i]) {
      if (kept.contains(t)) items.push_back(t);
    }
    transactions.push_back(make_transaction(static_cast<DocId>(i), std::move(items)));
  }

  TermGraphModel model;
  model.minsup = family_minsup(positives, config);
  model.graph = build_term_graph(mine_frequent_itemsets(transactions, model.minsup, config.max_itemset_size));
  model.distances = all_pairs_distance(model.graph);

  std::vector<double> scores;
  scores.reserve(doc_terms.size());
  for (const auto& terms : doc_terms) scores.push_back(model.similarity(terms));
  model.threshold = calibrate_threshold(scores, labels);
  return model;
}

using FamilyGraphs = std::map<CategoryFamily, TermGraphModel>;

inline std::array<bool, 5> classify_tg(const std::vector<TermIndex>& doc_terms, const FamilyGraphs& per_family) {
  std::array<bool, 5> out{};
  for (auto f : kAllFamilies) {
    const auto it = per_family.find(f);
    if (it == per_family.end()) throw DataError("no term graph for family " + std::string(family_name(f)));
    out[family_slot(f)] = it->second.predict(doc_terms);
  }
  return out;
}

// One record per line: "node <term>" then "edge <u> <v> <support> <length>".
inline std::string dump_graph(const TermGraph& g, const Vocabulary& vocab) {
  std::ostringstream out;
  for (auto n : g.nodes) out << "node " << vocab.term(n) << '\n';
  for (const auto& [key, w] : g.edges) {
    out << "edge " << vocab.term(key.first) << ' ' << vocab.term(key.second) << ' ' << w << ' '
        << g.edge_length(w) << '\n';
  }
  return out.str();
}

inline TermGraph parse_graph_dump(std::string_view text, const Vocabulary& vocab) {
  TermGraph g;
  std::istringstream in{std::string(text)};
  std::string line;
  std::set<TermIndex> nodes;
  std::size_t line_no = 0;
  const auto lookup = [&](const std::string& term) {
    auto idx = vocab.index_of(term);
    if (!idx) throw DataError("graph dump line " + std::to_string(line_no) + ": unknown term '" + term + "'");
    return *idx;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "node") {
      std::string t;
      ls >> t;
      nodes.insert(lookup(t));
    } else if (kind == "edge") {
      std::string a, b;
      std::uint32_t w = 0;
      std::uint64_t len = 0;
      if (!(ls >> a >> b >> w >> len)) throw DataError("graph dump line " + std::to_string(line_no) + ": malformed edge");
      auto u = lookup(a), v = lookup(b);
      if (u > v) std::swap(u, v);
      g.edges[{u, v}] = w;
    } else {
      throw DataError("graph dump line " + std::to_string(line_no) + ": unknown record '" + kind + "'");
    }
  }
  g.nodes.assign(nodes.begin(), nodes.end());
  for (const auto& [k, w] : g.edges) g.max_support = std::max(g.max_support, w);
  return g;
}

}  // namespace docmine

#pragma once

// Cosine-similarity classifiers: similarity-weighted k-nearest-neighbor
// voting and nearest centroid.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "docmine/bayes.hpp"
#include "docmine/corpus.hpp"
#include "docmine/error.hpp"
#include "docmine/text.hpp"

namespace docmine {

enum class KnnVariant : std::uint8_t { Vote, Centroid };

inline std::string_view to_string(KnnVariant v) { return v == KnnVariant::Vote ? "knn_vote" : "centroid"; }

inline KnnVariant parse_knn_variant(std::string_view s) {
  if (s == "knn_vote") return KnnVariant::Vote;
  if (s == "centroid") return KnnVariant::Centroid;
  throw UsageError("unknown knn variant '" + std::string(s) + "' (supported: knn_vote, centroid)");
}

struct KnnConfig {
  std::size_t k = 15;
  KnnVariant variant = KnnVariant::Vote;

  void validate() const {
    if (k < 1) throw UsageError("k must be >= 1");
  }
  friend bool operator==(const KnnConfig&, const KnnConfig&) = default;
};

inline double cosine(const WeightedVector& a, const WeightedVector& b) {
  if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
  const double c = dot(a, b) / (a.norm() * b.norm());
  return std::clamp(c, 0.0, 1.0);
}

// Document vectors shared by every family's store.
struct TrainingVectors {
  std::vector<DocId> ids;
  std::vector<WeightedVector> vectors;
};

struct VectorStore {
  std::shared_ptr<const TrainingVectors> data;
  std::vector<bool> labels;

  std::size_t size() const { return data ? data->vectors.size() : 0; }
};

inline VectorStore make_store(std::vector<DocId> ids, std::vector<WeightedVector> vectors, std::vector<bool> labels) {
  if (ids.size() != vectors.size() || ids.size() != labels.size()) throw UsageError("vector store columns differ in length");
  auto data = std::make_shared<TrainingVectors>();
  data->ids = std::move(ids);
  data->vectors = std::move(vectors);
  return {std::move(data), std::move(labels)};
}

struct Neighbor {
  std::size_t position = 0;
  DocId doc_id = 0;
  double similarity = 0.0;
};

// The k most similar stored vectors, ordered by (similarity desc, doc_id asc).
// Exhaustive scan.
inline std::vector<Neighbor> nearest_neighbors(const TrainingVectors& data, const WeightedVector& query, std::size_t k) {
  std::vector<Neighbor> all;
  all.reserve(data.vectors.size());
  for (std::size_t i = 0; i < data.vectors.size(); ++i) {
    all.push_back({i, data.ids[i], cosine(query, data.vectors[i])});
  }
  const auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.doc_id < b.doc_id;
  };
  const auto take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), better);
  all.resize(take);
  return all;
}

struct KnnDecision {
  bool label = false;
  double margin = 0.0;
  double positive_votes = 0.0;
  double negative_votes = 0.0;

  // Positive share of the vote mass, 0 when no neighbor is similar.
  double positive_share() const {
    const double total = positive_votes + negative_votes;
    return total > 0.0 ? positive_votes / total : 0.0;
  }
};

inline KnnDecision vote(const std::vector<Neighbor>& neighbors, const std::vector<bool>& labels) {
  KnnDecision d;
  for (const auto& n : neighbors) {
    (labels[n.position] ? d.positive_votes : d.negative_votes) += n.similarity;
  }
  d.label = d.positive_votes > d.negative_votes;
  d.margin = std::abs(d.positive_votes - d.negative_votes);
  return d;
}

inline KnnDecision knn_classify(const VectorStore& store, const WeightedVector& query, std::size_t k) {
  if (store.size() == 0) throw DataError("untrained task: empty vector store");
  if (k < 1) throw UsageError("k must be >= 1");
  return vote(nearest_neighbors(*store.data, query, k), store.labels);
}

struct CentroidModel {
  WeightedVector centroid_pos;
  WeightedVector centroid_neg;
};

namespace knn_detail {

inline WeightedVector mean_direction(const std::vector<const WeightedVector*>& members) {
  std::map<TermIndex, double> sum;
  for (const auto* v : members) {
    for (const auto& [i, w] : v->entries()) sum[i] += w;
  }
  std::vector<WeightedVector::Entry> entries;
  entries.reserve(sum.size());
  const double n = static_cast<double>(members.size());
  for (const auto& [i, w] : sum) {
    if (w != 0.0) entries.emplace_back(i, w / n);
  }
  return WeightedVector(std::move(entries)).normalized();
}

}  // namespace knn_detail

inline CentroidModel centroid_train(const VectorStore& store) {
  std::vector<const WeightedVector*> pos, neg;
  for (std::size_t i = 0; i < store.size(); ++i) {
    (store.labels[i] ? pos : neg).push_back(&store.data->vectors[i]);
  }
  if (pos.empty() || neg.empty()) throw DataError("degenerate training set: a class has no members");
  return {knn_detail::mean_direction(pos), knn_detail::mean_direction(neg)};
}

struct CentroidDecision {
  bool label = false;
  double positive_similarity = 0.0;
  double negative_similarity = 0.0;
};

inline CentroidDecision centroid_decide(const CentroidModel& model, const WeightedVector& query) {
  CentroidDecision d;
  d.positive_similarity = cosine(query, model.centroid_pos);
  d.negative_similarity = cosine(query, model.centroid_neg);
  d.label = d.positive_similarity > d.negative_similarity;
  return d;
}

inline bool centroid_classify(const CentroidModel& model, const WeightedVector& query) {
  return centroid_decide(model, query).label;
}

// Sparse vector as "<nnz> <index>:<weight> ..." with 17 significant digits.
inline std::string format_sparse(const WeightedVector& v) {
  std::string out = std::to_string(v.nnz());
  for (const auto& [i, w] : v.entries()) {
    out += ' ';
    out += std::to_string(i);
    out += ':';
    out += NbModel::fmt17(w);
  }
  return out;
}

inline WeightedVector parse_sparse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t nnz = 0;
  if (!(in >> nnz)) throw DataError("sparse vector: missing entry count");
  std::vector<WeightedVector::Entry> entries;
  entries.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::string tok;
    if (!(in >> tok)) throw DataError("sparse vector: expected " + std::to_string(nnz) + " entries");
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw DataError("sparse vector: malformed entry '" + tok + "'");
    entries.emplace_back(static_cast<TermIndex>(std::stoul(tok.substr(0, colon))),
                         NbModel::parse_double(tok.substr(colon + 1)));
  }
  return WeightedVector(std::move(entries));
}

inline std::string serialize_centroids(const CentroidModel& m) {
  return "positive " + format_sparse(m.centroid_pos) + "\nnegative " + format_sparse(m.centroid_neg) + "\n";
}

inline CentroidModel deserialize_centroids(std::string_view text) {
  CentroidModel m;
  bool have_pos = false, have_neg = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("positive ", 0) == 0) {
      m.centroid_pos = parse_sparse(std::string_view(line).substr(9));
      have_pos = true;
    } else if (line.rfind("negative ", 0) == 0) {
      m.centroid_neg = parse_sparse(std::string_view(line).substr(9));
      have_neg = true;
    }
  }
  if (!have_pos || !have_neg) throw DataError("centroid model: missing class line");
  return m;
}

}  // namespace docmine

#pragma once

// Vector-space keyword search: cosine ranking of TF-IDF document vectors.

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "docmine/corpus.hpp"
#include "docmine/error.hpp"
#include "docmine/knn.hpp"
#include "docmine/text.hpp"

namespace docmine {

struct DocumentMeta {
  std::string title;
  LewisSplit split = LewisSplit::NotUsed;
  std::array<TagSet, 5> labels;
  std::string snippet;
};

inline constexpr std::size_t kSnippetLength = 200;

struct DocumentIndex {
  PipelineConfig config;
  Vocabulary vocab;
  std::vector<DocId> ids;
  std::vector<WeightedVector> vectors;
  std::vector<DocumentMeta> metadata;

  std::size_t size() const { return ids.size(); }
};

struct SearchResult {
  DocId doc_id = 0;
  double score = 0.0;
  std::string title;
  std::string snippet;
};

inline DocumentMeta make_meta(const LabeledDocument& d) {
  return {d.title, d.lewis_split, d.labels, d.body.substr(0, std::min(d.body.size(), kSnippetLength))};
}

inline DocumentIndex build_index(const std::vector<LabeledDocument>& corpus, const PipelineConfig& config) {
  if (corpus.empty()) throw DataError("cannot index an empty corpus");
  config.validate();
  std::vector<TermBag> bags;
  bags.reserve(corpus.size());
  for (const auto& d : corpus) bags.push_back(preprocess(d.text(), config));

  DocumentIndex index;
  index.config = config;
  index.vocab = build_vocabulary(bags, config);
  index.ids.reserve(corpus.size());
  index.vectors.reserve(corpus.size());
  index.metadata.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    index.ids.push_back(corpus[i].new_id);
    index.vectors.push_back(tfidf_vector(bags[i], index.vocab));
    index.metadata.push_back(make_meta(corpus[i]));
  }
  return index;
}

inline WeightedVector query_vector(const DocumentIndex& index, std::string_view query_text) {
  return tfidf_vector(preprocess(query_text, index.config), index.vocab);
}

inline std::vector<SearchResult> search(const DocumentIndex& index, std::string_view query_text, std::size_t top_n) {
  if (top_n < 1) throw UsageError("top_n must be >= 1");
  const auto q = query_vector(index, query_text);
  if (q.empty()) return {};
  struct Hit {
    std::size_t pos;
    double score;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < index.vectors.size(); ++i) {
    const double s = cosine(q, index.vectors[i]);
    if (s > 0.0) hits.push_back({i, s});
  }
  const auto better = [&](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return index.ids[a.pos] < index.ids[b.pos];
  };
  const auto take = std::min(top_n, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(), better);
  std::vector<SearchResult> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const auto& h = hits[i];
    out.push_back({index.ids[h.pos], h.score, index.metadata[h.pos].title, index.metadata[h.pos].snippet});
  }
  return out;
}

}  // namespace docmine

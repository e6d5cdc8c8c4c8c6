#pragma once

// Tokenization, stopword removal, stemming, vocabulary induction and
// L2-normalized TF-IDF vectors.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "docmine/error.hpp"
#include "docmine/porter.hpp"
#include "docmine/stopwords_smart.hpp"

namespace docmine {

using TermIndex = std::uint32_t;

struct PipelineConfig {
  bool case_fold = true;
  std::string stopword_list = "smart-571";
  bool stem = true;
  std::size_t min_token_len = 2;
  std::size_t min_df = 3;

  void validate() const {
    if (min_token_len < 1) throw UsageError("min_token_len must be >= 1");
    if (min_df < 1) throw UsageError("min_df must be >= 1");
    if (stopword_list != "smart-571" && stopword_list != "none") {
      throw UsageError("unknown stopword list '" + stopword_list + "' (supported: smart-571, none)");
    }
  }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

using TermBag = std::map<std::string, std::uint32_t>;

inline const std::unordered_set<std::string_view>& stopword_set(std::string_view name) {
  static const std::unordered_set<std::string_view> smart(resources::smart_stopwords.begin(),
                                                          resources::smart_stopwords.end());
  static const std::unordered_set<std::string_view> none;
  if (name == "smart-571") return smart;
  if (name == "none") return none;
  throw UsageError("unknown stopword list '" + std::string(name) + "'");
}

// Maximal runs of ASCII letters.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      cur += c;
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

inline TermBag preprocess(std::string_view text, const PipelineConfig& config) {
  const auto& stops = stopword_set(config.stopword_list);
  TermBag bag;
  for (auto& tok : tokenize(text)) {
    if (config.case_fold) {
      std::transform(tok.begin(), tok.end(), tok.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    if (tok.size() < config.min_token_len || stops.contains(tok)) continue;
    if (config.stem) {
      tok = porter_stem(std::move(tok));
      // A stem can shrink below the length floor or collide with a stopword.
      if (tok.size() < config.min_token_len || stops.contains(tok)) continue;
    }
    ++bag[tok];
  }
  return bag;
}

class Vocabulary {
 public:
  Vocabulary() = default;

  // Terms must be unique; indices are assigned in the given order.
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> df, std::size_t n_docs)
      : terms_(std::move(terms)), df_(std::move(df)), n_docs_(n_docs) {
    if (terms_.size() != df_.size()) throw DataError("vocabulary terms/df length mismatch");
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (!index_.emplace(terms_[i], static_cast<TermIndex>(i)).second) {
        throw DataError("duplicate vocabulary term '" + terms_[i] + "'");
      }
      if (df_[i] < 1 || df_[i] > n_docs_) {
        throw DataError("document frequency out of range for term '" + terms_[i] + "'");
      }
    }
  }

  std::size_t size() const { return terms_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(TermIndex i) const { return terms_.at(i); }
  std::uint32_t df(TermIndex i) const { return df_.at(i); }

  std::optional<TermIndex> index_of(std::string_view term) const {
    const auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  double idf(TermIndex i) const {
    return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(df_[i]))) + 1.0;
  }

  // Header line "n_docs <N>", then "<index>\t<term>\t<df>" per term.
  std::string serialize() const {
    std::ostringstream out;
    out << "n_docs " << n_docs_ << '\n';
    for (std::size_t i = 0; i < terms_.size(); ++i) out << i << '\t' << terms_[i] << '\t' << df_[i] << '\n';
    return out.str();
  }

  static Vocabulary deserialize(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string word;
    std::size_t n_docs = 0;
    if (!(in >> word >> n_docs) || word != "n_docs") throw DataError("vocabulary: missing n_docs header");
    std::vector<std::string> terms;
    std::vector<std::uint32_t> df;
    std::size_t idx = 0;
    std::string term;
    std::uint32_t d = 0;
    while (in >> idx >> term >> d) {
      if (idx != terms.size()) throw DataError("vocabulary: non-dense index " + std::to_string(idx));
      terms.push_back(term);
      df.push_back(d);
    }
    if (!in.eof()) throw DataError("vocabulary: malformed line after index " + std::to_string(terms.size()));
    return Vocabulary(std::move(terms), std::move(df), n_docs);
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_ && a.df_ == b.df_ && a.n_docs_ == b.n_docs_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, TermIndex> index_;
};

inline Vocabulary build_vocabulary(const std::vector<TermBag>& bags, const PipelineConfig& config) {
  if (bags.empty()) throw DataError("no training data");
  std::map<std::string, std::uint32_t> df;
  for (const auto& bag : bags) {
    for (const auto& [term, count] : bag) ++df[term];
  }
  std::vector<std::string> terms;
  std::vector<std::uint32_t> freq;
  for (const auto& [term, d] : df) {
    if (d >= config.min_df) {
      terms.push_back(term);
      freq.push_back(d);
    }
  }
  return Vocabulary(std::move(terms), std::move(freq), bags.size());
}

// Sparse vector with entries sorted by term index.
class WeightedVector {
 public:
  using Entry = std::pair<TermIndex, double>;

  WeightedVector() = default;
  explicit WeightedVector(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i].first == entries_[i - 1].first) throw UsageError("duplicate index in WeightedVector");
    }
    recompute_norm();
  }

  const std::vector<Entry>& entries() const { return entries_; }
  double norm() const { return norm_; }
  bool empty() const { return entries_.empty(); }
  std::size_t nnz() const { return entries_.size(); }

  double weight(TermIndex i) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                                     [](const Entry& e, TermIndex v) { return e.first < v; });
    return (it != entries_.end() && it->first == i) ? it->second : 0.0;
  }

  void scale(double c) {
    for (auto& e : entries_) e.second *= c;
    recompute_norm();
  }

  // L2 normalization; a zero vector stays zero.
  WeightedVector normalized() const {
    WeightedVector out = *this;
    if (norm_ > 0.0) {
      for (auto& e : out.entries_) e.second /= norm_;
      out.recompute_norm();
    }
    return out;
  }

  friend bool operator==(const WeightedVector& a, const WeightedVector& b) {
    return a.entries_ == b.entries_;
  }

 private:
  void recompute_norm() {
    double s = 0.0;
    for (const auto& e : entries_) s += e.second * e.second;
    norm_ = std::sqrt(s);
  }

  std::vector<Entry> entries_;
  double norm_ = 0.0;
};

inline double dot(const WeightedVector& a, const WeightedVector& b) {
  const auto& x = a.entries();
  const auto& y = b.entries();
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].first < y[j].first) ++i;
    else if (y[j].first < x[i].first) ++j;
    else s += x[i++].second * y[j++].second;
  }
  return s;
}

inline WeightedVector tfidf_vector(const TermBag& bag, const Vocabulary& vocab) {
  std::vector<WeightedVector::Entry> entries;
  for (const auto& [term, count] : bag) {
    if (auto idx = vocab.index_of(term)) entries.emplace_back(*idx, count * vocab.idf(*idx));
  }
  return WeightedVector(std::move(entries)).normalized();
}

// Bag restricted to the vocabulary as (index, count), sorted by index.
using IndexedCounts = std::vector<std::pair<TermIndex, std::uint32_t>>;

inline IndexedCounts to_indexed(const TermBag& bag, const Vocabulary& vocab) {
  IndexedCounts out;
  for (const auto& [term, count] : bag) {
    if (auto idx = vocab.index_of(term)) out.emplace_back(*idx, count);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<TermIndex> term_set(const IndexedCounts& counts) {
  std::vector<TermIndex> out;
  out.reserve(counts.size());
  for (const auto& [i, c] : counts) out.push_back(i);
  return out;
}

}  // namespace docmine

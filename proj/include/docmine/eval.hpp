#pragma once

// Training of every (family, method) pair, per-family accuracy and the
// Table-style / CSV reports.

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "docmine/bayes.hpp"
#include "docmine/corpus.hpp"
#include "docmine/error.hpp"
#include "docmine/knn.hpp"
#include "docmine/term_graph.hpp"
#include "docmine/text.hpp"

namespace docmine {

inline constexpr std::string_view kNaiveBayes = "naive_bayes";
inline constexpr std::string_view kTermGraph = "term_graph";
inline constexpr std::string_view kKnnVote = "knn_vote";
inline constexpr std::string_view kKnnCentroid = "knn_centroid";
inline constexpr std::string_view kMajority = "majority";

inline constexpr std::array<std::string_view, 4> kMethods = {kNaiveBayes, kTermGraph, kKnnVote, kKnnCentroid};

struct ClassifierConfig {
  PipelineConfig pipeline;
  NbConfig nb;
  KnnConfig knn;
  TermGraphConfig graph;

  void validate() const {
    pipeline.validate();
    nb.validate();
    knn.validate();
    if (!(graph.minsup_fraction >= 0.0)) throw UsageError("term_graph.minsup_fraction must be >= 0");
    if (graph.minsup_floor < 1) throw UsageError("term_graph.minsup_floor must be >= 1");
    if (graph.term_cap < 1) throw UsageError("term_graph.term_cap must be >= 1");
  }

  friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

inline nlohmann::ordered_json to_json(const ClassifierConfig& c) {
  nlohmann::ordered_json j;
  j["pipeline"] = {{"case_fold", c.pipeline.case_fold},
                   {"stopword_list", c.pipeline.stopword_list},
                   {"stem", c.pipeline.stem},
                   {"min_token_len", c.pipeline.min_token_len},
                   {"min_df", c.pipeline.min_df}};
  j["naive_bayes"] = {{"event_model", std::string(to_string(c.nb.event_model))}, {"alpha", c.nb.alpha}};
  j["knn"] = {{"k", c.knn.k}, {"variant", std::string(to_string(c.knn.variant))}};
  j["term_graph"] = {{"minsup_fraction", c.graph.minsup_fraction},
                     {"minsup_floor", c.graph.minsup_floor},
                     {"term_cap", c.graph.term_cap},
                     {"max_itemset_size", c.graph.max_itemset_size}};
  return j;
}

// Every key is optional; unknown keys are rejected so typos surface.
inline ClassifierConfig config_from_json(const nlohmann::json& j) {
  ClassifierConfig c;
  const auto check_keys = [](const nlohmann::json& obj, std::string_view section,
                             std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw UsageError("config: '" + std::string(section) + "' must be an object");
    for (const auto& [k, v] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        throw UsageError("config: unknown field '" + std::string(section) + "." + k + "'");
      }
    }
  };
  check_keys(j, "<root>", {"pipeline", "naive_bayes", "knn", "term_graph"});
  try {
    if (j.contains("pipeline")) {
      const auto& p = j["pipeline"];
      check_keys(p, "pipeline", {"case_fold", "stopword_list", "stem", "min_token_len", "min_df"});
      c.pipeline.case_fold = p.value("case_fold", c.pipeline.case_fold);
      c.pipeline.stopword_list = p.value("stopword_list", c.pipeline.stopword_list);
      c.pipeline.stem = p.value("stem", c.pipeline.stem);
      c.pipeline.min_token_len = p.value("min_token_len", c.pipeline.min_token_len);
      c.pipeline.min_df = p.value("min_df", c.pipeline.min_df);
    }
    if (j.contains("naive_bayes")) {
      const auto& p = j["naive_bayes"];
      check_keys(p, "naive_bayes", {"event_model", "alpha"});
      if (p.contains("event_model")) c.nb.event_model = parse_event_model(p["event_model"].get<std::string>());
      c.nb.alpha = p.value("alpha", c.nb.alpha);
    }
    if (j.contains("knn")) {
      const auto& p = j["knn"];
      check_keys(p, "knn", {"k", "variant"});
      c.knn.k = p.value("k", c.knn.k);
      if (p.contains("variant")) c.knn.variant = parse_knn_variant(p["variant"].get<std::string>());
    }
    if (j.contains("term_graph")) {
      const auto& p = j["term_graph"];
      check_keys(p, "term_graph", {"minsup_fraction", "minsup_floor", "term_cap", "max_itemset_size"});
      c.graph.minsup_fraction = p.value("minsup_fraction", c.graph.minsup_fraction);
      c.graph.minsup_floor = p.value("minsup_floor", c.graph.minsup_floor);
      c.graph.term_cap = p.value("term_cap", c.graph.term_cap);
      c.graph.max_itemset_size = p.value("max_itemset_size", c.graph.max_itemset_size);
    }
  } catch (const nlohmann::json::type_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

struct FamilyModels {
  NbModel nb;
  TermGraphModel graph;
  CentroidModel centroid;
  VectorStore store;
  bool majority_positive = false;
};

struct TrainedModels {
  ClassifierConfig config;
  Vocabulary vocab;
  std::shared_ptr<const TrainingVectors> train_vectors;
  std::array<FamilyModels, 5> families;

  const FamilyModels& family(CategoryFamily f) const { return families[family_slot(f)]; }
};

struct DocumentFeatures {
  IndexedCounts counts;
  std::vector<TermIndex> terms;
  WeightedVector vector;
};

inline DocumentFeatures featurize(std::string_view text, const PipelineConfig& config, const Vocabulary& vocab) {
  const auto bag = preprocess(text, config);
  DocumentFeatures f;
  f.counts = to_indexed(bag, vocab);
  f.terms = term_set(f.counts);
  f.vector = tfidf_vector(bag, vocab);
  return f;
}

namespace eval_detail {

template <typename Fn>
auto annotate(CategoryFamily f, std::string_view method, Fn&& fn) {
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError("training " + std::string(family_name(f)) + "/" + std::string(method) + ": " + e.what());
  }
}

}  // namespace eval_detail

inline TrainedModels train_models(const std::vector<LabeledDocument>& train, const ClassifierConfig& config) {
  config.validate();
  if (train.empty()) throw DataError("no training data");
  std::vector<TermBag> bags;
  bags.reserve(train.size());
  for (const auto& d : train) bags.push_back(preprocess(d.text(), config.pipeline));

  TrainedModels m;
  m.config = config;
  m.vocab = build_vocabulary(bags, config.pipeline);

  std::vector<IndexedCounts> counts;
  std::vector<std::vector<TermIndex>> terms;
  auto vectors = std::make_shared<TrainingVectors>();
  for (std::size_t i = 0; i < train.size(); ++i) {
    counts.push_back(to_indexed(bags[i], m.vocab));
    terms.push_back(term_set(counts.back()));
    vectors->ids.push_back(train[i].new_id);
    vectors->vectors.push_back(tfidf_vector(bags[i], m.vocab));
  }
  m.train_vectors = vectors;

  for (auto f : kAllFamilies) {
    auto& fm = m.families[family_slot(f)];
    std::vector<bool> labels;
    std::vector<LabeledCounts> nb_data;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const bool y = family_truth(train[i], f);
      labels.push_back(y);
      nb_data.push_back({counts[i], y});
      positives += y ? 1 : 0;
    }
    fm.majority_positive = 2 * positives > train.size();
    fm.nb = eval_detail::annotate(f, kNaiveBayes, [&] { return train_nb(nb_data, m.vocab.size(), config.nb); });
    fm.graph = eval_detail::annotate(f, kTermGraph, [&] { return train_term_graph(terms, labels, config.graph); });
    fm.store = VectorStore{vectors, labels};
    fm.centroid = eval_detail::annotate(f, kKnnCentroid, [&] { return centroid_train(fm.store); });
  }
  return m;
}

struct MethodPrediction {
  CategoryFamily family = CategoryFamily::Exchanges;
  std::string_view method;
  bool predicted = false;
  double score = 0.0;  // positive-class score in [0, 1]
};

// All four methods for all five families; 20 predictions in family
// then kMethods order. Neighbors are searched once and shared.
inline std::vector<MethodPrediction> classify_all(const TrainedModels& m, const DocumentFeatures& doc) {
  std::vector<MethodPrediction> out;
  out.reserve(20);
  const auto neighbors = nearest_neighbors(*m.train_vectors, doc.vector, m.config.knn.k);
  for (auto f : kAllFamilies) {
    const auto& fm = m.family(f);
    const auto nb = fm.nb.classify(doc.counts);
    out.push_back({f, kNaiveBayes, nb.label, fm.nb.posterior(doc.counts).positive});
    const double sim = fm.graph.similarity(doc.terms);
    out.push_back({f, kTermGraph, sim >= fm.graph.threshold, std::min(1.0, sim / 2.0)});
    const auto kv = vote(neighbors, fm.store.labels);
    out.push_back({f, kKnnVote, kv.label, kv.positive_share()});
    const auto cd = centroid_decide(fm.centroid, doc.vector);
    out.push_back({f, kKnnCentroid, cd.label, cd.positive_similarity});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct PredictionRecord {
  DocId doc_id = 0;
  CategoryFamily family = CategoryFamily::Exchanges;
  std::string method;
  bool predicted = false;
  bool truth = false;
};

inline double accuracy(const std::vector<PredictionRecord>& preds) {
  if (preds.empty()) throw DataError("no predictions");
  std::size_t correct = 0;
  for (const auto& p : preds) correct += p.predicted == p.truth ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

struct CellCounts {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t true_pos = 0;
  std::size_t false_pos = 0;
  std::size_t false_neg = 0;

  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }

  void add(bool predicted, bool truth) {
    ++total;
    if (predicted == truth) ++correct;
    if (predicted && truth) ++true_pos;
    if (predicted && !truth) ++false_pos;
    if (!predicted && truth) ++false_neg;
  }

  friend bool operator==(const CellCounts&, const CellCounts&) = default;
};

struct EvaluationReport {
  std::map<std::pair<CategoryFamily, std::string>, CellCounts> cells;
  nlohmann::ordered_json config;
  std::string corpus_checksum;
  std::string timestamp;

  double accuracy(CategoryFamily f, std::string_view method) const {
    return cells.at({f, std::string(method)}).accuracy();
  }
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline EvaluationReport evaluate_models(const TrainedModels& m, const std::vector<LabeledDocument>& test) {
  if (test.empty()) throw DataError("empty test split");
  EvaluationReport r;
  r.config = to_json(m.config);
  r.timestamp = utc_timestamp();
  for (const auto& d : test) {
    const auto feats = featurize(d.text(), m.config.pipeline, m.vocab);
    for (const auto& p : classify_all(m, feats)) {
      r.cells[{p.family, std::string(p.method)}].add(p.predicted, family_truth(d, p.family));
    }
    for (auto f : kAllFamilies) {
      r.cells[{f, std::string(kMajority)}].add(m.family(f).majority_positive, family_truth(d, f));
    }
  }
  return r;
}

inline EvaluationReport run_benchmark(const CorpusSplit& corpus, const ClassifierConfig& config) {
  if (corpus.train.empty() || corpus.test.empty()) throw DataError("benchmark needs non-empty train and test splits");
  return evaluate_models(train_models(corpus.train, config), corpus.test);
}

// knn_vote accuracy per family for each k; neighbors are computed once at max k.
inline std::map<std::size_t, std::array<CellCounts, 5>> sweep_k(const TrainedModels& m,
                                                                 const std::vector<LabeledDocument>& test,
                                                                 const std::vector<std::size_t>& ks) {
  std::map<std::size_t, std::array<CellCounts, 5>> out;
  if (ks.empty()) return out;
  const auto kmax = *std::max_element(ks.begin(), ks.end());
  for (const auto& d : test) {
    const auto feats = featurize(d.text(), m.config.pipeline, m.vocab);
    const auto all = nearest_neighbors(*m.train_vectors, feats.vector, kmax);
    for (auto k : ks) {
      const std::vector<Neighbor> top(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(k, all.size())));
      for (auto f : kAllFamilies) {
        out[k][family_slot(f)].add(vote(top, m.family(f).store.labels).label, family_truth(d, f));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

namespace eval_detail {

inline std::string ratio(std::size_t num, std::size_t den) {
  return den ? format_fixed(static_cast<double>(num) / static_cast<double>(den), 4) : format_fixed(0.0, 4);
}

inline std::string render_csv(const EvaluationReport& r, bool extended) {
  std::string out = "family,method,correct,total,accuracy";
  if (extended) out += ",precision,recall,f1";
  out += '\n';
  // Family names and method names both sort lexicographically here.
  std::map<std::pair<std::string, std::string>, const CellCounts*> by_name;
  for (const auto& [key, cell] : r.cells) by_name[{std::string(family_name(key.first)), key.second}] = &cell;
  for (const auto& [key, cell] : by_name) {
    out += key.first + "," + key.second + "," + std::to_string(cell->correct) + "," + std::to_string(cell->total) +
           "," + format_fixed(cell->accuracy(), 4);
    if (extended) {
      const auto p = cell->true_pos + cell->false_pos;
      const auto a = cell->true_pos + cell->false_neg;
      const double prec = p ? static_cast<double>(cell->true_pos) / static_cast<double>(p) : 0.0;
      const double rec = a ? static_cast<double>(cell->true_pos) / static_cast<double>(a) : 0.0;
      const double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
      out += "," + ratio(cell->true_pos, p) + "," + ratio(cell->true_pos, a) + "," + format_fixed(f1, 4);
    }
    out += '\n';
  }
  return out;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string render_table(const EvaluationReport& r) {
  const std::vector<std::pair<std::string_view, std::string_view>> columns = {
      {kNaiveBayes, "NAIVE"}, {kTermGraph, "Term Graph"}, {kKnnVote, "KNN"},
      {kKnnCentroid, "Centroid"}, {kMajority, "Majority"}};
  std::string out = pad("Category/Method", 16);
  for (const auto& [m, label] : columns) out += pad(std::string(label), 12);
  out += '\n';
  for (auto f : kAllFamilies) {
    std::string name(family_tag(f));
    std::string row = pad(name, 16);
    bool any = false;
    for (const auto& [m, label] : columns) {
      const auto it = r.cells.find({f, std::string(m)});
      if (it == r.cells.end()) {
        row += pad("-", 12);
      } else {
        row += pad(format_fixed(100.0 * it->second.accuracy(), 2), 12);
        any = true;
      }
    }
    if (any) out += row + '\n';
  }
  return out;
}

}  // namespace eval_detail

inline constexpr std::array<std::string_view, 3> kReportFormats = {"text", "csv", "csv-extended"};

inline std::string emit_report(const EvaluationReport& r, std::string_view format) {
  if (format == "csv") return eval_detail::render_csv(r, false);
  if (format == "csv-extended") return eval_detail::render_csv(r, true);
  if (format == "text") return eval_detail::render_table(r);
  throw UsageError("unknown report format '" + std::string(format) + "' (supported: text, csv, csv-extended)");
}

// Parses the plain CSV form back into rows of name -> value strings.
inline std::vector<std::vector<std::pair<std::string, std::string>>> parse_report_csv(std::string_view csv) {
  std::vector<std::vector<std::pair<std::string, std::string>>> rows;
  std::vector<std::string> header;
  std::size_t pos = 0;
  bool first = true;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    const auto line = csv.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t s = 0;
    while (true) {
      const auto c = line.find(',', s);
      fields.emplace_back(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s));
      if (c == std::string_view::npos) break;
      s = c + 1;
    }
    if (first) {
      header = std::move(fields);
      first = false;
      continue;
    }
    if (fields.size() != header.size()) throw DataError("report csv: row has " + std::to_string(fields.size()) + " fields");
    std::vector<std::pair<std::string, std::string>> row;
    for (std::size_t i = 0; i < fields.size(); ++i) row.emplace_back(header[i], fields[i]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace docmine

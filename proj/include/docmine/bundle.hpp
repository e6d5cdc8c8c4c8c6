#pragma once

// ModelBundle: everything the CLI and the service need, persisted as a
// directory of structured-text members plus a checksummed manifest.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "docmine/corpus.hpp"
#include "docmine/error.hpp"
#include "docmine/eval.hpp"
#include "docmine/knn.hpp"
#include "docmine/retrieval.hpp"
#include "docmine/term_graph.hpp"

namespace docmine {

inline constexpr int kBundleFormatVersion = 1;

struct ModelBundle {
  int format_version = kBundleFormatVersion;
  std::string corpus_checksum;
  std::vector<LabeledDocument> corpus;
  TrainedModels models;
  DocumentIndex index;
  std::string report_csv;

  const ClassifierConfig& config() const { return models.config; }
};

// Trains on the ModApte train split, evaluates on the test split and
// indexes every document of the dump for search.
inline ModelBundle build_bundle(const std::string& dump_bytes, const ClassifierConfig& config) {
  ModelBundle b;
  b.corpus = read_dump(dump_bytes);
  if (b.corpus.empty()) throw DataError("document dump is empty");
  b.corpus_checksum = checksum_hex(dump_bytes);
  const auto split = modapte_split(b.corpus);
  if (split.train.empty()) throw DataError("dump has no ModApte training documents");
  b.models = train_models(split.train, config);
  if (!split.test.empty()) {
    auto report = evaluate_models(b.models, split.test);
    report.corpus_checksum = b.corpus_checksum;
    b.report_csv = emit_report(report, "csv");
  } else {
    b.report_csv = emit_report(EvaluationReport{}, "csv");
  }
  b.index = build_index(b.corpus, config.pipeline);
  return b;
}

namespace bundle_detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
  if (!out) throw DataError("write failed for " + p.string());
}

inline std::string vectors_text(const std::vector<DocId>& ids, const std::vector<WeightedVector>& vecs) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += std::to_string(ids[i]);
    out += ' ';
    out += format_sparse(vecs[i]);
    out += '\n';
  }
  return out;
}

inline void parse_vectors(const std::string& text, std::vector<DocId>& ids, std::vector<WeightedVector>& vecs,
                          const std::string& member) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw DataError(member + ":" + std::to_string(line_no) + ": malformed vector line");
    try {
      ids.push_back(static_cast<DocId>(std::stoul(line.substr(0, sp))));
      vecs.push_back(parse_sparse(std::string_view(line).substr(sp + 1)));
    } catch (const std::logic_error& e) {
      throw DataError(member + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline std::string family_member(CategoryFamily f, std::string_view file) {
  return "family/" + std::string(family_name(f)) + "/" + std::string(file);
}

}  // namespace bundle_detail

inline std::map<std::string, std::string> bundle_members(const ModelBundle& b) {
  std::map<std::string, std::string> m;
  m["config.json"] = to_json(b.config()).dump(2) + "\n";
  m["corpus.jsonl"] = write_dump(b.corpus);
  m["vocabulary.txt"] = b.models.vocab.serialize();
  m["train_vectors.txt"] = bundle_detail::vectors_text(b.models.train_vectors->ids, b.models.train_vectors->vectors);
  for (auto f : kAllFamilies) {
    const auto& fm = b.models.family(f);
    m[bundle_detail::family_member(f, "naive_bayes.txt")] = fm.nb.serialize();
    m[bundle_detail::family_member(f, "term_graph.txt")] = dump_graph(fm.graph.graph, b.models.vocab);
    m[bundle_detail::family_member(f, "term_graph_threshold.txt")] =
        "threshold " + NbModel::fmt17(fm.graph.threshold) + "\nminsup " + std::to_string(fm.graph.minsup) + "\n";
    m[bundle_detail::family_member(f, "centroids.txt")] = serialize_centroids(fm.centroid);
  }
  m["index_vocabulary.txt"] = b.index.vocab.serialize();
  m["index_vectors.txt"] = bundle_detail::vectors_text(b.index.ids, b.index.vectors);
  m["report.csv"] = b.report_csv;
  return m;
}

inline void save_bundle(const ModelBundle& b, const std::filesystem::path& dir) {
  const auto members = bundle_members(b);
  nlohmann::ordered_json manifest;
  manifest["format_version"] = b.format_version;
  manifest["corpus_checksum"] = b.corpus_checksum;
  nlohmann::ordered_json sums = nlohmann::ordered_json::object();
  for (const auto& [name, text] : members) {
    bundle_detail::write_text(dir / name, text);
    sums[name] = checksum_hex(text);
  }
  manifest["members"] = sums;
  bundle_detail::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

inline ModelBundle load_bundle(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) throw DataError("not a model bundle (no manifest.json): " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file_bytes(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  ModelBundle b;
  b.format_version = manifest.value("format_version", 0);
  if (b.format_version != kBundleFormatVersion) {
    throw DataError(manifest_path.string() + ": format_version " + std::to_string(b.format_version) +
                    " unsupported (expected " + std::to_string(kBundleFormatVersion) + ")");
  }
  b.corpus_checksum = manifest.value("corpus_checksum", std::string{});

  std::map<std::string, std::string> members;
  for (const auto& [name, sum] : manifest.at("members").items()) {
    auto text = read_file_bytes(dir / name);
    if (checksum_hex(text) != sum.get<std::string>()) throw DataError((dir / name).string() + ": checksum mismatch");
    members[name] = std::move(text);
  }
  const auto member = [&](const std::string& name) -> const std::string& {
    const auto it = members.find(name);
    if (it == members.end()) throw DataError("bundle member missing: " + name);
    return it->second;
  };

  if (checksum_hex(member("corpus.jsonl")) != b.corpus_checksum) {
    throw DataError("corpus.jsonl does not match manifest corpus_checksum");
  }
  try {
    b.models.config = config_from_json(nlohmann::json::parse(member("config.json")));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config.json: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("config.json: ") + e.what());
  }
  b.corpus = read_dump(member("corpus.jsonl"), "corpus.jsonl");
  std::unordered_map<DocId, const LabeledDocument*> by_id;
  for (const auto& d : b.corpus) by_id.emplace(d.new_id, &d);

  b.models.vocab = Vocabulary::deserialize(member("vocabulary.txt"));
  auto vectors = std::make_shared<TrainingVectors>();
  bundle_detail::parse_vectors(member("train_vectors.txt"), vectors->ids, vectors->vectors, "train_vectors.txt");
  b.models.train_vectors = vectors;

  for (auto f : kAllFamilies) {
    auto& fm = b.models.families[family_slot(f)];
    std::vector<bool> labels;
    std::size_t positives = 0;
    for (auto id : vectors->ids) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw DataError("train_vectors.txt: document " + std::to_string(id) + " not in corpus");
      labels.push_back(family_truth(*it->second, f));
      positives += labels.back() ? 1 : 0;
    }
    fm.majority_positive = 2 * positives > labels.size();
    fm.store = VectorStore{vectors, std::move(labels)};
    fm.nb = NbModel::deserialize(member(bundle_detail::family_member(f, "naive_bayes.txt")));
    fm.graph.graph = parse_graph_dump(member(bundle_detail::family_member(f, "term_graph.txt")), b.models.vocab);
    fm.graph.distances = all_pairs_distance(fm.graph.graph);
    {
      std::istringstream in(member(bundle_detail::family_member(f, "term_graph_threshold.txt")));
      std::string k1, v1, k2;
      if (!(in >> k1 >> v1 >> k2 >> fm.graph.minsup) || k1 != "threshold" || k2 != "minsup") {
        throw DataError(bundle_detail::family_member(f, "term_graph_threshold.txt") + ": malformed");
      }
      fm.graph.threshold = NbModel::parse_double(v1);
    }
    fm.centroid = deserialize_centroids(member(bundle_detail::family_member(f, "centroids.txt")));
  }

  b.index.config = b.models.config.pipeline;
  b.index.vocab = Vocabulary::deserialize(member("index_vocabulary.txt"));
  bundle_detail::parse_vectors(member("index_vectors.txt"), b.index.ids, b.index.vectors, "index_vectors.txt");
  for (auto id : b.index.ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("index_vectors.txt: document " + std::to_string(id) + " not in corpus");
    b.index.metadata.push_back(make_meta(*it->second));
  }
  b.report_csv = member("report.csv");
  return b;
}

}  // namespace docmine

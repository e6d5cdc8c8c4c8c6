// docmine: ingest the Reuters-21578 collection, train and evaluate the
// classifiers, classify articles, search, and serve the HTTP API.

#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "docmine/bundle.hpp"
#include "docmine/corpus.hpp"
#include "docmine/eval.hpp"
#include "docmine/retrieval.hpp"
#include "docmine/service.hpp"

namespace fs = std::filesystem;
using namespace docmine;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw DataError("cannot write " + p.string());
}

ClassifierConfig load_config(const std::optional<fs::path>& path) {
  if (!path) return {};
  const auto text = read_file_bytes(*path);
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw UsageError(path->string() + ": not valid JSON");
  try {
    return config_from_json(j);
  } catch (const UsageError& e) {
    throw UsageError(path->string() + ": " + e.what());
  }
}

int cmd_ingest(const fs::path& corpus_dir, const fs::path& out) {
  const auto parsed = parse_collection(load_sgml_directory(corpus_dir));
  for (const auto& e : parsed.errors) std::cerr << "error: " << e.describe() << '\n';
  const auto split = modapte_split(parsed.documents);
  write_file(out, write_dump(parsed.documents));
  std::cout << "parsed " << parsed.documents.size() << " documents (train " << split.train.size() << ", test "
            << split.test.size() << ", unused " << split.unused.size() << ")\n";
  if (!parsed.errors.empty()) std::cout << parsed.errors.size() << " malformed records skipped\n";
  return parsed.documents.empty() && !parsed.errors.empty() ? kExitData : kExitOk;
}

int cmd_train(const fs::path& dump, const fs::path& out, const std::optional<fs::path>& config_path) {
  const auto config = load_config(config_path);
  const auto start = std::chrono::steady_clock::now();
  const auto bundle = build_bundle(read_file_bytes(dump), config);
  save_bundle(bundle, out);
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "trained on " << bundle.models.train_vectors->ids.size() << " documents, vocabulary "
            << bundle.models.vocab.size() << " terms, index " << bundle.index.size() << " documents ("
            << format_fixed(secs, 1) << " s)\n";
  std::cout << "bundle written to " << out.string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const fs::path& bundle_dir, const fs::path& out, bool extended, const std::optional<fs::path>& k_sweep) {
  const auto bundle = load_bundle(bundle_dir);
  const auto split = modapte_split(bundle.corpus);
  auto report = evaluate_models(bundle.models, split.test);
  report.corpus_checksum = bundle.corpus_checksum;
  write_file(out, emit_report(report, extended ? "csv-extended" : "csv"));
  std::cout << emit_report(report, "text");
  std::cout << "test documents: " << split.test.size() << ", report written to " << out.string() << '\n';
  if (k_sweep) {
    std::string csv = "family,k,correct,total,accuracy\n";
    for (const auto& [k, cells] : sweep_k(bundle.models, split.test, {1, 5, 15, 30})) {
      for (auto f : kAllFamilies) {
        const auto& c = cells[family_slot(f)];
        csv += std::string(family_name(f)) + "," + std::to_string(k) + "," + std::to_string(c.correct) + "," +
               std::to_string(c.total) + "," + format_fixed(c.accuracy(), 4) + "\n";
      }
    }
    write_file(*k_sweep, csv);
    std::cout << "k sweep written to " << k_sweep->string() << '\n';
  }
  return kExitOk;
}

int cmd_classify(const fs::path& bundle_dir, const fs::path& file) {
  const auto bundle = load_bundle(bundle_dir);
  const auto text = read_file_bytes(file);
  const auto feats = featurize(text, bundle.config().pipeline, bundle.models.vocab);
  for (const auto& p : classify_all(bundle.models, feats)) {
    std::cout << family_name(p.family) << ' ' << p.method << ' ' << (p.predicted ? "true" : "false") << ' '
              << format_fixed(p.score, 4) << '\n';
  }
  return kExitOk;
}

int cmd_search(const fs::path& bundle_dir, const std::string& query, std::size_t top) {
  const auto bundle = load_bundle(bundle_dir);
  const auto results = search(bundle.index, query, top);
  std::cout << results.size() << " results\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::cout << (i + 1) << ". [" << r.doc_id << "] " << format_fixed(r.score, 4) << "  " << r.title << '\n';
  }
  return kExitOk;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const fs::path& bundle_dir, const std::string& listen, const std::optional<fs::path>& static_dir) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw UsageError("--listen expects host:port, got '" + listen + "'");
  const auto host = listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--listen: invalid port in '" + listen + "'");
  }
  const auto bundle = load_bundle(bundle_dir);
  httplib::Server server;
  install_routes(server, bundle, static_dir);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::cout << "serving " << bundle.index.size() << " documents on http://" << host << ':' << port << std::endl;
  if (!server.listen(host, port)) throw DataError("cannot listen on " + listen);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reuters-21578 document mining: classification benchmark and keyword search"};
  app.require_subcommand(1);

  fs::path corpus_dir, out, dump, bundle, file, k_sweep;
  std::optional<fs::path> config_path, static_dir;
  std::string query, listen = "127.0.0.1:8080";
  std::size_t top = kDefaultTopN;
  bool extended = false;

  auto* ingest = app.add_subcommand("ingest", "Parse reut2-*.sgm files into a document dump");
  ingest->add_option("--corpus-dir", corpus_dir, "Directory containing reut2-000.sgm ... reut2-021.sgm")->required();
  ingest->add_option("--out", out, "Output dump (JSON lines)")->required();

  auto* train = app.add_subcommand("train", "Train all classifiers and build the search index");
  train->add_option("--dump", dump, "Document dump from 'ingest'")->required();
  train->add_option("--out", out, "Output bundle directory")->required();
  train->add_option("--config", config_path, "JSON config file");

  auto* evaluate = app.add_subcommand("evaluate", "Accuracy of every method on the ModApte test split");
  evaluate->add_option("--bundle", bundle, "Model bundle directory")->required();
  evaluate->add_option("--out", out, "Output CSV")->required();
  evaluate->add_flag("--extended", extended, "Add precision/recall/F1 columns");
  auto* sweep_opt = evaluate->add_option("--k-sweep", k_sweep, "Also write knn_vote accuracy for k in {1,5,15,30}");

  auto* classify = app.add_subcommand("classify", "Classify a plain-text article");
  classify->add_option("--bundle", bundle, "Model bundle directory")->required();
  classify->add_option("--file", file, "Article text file")->required();

  auto* search_cmd = app.add_subcommand("search", "Keyword search over the indexed collection");
  search_cmd->add_option("--bundle", bundle, "Model bundle directory")->required();
  search_cmd->add_option("--query", query, "Query text")->required();
  search_cmd->add_option("--top", top, "Number of results")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API and web UI");
  serve->add_option("--bundle", bundle, "Model bundle directory")->required();
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--static-dir", static_dir, "Directory with built web UI assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(corpus_dir, out);
    if (*train) return cmd_train(dump, out, config_path);
    if (*evaluate) return cmd_evaluate(bundle, out, extended, *sweep_opt ? std::optional(k_sweep) : std::nullopt);
    if (*classify) return cmd_classify(bundle, file);
    if (*search_cmd) return cmd_search(bundle, query, top);
    if (*serve) return cmd_serve(bundle, listen, static_dir);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

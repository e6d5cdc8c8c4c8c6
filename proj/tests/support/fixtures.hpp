#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "docmine/bundle.hpp"
#include "synthetic_reuters.hpp"

namespace fixtures {

inline std::vector<docmine::LabeledDocument> parse_records(const std::vector<synthetic::Record>& records) {
  auto r = docmine::parse_collection(synthetic::to_sources(records));
  if (!r.errors.empty()) throw docmine::DataError(r.errors.front().describe());
  return std::move(r.documents);
}

inline std::string dump_of(const std::vector<synthetic::Record>& records) {
  return docmine::write_dump(parse_records(records));
}

// Realistic-shaped synthetic bundle shared by several tests.
inline const docmine::ModelBundle& shared_bundle() {
  static const docmine::ModelBundle b =
      docmine::build_bundle(dump_of(synthetic::make_records({.n_docs = 600, .seed = 42})), {});
  return b;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("docmine-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace fixtures

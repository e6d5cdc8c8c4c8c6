// Writes a synthetic reut2-NNN.sgm distribution for CLI tests.
//   make_sample_corpus OUT_DIR [N_DOCS] [SEED] [FILLER_VOCAB]

#include <fstream>
#include <iostream>

#include "synthetic_reuters.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_sample_corpus OUT_DIR [N_DOCS] [SEED]\n";
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  synthetic::Options opt;
  opt.n_docs = argc > 2 ? std::stoul(argv[2]) : 400;
  opt.seed = argc > 3 ? std::stoull(argv[3]) : 1;
  if (argc > 4) opt.filler_vocab = std::stoul(argv[4]);
  std::filesystem::create_directories(dir);
  for (const auto& src : synthetic::to_sources(synthetic::make_records(opt), 100)) {
    std::ofstream(dir / src.name, std::ios::binary) << src.bytes;
  }
  return 0;
}

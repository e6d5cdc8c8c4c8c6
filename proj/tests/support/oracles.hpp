#pragma once

// Independent reference implementations used only by tests. None of
// these call into the library's algorithm code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

// Deterministic small-range integers independent of libstdc++
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }
  bool coin(double p) { return static_cast<double>(gen_() >> 11) * 0x1.0p-53 < p; }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

// Every non-empty subset of the item universe with its support count.
inline std::map<std::vector<std::uint32_t>, std::uint32_t> brute_force_itemsets(
    const std::vector<std::vector<std::uint32_t>>& transactions, std::uint32_t minsup) {
  std::set<std::uint32_t> universe;
  for (const auto& t : transactions) universe.insert(t.begin(), t.end());
  const std::vector<std::uint32_t> items(universe.begin(), universe.end());
  std::map<std::vector<std::uint32_t>, std::uint32_t> out;
  const std::uint64_t n = items.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::uint32_t> subset;
    for (std::uint64_t b = 0; b < n; ++b) {
      if (mask & (std::uint64_t{1} << b)) subset.push_back(items[b]);
    }
    std::uint32_t support = 0;
    for (const auto& t : transactions) {
      const std::set<std::uint32_t> ts(t.begin(), t.end());
      bool all = true;
      for (auto s : subset) all = all && ts.count(s);
      support += all ? 1 : 0;
    }
    if (support >= minsup) out[subset] = support;
  }
  return out;
}

inline constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

// Floyd-Warshall over an explicit n x n length matrix (kInf = no edge).
inline std::vector<std::uint64_t> floyd_warshall(std::size_t n, std::vector<std::uint64_t> d) {
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i * n + k] == kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (d[k * n + j] == kInf) continue;
        d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
      }
    }
  }
  return d;
}

// Naive Bayes posterior by direct products of probabilities (no logs).
// docs: per document a dense count vector; labels 0/1.
struct DirectNb {
  std::vector<std::vector<double>> cond;  // [class][term]
  std::vector<double> prior;
  bool bernoulli = true;

  static DirectNb fit(const std::vector<std::vector<unsigned>>& docs, const std::vector<int>& labels,
                      std::size_t vocab, double alpha, bool bernoulli) {
    DirectNb m;
    m.bernoulli = bernoulli;
    m.prior.assign(2, 0.0);
    m.cond.assign(2, std::vector<double>(vocab, 0.0));
    std::vector<double> ndocs(2, 0.0), ntok(2, 0.0);
    std::vector<std::vector<double>> tally(2, std::vector<double>(vocab, 0.0));
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const int c = labels[d];
      ndocs[c] += 1;
      for (std::size_t w = 0; w < vocab; ++w) {
        if (bernoulli) tally[c][w] += docs[d][w] > 0 ? 1 : 0;
        else tally[c][w] += docs[d][w], ntok[c] += docs[d][w];
      }
    }
    for (int c = 0; c < 2; ++c) {
      m.prior[c] = ndocs[c] / (ndocs[0] + ndocs[1]);
      for (std::size_t w = 0; w < vocab; ++w) {
        m.cond[c][w] = bernoulli ? (tally[c][w] + alpha) / (ndocs[c] + 2 * alpha)
                                 : (tally[c][w] + alpha) / (ntok[c] + alpha * static_cast<double>(vocab));
      }
    }
    return m;
  }

  std::pair<double, double> posterior(const std::vector<unsigned>& doc) const {
    double s[2];
    for (int c = 0; c < 2; ++c) {
      double p = prior[c];
      for (std::size_t w = 0; w < doc.size(); ++w) {
        if (bernoulli) p *= doc[w] > 0 ? cond[c][w] : 1.0 - cond[c][w];
        else p *= std::pow(cond[c][w], static_cast<double>(doc[w]));
      }
      s[c] = p;
    }
    return {s[0] / (s[0] + s[1]), s[1] / (s[0] + s[1])};
  }
};

inline double dense_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dense_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = std::sqrt(dense_dot(a, a));
  const double nb = std::sqrt(dense_dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dense_dot(a, b) / (na * nb);
}

}  // namespace oracle

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "docmine/knn.hpp"
#include "support/oracles.hpp"

using namespace docmine;

namespace {

WeightedVector vec(std::vector<WeightedVector::Entry> e) { return WeightedVector(std::move(e)); }

WeightedVector from_dense(const std::vector<double>& d) {
  std::vector<WeightedVector::Entry> e;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] != 0.0) e.emplace_back(static_cast<TermIndex>(i), d[i]);
  }
  return vec(std::move(e));
}

}  // namespace

TEST_CASE("cosine: examples", "[knn]") {
  CHECK(std::abs(cosine(vec({{0, 1.0}}), vec({{0, 1.0}, {1, std::sqrt(3.0)}})) - 0.5) <= 1e-12);
  CHECK(cosine(vec({{0, 1.0}}), vec({{1, 1.0}})) == 0.0);
  CHECK(cosine(vec({}), vec({{1, 1.0}})) == 0.0);
  CHECK(std::abs(cosine(vec({{0, 0.6}, {2, 0.8}}), vec({{0, 0.6}, {2, 0.8}})) - 1.0) <= 1e-12);
}

TEST_CASE("cosine equals the dense reference on random vectors", "[knn][property]") {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(12), b(12);
    for (auto* v : {&a, &b}) {
      for (auto& x : *v) x = rng.coin(0.4) ? rng.unit() * 3.0 : 0.0;
    }
    const double c = cosine(from_dense(a), from_dense(b));
    CHECK(std::abs(c - std::clamp(oracle::dense_cosine(a, b), 0.0, 1.0)) <= 1e-12);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    CHECK(c == cosine(from_dense(b), from_dense(a)));
  }
}

TEST_CASE("nearest_neighbors: ordering and tie-break by doc id", "[knn]") {
  const auto store = make_store({30, 10, 20, 40},
                                {vec({{0, 1.0}}), vec({{0, 1.0}}), vec({{1, 1.0}}), vec({{0, 0.6}, {1, 0.8}})},
                                {true, false, true, false});
  const auto nn = nearest_neighbors(*store.data, vec({{0, 1.0}}), 3);
  REQUIRE(nn.size() == 3);
  CHECK(nn[0].doc_id == 10);
  CHECK(nn[1].doc_id == 30);
  CHECK(nn[2].doc_id == 40);
  CHECK(std::abs(nn[2].similarity - 0.6) <= 1e-12);

  CHECK(nearest_neighbors(*store.data, vec({{0, 1.0}}), 99).size() == 4);
}

TEST_CASE("knn_classify: examples", "[knn]") {
  // Two positives at cosine 1 and 0.6, three negatives at 0.5 each: 1.6 vs 1.5.
  const auto store = make_store({1, 2, 3, 4, 5},
                                {vec({{0, 1.0}}), vec({{0, 0.6}, {1, 0.8}}), vec({{0, 0.5}, {2, std::sqrt(0.75)}}),
                                 vec({{0, 0.5}, {3, std::sqrt(0.75)}}), vec({{0, 0.5}, {4, std::sqrt(0.75)}})},
                                {true, true, false, false, false});
  const auto d = knn_classify(store, vec({{0, 1.0}}), 5);
  CHECK(d.label);
  CHECK(std::abs(d.positive_votes - 1.6) <= 1e-12);
  CHECK(std::abs(d.negative_votes - 1.5) <= 1e-12);

  // k = 1 copies the nearest label.
  CHECK(knn_classify(store, vec({{3, 1.0}}), 1).label == false);
  CHECK(knn_classify(store, vec({{1, 1.0}}), 1).label == true);

  // No similar neighbour: zero votes on both sides, tie goes negative.
  const auto none = knn_classify(store, vec({{9, 1.0}}), 3);
  CHECK_FALSE(none.label);
  CHECK(none.positive_share() == 0.0);

  CHECK_THROWS_AS(knn_classify(VectorStore{}, vec({{0, 1.0}}), 3), DataError);
  CHECK_THROWS_AS(knn_classify(store, vec({{0, 1.0}}), 0), UsageError);
}

TEST_CASE("knn with k equal to the store size is a similarity-weighted majority", "[knn][property]") {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    std::vector<DocId> ids;
    std::vector<WeightedVector> vs;
    std::vector<bool> labels;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> d(6);
      for (auto& x : d) x = rng.coin(0.5) ? rng.unit() : 0.0;
      ids.push_back(static_cast<DocId>(i + 1));
      vs.push_back(from_dense(d).normalized());
      labels.push_back(rng.coin(0.5));
    }
    std::vector<double> qd(6);
    for (auto& x : qd) x = rng.unit();
    const auto q = from_dense(qd).normalized();
    const auto store = make_store(ids, vs, labels);
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) (labels[i] ? pos : neg) += cosine(q, vs[i]);
    const auto d = knn_classify(store, q, n);
    CHECK(std::abs(d.positive_votes - pos) <= 1e-9);
    CHECK(std::abs(d.negative_votes - neg) <= 1e-9);
    CHECK(d.label == (d.positive_votes > d.negative_votes));
  }
}

TEST_CASE("centroid classifier: examples", "[knn]") {
  // Positive members e0 and e1 average to (0.5, 0.5); normalized (1/sqrt2, 1/sqrt2).
  const auto store = make_store({1, 2, 3}, {vec({{0, 1.0}}), vec({{1, 1.0}}), vec({{2, 1.0}})}, {true, true, false});
  const auto m = centroid_train(store);
  CHECK(std::abs(m.centroid_pos.weight(0) - 1.0 / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(m.centroid_pos.weight(1) - 1.0 / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(m.centroid_neg.weight(2) - 1.0) <= 1e-12);

  CHECK(centroid_classify(m, vec({{0, 1.0}})));
  CHECK_FALSE(centroid_classify(m, vec({{2, 1.0}})));
  // Orthogonal to both: tie goes negative.
  CHECK_FALSE(centroid_classify(m, vec({{7, 1.0}})));

  const auto one_class = make_store({1}, {vec({{0, 1.0}})}, {true});
  CHECK_THROWS_AS(centroid_train(one_class), DataError);
}

TEST_CASE("centroids serialize bit-exactly", "[knn]") {
  const auto store = make_store({1, 2, 3}, {vec({{0, 0.3}, {4, 0.1}}), vec({{1, 1.0 / 3.0}}), vec({{2, 1.0}})},
                                {true, true, false});
  const auto m = centroid_train(store);
  const auto text = serialize_centroids(m);
  const auto back = deserialize_centroids(text);
  CHECK(back.centroid_pos == m.centroid_pos);
  CHECK(back.centroid_neg == m.centroid_neg);
  CHECK(serialize_centroids(back) == text);
  CHECK_THROWS_AS(deserialize_centroids("positive 0\n"), DataError);
  CHECK_THROWS_AS(parse_sparse("2 1:0.5"), DataError);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "docmine/bayes.hpp"
#include "support/oracles.hpp"

using namespace docmine;

namespace {

// Toy corpus vocabulary: bank=0 corn=1 grain=2 loan=3 rate=4 wheat=5.
std::vector<LabeledCounts> toy_corpus() {
  return {{{{5, 1}, {2, 1}}, true},
          {{{5, 1}, {1, 1}}, true},
          {{{0, 1}, {3, 1}}, false},
          {{{0, 1}, {4, 1}}, false}};
}

IndexedCounts dense_to_counts(const std::vector<unsigned>& d) {
  IndexedCounts c;
  for (std::size_t w = 0; w < d.size(); ++w) {
    if (d[w]) c.emplace_back(static_cast<TermIndex>(w), d[w]);
  }
  return c;
}

}  // namespace

TEST_CASE("train_nb: symmetric priors", "[bayes]") {
  const auto m = train_nb(toy_corpus(), 6, {EventModel::Multinomial, 1.0});
  CHECK(m.log_prior(true) == std::log(0.5));
  CHECK(m.log_prior(false) == std::log(0.5));
}

TEST_CASE("train_nb: Bernoulli smoothing", "[bayes]") {
  // Both positive docs contain w (index 0): (2 + 1) / (2 + 2).
  const std::vector<LabeledCounts> data = {{{{0, 1}}, true}, {{{0, 3}}, true}, {{{1, 1}}, false}};
  const auto m = train_nb(data, 2, {EventModel::Bernoulli, 1.0});
  CHECK(std::abs(std::exp(m.log_cond(true, 0)) - 0.75) < 1e-12);
  CHECK(std::abs(std::exp(m.log_cond(false, 0)) - 1.0 / 3.0) < 1e-12);
  for (TermIndex w = 0; w < 2; ++w) {
    for (bool c : {false, true}) {
      CHECK(std::abs(std::exp(m.log_cond(c, w)) + std::exp(m.log_cond_absent(c, w)) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("train_nb: multinomial smoothing", "[bayes]") {
  // Class tokens w:3, v:1 with vocab 2: (3 + 1) / (4 + 2).
  const std::vector<LabeledCounts> data = {{{{0, 3}, {1, 1}}, true}, {{{1, 2}}, false}};
  const auto m = train_nb(data, 2, {EventModel::Multinomial, 1.0});
  CHECK(std::abs(std::exp(m.log_cond(true, 0)) - 2.0 / 3.0) < 1e-12);
  double total = 0.0;
  for (TermIndex w = 0; w < 2; ++w) total += std::exp(m.log_cond(false, w));
  CHECK(std::abs(total - 1.0) <= 1e-6);
}

TEST_CASE("train_nb: degenerate training sets", "[bayes]") {
  const std::vector<LabeledCounts> only_pos = {{{{0, 1}}, true}};
  CHECK_THROWS_AS(train_nb(only_pos, 1, {}), DataError);
  CHECK_THROWS_AS(train_nb({}, 1, {}), DataError);
  CHECK_THROWS_AS(train_nb(toy_corpus(), 6, {EventModel::Bernoulli, 0.0}), UsageError);
}

TEST_CASE("posterior_nb: multinomial empty document returns the priors", "[bayes]") {
  std::vector<LabeledCounts> data = toy_corpus();
  data.push_back({{{0, 2}}, false});
  data.push_back({{{0, 2}}, false});
  const auto m = train_nb(data, 6, {EventModel::Multinomial, 1.0});
  const auto p = posterior_nb(m, {});
  CHECK(std::abs(p.positive - 2.0 / 6.0) < 1e-15);
  CHECK(std::abs(p.negative - 4.0 / 6.0) < 1e-15);
}

TEST_CASE("posterior_nb: mirror-symmetric corpus gives one half", "[bayes]") {
  // Swap terms 0 <-> 1 maps positives onto negatives; term 2 is shared.
  const std::vector<LabeledCounts> data = {
      {{{0, 2}, {2, 1}}, true}, {{{0, 1}}, true}, {{{1, 2}, {2, 1}}, false}, {{{1, 1}}, false}};
  for (auto model : {EventModel::Bernoulli, EventModel::Multinomial}) {
    const auto m = train_nb(data, 4, {model, 1.0});
    const auto p = posterior_nb(m, {{2, 1}, {3, 2}});
    CHECK(p.positive == 0.5);
    CHECK(p.negative == 0.5);
  }
}

TEST_CASE("posterior_nb: toy corpus matches hand computation", "[bayes]") {
  // Multinomial, alpha 1, |T| = 6. Positive tokens: wheat 2, grain 1, corn 1 (4).
  // Negative tokens: bank 2, loan 1, rate 1 (4).
  // "wheat bank loan": pos 0.5*(3/10)(1/10)(1/10) = 0.0015; neg 0.5*(1/10)(3/10)(2/10) = 0.003.
  const auto m = train_nb(toy_corpus(), 6, {EventModel::Multinomial, 1.0});
  const auto p = posterior_nb(m, {{0, 1}, {3, 1}, {5, 1}});
  CHECK(std::abs(p.positive - 1.0 / 3.0) <= 1e-9);
  CHECK(std::abs(p.negative - 2.0 / 3.0) <= 1e-9);

  // "wheat grain": pos 0.5*(3/10)(2/10) = 0.03; neg 0.5*(1/10)(1/10) = 0.005.
  const auto d = classify_nb(m, {{2, 1}, {5, 1}});
  CHECK(d.label);
  CHECK(std::abs(d.probability - 6.0 / 7.0) <= 1e-9);
}

TEST_CASE("classify_nb: argmax and tie-break", "[bayes]") {
  const std::vector<LabeledCounts> data = {{{{0, 1}}, true}, {{{1, 1}}, false}};
  const auto m = train_nb(data, 2, {EventModel::Multinomial, 1.0});
  const auto tie = classify_nb(m, {});
  CHECK_FALSE(tie.label);
  CHECK(tie.probability == 0.5);

  const auto strong = classify_nb(m, {{0, 5}});
  CHECK(strong.label);
  CHECK(strong.probability > 0.9);
}

TEST_CASE("posteriors: log space equals direct products on random small models", "[bayes][property]") {
  oracle::Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t vocab = 1 + rng.below(5);
    const bool bern = rng.coin(0.5);
    const double alpha = 0.25 + rng.unit() * 2.0;
    std::vector<std::vector<unsigned>> dense;
    std::vector<int> labels;
    std::vector<LabeledCounts> data;
    const auto n = 2 + rng.below(8);
    for (std::size_t d = 0; d < n; ++d) {
      std::vector<unsigned> doc(vocab);
      for (auto& x : doc) x = rng.coin(0.5) ? static_cast<unsigned>(rng.below(4)) : 0u;
      const int y = d < 2 ? static_cast<int>(d) : static_cast<int>(rng.below(2));
      dense.push_back(doc);
      labels.push_back(y);
      data.push_back({dense_to_counts(doc), y == 1});
    }
    const auto model = train_nb(data, vocab, {bern ? EventModel::Bernoulli : EventModel::Multinomial, alpha});
    const auto direct = oracle::DirectNb::fit(dense, labels, vocab, alpha, bern);
    for (int q = 0; q < 4; ++q) {
      std::vector<unsigned> query(vocab);
      for (auto& x : query) x = static_cast<unsigned>(rng.below(3));
      const auto p = posterior_nb(model, dense_to_counts(query));
      const auto [neg, pos] = direct.posterior(query);
      CHECK(std::abs(p.positive - pos) <= 1e-9);
      CHECK(std::abs(p.negative - neg) <= 1e-9);
      CHECK(std::abs(p.positive + p.negative - 1.0) <= 1e-9);
      CHECK(std::isfinite(p.positive));
    }
  }
}

TEST_CASE("duplicating training data leaves priors unchanged", "[bayes][property]") {
  auto data = toy_corpus();
  data.push_back({{{0, 1}}, false});
  const auto base = train_nb(data, 6, {EventModel::Multinomial, 1.0});
  const auto base_b = train_nb(data, 6, {EventModel::Bernoulli, 1.0});
  for (int k : {2, 3, 7}) {
    std::vector<LabeledCounts> dup;
    for (int r = 0; r < k; ++r) dup.insert(dup.end(), data.begin(), data.end());
    const auto m = train_nb(dup, 6, {EventModel::Multinomial, 1.0});
    const auto b = train_nb(dup, 6, {EventModel::Bernoulli, 1.0});
    CHECK(std::abs(m.log_prior(true) - base.log_prior(true)) <= 1e-15);
    CHECK(std::abs(b.log_prior(false) - base_b.log_prior(false)) <= 1e-15);
  }
  // Bernoulli conditionals approach the unsmoothed frequency as counts scale.
  std::vector<LabeledCounts> big;
  for (int r = 0; r < 10000; ++r) big.insert(big.end(), data.begin(), data.end());
  const auto b = train_nb(big, 6, {EventModel::Bernoulli, 1.0});
  CHECK(std::abs(std::exp(b.log_cond(true, 5)) - 1.0) < 1e-3);
  CHECK(std::abs(std::exp(b.log_cond(false, 0)) - 1.0) < 1e-3);
}

TEST_CASE("unused vocabulary term leaves multinomial decisions unchanged", "[bayes][property]") {
  const auto m6 = train_nb(toy_corpus(), 6, {EventModel::Multinomial, 1.0});
  const auto m7 = train_nb(toy_corpus(), 7, {EventModel::Multinomial, 1.0});
  const std::vector<IndexedCounts> queries = {{},
                                              {{5, 1}},
                                              {{0, 1}},
                                              {{0, 1}, {5, 1}},
                                              {{0, 1}, {3, 1}, {5, 1}},
                                              {{1, 2}, {4, 1}},
                                              {{2, 1}, {3, 3}}};
  for (const auto& q : queries) CHECK(classify_nb(m6, q).label == classify_nb(m7, q).label);
}

TEST_CASE("nb model serialization is bit-stable", "[bayes]") {
  for (auto em : {EventModel::Bernoulli, EventModel::Multinomial}) {
    const auto m = train_nb(toy_corpus(), 6, {em, 0.7});
    const auto text = m.serialize();
    const auto back = NbModel::deserialize(text);
    CHECK(back.serialize() == text);
    for (TermIndex w = 0; w < 6; ++w) CHECK(back.log_cond(true, w) == m.log_cond(true, w));
    const IndexedCounts q = {{0, 1}, {5, 2}};
    CHECK(back.posterior(q).positive == m.posterior(q).positive);
  }
  CHECK_THROWS_AS(NbModel::deserialize("event_model bernoulli\nalpha x\n"), DataError);
}

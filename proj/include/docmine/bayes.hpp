#pragma once

// Binary Naive Bayes with Bernoulli or multinomial event model.
// Class slot 0 is the negative class, slot 1 the positive class.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "docmine/error.hpp"
#include "docmine/text.hpp"

namespace docmine {

enum class EventModel : std::uint8_t { Bernoulli, Multinomial };

inline std::string_view to_string(EventModel m) {
  return m == EventModel::Bernoulli ? "bernoulli" : "multinomial";
}

inline EventModel parse_event_model(std::string_view s) {
  if (s == "bernoulli") return EventModel::Bernoulli;
  if (s == "multinomial") return EventModel::Multinomial;
  throw UsageError("unknown event model '" + std::string(s) + "' (supported: bernoulli, multinomial)");
}

struct NbConfig {
  EventModel event_model = EventModel::Bernoulli;
  double alpha = 1.0;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw UsageError("alpha must be > 0");
  }
  friend bool operator==(const NbConfig&, const NbConfig&) = default;
};

struct LabeledCounts {
  IndexedCounts counts;
  bool label = false;
};

struct Posterior {
  double negative = 0.0;
  double positive = 0.0;
};

struct NbDecision {
  bool label = false;
  double probability = 0.0;  // posterior of the chosen class
};

class NbModel {
 public:
  NbModel() = default;

  static NbModel train(const std::vector<LabeledCounts>& train, std::size_t vocab_size, const NbConfig& config) {
    config.validate();
    if (train.empty()) throw DataError("degenerate training set: no documents");
    std::array<double, 2> docs{0.0, 0.0};
    for (const auto& d : train) docs[d.label ? 1 : 0] += 1.0;
    if (docs[0] == 0.0 || docs[1] == 0.0) {
      throw DataError("degenerate training set: a class has zero documents");
    }

    NbModel m;
    m.config_ = config;
    m.vocab_size_ = vocab_size;
    const double n = docs[0] + docs[1];
    for (int c = 0; c < 2; ++c) {
      m.log_prior_[c] = std::log(docs[c] / n);
      m.log_cond_[c].assign(vocab_size, 0.0);
    }

    std::array<std::vector<double>, 2> tally{std::vector<double>(vocab_size, 0.0),
                                             std::vector<double>(vocab_size, 0.0)};
    std::array<double, 2> tokens{0.0, 0.0};
    for (const auto& d : train) {
      const int c = d.label ? 1 : 0;
      for (const auto& [idx, count] : d.counts) {
        if (idx >= vocab_size) throw UsageError("term index out of vocabulary range");
        if (config.event_model == EventModel::Bernoulli) {
          tally[c][idx] += 1.0;
        } else {
          tally[c][idx] += count;
          tokens[c] += count;
        }
      }
    }

    const double a = config.alpha;
    for (int c = 0; c < 2; ++c) {
      if (config.event_model == EventModel::Bernoulli) {
        m.log_cond_absent_[c].assign(vocab_size, 0.0);
        m.sum_absent_[c] = 0.0;
        for (std::size_t w = 0; w < vocab_size; ++w) {
          const double p = (tally[c][w] + a) / (docs[c] + 2.0 * a);
          m.log_cond_[c][w] = std::log(p);
          m.log_cond_absent_[c][w] = std::log1p(-p);
          m.sum_absent_[c] += m.log_cond_absent_[c][w];
        }
      } else {
        const double denom = tokens[c] + a * static_cast<double>(vocab_size);
        for (std::size_t w = 0; w < vocab_size; ++w) {
          m.log_cond_[c][w] = std::log((tally[c][w] + a) / denom);
        }
      }
    }
    return m;
  }

  // Unnormalized log P(c) + log P(d|c) for both classes.
  std::array<double, 2> log_scores(const IndexedCounts& doc) const {
    std::array<double, 2> s{log_prior_[0], log_prior_[1]};
    for (int c = 0; c < 2; ++c) {
      if (config_.event_model == EventModel::Bernoulli) {
        s[c] += sum_absent_[c];
        for (const auto& [idx, count] : doc) {
          if (idx >= vocab_size_) continue;
          s[c] += log_cond_[c][idx] - log_cond_absent_[c][idx];
        }
      } else {
        for (const auto& [idx, count] : doc) {
          if (idx >= vocab_size_) continue;
          s[c] += count * log_cond_[c][idx];
        }
      }
    }
    return s;
  }

  Posterior posterior(const IndexedCounts& doc) const {
    const auto s = log_scores(doc);
    const double top = std::max(s[0], s[1]);
    const double e0 = std::exp(s[0] - top);
    const double e1 = std::exp(s[1] - top);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
  }

  NbDecision classify(const IndexedCounts& doc) const {
    const auto s = log_scores(doc);
    const auto p = posterior(doc);
    if (s[1] > s[0]) return {true, p.positive};
    return {false, p.negative};
  }

  const NbConfig& config() const { return config_; }
  std::size_t vocab_size() const { return vocab_size_; }
  double log_prior(bool positive) const { return log_prior_[positive ? 1 : 0]; }
  double log_cond(bool positive, TermIndex w) const { return log_cond_[positive ? 1 : 0].at(w); }
  double log_cond_absent(bool positive, TermIndex w) const {
    if (config_.event_model != EventModel::Bernoulli) throw UsageError("absence factors exist only for the Bernoulli model");
    return log_cond_absent_[positive ? 1 : 0].at(w);
  }

  // Text form: header, prior line, then one line per term with the
  // per-class log conditionals (and absence logs for Bernoulli).
  std::string serialize() const {
    std::ostringstream out;
    out << "event_model " << to_string(config_.event_model) << '\n';
    out << "alpha " << fmt17(config_.alpha) << '\n';
    out << "vocab_size " << vocab_size_ << '\n';
    out << "log_prior " << fmt17(log_prior_[0]) << ' ' << fmt17(log_prior_[1]) << '\n';
    for (std::size_t w = 0; w < vocab_size_; ++w) {
      out << w << ' ' << fmt17(log_cond_[0][w]) << ' ' << fmt17(log_cond_[1][w]);
      if (config_.event_model == EventModel::Bernoulli) {
        out << ' ' << fmt17(log_cond_absent_[0][w]) << ' ' << fmt17(log_cond_absent_[1][w]);
      }
      out << '\n';
    }
    return out.str();
  }

  static NbModel deserialize(std::string_view text) {
    std::istringstream in{std::string(text)};
    NbModel m;
    std::string key, model_name, alpha_s, p0, p1;
    if (!(in >> key >> model_name) || key != "event_model") throw DataError("nb model: missing event_model");
    m.config_.event_model = parse_event_model(model_name);
    if (!(in >> key >> alpha_s) || key != "alpha") throw DataError("nb model: missing alpha");
    m.config_.alpha = parse_double(alpha_s);
    if (!(in >> key >> m.vocab_size_) || key != "vocab_size") throw DataError("nb model: missing vocab_size");
    if (!(in >> key >> p0 >> p1) || key != "log_prior") throw DataError("nb model: missing log_prior");
    m.log_prior_ = {parse_double(p0), parse_double(p1)};
    const bool bern = m.config_.event_model == EventModel::Bernoulli;
    for (int c = 0; c < 2; ++c) {
      m.log_cond_[c].assign(m.vocab_size_, 0.0);
      if (bern) m.log_cond_absent_[c].assign(m.vocab_size_, 0.0);
    }
    for (std::size_t w = 0; w < m.vocab_size_; ++w) {
      std::size_t idx = 0;
      std::string a, b, c, d;
      if (!(in >> idx >> a >> b) || idx != w) throw DataError("nb model: bad term line " + std::to_string(w));
      m.log_cond_[0][w] = parse_double(a);
      m.log_cond_[1][w] = parse_double(b);
      if (bern) {
        if (!(in >> c >> d)) throw DataError("nb model: bad absence factors at " + std::to_string(w));
        m.log_cond_absent_[0][w] = parse_double(c);
        m.log_cond_absent_[1][w] = parse_double(d);
      }
    }
    if (bern) {
      for (int c = 0; c < 2; ++c) {
        m.sum_absent_[c] = 0.0;
        for (double v : m.log_cond_absent_[c]) m.sum_absent_[c] += v;
      }
    }
    return m;
  }

  static std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  static double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw DataError("invalid number '" + s + "'");
    return v;
  }

 private:
  NbConfig config_;
  std::size_t vocab_size_ = 0;
  std::array<double, 2> log_prior_{0.0, 0.0};
  std::array<std::vector<double>, 2> log_cond_;
  std::array<std::vector<double>, 2> log_cond_absent_;
  std::array<double, 2> sum_absent_{0.0, 0.0};
};

inline NbModel train_nb(const std::vector<LabeledCounts>& train, std::size_t vocab_size, const NbConfig& config) {
  return NbModel::train(train, vocab_size, config);
}

inline Posterior posterior_nb(const NbModel& model, const IndexedCounts& doc) { return model.posterior(doc); }

inline NbDecision classify_nb(const NbModel& model, const IndexedCounts& doc) { return model.classify(doc); }

}  // namespace docmine

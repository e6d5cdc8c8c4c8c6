#pragma once

// Porter (1980) suffix-stripping stemmer, original rule set.
// Input is expected lowercase ASCII.

#include <string>
#include <string_view>

namespace docmine {

namespace porter_detail {

class Word {
 public:
  explicit Word(std::string s) : w_(std::move(s)) {}

  const std::string& str() const { return w_; }
  std::string take() { return std::move(w_); }

  bool ends(std::string_view suffix) const {
    return w_.size() >= suffix.size() &&
           std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
  }

  // Measure of the first `len` characters: number of VC sequences.
  int measure(std::size_t len) const {
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < len; ++i) {
      const bool v = !consonant(i);
      if (!v && prev_vowel) ++m;
      prev_vowel = v;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
  }

  // *o: stem of length `len` ends consonant-vowel-consonant, last not w/x/y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 3) || consonant(len - 2) || !consonant(len - 1)) return false;
    const char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  void replace_tail(std::size_t suffix_len, std::string_view with) {
    w_.resize(w_.size() - suffix_len);
    w_ += with;
  }

  std::size_t size() const { return w_.size(); }
  char back() const { return w_.back(); }

 private:
  bool consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 || !consonant(i - 1);
      default:
        return true;
    }
  }

  std::string w_;
};

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// First rule whose suffix matches decides; if its measure condition
// fails the word is left alone.
template <std::size_t N>
void apply_rules(Word& w, const Rule (&rules)[N], int min_measure_exclusive) {
  for (const auto& r : rules) {
    if (w.ends(r.suffix)) {
      const auto stem_len = w.size() - r.suffix.size();
      if (w.measure(stem_len) > min_measure_exclusive) w.replace_tail(r.suffix.size(), r.replacement);
      return;
    }
  }
}

inline void step1a(Word& w) {
  if (w.ends("sses")) w.replace_tail(4, "ss");
  else if (w.ends("ies")) w.replace_tail(3, "i");
  else if (w.ends("ss")) return;
  else if (w.ends("s")) w.replace_tail(1, "");
}

inline void step1b(Word& w) {
  if (w.ends("eed")) {
    if (w.measure(w.size() - 3) > 0) w.replace_tail(3, "ee");
    return;
  }
  std::size_t cut = 0;
  if (w.ends("ed") && w.has_vowel(w.size() - 2)) cut = 2;
  else if (w.ends("ing") && w.has_vowel(w.size() - 3)) cut = 3;
  if (cut == 0) return;
  w.replace_tail(cut, "");

  if (w.ends("at")) { w.replace_tail(2, "ate"); return; }
  if (w.ends("bl")) { w.replace_tail(2, "ble"); return; }
  if (w.ends("iz")) { w.replace_tail(2, "ize"); return; }
  if (w.double_consonant(w.size())) {
    const char c = w.back();
    if (c != 'l' && c != 's' && c != 'z') w.replace_tail(1, "");
    return;
  }
  if (w.measure(w.size()) == 1 && w.cvc(w.size())) w.replace_tail(0, "e");
}

inline void step1c(Word& w) {
  if (w.ends("y") && w.has_vowel(w.size() - 1)) w.replace_tail(1, "i");
}

inline void step2(Word& w) {
  static constexpr Rule rules[] = {
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
  };
  apply_rules(w, rules, 0);
}

inline void step3(Word& w) {
  static constexpr Rule rules[] = {
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""},
  };
  apply_rules(w, rules, 0);
}

inline void step4(Word& w) {
  static constexpr std::string_view suffixes[] = {
      "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
      "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
  };
  for (auto s : suffixes) {
    if (!w.ends(s)) continue;
    const auto stem_len = w.size() - s.size();
    bool ok = w.measure(stem_len) > 1;
    if (ok && s == "ion") {
      const char c = stem_len > 0 ? w.str()[stem_len - 1] : '\0';
      ok = c == 's' || c == 't';
    }
    if (ok) w.replace_tail(s.size(), "");
    return;
  }
}

inline void step5(Word& w) {
  if (w.ends("e")) {
    const auto len = w.size() - 1;
    const int m = w.measure(len);
    if (m > 1 || (m == 1 && !w.cvc(len))) w.replace_tail(1, "");
  }
  if (w.ends("ll") && w.measure(w.size() - 1) > 1) w.replace_tail(1, "");
}

}  // namespace porter_detail

inline std::string porter_stem(std::string word) {
  if (word.empty()) return word;
  porter_detail::Word w(std::move(word));
  porter_detail::step1a(w);
  porter_detail::step1b(w);
  porter_detail::step1c(w);
  porter_detail::step2(w);
  porter_detail::step3(w);
  porter_detail::step4(w);
  porter_detail::step5(w);
  return w.take();
}

}  // namespace docmine

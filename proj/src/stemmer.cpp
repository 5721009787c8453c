#include "supmmd/stemmer.hpp"

#include <functional>
#include <unordered_map>
#include <vector>

namespace supmmd {
namespace {

bool is_vowel_letter(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool is_consonant(const std::string& w, std::size_t i) {
    char c = w[i];
    if (is_vowel_letter(c)) return false;
    if (c == 'y') return i == 0 ? true : !is_consonant(w, i - 1);
    return true;
}

// m = number of vowel-consonant transitions in the c/v profile
int measure(const std::string& stem) {
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < stem.size(); ++i) {
        bool cons = is_consonant(stem, i);
        if (prev_vowel && cons) ++m;
        prev_vowel = !cons;
    }
    return m;
}

bool has_positive_measure(const std::string& stem) { return measure(stem) > 0; }

bool contains_vowel(const std::string& stem) {
    for (std::size_t i = 0; i < stem.size(); ++i)
        if (!is_consonant(stem, i)) return true;
    return false;
}

bool ends_double_consonant(const std::string& w) {
    auto n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

bool ends_cvc(const std::string& w) {
    auto n = w.size();
    if (n >= 3 && is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1)) {
        char last = w[n - 1];
        return last != 'w' && last != 'x' && last != 'y';
    }
    // two-letter vowel-consonant words ("at", "ar") count as cvc
    return n == 2 && !is_consonant(w, 0) && is_consonant(w, 1);
}

bool ends_with(const std::string& w, const std::string& suffix) {
    return w.size() >= suffix.size() && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string drop(const std::string& w, std::size_t n) { return w.substr(0, w.size() - n); }

struct Rule {
    const char* suffix;
    const char* replacement;
    std::function<bool(const std::string&)> condition;  // on the stem; null = unconditional
};

// First matching suffix decides: apply if the condition passes, otherwise stop.
std::string apply_rules(const std::string& w, const std::vector<Rule>& rules) {
    for (const auto& rule : rules) {
        if (!ends_with(w, rule.suffix)) continue;
        std::string stem = drop(w, std::string(rule.suffix).size());
        if (!rule.condition || rule.condition(stem)) return stem + rule.replacement;
        return w;
    }
    return w;
}

std::string step1a(const std::string& w) {
    if (ends_with(w, "ies") && w.size() == 4) return drop(w, 3) + "ie";
    return apply_rules(w, {
                              {"sses", "ss", nullptr},
                              {"ies", "i", nullptr},
                              {"ss", "ss", nullptr},
                              {"s", "", nullptr},
                          });
}

std::string step1b(const std::string& w) {
    if (ends_with(w, "ied")) return w.size() == 4 ? drop(w, 3) + "ie" : drop(w, 3) + "i";
    if (ends_with(w, "eed")) {
        std::string stem = drop(w, 3);
        return measure(stem) > 0 ? stem + "ee" : w;
    }
    std::string stem;
    if (ends_with(w, "ed") && contains_vowel(drop(w, 2)))
        stem = drop(w, 2);
    else if (ends_with(w, "ing") && contains_vowel(drop(w, 3)))
        stem = drop(w, 3);
    else
        return w;

    if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
    if (ends_double_consonant(stem)) {
        char last = stem.back();
        if (last != 'l' && last != 's' && last != 'z') return drop(stem, 1);
        return stem;
    }
    if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
    return stem;
}

std::string step1c(const std::string& w) {
    // y -> i only after a consonant that is not the whole stem
    if (!ends_with(w, "y")) return w;
    std::string stem = drop(w, 1);
    if (stem.size() > 1 && is_consonant(stem, stem.size() - 1)) return stem + "i";
    return w;
}

std::string step2(const std::string& w) {
    if (ends_with(w, "alli") && has_positive_measure(drop(w, 4))) return step2(drop(w, 4) + "al");
    const std::string logi_stem = w.size() >= 3 ? drop(w, 3) : std::string();
    return apply_rules(w, {
                              {"ational", "ate", has_positive_measure},
                              {"tional", "tion", has_positive_measure},
                              {"enci", "ence", has_positive_measure},
                              {"anci", "ance", has_positive_measure},
                              {"izer", "ize", has_positive_measure},
                              {"bli", "ble", has_positive_measure},
                              {"alli", "al", has_positive_measure},
                              {"entli", "ent", has_positive_measure},
                              {"eli", "e", has_positive_measure},
                              {"ousli", "ous", has_positive_measure},
                              {"ization", "ize", has_positive_measure},
                              {"ation", "ate", has_positive_measure},
                              {"ator", "ate", has_positive_measure},
                              {"alism", "al", has_positive_measure},
                              {"iveness", "ive", has_positive_measure},
                              {"fulness", "ful", has_positive_measure},
                              {"ousness", "ous", has_positive_measure},
                              {"aliti", "al", has_positive_measure},
                              {"iviti", "ive", has_positive_measure},
                              {"biliti", "ble", has_positive_measure},
                              {"fulli", "ful", has_positive_measure},
                              // the l of -logi stays with the stem so "geologi" works like "archaeologi"
                              {"logi", "log",
                               [&](const std::string&) { return has_positive_measure(logi_stem); }},
                          });
}

std::string step3(const std::string& w) {
    return apply_rules(w, {
                              {"icate", "ic", has_positive_measure},
                              {"ative", "", has_positive_measure},
                              {"alize", "al", has_positive_measure},
                              {"iciti", "ic", has_positive_measure},
                              {"ical", "ic", has_positive_measure},
                              {"ful", "", has_positive_measure},
                              {"ness", "", has_positive_measure},
                          });
}

std::string step4(const std::string& w) {
    auto gt1 = [](const std::string& s) { return measure(s) > 1; };
    return apply_rules(w, {
                              {"al", "", gt1},
                              {"ance", "", gt1},
                              {"ence", "", gt1},
                              {"er", "", gt1},
                              {"ic", "", gt1},
                              {"able", "", gt1},
                              {"ible", "", gt1},
                              {"ant", "", gt1},
                              {"ement", "", gt1},
                              {"ment", "", gt1},
                              {"ent", "", gt1},
                              {"ion", "",
                               [&](const std::string& s) {
                                   return measure(s) > 1 && !s.empty() && (s.back() == 's' || s.back() == 't');
                               }},
                              {"ou", "", gt1},
                              {"ism", "", gt1},
                              {"ate", "", gt1},
                              {"iti", "", gt1},
                              {"ous", "", gt1},
                              {"ive", "", gt1},
                              {"ize", "", gt1},
                          });
}

std::string step5a(const std::string& w) {
    if (!ends_with(w, "e")) return w;
    std::string stem = drop(w, 1);
    int m = measure(stem);
    if (m > 1) return stem;
    if (m == 1 && !ends_cvc(stem)) return stem;
    return w;
}

std::string step5b(const std::string& w) {
    if (ends_with(w, "ll") && measure(drop(w, 1)) > 1) return drop(w, 1);
    return w;
}

const std::unordered_map<std::string, std::string>& irregular_pool() {
    static const std::unordered_map<std::string, std::string> pool = {
        {"sky", "sky"},         {"skies", "sky"},     {"dying", "die"},
        {"lying", "lie"},       {"tying", "tie"},     {"news", "news"},
        {"innings", "inning"},  {"inning", "inning"}, {"outings", "outing"},
        {"outing", "outing"},   {"cannings", "canning"}, {"canning", "canning"},
        {"howe", "howe"},       {"proceed", "proceed"},  {"exceed", "exceed"},
        {"succeed", "succeed"},
    };
    return pool;
}

}  // namespace

std::string porter_stem(const std::string& word) {
    auto it = irregular_pool().find(word);
    if (it != irregular_pool().end()) return it->second;
    if (word.size() <= 2) return word;
    std::string w = step1a(word);
    w = step1b(w);
    w = step1c(w);
    w = step2(w);
    w = step3(w);
    w = step4(w);
    w = step5a(w);
    w = step5b(w);
    return w;
}

}  // namespace supmmd

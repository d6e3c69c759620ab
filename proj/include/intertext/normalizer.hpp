#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace intertext {

// Spelling rewrite rule. Bidirectional rules also generate candidates
// with pattern and replacement swapped.
struct RewriteRule {
    std::string pattern;
    std::string replacement;
    enum class Anchor { Anywhere, WordEnd };
    Anchor anchor = Anchor::Anywhere;
    bool bidirectional = false;
    int rule_id = 0;
};

struct NormalizedDocument {
    std::string doc_id;
    std::vector<std::string> tokens;
};

class Lexicon {
public:
    std::unordered_set<std::string> valid_forms;
    std::unordered_map<std::string, std::string> lemma_map;
    std::unordered_map<std::string, std::vector<std::string>> contraction_map;

    bool valid(const std::string& w) const { return valid_forms.count(w) != 0; }

    const std::string& lemma(const std::string& w) const {
        auto it = lemma_map.find(w);
        return it == lemma_map.end() ? w : it->second;
    }

    // One valid form per line; blank lines and #-comments ignored.
    void load_wordlist(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open wordlist: " + path);
        std::string line;
        while (std::getline(in, line)) {
            strip(line);
            if (line.empty() || line[0] == '#') continue;
            valid_forms.insert(line);
        }
    }

    // Tab-separated "form<TAB>lemma".
    void load_lemmas(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open lemma table: " + path);
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            strip(line);
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw std::runtime_error("malformed lemma line " + std::to_string(lineno) +
                                         " in " + path);
            lemma_map.emplace(line.substr(0, tab), line.substr(tab + 1));
        }
    }

    // "surface<TAB>expansion words" (expansion space-separated).
    void load_contractions(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open contraction table: " + path);
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            strip(line);
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw std::runtime_error("malformed contraction line " + std::to_string(lineno) +
                                         " in " + path);
            std::vector<std::string> words;
            std::istringstream ws(line.substr(tab + 1));
            std::string w;
            while (ws >> w) words.push_back(w);
            if (words.empty())
                throw std::runtime_error("empty contraction expansion at line " +
                                         std::to_string(lineno) + " in " + path);
            contraction_map.emplace(line.substr(0, tab), std::move(words));
        }
    }

private:
    static void strip(std::string& s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
    }
};

// The early-modern rules (ids 1-19) followed by the Americanism rules
// (ids 101-107). Listing order is the tie-break order for candidate
// generation, so the vector order matters.
inline std::vector<RewriteRule> default_rules() {
    using A = RewriteRule::Anchor;
    std::vector<RewriteRule> r;
    auto add = [&](std::string pat, std::string rep, A anchor, bool bidi, int id) {
        r.push_back({std::move(pat), std::move(rep), anchor, bidi, id});
    };
    // Ids 1 and 2 are unconditional character rules, applied before the
    // candidate search; they are kept in the list so a loaded rules file
    // round-trips, but the modernizer skips them during search.
    add("\xC5\xBF", "s", A::Anywhere, false, 1);   // long s
    add("\xC3\xA6", "ae", A::Anywhere, false, 2);  // ae ligature
    add("\xC5\x93", "oe", A::Anywhere, false, 2);  // oe ligature
    add("u", "v", A::Anywhere, true, 3);
    add("i", "j", A::Anywhere, true, 4);
    add("y", "i", A::Anywhere, true, 5);
    add("vv", "w", A::Anywhere, false, 6);
    add("ck", "c", A::Anywhere, false, 7);
    add("ck", "k", A::Anywhere, false, 7);
    add("ph", "f", A::Anywhere, false, 8);
    add("t", "ed", A::WordEnd, false, 9);
    add("'d", "ed", A::WordEnd, false, 10);
    add("d", "ed", A::WordEnd, false, 10);
    add("e", "", A::WordEnd, false, 11);
    add("es", "s", A::WordEnd, false, 12);
    add("ie", "y", A::WordEnd, false, 13);
    add("ee", "ea", A::Anywhere, false, 14);
    add("ement", "ment", A::WordEnd, false, 15);
    add("ence", "ance", A::WordEnd, false, 16);
    add("ll", "l", A::Anywhere, false, 17);
    add("ae", "e", A::Anywhere, false, 18);
    add("oe", "e", A::Anywhere, false, 19);
    // Americanisms.
    add("or", "our", A::WordEnd, false, 101);
    add("re", "er", A::WordEnd, false, 102);
    add("se", "ce", A::WordEnd, false, 103);
    add("yze", "yse", A::WordEnd, false, 104);
    add("yzes", "yses", A::WordEnd, false, 104);
    add("yzed", "ysed", A::WordEnd, false, 104);
    add("yzing", "ysing", A::WordEnd, false, 104);
    add("led", "lled", A::WordEnd, false, 105);
    add("ling", "lling", A::WordEnd, false, 105);
    add("ler", "ller", A::WordEnd, false, 105);
    add("lor", "llor", A::WordEnd, false, 105);
    add("e", "ae", A::Anywhere, false, 106);
    add("e", "oe", A::Anywhere, false, 106);
    add("og", "ogue", A::WordEnd, false, 107);
    return r;
}

// Rules file: "id<TAB>anchor<TAB>pattern<TAB>replacement<TAB>bidi",
// anchor in {anywhere, wordend}, bidi 0/1, replacement may be empty.
inline std::vector<RewriteRule> load_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rules file: " + path);
    std::vector<RewriteRule> rules;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (f.size() != 5)
            throw std::runtime_error("malformed rule at line " + std::to_string(lineno) +
                                     " in " + path);
        RewriteRule r;
        r.rule_id = std::stoi(f[0]);
        if (f[1] == "anywhere") r.anchor = RewriteRule::Anchor::Anywhere;
        else if (f[1] == "wordend") r.anchor = RewriteRule::Anchor::WordEnd;
        else throw std::runtime_error("unknown anchor at line " + std::to_string(lineno));
        r.pattern = f[2];
        r.replacement = f[3];
        r.bidirectional = f[4] == "1";
        if (r.pattern.empty())
            throw std::runtime_error("empty pattern at line " + std::to_string(lineno));
        rules.push_back(std::move(r));
    }
    return rules;
}

namespace detail {

inline size_t utf8_len(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;  // invalid byte, treat as one unit
}

inline uint32_t utf8_decode(std::string_view s, size_t i, size_t len) {
    unsigned char c0 = static_cast<unsigned char>(s[i]);
    if (len == 1) return c0;
    uint32_t cp = c0 & (0x7F >> len);
    for (size_t k = 1; k < len && i + k < s.size(); ++k)
        cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    return cp;
}

inline void utf8_append(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline uint32_t fold_case(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    // Latin-1 uppercase block, multiplication sign excluded.
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp == 0x0152) return 0x0153;  // OE ligature
    if (cp == 0x1E9E) return 0xDF;
    return cp;
}

inline bool is_ascii_letter(uint32_t cp) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

// Non-ASCII codepoints count as letters unless they are common
// punctuation or whitespace; unknown scripts pass through.
inline bool is_word_cp(uint32_t cp) {
    if (cp < 0x80) return is_ascii_letter(cp) || cp == '\'';
    switch (cp) {
        case 0xA0: case 0xAB: case 0xBB: case 0x2013: case 0x2014:
        case 0x2018: case 0x201C: case 0x201D: case 0x2026:
            return false;
        default:
            return true;
    }
}

}  // namespace detail

// Maximal runs of letters/apostrophes, case-folded. Digits and
// punctuation separate tokens; the right single quote U+2019 is treated
// as an apostrophe.
inline std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> tokens;
    std::string cur;
    size_t i = 0;
    while (i < raw.size()) {
        size_t len = detail::utf8_len(static_cast<unsigned char>(raw[i]));
        if (i + len > raw.size()) len = 1;
        uint32_t cp = detail::utf8_decode(raw, i, len);
        if (cp == 0x2019) cp = '\'';
        if (detail::is_word_cp(cp)) {
            detail::utf8_append(cur, detail::fold_case(cp));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
        i += len;
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

inline std::vector<std::string> expand_contractions(const std::string& token,
                                                    const Lexicon& lex) {
    auto it = lex.contraction_map.find(token);
    if (it != lex.contraction_map.end()) return it->second;
    return {token};
}

namespace detail {

// Unconditional character rules: long s, ae/oe ligatures.
inline std::string apply_char_rules(std::string_view w) {
    std::string out;
    out.reserve(w.size());
    size_t i = 0;
    while (i < w.size()) {
        size_t len = utf8_len(static_cast<unsigned char>(w[i]));
        if (i + len > w.size()) len = 1;
        uint32_t cp = utf8_decode(w, i, len);
        if (cp == 0x017F) out.push_back('s');
        else if (cp == 0xE6) out += "ae";
        else if (cp == 0x153) out += "oe";
        else out.append(w.substr(i, len));
        i += len;
    }
    return out;
}

inline bool match_at(const std::string& w, const std::string& pat, size_t pos,
                     RewriteRule::Anchor anchor) {
    if (pos + pat.size() > w.size()) return false;
    if (anchor == RewriteRule::Anchor::WordEnd && pos + pat.size() != w.size()) return false;
    return w.compare(pos, pat.size(), pat) == 0;
}

}  // namespace detail

// Candidate-generating modernizer: breadth-first over single rule
// applications, at most two deep, first lexicon-validated candidate
// wins. Ties break by rule listing order, then leftmost position.
inline std::string modernize(const std::string& word, const std::vector<RewriteRule>& rules,
                             const Lexicon& lex) {
    const std::string base = detail::apply_char_rules(word);
    if (lex.valid(base)) return base;

    std::unordered_set<std::string> seen{base};
    std::vector<std::string> frontier{base};
    for (int depth = 0; depth < 2; ++depth) {
        std::vector<std::string> next;
        for (const auto& w : frontier) {
            for (const auto& rule : rules) {
                if (rule.rule_id <= 2) continue;  // already applied unconditionally
                for (int dir = 0; dir < (rule.bidirectional ? 2 : 1); ++dir) {
                    const std::string& pat = dir == 0 ? rule.pattern : rule.replacement;
                    const std::string& rep = dir == 0 ? rule.replacement : rule.pattern;
                    if (pat.empty()) continue;
                    for (size_t pos = 0; pos + pat.size() <= w.size(); ++pos) {
                        if (!detail::match_at(w, pat, pos, rule.anchor)) continue;
                        std::string cand = w.substr(0, pos) + rep + w.substr(pos + pat.size());
                        if (cand.empty() || !seen.insert(cand).second) continue;
                        if (lex.valid(cand)) return cand;
                        next.push_back(std::move(cand));
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    return base;
}

inline std::string lemmatize(const std::string& word, const Lexicon& lex) {
    return lex.lemma(word);
}

struct NormalizerOptions {
    bool expand_contractions = true;
};

inline NormalizedDocument normalize_document(std::string_view raw_text,
                                             const std::vector<RewriteRule>& rules,
                                             const Lexicon& lex,
                                             const NormalizerOptions& opts = {},
                                             std::string doc_id = {}) {
    NormalizedDocument doc;
    doc.doc_id = std::move(doc_id);
    for (auto& tok : tokenize(raw_text)) {
        std::vector<std::string> expanded =
            opts.expand_contractions ? expand_contractions(tok, lex)
                                     : std::vector<std::string>{tok};
        for (auto& w : expanded)
            doc.tokens.push_back(lemmatize(modernize(w, rules, lex), lex));
    }
    return doc;
}

}  // namespace intertext

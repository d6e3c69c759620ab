#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "intertext/normalizer.hpp"
#include "test_util.hpp"

using namespace intertext;

namespace {

Lexicon make_lexicon(std::initializer_list<std::string> valid) {
    Lexicon lex;
    for (const auto& w : valid) lex.valid_forms.insert(w);
    return lex;
}

Lexicon shipped_lexicon() {
    Lexicon lex;
    lex.load_wordlist(testutil::data_path("wordlist.txt"));
    lex.load_lemmas(testutil::data_path("lemmas.tsv"));
    lex.load_contractions(testutil::data_path("contractions.tsv"));
    return lex;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace

TEST_CASE("tokenize strips punctuation and folds case") {
    CHECK(tokenize("Gather ye rosebuds, while ye may.") ==
          std::vector<std::string>{"gather", "ye", "rosebuds", "while", "ye", "may"});
}

TEST_CASE("tokenize on empty input") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("  \t\n 42 ...").empty());
}

TEST_CASE("tokenize keeps apostrophes") {
    CHECK(tokenize("vertue's crown'd") == std::vector<std::string>{"vertue's", "crown'd"});
    // Right single quote folds to the ASCII apostrophe.
    CHECK(tokenize("crown\xE2\x80\x99") == std::vector<std::string>{"crown'"});
}

TEST_CASE("tokenize preserves long s and folds Latin-1 uppercase") {
    CHECK(tokenize("Ro\xC5\xBF" "ebuds") == std::vector<std::string>{"ro\xC5\xBF" "ebuds"});
    CHECK(tokenize("Se\xC3\xB1or CAF\xC3\x89") ==
          std::vector<std::string>{"se\xC3\xB1or", "caf\xC3\xA9"});
}

TEST_CASE("expand_contractions") {
    auto lex = shipped_lexicon();
    CHECK(expand_contractions("'tis", lex) == std::vector<std::string>{"it", "is"});
    CHECK(expand_contractions("let's", lex) == std::vector<std::string>{"let", "us"});
    CHECK(expand_contractions("rosebuds", lex) == std::vector<std::string>{"rosebuds"});
}

TEST_CASE("lemmatize") {
    auto lex = shipped_lexicon();
    CHECK(lemmatize("rosebuds", lex) == "rosebud");
    CHECK(lemmatize("is", lex) == "be");
    CHECK(lemmatize("rose", lex) == "rose");
}

// One isolated check per spelling rule, with a purpose-built lexicon
// containing only the expected target.
TEST_CASE("early modern rules 1-19 in isolation") {
    auto rules = default_rules();
    auto check = [&](const std::string& in, const std::string& out) {
        auto lex = make_lexicon({out});
        CHECK(modernize(in, rules, lex) == out);
    };
    check("\xC5\xBF" "o", "so");                     // 1: long s
    check("\xC3\xA6" "on", "aeon");                  // 2: ae ligature
    check("\xC5\x93" "uvre", "oeuvre");              // 2: oe ligature
    check("vpon", "upon");                           // 3: u <-> v
    check("haue", "have");                           // 3 reverse
    check("iust", "just");                           // 4: i <-> j
    check("ioy", "joy");                             // 4
    check("tyme", "time");                           // 5: y <-> i
    check("cristal", "crystal");                     // 5 reverse
    check("vvay", "way");                            // 6: vv -> w
    check("musick", "music");                        // 7: ck -> c
    check("cloack", "cloak");                        // 7: ck -> k
    check("prophane", "profane");                    // 8: ph -> f
    check("lookt", "looked");                        // 9: t$ -> ed
    check("crown'd", "crowned");                     // 10: 'd$ -> ed
    check("vanquishd", "vanquished");                // 10: d$ -> ed
    check("soule", "soul");                          // 11: e$ removed
    check("goodes", "goods");                        // 12: es$ -> s
    check("studie", "study");                        // 13: ie$ -> y
    check("dreem", "dream");                         // 14: ee -> ea
    check("punishement", "punishment");              // 15: ement$ -> ment
    check("assistence", "assistance");               // 16: ence$ -> ance
    check("generall", "general");                    // 17: ll -> l
    check("aether", "ether");                        // 18: ae -> e
    check("oeconomy", "economy");                    // 19: oe -> e
}

TEST_CASE("Americanism rules 1-7 in isolation") {
    auto rules = default_rules();
    auto check = [&](const std::string& in, const std::string& out) {
        auto lex = make_lexicon({out});
        CHECK(modernize(in, rules, lex) == out);
    };
    check("color", "colour");                        // 1: or$ -> our
    check("theatre", "theater");                     // 2: re$ -> er
    check("defense", "defence");                     // 3: se$ -> ce
    check("analyze", "analyse");                     // 4: yze$ -> yse
    check("analyzes", "analyses");                   // 4 conjugated
    check("analyzed", "analysed");                   // 4 conjugated
    check("analyzing", "analysing");                 // 4 conjugated
    check("traveled", "travelled");                  // 5: led$ -> lled
    check("traveling", "travelling");                // 5
    check("traveler", "traveller");                  // 5
    check("counselor", "counsellor");                // 5: lor$ -> llor
    check("encyclopedia", "encyclopaedia");          // 6: e -> ae
    check("ameba", "amoeba");                        // 6: e -> oe
    check("catalog", "catalogue");                   // 7: og$ -> ogue
}

TEST_CASE("modernize leaves valid words unchanged") {
    auto rules = default_rules();
    auto lex = shipped_lexicon();
    CHECK(modernize("soul", rules, lex) == "soul");
    CHECK(modernize("colour", rules, lex) == "colour");
}

TEST_CASE("modernize depth-2 compositions") {
    auto rules = default_rules();
    CHECK(modernize("neere", rules, make_lexicon({"near"})) == "near");    // e$ then ee->ea
    CHECK(modernize("lou'd", rules, make_lexicon({"loved"})) == "loved");  // u->v then 'd->ed
}

TEST_CASE("modernize falls back to the character-normalized original") {
    auto rules = default_rules();
    auto lex = make_lexicon({"unrelated"});
    CHECK(modernize("zyzzyva", rules, lex) == "zyzzyva");
    CHECK(modernize("\xC5\xBF" "trange", rules, lex) == "strange");
}

TEST_CASE("modernize output never contains long s or ligatures") {
    auto rules = default_rules();
    auto lex = make_lexicon({});
    for (const std::string w : {"\xC5\xBF\xC5\xBF", "c\xC3\xA6sar", "ph\xC5\x93nix"}) {
        auto out = modernize(w, rules, lex);
        CHECK(out.find("\xC5\xBF") == std::string::npos);
        CHECK(out.find("\xC3\xA6") == std::string::npos);
        CHECK(out.find("\xC5\x93") == std::string::npos);
    }
}

TEST_CASE("rules file round-trips against the built-in list") {
    auto loaded = load_rules(testutil::data_path("rules.tsv"));
    auto builtin = default_rules();
    REQUIRE(loaded.size() == builtin.size());
    for (size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].pattern == builtin[i].pattern);
        CHECK(loaded[i].replacement == builtin[i].replacement);
        CHECK(loaded[i].anchor == builtin[i].anchor);
        CHECK(loaded[i].bidirectional == builtin[i].bidirectional);
        CHECK(loaded[i].rule_id == builtin[i].rule_id);
    }
}

TEST_CASE("normalize_document full pipeline") {
    auto rules = default_rules();
    auto lex = shipped_lexicon();
    CHECK(normalize_document("Gather ye Ro\xC5\xBF" "ebuds while ye may", rules, lex).tokens ==
          std::vector<std::string>{"gather", "ye", "rosebud", "while", "ye", "may"});
    CHECK(normalize_document("", rules, lex).tokens.empty());
    CHECK(normalize_document("The colors of vertue", rules, lex).tokens ==
          std::vector<std::string>{"the", "colour", "of", "virtue"});
}

TEST_CASE("contraction expansion is switchable") {
    auto rules = default_rules();
    auto lex = shipped_lexicon();
    NormalizerOptions keep;
    keep.expand_contractions = false;
    CHECK(normalize_document("let's pluck", rules, lex).tokens ==
          std::vector<std::string>{"let", "us", "pluck"});
    CHECK(normalize_document("let's pluck", rules, lex, keep).tokens ==
          std::vector<std::string>{"let's", "pluck"});
}

TEST_CASE("shipped lexicon invariants") {
    auto lex = shipped_lexicon();
    for (const auto& [form, lemma] : lex.lemma_map) {
        CHECK_MESSAGE(lex.valid(lemma), "lemma not in valid forms: ", lemma);
        // Lemmas are fixed points so normalization is idempotent.
        auto it = lex.lemma_map.find(lemma);
        if (it != lex.lemma_map.end()) CHECK(it->second == lemma);
    }
}

TEST_CASE("token invariants on the mixed-era sample") {
    auto rules = default_rules();
    auto lex = shipped_lexicon();
    std::ifstream in(testutil::data_path("sample_mixed.txt"));
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto doc = normalize_document(buf.str(), rules, lex);
    REQUIRE(doc.tokens.size() > 9000);
    for (const auto& t : doc.tokens) {
        CHECK(!t.empty());
        CHECK(t.find(' ') == std::string::npos);
        CHECK(t.find("\xC5\xBF") == std::string::npos);
        CHECK(t.find("\xC3\xA6") == std::string::npos);
        CHECK(t.find("\xC5\x93") == std::string::npos);
        for (char c : t) CHECK(!(c >= 'A' && c <= 'Z'));
    }
}

TEST_CASE("normalization is idempotent on the mixed-era sample") {
    auto rules = default_rules();
    auto lex = shipped_lexicon();
    std::ifstream in(testutil::data_path("sample_mixed.txt"));
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto once = normalize_document(buf.str(), rules, lex);
    auto twice = normalize_document(join(once.tokens), rules, lex);
    CHECK(twice.tokens == once.tokens);
}

TEST_CASE("determinism: same inputs give identical output") {
    auto rules = load_rules(testutil::data_path("rules.tsv"));
    auto lex = shipped_lexicon();
    const std::string text = "The \xC5\xBF" "oule of euery vvorld, 'tis colors and vertue!";
    auto a = normalize_document(text, rules, lex);
    auto b = normalize_document(text, rules, lex);
    CHECK(a.tokens == b.tokens);
}

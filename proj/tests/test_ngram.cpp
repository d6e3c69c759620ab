#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "intertext/ngram.hpp"
#include "test_util.hpp"

using namespace intertext;

TEST_CASE("build_stoplist picks the highest counts") {
    std::unordered_map<std::string, size_t> freq{{"a", 10}, {"b", 5}, {"c", 1}};
    auto sl = build_stoplist(freq, 2);
    CHECK(sl.words == std::unordered_set<std::string>{"a", "b"});
}

TEST_CASE("build_stoplist breaks ties lexicographically") {
    std::unordered_map<std::string, size_t> freq{{"a", 5}, {"b", 5}, {"c", 1}};
    auto sl = build_stoplist(freq, 1);
    CHECK(sl.words == std::unordered_set<std::string>{"a"});

    // Oracle: full sort by (count desc, word asc), take prefix.
    std::unordered_map<std::string, size_t> big;
    for (char c = 'a'; c <= 'z'; ++c) big[std::string(1, c)] = 7;
    big["zz"] = 9;
    auto sl2 = build_stoplist(big, 3);
    CHECK(sl2.words == std::unordered_set<std::string>{"zz", "a", "b"});
}

TEST_CASE("build_stoplist on an empty corpus") {
    auto sl = build_stoplist({}, 500);
    CHECK(sl.words.empty());
}

TEST_CASE("extract_ngrams produces all overlapping windows") {
    std::vector<std::string> tokens{"gather", "ye", "rosebuds", "while", "ye", "may"};
    auto grams = extract_ngrams(tokens, 3, StopList{});
    REQUIRE(grams.size() == 4);
    CHECK(grams[0].words == std::vector<std::string>{"gather", "ye", "rosebuds"});
    CHECK(grams[1].words == std::vector<std::string>{"ye", "rosebuds", "while"});
    CHECK(grams[2].words == std::vector<std::string>{"rosebuds", "while", "ye"});
    CHECK(grams[3].words == std::vector<std::string>{"while", "ye", "may"});
    CHECK(grams[3].source_offset == 3);

    std::vector<std::string> second{"let's", "pluck", "the", "rosebud", "while", "we", "may"};
    CHECK(extract_ngrams(second, 3, StopList{}).size() == 5);
}

TEST_CASE("documents shorter than n yield nothing") {
    CHECK(extract_ngrams({"a", "b"}, 3, StopList{}).empty());
    CHECK(extract_ngrams(std::vector<std::string>{}, 1, StopList{}).empty());
}

TEST_CASE("strict stop-majority rule drops n-grams") {
    StopList sl;
    sl.words = {"the", "of"};
    CHECK(extract_ngrams({"the", "of", "rose"}, 3, sl).empty());  // 2 of 3 stopped
    // Exactly half survives: 2 of 4 is not a strict majority.
    StopList s2;
    s2.words = {"a", "b"};
    CHECK(extract_ngrams({"a", "b", "x", "y"}, 4, s2).size() == 1);
    CHECK(extract_ngrams({"a", "b", "b", "y"}, 4, s2).empty());  // 3 of 4
}

TEST_CASE("empty-stoplist count is T-n+1") {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        size_t t = rng() % 40;
        size_t n = 1 + rng() % 6;
        std::vector<std::string> tokens(t, "w");
        size_t expect = t >= n ? t - n + 1 : 0;
        CHECK(extract_ngrams(tokens, n, StopList{}).size() == expect);
    }
}

TEST_CASE("enlarging the stoplist never adds n-grams") {
    std::mt19937 rng(11);
    std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<std::string> tokens;
        for (int i = 0; i < 30; ++i) tokens.push_back(vocab[rng() % vocab.size()]);
        StopList small, large;
        small.words = {"a"};
        large.words = {"a", "b", "c"};
        CHECK(extract_ngrams(tokens, 3, large).size() <= extract_ngrams(tokens, 3, small).size());
    }
}

TEST_CASE("stoplist save/load round-trip") {
    testutil::TempDir tmp("stoplist");
    StopList sl;
    sl.words = {"alpha", "beta"};
    sl.save(tmp.file("stop.txt"));
    auto loaded = StopList::load(tmp.file("stop.txt"));
    CHECK(loaded.words == sl.words);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "themis/util/misc.hpp"
#include "themis/util/rng.hpp"
#include "themis/util/text.hpp"

#include <set>

using namespace themis;

TEST_CASE("splitmix64 streams are deterministic and seed-sensitive") {
    SplitMix64 a(42);
    SplitMix64 b(42);
    SplitMix64 c(43);
    for (int i = 0; i < 100; ++i) {
        auto x = a.next();
        CHECK(x == b.next());
    }
    bool any_diff = false;
    SplitMix64 a2(42);
    for (int i = 0; i < 10; ++i) {
        if (a2.next() != c.next()) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("substream seeds differ by name") {
    auto s1 = substream_seed(42, "split");
    auto s2 = substream_seed(42, "judge-sample");
    auto s3 = substream_seed(43, "split");
    CHECK(s1 != s2);
    CHECK(s1 != s3);
    CHECK(s1 == substream_seed(42, "split"));
}

TEST_CASE("shuffled_indices is a permutation and reproducible") {
    auto p1 = shuffled_indices(50, 7);
    auto p2 = shuffled_indices(50, 7);
    CHECK(p1 == p2);
    std::set<std::size_t> seen(p1.begin(), p1.end());
    CHECK(seen.size() == 50);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 49);
}

TEST_CASE("text helpers") {
    CHECK(trim("  a b \n") == "a b");
    CHECK(collapse_whitespace("a\t\tb\n c") == "a b c");
    CHECK(word_count("one two  three") == 3);
    CHECK(word_count("") == 0);
    CHECK(to_lower_ascii("MiXeD") == "mixed");
    CHECK(normalize_label("  Shared   Tools;; ") == "shared tools");
    CHECK(normalize_label("Budget tension.") == "budget tension");
}

TEST_CASE("token_jaccard") {
    CHECK(token_jaccard("a b c", "a b c") == doctest::Approx(1.0));
    CHECK(token_jaccard("a b", "c d") == doctest::Approx(0.0));
    CHECK(token_jaccard("a b c", "b c d") == doctest::Approx(0.5));
}

TEST_CASE("find_normalized maps back to raw spans") {
    std::string hay = "The  quick\nbrown fox jumps";
    auto span = find_normalized(hay, "quick brown fox");
    REQUIRE(span.has_value());
    CHECK(hay.substr(span->first, span->second - span->first) == "quick\nbrown fox");
    CHECK_FALSE(find_normalized(hay, "purple fox").has_value());
    CHECK_FALSE(find_normalized(hay, "   ").has_value());
}

TEST_CASE("sentence_spans covers the text and cuts after terminators") {
    std::string text = "First one. Second two! Third?";
    auto spans = sentence_spans(text);
    REQUIRE(spans.size() == 3);
    CHECK(spans[0] == std::make_pair(std::size_t{0}, std::size_t{10}));
    std::size_t covered = 0;
    for (auto [b, e] : spans) covered += e - b;
    CHECK(covered == text.size());
    CHECK(sentence_spans("no terminator here").size() == 1);
}

TEST_CASE("fit_word_count clamps and pads") {
    std::string out = fit_word_count("one two three", 5, 10);
    CHECK(word_count(out) == 5);
    std::string trunc = fit_word_count("a b c d e f g h i j k l", 5, 10);
    CHECK(word_count(trunc) == 10);
    std::string same = fit_word_count("a b c d e f", 5, 10);
    CHECK(same == "a b c d e f");
}

TEST_CASE("sha256 matches known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("canon_real renders 9 significant digits") {
    CHECK(canon_real(0.5) == "0.5");
    CHECK(canon_real(1.0 / 3.0) == "0.333333333");
    CHECK(canon_real(123456789.0) == "123456789");
}

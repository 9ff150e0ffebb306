#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sqz/rng.hpp"
#include "sqz/tokenize.hpp"

#include <string>
#include <vector>

using namespace sqz;

namespace {

std::vector<std::string> words(std::string_view text) {
    return default_tokenizers().word.tokenize(text);
}

std::vector<std::string> subword_texts(std::string_view text) {
    const Tokenizers& tok = default_tokenizers();
    std::vector<std::string> out;
    for (const TokenSpan& w : tok.word.spans(text)) {
        for (const TokenSpan& p : tok.subword.split(text, w)) {
            out.emplace_back(text.substr(p.begin, p.end - p.begin));
        }
    }
    return out;
}

} // namespace

TEST_CASE("basic word tokenization") {
    CHECK(words("The cat sat.") == std::vector<std::string>{"The", "cat", "sat", "."});
    CHECK(words("a b c d") == std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(words("") == std::vector<std::string>{});
    CHECK(words("   ") == std::vector<std::string>{});
}

TEST_CASE("punctuation splits off, numbers and contractions stay whole") {
    CHECK(words("sales fell 26.1%") == std::vector<std::string>{"sales", "fell", "26.1", "%"});
    CHECK(words("Of the 24,058 people, yes") ==
          std::vector<std::string>{"Of", "the", "24,058", "people", ",", "yes"});
    CHECK(words("don't stop") == std::vector<std::string>{"don't", "stop"});
    CHECK(words("state-of-the-art") == std::vector<std::string>{"state-of-the-art"});
    CHECK(words("U.S. troops") == std::vector<std::string>{"U.S", ".", "troops"});
    CHECK(words("\"quoted\"") == std::vector<std::string>{"\"", "quoted", "\""});
    CHECK(words("(on Tuesday)") == std::vector<std::string>{"(", "on", "Tuesday", ")"});
}

TEST_CASE("word spans are increasing and cover their tokens") {
    std::string text = "He said, \"it fell 26.1% on Monday.\"";
    auto spans = default_tokenizers().word.spans(text);
    std::size_t prev_end = 0;
    for (const TokenSpan& s : spans) {
        CHECK(s.begin >= prev_end);
        CHECK(s.end > s.begin);
        prev_end = s.end;
    }
}

TEST_CASE("subword splitting at digit/letter boundaries") {
    CHECK(subword_texts("29th") == std::vector<std::string>{"29", "th"});
    CHECK(subword_texts("gone") == std::vector<std::string>{"gone"});
}

TEST_CASE("long letter runs split into pieces") {
    CHECK(subword_texts("Perigord") == std::vector<std::string>{"Perig", "ord"});
    CHECK(subword_texts("abcdef") == std::vector<std::string>{"abcdef"});
    CHECK(subword_texts("abcdefg") == std::vector<std::string>{"abcde", "fg"});
    CHECK(subword_texts("abcdefghijkl") == std::vector<std::string>{"abcde", "fghij", "kl"});
}

TEST_CASE("subwords never split multi-byte codepoints") {
    // 8 two-byte codepoints; pieces must land on codepoint boundaries.
    std::string text = "éééééééé";
    auto pieces = subword_texts(text);
    CHECK(pieces.size() == 2);
    CHECK(pieces[0] == "ééééé");
    CHECK(pieces[1] == "ééé");
}

TEST_CASE("punctuation inside words becomes its own glued piece") {
    CHECK(subword_texts("don't") == std::vector<std::string>{"don", "'", "t"});
    CHECK(subword_texts("26.1") == std::vector<std::string>{"26", ".", "1"});
}

TEST_CASE("whitespace normalization") {
    CHECK(normalize_whitespace("  a\t b\n\nc ") == "a b c");
    CHECK(normalize_whitespace("") == "");
    CHECK(normalize_whitespace(" \t\n") == "");
    CHECK(normalize_whitespace("already clean") == "already clean");
}

TEST_CASE("subword pieces tile each word exactly") {
    Rng rng(7);
    const Tokenizers& tok = default_tokenizers();
    const char* samples[] = {
        "The U.S. economy grew 2.5% in Q3, officials said on Tuesday.",
        "Manchester United agreed a £35m deal, talkSPORT reported!",
        "Extraordinarily complicated circumnavigation 123456789012 done.",
    };
    for (const char* raw : samples) {
        std::string text = normalize_whitespace(raw);
        for (const TokenSpan& w : tok.word.spans(text)) {
            auto pieces = tok.subword.split(text, w);
            REQUIRE(!pieces.empty());
            CHECK(pieces.front().begin == w.begin);
            CHECK(pieces.back().end == w.end);
            for (std::size_t i = 1; i < pieces.size(); ++i) {
                CHECK(pieces[i].begin == pieces[i - 1].end);
            }
        }
    }
    (void)rng;
}

TEST_CASE("ascii_lower") {
    CHECK(ascii_lower("TuesDAY") == "tuesday");
    CHECK(ascii_lower("déjà") == "déjà"); // non-ASCII untouched
}

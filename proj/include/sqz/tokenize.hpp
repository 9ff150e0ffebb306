#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sqz {

struct TokenSpan {
    std::size_t begin = 0; // byte offsets
    std::size_t end = 0;
};

// Rule-based word tokenizer used consistently for every length, ratio and
// F1 computation in the toolkit. Operates on UTF-8 bytes; non-ASCII bytes
// are treated as letters.
//
// Rules: whitespace separates tokens; a maximal run of letters/digits is
// one token, and '.' ',' '\'' '-' stay inside the run when flanked by
// letters/digits on both sides ("26.1", "24,058", "don't", "29th");
// any other ASCII punctuation char is a single-char token.
class WordTokenizer {
public:
    std::vector<TokenSpan> spans(std::string_view text) const;
    std::vector<std::string> tokenize(std::string_view text) const;
};

// Splits a word into subword pieces, emulating the byte-pair vocabularies
// of pretrained encoders: pieces never cross word boundaries, punctuation
// inside a word is its own piece, digit/letter class changes split, and
// letter or digit runs longer than max_whole codepoints are chopped into
// chunks of piece_len codepoints ("Perigord" -> "Perig" + "ord",
// "29th" -> "29" + "th"). Multi-byte codepoints are never split.
class SubwordTokenizer {
public:
    explicit SubwordTokenizer(std::size_t max_whole = 6, std::size_t piece_len = 5)
        : max_whole_(max_whole), piece_len_(piece_len) {}

    std::vector<TokenSpan> split(std::string_view text, TokenSpan word) const;

private:
    std::size_t max_whole_;
    std::size_t piece_len_;
};

// The injectable tokenizer pair. Everything that tokenizes goes through
// one of these instances.
struct Tokenizers {
    WordTokenizer word;
    SubwordTokenizer subword;
};

const Tokenizers& default_tokenizers();

// Collapses all whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view text);

std::string ascii_lower(std::string_view s);

} // namespace sqz

#include "sqz/tokenize.hpp"

namespace sqz {

namespace {

inline bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

inline bool is_letter(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool is_alnum(unsigned char c) { return is_digit(c) || is_letter(c); }

inline bool is_joiner(unsigned char c) {
    return c == '.' || c == ',' || c == '\'' || c == '-';
}

inline bool is_utf8_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

} // namespace

std::vector<TokenSpan> WordTokenizer::spans(std::string_view text) const {
    std::vector<TokenSpan> out;
    std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
            continue;
        }
        if (is_alnum(c)) {
            std::size_t j = i;
            while (j < n) {
                unsigned char cj = static_cast<unsigned char>(text[j]);
                if (is_alnum(cj)) {
                    ++j;
                } else if (is_joiner(cj) && j > i && j + 1 < n &&
                           is_alnum(static_cast<unsigned char>(text[j - 1])) &&
                           is_alnum(static_cast<unsigned char>(text[j + 1]))) {
                    ++j;
                } else {
                    break;
                }
            }
            out.push_back({i, j});
            i = j;
        } else {
            out.push_back({i, i + 1});
            ++i;
        }
    }
    return out;
}

std::vector<std::string> WordTokenizer::tokenize(std::string_view text) const {
    std::vector<std::string> out;
    for (const TokenSpan& s : spans(text)) {
        out.emplace_back(text.substr(s.begin, s.end - s.begin));
    }
    return out;
}

std::vector<TokenSpan> SubwordTokenizer::split(std::string_view text, TokenSpan word) const {
    std::vector<TokenSpan> pieces;
    std::size_t p = word.begin;
    while (p < word.end) {
        unsigned char c = static_cast<unsigned char>(text[p]);
        if (!is_alnum(c)) {
            pieces.push_back({p, p + 1});
            ++p;
            continue;
        }
        bool digits = is_digit(c);
        std::size_t q = p;
        while (q < word.end) {
            unsigned char cq = static_cast<unsigned char>(text[q]);
            if (!is_alnum(cq) || is_digit(cq) != digits) break;
            ++q;
        }
        // Chunk long runs by codepoint count, never splitting inside a
        // multi-byte sequence.
        std::vector<std::size_t> cp_starts;
        for (std::size_t b = p; b < q; ++b) {
            if (!is_utf8_continuation(static_cast<unsigned char>(text[b]))) {
                cp_starts.push_back(b);
            }
        }
        std::size_t cp_len = cp_starts.size();
        if (cp_len <= max_whole_) {
            pieces.push_back({p, q});
        } else {
            std::size_t done = 0;
            while (done < cp_len) {
                std::size_t take = std::min(piece_len_, cp_len - done);
                std::size_t b = cp_starts[done];
                std::size_t e = (done + take < cp_len) ? cp_starts[done + take] : q;
                pieces.push_back({b, e});
                done += take;
            }
        }
        p = q;
    }
    return pieces;
}

const Tokenizers& default_tokenizers() {
    static const Tokenizers t;
    return t;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char ch : text) {
        if (is_space(static_cast<unsigned char>(ch))) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(ch);
        }
    }
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

} // namespace sqz

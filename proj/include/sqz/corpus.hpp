#pragma once

#include "sqz/tokenize.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sqz::corpus {

// Binary keep/drop vector, one entry per subword (or per word in the
// search module). Entries are exactly 0 or 1.
using LabelSequence = std::vector<std::uint8_t>;

struct Subword {
    std::string text;
    std::size_t begin = 0; // byte span into SourceSentence::text
    std::size_t end = 0;
    bool glue = false;     // attaches to its predecessor without a space
    std::size_t word_index = 0;
};

// A tokenized input sentence. `text` is whitespace-normalized at
// construction so that subword spans and glue flags round-trip exactly.
struct SourceSentence {
    std::string id;
    std::string text;
    std::vector<std::string> words;
    std::vector<Subword> subwords;

    std::size_t word_count() const { return words.size(); }
    std::size_t subword_count() const { return subwords.size(); }
};

// Tokenizes and aligns. Throws ContractError if the text contains no
// tokens at all.
SourceSentence make_sentence(std::string id, std::string_view raw_text,
                             const Tokenizers& tok = default_tokenizers());

struct Compression {
    std::string sentence_id;
    LabelSequence labels;
    std::string text;
    std::size_t kept_word_count = 0;
    double compression_ratio = 0.0;
};

// Renders the subwords selected by `labels`: a kept subword with its glue
// flag set attaches to the previous kept token without a space, otherwise
// a single space separates tokens. kept_word_count comes from
// word-tokenizing the rendered text.
Compression render_compression(const SourceSentence& sentence, const LabelSequence& labels,
                               const Tokenizers& tok = default_tokenizers());

// True iff the rendered text contains a word token absent from the source
// word list, i.e. a word was split or two fragments merged into something
// new. Detected, never repaired.
bool detect_subword_artifacts(const SourceSentence& sentence, const LabelSequence& labels,
                              const Tokenizers& tok = default_tokenizers());

// Word indices whose subwords are all kept. For word-level selections
// (the search baseline) this is exactly the kept word set.
std::vector<std::size_t> kept_word_indices(const SourceSentence& sentence,
                                           const LabelSequence& labels);

struct DevPair {
    SourceSentence sentence;
    LabelSequence gold_labels;
    std::string gold_text;
    bool ambiguous = false; // more than one subsequence match existed
};

struct SentenceSummary {
    SourceSentence sentence;
    std::string summary;
};

// Emits a DevPair for every pair whose word-tokenized summary is an
// order-preserving subsequence of the word-tokenized sentence. The
// leftmost-greedy match is labeled; pairs with multiple possible matches
// are flagged ambiguous. If manual_keep is given, only those ids survive.
std::vector<DevPair> build_devset(std::span<const SentenceSummary> pairs,
                                  const std::vector<std::string>* manual_keep = nullptr,
                                  const Tokenizers& tok = default_tokenizers());

struct Document {
    std::string id;
    std::vector<std::string> sentences;
};

// Keeps the first lead_n sentences of each document whose word count lies
// in [min_len, max_len], both bounds inclusive.
std::vector<SourceSentence> filter_training_sentences(std::span<const Document> articles,
                                                      int min_len = 15, int max_len = 60,
                                                      int lead_n = 3,
                                                      const Tokenizers& tok = default_tokenizers());

enum class CorpusFormat { plain, jsonl };

// Streaming sentence reader. plain: one sentence per line, ids are
// 1-based line numbers. jsonl: {"id": str, "text": str} per line, with an
// optional "summary" field. Malformed records are skipped with a warning
// and counted; an unreadable file throws IoError.
class CorpusReader {
public:
    CorpusReader(const std::filesystem::path& path, CorpusFormat format,
                 const Tokenizers& tok = default_tokenizers());

    // Next sentence, or nullopt at end of input.
    std::optional<SourceSentence> next();
    // Like next(), but also surfaces the record's "summary" field (empty
    // when absent or in plain format).
    std::optional<SentenceSummary> next_with_summary();

    std::size_t error_count() const { return errors_; }

private:
    std::ifstream in_;
    CorpusFormat format_;
    const Tokenizers& tok_;
    std::size_t lineno_ = 0;
    std::size_t errors_ = 0;
};

std::vector<SourceSentence> load_corpus(const std::filesystem::path& path, CorpusFormat format,
                                        std::size_t* errors = nullptr,
                                        const Tokenizers& tok = default_tokenizers());

// Documents for filter_training_sentences. plain: blank-line separated
// blocks, one sentence per line. jsonl: {"id": str, "sentences": [str]}.
std::vector<Document> load_documents(const std::filesystem::path& path, CorpusFormat format,
                                     std::size_t* errors = nullptr);

void validate_labels(const SourceSentence& sentence, const LabelSequence& labels);

} // namespace sqz::corpus

#include "sqz/corpus.hpp"

#include "sqz/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <unordered_set>

namespace sqz::corpus {

using nlohmann::json;

SourceSentence make_sentence(std::string id, std::string_view raw_text, const Tokenizers& tok) {
    SourceSentence s;
    s.id = std::move(id);
    s.text = normalize_whitespace(raw_text);
    auto word_spans = tok.word.spans(s.text);
    if (word_spans.empty()) {
        throw ContractError("sentence '" + s.id + "' contains no tokens");
    }
    s.words.reserve(word_spans.size());
    for (std::size_t w = 0; w < word_spans.size(); ++w) {
        const TokenSpan& ws = word_spans[w];
        s.words.emplace_back(s.text.substr(ws.begin, ws.end - ws.begin));
        for (const TokenSpan& ps : tok.subword.split(s.text, ws)) {
            Subword sub;
            sub.text = s.text.substr(ps.begin, ps.end - ps.begin);
            sub.begin = ps.begin;
            sub.end = ps.end;
            sub.glue = !s.subwords.empty() && s.subwords.back().end == ps.begin;
            sub.word_index = w;
            s.subwords.push_back(std::move(sub));
        }
    }
    return s;
}

void validate_labels(const SourceSentence& sentence, const LabelSequence& labels) {
    if (labels.size() != sentence.subwords.size()) {
        throw ContractError("label sequence length " + std::to_string(labels.size()) +
                            " does not match subword count " +
                            std::to_string(sentence.subwords.size()) + " of sentence '" +
                            sentence.id + "'");
    }
    for (std::uint8_t v : labels) {
        if (v > 1) throw ContractError("label values must be 0 or 1");
    }
}

Compression render_compression(const SourceSentence& sentence, const LabelSequence& labels,
                               const Tokenizers& tok) {
    validate_labels(sentence, labels);
    Compression c;
    c.sentence_id = sentence.id;
    c.labels = labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i]) continue;
        const Subword& sub = sentence.subwords[i];
        if (!c.text.empty() && !sub.glue) c.text.push_back(' ');
        c.text.append(sub.text);
    }
    c.kept_word_count = tok.word.spans(c.text).size();
    c.compression_ratio =
        static_cast<double>(c.kept_word_count) / static_cast<double>(sentence.word_count());
    return c;
}

bool detect_subword_artifacts(const SourceSentence& sentence, const LabelSequence& labels,
                              const Tokenizers& tok) {
    Compression c = render_compression(sentence, labels, tok);
    std::unordered_set<std::string_view> vocab(sentence.words.begin(), sentence.words.end());
    for (const std::string& w : tok.word.tokenize(c.text)) {
        if (!vocab.contains(w)) return true;
    }
    return false;
}

std::vector<std::size_t> kept_word_indices(const SourceSentence& sentence,
                                           const LabelSequence& labels) {
    validate_labels(sentence, labels);
    std::vector<std::size_t> kept;
    std::size_t w = 0;
    std::size_t i = 0;
    while (i < sentence.subwords.size()) {
        w = sentence.subwords[i].word_index;
        bool all = true;
        std::size_t j = i;
        while (j < sentence.subwords.size() && sentence.subwords[j].word_index == w) {
            all = all && labels[j];
            ++j;
        }
        if (all) kept.push_back(w);
        i = j;
    }
    return kept;
}

namespace {

// Counts distinct subsequence embeddings of `target` in `words`,
// saturating at 2 (only "unique or not" matters).
int count_embeddings_capped(const std::vector<std::string>& words,
                            const std::vector<std::string>& target) {
    std::size_t n = words.size();
    std::size_t m = target.size();
    // ways[j] = embeddings of target[j..] in the suffix of words under scan
    std::vector<long> ways(m + 1, 0);
    ways[m] = 1;
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = 0; j < m; ++j) {
            if (words[ii] == target[j]) {
                ways[j] = std::min<long>(2, ways[j] + ways[j + 1]);
            }
        }
    }
    return static_cast<int>(std::min<long>(2, ways[0]));
}

// Leftmost-greedy subsequence match. Returns matched word indices or
// nullopt when `target` is not a subsequence.
std::optional<std::vector<std::size_t>> greedy_match(const std::vector<std::string>& words,
                                                     const std::vector<std::string>& target) {
    std::vector<std::size_t> idx;
    std::size_t w = 0;
    for (const std::string& t : target) {
        while (w < words.size() && words[w] != t) ++w;
        if (w == words.size()) return std::nullopt;
        idx.push_back(w++);
    }
    return idx;
}

} // namespace

std::vector<DevPair> build_devset(std::span<const SentenceSummary> pairs,
                                  const std::vector<std::string>* manual_keep,
                                  const Tokenizers& tok) {
    std::optional<std::unordered_set<std::string>> keep;
    if (manual_keep != nullptr) {
        keep.emplace(manual_keep->begin(), manual_keep->end());
    }
    std::vector<DevPair> out;
    for (const SentenceSummary& p : pairs) {
        if (keep && !keep->contains(p.sentence.id)) continue;
        std::vector<std::string> target = tok.word.tokenize(normalize_whitespace(p.summary));
        if (target.empty()) continue;
        auto match = greedy_match(p.sentence.words, target);
        if (!match) continue;
        std::unordered_set<std::size_t> word_set(match->begin(), match->end());
        DevPair d;
        d.sentence = p.sentence;
        d.gold_labels.assign(p.sentence.subwords.size(), 0);
        for (std::size_t i = 0; i < p.sentence.subwords.size(); ++i) {
            if (word_set.contains(p.sentence.subwords[i].word_index)) d.gold_labels[i] = 1;
        }
        d.gold_text = render_compression(p.sentence, d.gold_labels, tok).text;
        d.ambiguous = count_embeddings_capped(p.sentence.words, target) > 1;
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<SourceSentence> filter_training_sentences(std::span<const Document> articles,
                                                      int min_len, int max_len, int lead_n,
                                                      const Tokenizers& tok) {
    std::vector<SourceSentence> out;
    for (const Document& doc : articles) {
        int taken = 0;
        for (std::size_t i = 0; i < doc.sentences.size() && taken < lead_n; ++i, ++taken) {
            std::string norm = normalize_whitespace(doc.sentences[i]);
            if (norm.empty()) continue;
            SourceSentence s =
                make_sentence(doc.id + "#" + std::to_string(i), norm, tok);
            int wc = static_cast<int>(s.word_count());
            if (wc >= min_len && wc <= max_len) out.push_back(std::move(s));
        }
    }
    return out;
}

CorpusReader::CorpusReader(const std::filesystem::path& path, CorpusFormat format,
                           const Tokenizers& tok)
    : in_(path), format_(format), tok_(tok) {
    if (!in_) throw IoError("cannot open corpus file: " + path.string());
}

std::optional<SentenceSummary> CorpusReader::next_with_summary() {
    std::string line;
    while (std::getline(in_, line)) {
        ++lineno_;
        if (format_ == CorpusFormat::plain) {
            std::string norm = normalize_whitespace(line);
            if (norm.empty()) continue;
            return SentenceSummary{make_sentence(std::to_string(lineno_), norm, tok_), ""};
        }
        std::string norm = normalize_whitespace(line);
        if (norm.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            ++errors_;
            log::warn("line %zu: malformed json record, skipped", lineno_);
            continue;
        }
        if (rec.value("footer", false)) continue;
        if (!rec.contains("id") || !rec.contains("text") || !rec["text"].is_string()) {
            ++errors_;
            log::warn("line %zu: record missing id/text, skipped", lineno_);
            continue;
        }
        std::string id = rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump();
        std::string text = normalize_whitespace(rec["text"].get<std::string>());
        if (text.empty()) {
            ++errors_;
            log::warn("line %zu: record '%s' has empty text, skipped", lineno_, id.c_str());
            continue;
        }
        SentenceSummary out{make_sentence(std::move(id), text, tok_),
                            rec.value("summary", std::string{})};
        return out;
    }
    return std::nullopt;
}

std::optional<SourceSentence> CorpusReader::next() {
    auto rec = next_with_summary();
    if (!rec) return std::nullopt;
    return std::move(rec->sentence);
}

std::vector<SourceSentence> load_corpus(const std::filesystem::path& path, CorpusFormat format,
                                        std::size_t* errors, const Tokenizers& tok) {
    CorpusReader reader(path, format, tok);
    std::vector<SourceSentence> out;
    while (auto s = reader.next()) out.push_back(std::move(*s));
    if (errors != nullptr) *errors = reader.error_count();
    return out;
}

std::vector<Document> load_documents(const std::filesystem::path& path, CorpusFormat format,
                                     std::size_t* errors) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open document file: " + path.string());
    std::vector<Document> docs;
    std::size_t errs = 0;
    std::string line;
    if (format == CorpusFormat::plain) {
        Document cur;
        std::size_t doc_no = 0;
        auto flush = [&] {
            if (!cur.sentences.empty()) {
                cur.id = std::to_string(++doc_no);
                docs.push_back(std::move(cur));
                cur = Document{};
            }
        };
        while (std::getline(in, line)) {
            std::string norm = normalize_whitespace(line);
            if (norm.empty()) {
                flush();
            } else {
                cur.sentences.push_back(std::move(norm));
            }
        }
        flush();
    } else {
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (normalize_whitespace(line).empty()) continue;
            json rec = json::parse(line, nullptr, false);
            if (rec.is_discarded() || !rec.is_object() || !rec.contains("id") ||
                !rec.contains("sentences") || !rec["sentences"].is_array()) {
                ++errs;
                log::warn("line %zu: malformed document record, skipped", lineno);
                continue;
            }
            Document doc;
            doc.id = rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump();
            for (const auto& s : rec["sentences"]) {
                if (s.is_string()) doc.sentences.push_back(s.get<std::string>());
            }
            docs.push_back(std::move(doc));
        }
    }
    if (errors != nullptr) *errors = errs;
    return docs;
}

} // namespace sqz::corpus

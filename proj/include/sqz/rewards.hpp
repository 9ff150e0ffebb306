#pragma once

#include "sqz/corpus.hpp"
#include "sqz/tokenize.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sqz::rewards {

// Scores the tokens of a compressed sentence. Implementations tokenize
// text themselves, so external language models plug in with their own
// vocabularies. norm_constant divides the mean token score and must be
// positive; it is usually obtained with calibrate_norm_constant.
class FluencyScorer {
public:
    virtual ~FluencyScorer() = default;
    virtual std::vector<double> score_tokens(const std::string& text) const = 0;
    virtual double norm_constant() const = 0;
    virtual bool thread_safe() const { return true; }
};

// Scores how much of the source survives in the compression. The bi_sim
// variant must stay within [-1, 1] and return 1 for identical texts.
class SimilarityScorer {
public:
    virtual ~SimilarityScorer() = default;
    virtual double score(const std::string& source, const std::string& compressed) const = 0;
    virtual bool thread_safe() const { return true; }
};

// ---- Built-in scorers ----

class ConstantFluency : public FluencyScorer {
public:
    ConstantFluency(double per_token_score, double norm_constant,
                    const Tokenizers& tok = default_tokenizers())
        : score_(per_token_score), norm_(norm_constant), tok_(tok) {}
    std::vector<double> score_tokens(const std::string& text) const override;
    double norm_constant() const override { return norm_; }

private:
    double score_;
    double norm_;
    const Tokenizers& tok_;
};

// Per-word score table; unknown words get `fallback`. Handy in tests and
// for rule-based scoring experiments.
class TokenTableFluency : public FluencyScorer {
public:
    TokenTableFluency(std::map<std::string, double> scores, double fallback, double norm_constant,
                      const Tokenizers& tok = default_tokenizers())
        : scores_(std::move(scores)), fallback_(fallback), norm_(norm_constant), tok_(tok) {}
    std::vector<double> score_tokens(const std::string& text) const override;
    double norm_constant() const override { return norm_; }

private:
    std::map<std::string, double> scores_;
    double fallback_;
    double norm_;
    const Tokenizers& tok_;
};

// Add-k smoothed bigram language model fitted on a plain-text corpus (one
// sentence per line). Token scores are log-probabilities, so they are
// negative; pair it with a calibrated norm_constant.
class BigramLmFluency : public FluencyScorer {
public:
    BigramLmFluency(const std::filesystem::path& corpus, double add_k = 0.1,
                    double norm_constant = 1.0, const Tokenizers& tok = default_tokenizers());
    std::vector<double> score_tokens(const std::string& text) const override;
    double norm_constant() const override { return norm_; }

private:
    double token_log_prob(const std::string& prev, const std::string& word) const;

    std::unordered_map<std::string, double> unigram_;
    std::unordered_map<std::string, double> bigram_; // key: prev + '\x1f' + word
    double add_k_;
    double vocab_size_ = 1.0;
    double norm_;
    const Tokenizers& tok_;
};

class ConstantSimilarity : public SimilarityScorer {
public:
    explicit ConstantSimilarity(double value) : value_(value) {}
    double score(const std::string&, const std::string&) const override { return value_; }

private:
    double value_;
};

// Cosine similarity of word-count vectors. Bounded in [0, 1]; identical
// texts score exactly 1.
class BowCosineSimilarity : public SimilarityScorer {
public:
    explicit BowCosineSimilarity(const Tokenizers& tok = default_tokenizers()) : tok_(tok) {}
    double score(const std::string& source, const std::string& compressed) const override;

private:
    const Tokenizers& tok_;
};

// ---- Reward components ----

enum class ComponentKind { fluency, bi_sim, cross_sim, nli, gauss_len, gauss_cr, gazetteer, custom };

const char* kind_name(ComponentKind kind);
ComponentKind kind_from_name(const std::string& name);

struct GaussianParams {
    double mu = 1.0;   // target word count (gauss_len) or target ratio (gauss_cr)
    double s = 0.4;    // spread factor; sigma = s * mu

    double sigma() const { return s * mu; }
};

// Unit-peak Gaussian: exp(-(observed - mu)^2 / (2 (s mu)^2)). The peak is
// exactly 1 at observed == mu regardless of the spread, which keeps this
// reward on the same scale as the bounded ones.
double gaussian_reward(const GaussianParams& params, double observed);

using CustomRewardFn =
    std::function<double(const corpus::SourceSentence&, const corpus::Compression&)>;

struct RewardComponent {
    std::string name;
    ComponentKind kind = ComponentKind::custom;

    // fluency
    std::shared_ptr<FluencyScorer> fluency;
    // bi_sim / cross_sim / nli
    std::shared_ptr<SimilarityScorer> similarity;
    // gauss_len / gauss_cr
    GaussianParams gauss;
    // gazetteer (stored lowercased)
    std::unordered_set<std::string> gazetteer;
    // custom
    CustomRewardFn custom;
    bool custom_thread_safe = true;
};

// Validated, immutable component list aggregated by arithmetic mean.
class RewardSpec {
public:
    static RewardSpec from_components(std::vector<RewardComponent> components,
                                      const Tokenizers& tok = default_tokenizers());

    const std::vector<RewardComponent>& components() const { return components_; }
    const Tokenizers& tokenizers() const { return *tok_; }
    bool all_thread_safe() const;

private:
    RewardSpec() : tok_(&default_tokenizers()) {}
    std::vector<RewardComponent> components_;
    const Tokenizers* tok_;
};

struct RewardValue {
    std::vector<std::pair<std::string, double>> components; // spec order
    double total = 0.0;

    double component(const std::string& name) const;
};

// ---- Operations ----

// Mean per-token score of the rendered text divided by the scorer's
// norm_constant; an empty compression scores 0.
double fluency_reward(const FluencyScorer& scorer, const corpus::Compression& compression);

// Scorer output; an empty compression scores 0.
double similarity_reward(const SimilarityScorer& scorer, const corpus::SourceSentence& source,
                         const corpus::Compression& compression);

// 0 if any rendered word appears in the gazetteer (case-insensitive on
// word tokens), else 1.
double gazetteer_reward(const std::unordered_set<std::string>& gazetteer_lower,
                        const corpus::Compression& compression,
                        const Tokenizers& tok = default_tokenizers());

// Evaluates every component and their arithmetic mean. Any component
// failure throws RewardError; there are no partial totals.
RewardValue aggregate(const RewardSpec& spec, const corpus::SourceSentence& source,
                      const corpus::Compression& compression);

// Renders and scores each candidate; element-wise equal to aggregate per
// candidate. jobs > 1 fans out only when every component is thread-safe.
std::vector<RewardValue> batch_rewards(const RewardSpec& spec, const corpus::SourceSentence& source,
                                       std::span<const corpus::LabelSequence> candidates,
                                       int jobs = 1);

// Minimum observed mean token score over a sample, as a positive number.
// Use the result as the scorer's norm_constant. Taking the magnitude keeps
// score order intact for log-probability scorers, whose averages are
// negative; for positive-scored models it is the observed minimum itself.
double calibrate_norm_constant(const FluencyScorer& scorer,
                               std::span<const corpus::SourceSentence> sample);

// ---- Config ----

// Parses the structured reward config (see README for the schema).
// Relative paths resolve against base_dir.
RewardSpec parse_reward_spec(const std::string& json_text, const std::filesystem::path& base_dir,
                             const Tokenizers& tok = default_tokenizers());
RewardSpec load_reward_spec(const std::filesystem::path& path,
                            const Tokenizers& tok = default_tokenizers());

std::unordered_set<std::string> load_gazetteer(const std::filesystem::path& path);

} // namespace sqz::rewards

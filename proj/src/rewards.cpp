#include "sqz/rewards.hpp"

#include "sqz/common.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace sqz::rewards {

using nlohmann::json;

std::vector<double> ConstantFluency::score_tokens(const std::string& text) const {
    return std::vector<double>(tok_.word.spans(text).size(), score_);
}

std::vector<double> TokenTableFluency::score_tokens(const std::string& text) const {
    std::vector<double> out;
    for (const std::string& w : tok_.word.tokenize(text)) {
        auto it = scores_.find(w);
        out.push_back(it == scores_.end() ? fallback_ : it->second);
    }
    return out;
}

namespace {
constexpr char kSep = '\x1f';
const std::string kBos = "<s>";
} // namespace

BigramLmFluency::BigramLmFluency(const std::filesystem::path& corpus, double add_k,
                                 double norm_constant, const Tokenizers& tok)
    : add_k_(add_k), norm_(norm_constant), tok_(tok) {
    std::ifstream in(corpus);
    if (!in) throw IoError("cannot open fluency corpus: " + corpus.string());
    std::unordered_set<std::string> vocab;
    std::string line;
    while (std::getline(in, line)) {
        auto words = tok_.word.tokenize(normalize_whitespace(line));
        if (words.empty()) continue;
        std::string prev = kBos;
        for (const std::string& w : words) {
            vocab.insert(w);
            unigram_[prev] += 1.0;
            bigram_[prev + kSep + w] += 1.0;
            prev = w;
        }
    }
    vocab_size_ = static_cast<double>(vocab.size()) + 1.0; // +1 for unseen
}

double BigramLmFluency::token_log_prob(const std::string& prev, const std::string& word) const {
    auto ctx = unigram_.find(prev);
    double ctx_count = ctx == unigram_.end() ? 0.0 : ctx->second;
    auto big = bigram_.find(prev + kSep + word);
    double big_count = big == bigram_.end() ? 0.0 : big->second;
    return std::log((big_count + add_k_) / (ctx_count + add_k_ * vocab_size_));
}

std::vector<double> BigramLmFluency::score_tokens(const std::string& text) const {
    std::vector<double> out;
    std::string prev = kBos;
    for (const std::string& w : tok_.word.tokenize(text)) {
        out.push_back(token_log_prob(prev, w));
        prev = w;
    }
    return out;
}

double BowCosineSimilarity::score(const std::string& source, const std::string& compressed) const {
    std::unordered_map<std::string, double> a, b;
    for (const std::string& w : tok_.word.tokenize(source)) a[w] += 1.0;
    for (const std::string& w : tok_.word.tokenize(compressed)) b[w] += 1.0;
    if (a.empty() || b.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [w, c] : a) {
        na += c * c;
        auto it = b.find(w);
        if (it != b.end()) dot += c * it->second;
    }
    for (const auto& [w, c] : b) nb += c * c;
    return dot / std::sqrt(na * nb);
}

const char* kind_name(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::fluency: return "fluency";
        case ComponentKind::bi_sim: return "bi_sim";
        case ComponentKind::cross_sim: return "cross_sim";
        case ComponentKind::nli: return "nli";
        case ComponentKind::gauss_len: return "gauss_len";
        case ComponentKind::gauss_cr: return "gauss_cr";
        case ComponentKind::gazetteer: return "gazetteer";
        case ComponentKind::custom: return "custom";
    }
    return "?";
}

ComponentKind kind_from_name(const std::string& name) {
    for (ComponentKind k :
         {ComponentKind::fluency, ComponentKind::bi_sim, ComponentKind::cross_sim,
          ComponentKind::nli, ComponentKind::gauss_len, ComponentKind::gauss_cr,
          ComponentKind::gazetteer, ComponentKind::custom}) {
        if (name == kind_name(k)) return k;
    }
    throw ContractError("unknown reward component kind: " + name);
}

double gaussian_reward(const GaussianParams& params, double observed) {
    if (!(params.mu > 0.0) || !(params.s > 0.0)) {
        throw ContractError("gaussian reward requires mu > 0 and s > 0");
    }
    double sigma = params.sigma();
    double d = observed - params.mu;
    return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

RewardSpec RewardSpec::from_components(std::vector<RewardComponent> components,
                                       const Tokenizers& tok) {
    std::unordered_set<std::string> names;
    bool has_gauss = false;
    for (const RewardComponent& c : components) {
        if (c.name.empty()) throw ContractError("reward component needs a name");
        if (!names.insert(c.name).second) {
            throw ContractError("duplicate reward component name: " + c.name);
        }
        switch (c.kind) {
            case ComponentKind::fluency:
                if (!c.fluency) throw ContractError(c.name + ": fluency scorer missing");
                if (!(c.fluency->norm_constant() > 0.0)) {
                    throw ContractError(c.name + ": norm_constant must be > 0");
                }
                break;
            case ComponentKind::bi_sim:
            case ComponentKind::cross_sim:
            case ComponentKind::nli:
                if (!c.similarity) throw ContractError(c.name + ": similarity scorer missing");
                break;
            case ComponentKind::gauss_len:
            case ComponentKind::gauss_cr:
                if (has_gauss) {
                    throw ContractError("at most one of gauss_len/gauss_cr may be active");
                }
                has_gauss = true;
                if (!(c.gauss.mu > 0.0) || !(c.gauss.s > 0.0)) {
                    throw ContractError(c.name + ": gaussian mu and s must be > 0");
                }
                break;
            case ComponentKind::gazetteer:
                if (c.gazetteer.empty()) throw ContractError(c.name + ": gazetteer is empty");
                break;
            case ComponentKind::custom:
                if (!c.custom) throw ContractError(c.name + ": custom function missing");
                break;
        }
    }
    RewardSpec spec;
    spec.components_ = std::move(components);
    spec.tok_ = &tok;
    return spec;
}

bool RewardSpec::all_thread_safe() const {
    for (const RewardComponent& c : components_) {
        switch (c.kind) {
            case ComponentKind::fluency:
                if (!c.fluency->thread_safe()) return false;
                break;
            case ComponentKind::bi_sim:
            case ComponentKind::cross_sim:
            case ComponentKind::nli:
                if (!c.similarity->thread_safe()) return false;
                break;
            case ComponentKind::custom:
                if (!c.custom_thread_safe) return false;
                break;
            default:
                break;
        }
    }
    return true;
}

double RewardValue::component(const std::string& name) const {
    for (const auto& [n, v] : components) {
        if (n == name) return v;
    }
    throw ContractError("no reward component named " + name);
}

double fluency_reward(const FluencyScorer& scorer, const corpus::Compression& compression) {
    if (compression.text.empty()) return 0.0;
    std::vector<double> scores = scorer.score_tokens(compression.text);
    if (scores.empty()) return 0.0;
    double sum = 0.0;
    for (double v : scores) sum += v;
    return sum / static_cast<double>(scores.size()) / scorer.norm_constant();
}

double similarity_reward(const SimilarityScorer& scorer, const corpus::SourceSentence& source,
                         const corpus::Compression& compression) {
    if (compression.text.empty()) return 0.0;
    return scorer.score(source.text, compression.text);
}

double gazetteer_reward(const std::unordered_set<std::string>& gazetteer_lower,
                        const corpus::Compression& compression, const Tokenizers& tok) {
    for (const std::string& w : tok.word.tokenize(compression.text)) {
        if (gazetteer_lower.contains(ascii_lower(w))) return 0.0;
    }
    return 1.0;
}

RewardValue aggregate(const RewardSpec& spec, const corpus::SourceSentence& source,
                      const corpus::Compression& compression) {
    RewardValue value;
    double sum = 0.0;
    for (const RewardComponent& c : spec.components()) {
        double v = 0.0;
        try {
            switch (c.kind) {
                case ComponentKind::fluency:
                    v = fluency_reward(*c.fluency, compression);
                    break;
                case ComponentKind::bi_sim:
                case ComponentKind::cross_sim:
                case ComponentKind::nli:
                    v = similarity_reward(*c.similarity, source, compression);
                    break;
                case ComponentKind::gauss_len:
                    v = gaussian_reward(c.gauss, static_cast<double>(compression.kept_word_count));
                    break;
                case ComponentKind::gauss_cr:
                    v = gaussian_reward(c.gauss, compression.compression_ratio);
                    break;
                case ComponentKind::gazetteer:
                    v = gazetteer_reward(c.gazetteer, compression, spec.tokenizers());
                    break;
                case ComponentKind::custom:
                    v = c.custom(source, compression);
                    break;
            }
        } catch (const RewardError&) {
            throw;
        } catch (const std::exception& e) {
            throw RewardError("component '" + c.name + "' failed: " + e.what());
        }
        if (!std::isfinite(v)) {
            throw RewardError("component '" + c.name + "' produced a non-finite value");
        }
        value.components.emplace_back(c.name, v);
        sum += v;
    }
    if (value.components.empty()) throw RewardError("reward spec has no components");
    value.total = sum / static_cast<double>(value.components.size());
    return value;
}

std::vector<RewardValue> batch_rewards(const RewardSpec& spec, const corpus::SourceSentence& source,
                                       std::span<const corpus::LabelSequence> candidates,
                                       int jobs) {
    if (candidates.empty()) throw ContractError("batch_rewards requires candidates");
    std::vector<RewardValue> out(candidates.size());
    auto score_range = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < candidates.size(); i += stride) {
            out[i] = aggregate(spec, source,
                               corpus::render_compression(source, candidates[i],
                                                          spec.tokenizers()));
        }
    };
    if (jobs > 1 && spec.all_thread_safe() && candidates.size() > 1) {
        std::size_t workers = std::min<std::size_t>(jobs, candidates.size());
        std::vector<std::thread> pool;
        std::exception_ptr error;
        std::mutex error_mutex;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    score_range(w, workers);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    } else {
        score_range(0, 1);
    }
    return out;
}

double calibrate_norm_constant(const FluencyScorer& scorer,
                               std::span<const corpus::SourceSentence> sample) {
    if (sample.empty()) throw ContractError("calibration sample is empty");
    double min_avg = 0.0;
    bool any = false;
    for (const corpus::SourceSentence& s : sample) {
        std::vector<double> scores = scorer.score_tokens(s.text);
        if (scores.empty()) continue;
        double sum = 0.0;
        for (double v : scores) sum += v;
        double avg = sum / static_cast<double>(scores.size());
        if (!any || avg < min_avg) min_avg = avg;
        any = true;
    }
    if (!any) throw ContractError("calibration sample produced no token scores");
    double c = std::abs(min_avg);
    if (c < 1e-12) {
        log::warn("observed minimum average score is ~0; defaulting norm constant to 1");
        return 1.0;
    }
    return c;
}

std::unordered_set<std::string> load_gazetteer(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open gazetteer: " + path.string());
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = normalize_whitespace(line);
        if (!w.empty()) out.insert(ascii_lower(w));
    }
    return out;
}

namespace {

std::shared_ptr<FluencyScorer> make_fluency_scorer(const json& cfg, double norm_constant,
                                                   const std::filesystem::path& base_dir,
                                                   const Tokenizers& tok) {
    std::string type = cfg.value("type", std::string{});
    if (type == "constant") {
        return std::make_shared<ConstantFluency>(cfg.value("value", 0.0), norm_constant, tok);
    }
    if (type == "token_table") {
        std::map<std::string, double> scores;
        if (cfg.contains("scores")) {
            for (const auto& [k, v] : cfg["scores"].items()) scores[k] = v.get<double>();
        }
        return std::make_shared<TokenTableFluency>(std::move(scores), cfg.value("default", 0.0),
                                                   norm_constant, tok);
    }
    if (type == "bigram_lm") {
        if (!cfg.contains("corpus")) throw ContractError("bigram_lm scorer needs a corpus path");
        std::filesystem::path corpus = cfg["corpus"].get<std::string>();
        if (corpus.is_relative()) corpus = base_dir / corpus;
        return std::make_shared<BigramLmFluency>(corpus, cfg.value("add_k", 0.1), norm_constant,
                                                 tok);
    }
    throw ContractError("unknown fluency scorer type: '" + type + "'");
}

std::shared_ptr<SimilarityScorer> make_similarity_scorer(const json& cfg, ComponentKind kind) {
    std::string type = cfg.value("type", std::string{});
    if (type == "bow") return std::make_shared<BowCosineSimilarity>();
    if (type == "constant") {
        double v = cfg.value("value", 0.0);
        if (kind == ComponentKind::bi_sim && (v < -1.0 || v > 1.0)) {
            throw ContractError("bi_sim scorer must stay within [-1, 1]");
        }
        return std::make_shared<ConstantSimilarity>(v);
    }
    throw ContractError("unknown similarity scorer type: '" + type + "'");
}

} // namespace

RewardSpec parse_reward_spec(const std::string& json_text, const std::filesystem::path& base_dir,
                             const Tokenizers& tok) {
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded() || !root.is_object() || !root.contains("components") ||
        !root["components"].is_array()) {
        throw ContractError("reward config must be an object with a 'components' array");
    }
    std::vector<RewardComponent> components;
    for (const json& c : root["components"]) {
        if (!c.is_object() || !c.contains("kind")) {
            throw ContractError("each reward component needs a 'kind'");
        }
        RewardComponent comp;
        comp.kind = kind_from_name(c["kind"].get<std::string>());
        comp.name = c.value("name", std::string(kind_name(comp.kind)));
        switch (comp.kind) {
            case ComponentKind::fluency: {
                if (c.value("remask", false)) {
                    throw ContractError(
                        comp.name +
                        ": remask=true needs a masked-LM scorer plugin; built-in scorers "
                        "evaluate realized tokens in place");
                }
                double norm = c.value("norm_constant", 1.0);
                comp.fluency = make_fluency_scorer(c.value("scorer", json::object()), norm,
                                                   base_dir, tok);
                break;
            }
            case ComponentKind::bi_sim:
            case ComponentKind::cross_sim:
            case ComponentKind::nli:
                comp.similarity =
                    make_similarity_scorer(c.value("scorer", json{{"type", "bow"}}), comp.kind);
                break;
            case ComponentKind::gauss_len:
            case ComponentKind::gauss_cr:
                if (!c.contains("mu")) throw ContractError(comp.name + ": gaussian needs mu");
                comp.gauss.mu = c["mu"].get<double>();
                comp.gauss.s = c.value("s", 0.4);
                break;
            case ComponentKind::gazetteer: {
                if (c.contains("path")) {
                    std::filesystem::path p = c["path"].get<std::string>();
                    if (p.is_relative()) p = base_dir / p;
                    comp.gazetteer = load_gazetteer(p);
                } else if (c.contains("words") && c["words"].is_array()) {
                    for (const auto& w : c["words"]) {
                        comp.gazetteer.insert(ascii_lower(w.get<std::string>()));
                    }
                }
                break;
            }
            case ComponentKind::custom:
                throw ContractError("custom reward components are code-only, not configurable");
        }
        components.push_back(std::move(comp));
    }
    return RewardSpec::from_components(std::move(components), tok);
}

RewardSpec load_reward_spec(const std::filesystem::path& path, const Tokenizers& tok) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open reward config: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_reward_spec(ss.str(), path.parent_path(), tok);
}

} // namespace sqz::rewards

#include "skeetrl/reward.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "skeetrl/kernels.hpp"
#include "skeetrl/text.hpp"

namespace skeetrl {

const char* violation_name(QualityViolation v) {
    switch (v) {
        case QualityViolation::empty: return "empty";
        case QualityViolation::too_short: return "too_short";
        case QualityViolation::low_alphabetic: return "low_alphabetic";
        case QualityViolation::refusal: return "refusal";
    }
    return "unknown";
}

// ------------------------ exemplar weighting ------------------------

std::vector<double> min_max_weights(const std::vector<double>& scores) {
    if (scores.empty()) return {};
    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> w(scores.size());
    if (hi == lo) {
        std::fill(w.begin(), w.end(), 0.5);
        return w;
    }
    for (std::size_t i = 0; i < scores.size(); ++i) w[i] = (scores[i] - lo) / (hi - lo);
    return w;
}

std::vector<double> legacy_affine_weights(const std::vector<double>& scores) {
    std::vector<double> w(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        w[i] = std::max(0.1, (scores[i] + 50.0) / 100.0);
    }
    return w;
}

void finalize_exemplars(std::vector<HistoricalExemplar>& pool, const RewardConfig& cfg) {
    std::vector<std::string> texts;
    std::vector<double> scores;
    texts.reserve(pool.size());
    scores.reserve(pool.size());
    for (const HistoricalExemplar& ex : pool) {
        texts.push_back(ex.text);
        scores.push_back(ex.success_score);
    }
    const std::vector<Embedding> embs = kernels::embed_corpus(texts, cfg.embedder);
    const std::vector<double> weights = cfg.weighting == WeightingKind::minmax
                                            ? min_max_weights(scores)
                                            : legacy_affine_weights(scores);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        pool[i].embedding = embs[i];
        pool[i].weight = weights[i];
    }
}

double transfer_reward(const Embedding& candidate,
                       const std::vector<HistoricalExemplar>& exemplars) {
    const std::vector<double> s = kernels::transfer_scores_serial({candidate}, exemplars);
    return s[0];
}

// ------------------------ gates and penalties ------------------------

std::optional<QualityViolation> quality_check(std::string_view response,
                                              const RewardConfig& cfg) {
    if (is_blank(response)) return QualityViolation::empty;
    if (scalar_count(response) < 10) return QualityViolation::too_short;
    std::size_t alpha = 0, nonspace = 0;
    for (char32_t c : utf8_scalars(response)) {
        const bool space = c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' ||
                           c == U'\f' || c == U'\v';
        if (space) continue;
        ++nonspace;
        if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) ++alpha;
    }
    if (nonspace > 0 &&
        static_cast<double>(alpha) / static_cast<double>(nonspace) < 0.75) {
        return QualityViolation::low_alphabetic;
    }
    for (const std::string& phrase : cfg.refusal_phrases) {
        if (contains_ci(response, phrase)) return QualityViolation::refusal;
    }
    return std::nullopt;
}

bool is_echo(std::string_view response, std::string_view prompt, const RewardConfig& cfg) {
    const auto matches = [&](std::string_view needle) {
        return scalar_count(needle) >= cfg.echo_min_scalars && contains_ci(response, needle);
    };
    if (matches(prompt)) return true;
    for (const std::string& frag : cfg.echo_fragments) {
        if (matches(frag)) return true;
    }
    return false;
}

double ngram_repetition_ratio(std::string_view text) {
    const std::vector<std::string> toks = whitespace_tokens(text);
    std::unordered_map<std::string, int> counts;
    std::size_t total = 0;
    for (std::size_t n = 3; n <= 4; ++n) {
        if (toks.size() < n) break;
        for (std::size_t i = 0; i + n <= toks.size(); ++i) {
            std::string key;
            for (std::size_t k = 0; k < n; ++k) {
                key += toks[i + k];
                key += '\x1f';
            }
            ++counts[key];
            ++total;
        }
    }
    if (total == 0) return 0.0;
    std::size_t repeated = 0;
    for (const auto& [key, c] : counts) {
        if (c >= 2) repeated += static_cast<std::size_t>(c);
    }
    return static_cast<double>(repeated) / static_cast<double>(total);
}

static bool is_quote_dash(const std::string& tok) {
    if (tok.empty()) return false;
    if (tok[0] == '-') return true;
    return (tok[0] == '"' || tok[0] == '\'') && tok.size() > 1 && tok[1] == '-';
}

bool has_pattern_artifact(std::string_view text) {
    const std::vector<std::string> toks = whitespace_tokens(text);
    std::size_t run = 1, dashes = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i > 0 && toks[i] == toks[i - 1]) {
            if (++run >= 3) return true;
        } else {
            run = 1;
        }
        if (is_quote_dash(toks[i])) ++dashes;
    }
    return dashes >= 3;
}

double repetition_penalty(std::string_view text, const PenaltyConfig& cfg) {
    double p = 0.0;
    if (ngram_repetition_ratio(text) > cfg.repetition_ratio) p += cfg.repetition;
    if (has_pattern_artifact(text)) p += cfg.pattern;
    return p;
}

// ------------------------ batch scoring ------------------------

ScoreResult compute_rewards(std::string_view prompt, const std::vector<std::string>& responses,
                            const std::vector<HistoricalExemplar>& exemplars,
                            const RewardConfig& cfg) {
    ScoreResult res;
    res.embeddings = kernels::embed_corpus(responses, cfg.embedder);
    res.breakdowns.resize(responses.size());

    const std::vector<double> base = kernels::transfer_scores(res.embeddings, exemplars);
    const std::vector<double> maxsim = kernels::max_pair_similarity(res.embeddings);

    for (std::size_t i = 0; i < responses.size(); ++i) {
        RewardBreakdown& b = res.breakdowns[i];
        const auto violation = quality_check(responses[i], cfg);
        if (violation) {
            // The quality gate short-circuits: flat -1.0, no stacking.
            b.quality_violation = violation;
            b.total = -1.0;
            continue;
        }
        b.base_transfer = base[i];

        const PenaltyConfig& pc = cfg.penalties;
        double sum = 0.0;
        if (is_echo(responses[i], prompt, cfg)) {
            b.penalties["anti_echo"] = pc.anti_echo;
            sum += pc.anti_echo;
        }
        if (responses.size() >= 2 && maxsim[i] > pc.diversity_threshold) {
            b.penalties["diversity"] = pc.diversity;
            sum += pc.diversity;
        }
        if (ngram_repetition_ratio(responses[i]) > pc.repetition_ratio) {
            b.penalties["repetition"] = pc.repetition;
            sum += pc.repetition;
        }
        if (has_pattern_artifact(responses[i])) {
            b.penalties["pattern"] = pc.pattern;
            sum += pc.pattern;
        }
        b.capped = sum <= pc.max_stacked;
        const double floored = std::max(sum, pc.max_stacked);
        b.total = std::clamp(b.base_transfer + floored, -1.0, 1.0);
    }
    return res;
}

// ------------------------ registry ------------------------

namespace {

class TransferPenaltiesReward final : public RewardFunction {
  public:
    explicit TransferPenaltiesReward(RewardConfig cfg) : cfg_(std::move(cfg)) {}
    ScoreResult score(std::string_view prompt, const std::vector<std::string>& responses,
                      const std::vector<HistoricalExemplar>& exemplars) const override {
        return compute_rewards(prompt, responses, exemplars, cfg_);
    }

  private:
    RewardConfig cfg_;
};

std::map<std::string, RewardFactory>& registry() {
    static std::map<std::string, RewardFactory> r = {
        {"transfer_penalties",
         [](const RewardConfig& cfg) -> std::unique_ptr<RewardFunction> {
             return std::make_unique<TransferPenaltiesReward>(cfg);
         }},
    };
    return r;
}

}  // namespace

void register_reward(const std::string& name, RewardFactory factory) {
    registry()[name] = std::move(factory);
}

std::unique_ptr<RewardFunction> make_reward(const std::string& name, const RewardConfig& cfg) {
    const auto it = registry().find(name);
    if (it == registry().end()) {
        std::string known;
        for (const auto& [n, f] : registry()) {
            if (!known.empty()) known += ", ";
            known += n;
        }
        throw std::runtime_error("reward: unknown function '" + name + "' (known: " + known + ")");
    }
    return it->second(cfg);
}

std::vector<std::string> reward_names() {
    std::vector<std::string> names;
    for (const auto& [n, f] : registry()) names.push_back(n);
    return names;
}

}  // namespace skeetrl

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skeetrl/embedding.hpp"

namespace skeetrl {

struct HistoricalExemplar {
    std::string text;
    double success_score = 0.0;  // baseline-normalized engagement
    Embedding embedding;
    double weight = 0.0;  // derived from success scores, see min_max_weights
};

enum class QualityViolation { empty, too_short, low_alphabetic, refusal };
const char* violation_name(QualityViolation v);

struct PenaltyConfig {
    double anti_echo = -0.2;
    double diversity = -0.1;
    double repetition = -0.15;
    double pattern = -0.2;
    double empty = -0.2;  // kept for config fidelity; the quality gate owns empties
    double max_stacked = -0.65;
    double diversity_threshold = 0.9;   // pairwise cosine above this is "same post"
    double repetition_ratio = 0.30;     // n-gram repeat ratio above this is spam
};

enum class WeightingKind { minmax, legacy_affine };

struct RewardConfig {
    PenaltyConfig penalties;
    WeightingKind weighting = WeightingKind::minmax;
    double penalty_ratio_limit = 0.5;
    std::size_t echo_min_scalars = 20;
    std::vector<std::string> refusal_phrases = {"i'm sorry", "i cannot", "i can't", "as an ai"};
    std::vector<std::string> echo_fragments = {
        "You are an AI assistant. Your task is to write a skeet"};
    EmbedderSpec embedder;
};

// quality_violation set means total is exactly -1.0 and nothing else applies.
struct RewardBreakdown {
    double base_transfer = 0.0;
    std::optional<QualityViolation> quality_violation;
    std::map<std::string, double> penalties;  // only the penalties that fired
    double total = 0.0;
    bool capped = false;  // stacked penalties hit max_stacked
};

// ------------------------ exemplar weighting ------------------------

// (s - min) / (max - min); a constant score vector maps to all 0.5 so equal
// history still transfers at half strength instead of dividing by zero.
std::vector<double> min_max_weights(const std::vector<double>& scores);

// Affine fallback from the earlier reward revision: max(0.1, (s + 50) / 100).
std::vector<double> legacy_affine_weights(const std::vector<double>& scores);

// Embeds exemplar texts and assigns weights from their success scores.
void finalize_exemplars(std::vector<HistoricalExemplar>& pool, const RewardConfig& cfg);

// max over exemplars of cosine(candidate, exemplar) * weight, floored at 0.
// Empty pool -> 0.0.
double transfer_reward(const Embedding& candidate,
                       const std::vector<HistoricalExemplar>& exemplars);

// ------------------------ gates and penalties ------------------------

// Checked in order: empty, too_short (< 10 scalars), low_alphabetic
// (ASCII letters / non-whitespace scalars < 0.75), refusal phrase.
std::optional<QualityViolation> quality_check(std::string_view response,
                                              const RewardConfig& cfg);

// Fires when the response contains the prompt or a configured system-prompt
// fragment as a contiguous case-insensitive substring of >= echo_min_scalars.
bool is_echo(std::string_view response, std::string_view prompt, const RewardConfig& cfg);

// Share of 3- and 4-gram occurrences that belong to a gram appearing more
// than once. Whitespace tokens, no normalization.
double ngram_repetition_ratio(std::string_view text);

// A token repeated >= 3 times consecutively, or >= 3 quote-dash tokens.
bool has_pattern_artifact(std::string_view text);

// n-gram and pattern components summed, each gated by its own trigger.
double repetition_penalty(std::string_view text, const PenaltyConfig& cfg);

// ------------------------ batch scoring ------------------------

struct ScoreResult {
    std::vector<RewardBreakdown> breakdowns;
    std::vector<Embedding> embeddings;  // one per response, reusable by callers
};

ScoreResult compute_rewards(std::string_view prompt, const std::vector<std::string>& responses,
                            const std::vector<HistoricalExemplar>& exemplars,
                            const RewardConfig& cfg);

// ------------------------ registry ------------------------

class RewardFunction {
  public:
    virtual ~RewardFunction() = default;
    virtual ScoreResult score(std::string_view prompt, const std::vector<std::string>& responses,
                              const std::vector<HistoricalExemplar>& exemplars) const = 0;
};

using RewardFactory =
    std::function<std::unique_ptr<RewardFunction>(const RewardConfig&)>;

void register_reward(const std::string& name, RewardFactory factory);
std::unique_ptr<RewardFunction> make_reward(const std::string& name, const RewardConfig& cfg);
std::vector<std::string> reward_names();

}  // namespace skeetrl

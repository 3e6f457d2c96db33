#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "skeetrl/gspo.hpp"

namespace skeetrl {

struct ArticleContext {
    std::string url;
    std::string title;
    std::string domain;  // host part of url
};

std::string domain_of(std::string_view url);

// ------------------------ action templates ------------------------

// The discrete action space: 32 fixed post templates. Placeholders {title},
// {url}, {domain} and {prompt} are substituted at render time. The tail of
// the list is deliberately degenerate (echo, repetition, junk) so every
// penalty and quality gate has a live target the policy can fall into.
struct ResponseTemplate {
    std::string name;
    std::string pattern;
};

const std::vector<ResponseTemplate>& action_templates();
inline constexpr int kNumActions = 32;

// Indices of templates that render degenerate output; historical exemplar
// pools are built from the remaining "human" templates.
const std::vector<int>& trap_actions();

std::string render_template(const ResponseTemplate& tpl, const ArticleContext& ctx,
                            std::string_view prompt, std::size_t max_scalars, bool* truncated);

// ------------------------ prompts ------------------------

// Base task prompt plus the 8 rotating variants (base + 7 suffixes).
std::string base_prompt(const ArticleContext& ctx);
const std::vector<std::string>& prompt_variants();
std::string prompt_for(const ArticleContext& ctx, int variant);

// ------------------------ policy ------------------------

struct SamplingConfig {
    double temperature = 0.9;
    double top_p = 0.95;
    int top_k = 50;
    int max_tokens = 150;  // rendered-length cap in scalars
};

// Linear softmax policy over the fixed template set: logits = params^T x.
struct ToyPolicy {
    int n_features = 0;
    int n_actions = 0;
    double temperature = 1.0;  // the policy's own distribution temperature
    std::vector<double> params;  // row-major [feature][action]

    static ToyPolicy zeros(int n_features, int n_actions);
    double& at(int f, int a) { return params[static_cast<std::size_t>(f) * n_actions + a]; }
    double at(int f, int a) const { return params[static_cast<std::size_t>(f) * n_actions + a]; }
};

std::vector<double> logits_of(const ToyPolicy& p, const std::vector<double>& features);

// softmax(params^T x / temperature); strictly positive, sums to 1.
std::vector<double> action_distribution(const ToyPolicy& p, const std::vector<double>& features);

struct Rollout {
    int task_id = 0;
    int prompt_variant = 0;
    std::string prompt;
    std::vector<int> actions;
    std::vector<std::string> responses;
    std::vector<double> logprobs;  // log pi(a|x) under the policy's own temperature
    std::vector<char> truncated;
};

// n draws from the temperature/top_k/top_p-restricted, renormalized
// distribution. temperature <= 0 or top_k == 1 degrade to greedy argmax.
Rollout sample_responses(const ToyPolicy& p, const std::vector<double>& features,
                         const ArticleContext& ctx, int task_id, int n,
                         const SamplingConfig& sampling, int prompt_variant,
                         std::mt19937_64& rng);

// The restricted distribution itself, exposed for tests: pairs of
// (action, probability) in draw order after top_k/top_p renormalization.
std::vector<std::pair<int, double>> restricted_distribution(
    const ToyPolicy& p, const std::vector<double>& features, const SamplingConfig& sampling);

// Exact KL(p || q) over the discrete action space, each policy at its own
// temperature. Never negative.
double exact_kl(const ToyPolicy& p, const ToyPolicy& q, const std::vector<double>& features);

// ------------------------ loss and gradient ------------------------

struct LossGrad {
    double loss = 0.0;
    double kl = 0.0;
    std::vector<double> grad;  // same layout as ToyPolicy::params
};

// policy_loss with the KL term recomputed from (policy, reference) at the
// given features so its gradient flows through the current policy only.
// Advantages are stop-gradient constants.
LossGrad loss_and_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                           const std::vector<double>& features, const std::vector<int>& actions,
                           const std::vector<double>& advantages, const GspoConfig& cfg);

// ------------------------ checkpoints ------------------------

// Flat text matrix: "n_features n_actions step" header then one row per
// feature with full-precision values.
void save_checkpoint(const std::string& path, const ToyPolicy& p, int step);
ToyPolicy load_checkpoint(const std::string& path, int* step_out = nullptr);

}  // namespace skeetrl

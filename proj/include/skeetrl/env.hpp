#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "skeetrl/engagement.hpp"
#include "skeetrl/policy.hpp"
#include "skeetrl/records.hpp"

namespace skeetrl {

struct SyntheticEnvConfig {
    int n_contexts = 12;
    int n_users = 20;
    int posts_per_user = 50;
    double noise_scale = 0.5;
    double bias_min = 0.2;  // user bias multipliers, log-uniform
    double bias_max = 5.0;
    std::uint64_t seed = 42;
};

// A closed world to exercise the stack without a network: articles with a
// hidden per-(context, action) quality, users with engagement-rate biases,
// and count noise. Raw engagement confounds quality with user bias; the
// baseline normalization is supposed to undo exactly that.
struct SyntheticEnv {
    SyntheticEnvConfig cfg;
    int n_actions = 0;
    std::vector<ArticleContext> contexts;
    std::vector<double> quality;    // [ctx * n_actions + action], in [0, 1]
    std::vector<double> user_bias;  // positive multipliers
    std::mt19937_64 noise_rng;

    static SyntheticEnv make(const SyntheticEnvConfig& cfg, int n_actions);
    double latent_quality(int ctx, int action) const;
};

// Engagement counts for one post: channel = round(max(0, bias * quality*10 *
// channel_factor + gaussian noise)), factors 1.0 / 0.4 / 0.2 for likes /
// replies / reposts. Draws three noise values from env.noise_rng per call.
EngagementCounts synth_engagement(SyntheticEnv& env, int ctx, int action, int user);

struct SyntheticPost {
    int user = 0;
    int ctx = 0;
    int action = 0;
    double quality = 0.0;
    EngagementCounts counts;
    double raw_composite = 0.0;
    double normalized = 0.0;  // raw minus the user's prefix baseline
    std::string text;
};

// Simulates every user's posting history in order. Actions are drawn from
// the non-trap templates (people do not post junk on purpose). Each post's
// baseline is the mean of the user's previous `baseline_window` composites,
// 0 when the user has no history yet.
std::vector<SyntheticPost> simulate_posts(SyntheticEnv& env, const EngagementWeights& w,
                                          int baseline_window);

}  // namespace skeetrl

#pragma once

#include <vector>

namespace skeetrl {

struct GspoConfig {
    double epsilon = 1e-8;         // std divisor guard
    double clip = 3.0;             // advantage clip bound
    double variance_floor = 1e-6;  // std below this is a degenerate group
    double kl_target = 0.01;       // free KL budget
    double kl_weight = 0.1;
};

struct AdvantageGroup {
    std::vector<double> rewards;
    double mean = 0.0;
    double std_dev = 0.0;  // population std
    std::vector<double> advantages;  // z-scores clipped to [-clip, clip]
    bool degenerate = false;         // std under the floor; advantages all 0
};

// Group-relative z-score advantages. Throws when the group has < 2 rewards.
AdvantageGroup compute_advantages(const std::vector<double>& rewards, const GspoConfig& cfg);

// kl_weight * max(0, kl - kl_target): only divergence beyond the budget costs.
double kl_loss(double kl_value, const GspoConfig& cfg);

// -(1/n) * sum(A_i * logprob_i) + kl_loss. Advantages are treated as
// constants; only logprobs carry gradient. Throws on length mismatch.
double policy_loss(const std::vector<double>& advantages, const std::vector<double>& logprobs,
                   double kl_value, const GspoConfig& cfg);

}  // namespace skeetrl

#include "skeetrl/gspo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skeetrl {

AdvantageGroup compute_advantages(const std::vector<double>& rewards, const GspoConfig& cfg) {
    if (rewards.size() < 2) {
        throw std::invalid_argument("compute_advantages: need at least 2 rewards");
    }
    AdvantageGroup g;
    g.rewards = rewards;
    const double n = static_cast<double>(rewards.size());
    double sum = 0.0;
    for (double r : rewards) sum += r;
    g.mean = sum / n;
    double sq = 0.0;
    for (double r : rewards) sq += (r - g.mean) * (r - g.mean);
    g.std_dev = std::sqrt(sq / n);

    g.advantages.assign(rewards.size(), 0.0);
    if (g.std_dev < cfg.variance_floor) {
        // No signal in the group; a zero update beats amplified noise.
        g.degenerate = true;
        return g;
    }
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        const double z = (rewards[i] - g.mean) / (g.std_dev + cfg.epsilon);
        g.advantages[i] = std::clamp(z, -cfg.clip, cfg.clip);
    }
    return g;
}

double kl_loss(double kl_value, const GspoConfig& cfg) {
    return cfg.kl_weight * std::max(0.0, kl_value - cfg.kl_target);
}

double policy_loss(const std::vector<double>& advantages, const std::vector<double>& logprobs,
                   double kl_value, const GspoConfig& cfg) {
    if (advantages.size() != logprobs.size() || advantages.empty()) {
        throw std::invalid_argument("policy_loss: advantage/logprob length mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < advantages.size(); ++i) s += advantages[i] * logprobs[i];
    return -s / static_cast<double>(advantages.size()) + kl_loss(kl_value, cfg);
}

}  // namespace skeetrl

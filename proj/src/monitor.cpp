#include "skeetrl/monitor.hpp"

#include <cmath>

namespace skeetrl {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::learning: return "learning";
        case Phase::convergence: return "convergence";
        case Phase::collapse: return "collapse";
    }
    return "unknown";
}

Phase classify_phase(double reward_variance, double diversity, const MonitorConfig& cfg) {
    if (reward_variance < cfg.collapse_var && diversity < cfg.collapse_div) {
        return Phase::collapse;
    }
    if (reward_variance < cfg.convergence_var) return Phase::convergence;
    return Phase::learning;
}

Phase Monitor::update(const std::vector<double>& batch_rewards, double diversity) {
    double var = 0.0;
    if (!batch_rewards.empty()) {
        double mean = 0.0;
        for (double r : batch_rewards) mean += r;
        mean /= static_cast<double>(batch_rewards.size());
        for (double r : batch_rewards) var += (r - mean) * (r - mean);
        var /= static_cast<double>(batch_rewards.size());
    }
    const Phase p = classify_phase(var, diversity, cfg_);
    variances_.push_back(var);
    diversities_.push_back(diversity);
    phases_.push_back(p);
    return p;
}

bool Monitor::should_stop() const {
    if (cfg_.patience <= 0) return false;
    if (phases_.size() < static_cast<std::size_t>(cfg_.patience)) return false;
    for (std::size_t i = phases_.size() - static_cast<std::size_t>(cfg_.patience);
         i < phases_.size(); ++i) {
        if (phases_[i] != Phase::collapse) return false;
    }
    return true;
}

double penalty_ratio(const std::vector<RewardBreakdown>& breakdowns) {
    double pen_sum = 0.0, base_sum = 0.0;
    std::size_t pen_n = 0, base_n = 0;
    for (const RewardBreakdown& b : breakdowns) {
        if (b.quality_violation) continue;
        if (!b.penalties.empty()) {
            // The floored stack is what actually hit the total.
            pen_sum += b.total - b.base_transfer;
            ++pen_n;
        }
        if (b.base_transfer > 0.0) {
            base_sum += b.base_transfer;
            ++base_n;
        }
    }
    if (pen_n == 0) return 0.0;
    const double mean_pen = pen_sum / static_cast<double>(pen_n);
    const double mean_base = base_n > 0 ? base_sum / static_cast<double>(base_n) : 0.0;
    return std::fabs(mean_pen) / std::max(mean_base, 1e-6);
}

bool penalty_ratio_flag(const std::vector<RewardBreakdown>& breakdowns, double limit) {
    return penalty_ratio(breakdowns) > limit;
}

const std::vector<ReferenceTrace>& reference_traces() {
    // Eight-sample reward groups from the three observed training regimes:
    // healthy exploration, tightening around a mode, and full collapse.
    static const std::vector<ReferenceTrace> traces = {
        {"phase1_learning",
         {0.48, 0.35, 0.41, 0.21, 0.37, 0.37, 0.39, 0.33},
         0.8,
         Phase::convergence},
        {"phase2_tightening",
         {0.37, 0.35, 0.35, 0.35, 0.38, 0.38, 0.35, 0.35},
         0.3,
         Phase::convergence},
        {"phase3_collapse",
         {0.35, 0.35, 0.35, 0.35, 0.35, 0.35, 0.35, 0.35},
         0.0,
         Phase::collapse},
    };
    return traces;
}

}  // namespace skeetrl

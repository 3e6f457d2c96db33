#pragma once

#include <string>
#include <vector>

#include "skeetrl/reward.hpp"

namespace skeetrl {

enum class Phase { learning, convergence, collapse };
const char* phase_name(Phase p);

struct MonitorConfig {
    double collapse_var = 0.01;   // reward variance below this AND
    double collapse_div = 0.1;    // diversity below this -> collapse
    double convergence_var = 0.1; // reward variance below this -> convergence
    int patience = 3;             // consecutive collapses before stopping
};

// Pure classification: collapse needs both signals, convergence only the
// variance one, everything else is still learning.
Phase classify_phase(double reward_variance, double diversity, const MonitorConfig& cfg);

class Monitor {
  public:
    explicit Monitor(MonitorConfig cfg) : cfg_(cfg) {}

    // Appends one step's population reward variance and diversity, returns
    // the phase label for that step.
    Phase update(const std::vector<double>& batch_rewards, double diversity);

    // True after `patience` consecutive collapse labels.
    bool should_stop() const;

    const std::vector<double>& variances() const { return variances_; }
    const std::vector<double>& diversities() const { return diversities_; }
    const std::vector<Phase>& phases() const { return phases_; }

  private:
    MonitorConfig cfg_;
    std::vector<double> variances_;
    std::vector<double> diversities_;
    std::vector<Phase> phases_;
};

// |mean applied penalty| / max(mean positive base transfer, 1e-6). Means are
// over the breakdowns that actually carry a penalty (resp. a positive base);
// no penalties anywhere -> 0.
double penalty_ratio(const std::vector<RewardBreakdown>& breakdowns);
bool penalty_ratio_flag(const std::vector<RewardBreakdown>& breakdowns, double limit);

// Reference traces with known labels, kept as an executable regression
// anchor for the classifier thresholds.
struct ReferenceTrace {
    std::string name;
    std::vector<double> rewards;
    double diversity = 0.0;
    Phase expected = Phase::learning;
};
const std::vector<ReferenceTrace>& reference_traces();

}  // namespace skeetrl

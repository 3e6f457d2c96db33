#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace skeetrl {

struct UedConfig {
    double decay_tau = 100.0;      // steps for priority to decay by e^-1
    double easy_mix = 0.05;        // share of draws forced onto easy tasks
    double regret_scale = 0.5;
    double clip = 3.0;
    double epsilon = 1e-8;
    double variance_floor = 1e-6;  // std floor for the 3-element group
    std::size_t capacity = 256;
    int phase_steps = 15;
};

struct RegretInputs {
    double best = 0.0;  // best reward in the policy's group
    double avg = 0.0;   // the group's mean reward
    double rho = 0.0;   // frozen reference policy's average reward, same task
};

// raw regret = best - avg, z-scored against the population stats of the
// 3-element group {best, avg, rho}, scaled by regret_scale, clipped to
// [-clip, clip]. A group with std under the floor has no signal: 0.
double regret(const RegretInputs& in, const UedConfig& cfg);

// Lazy exponential decay, applied at read time: priority * exp(-delta/tau).
double decayed_priority(double priority, int updated_step, int now_step, double decay_tau);

struct UedTask {
    int id = 0;
    int task_index = 0;      // caller's index into its task table
    int prompt_variant = 0;
    double priority = 0.0;
    int updated_step = 0;
    bool is_easy = false;    // top-decile exemplar success, flagged at build
};

// Insertion-ordered buffer with priority-proportional sampling. Iteration
// and sampling order are deterministic for a fixed rng stream.
class TaskBuffer {
  public:
    explicit TaskBuffer(UedConfig cfg) : cfg_(cfg) {}

    // Inserts (or replaces by id). On overflow evicts the lowest decayed
    // priority, oldest first on ties.
    void insert(UedTask task, int now_step);

    // priority = max(0, regret_value); records the step for lazy decay.
    void update_priority(int id, double regret_value, int now_step);

    const UedTask* find(int id) const;
    std::size_t size() const { return tasks_.size(); }
    const std::vector<UedTask>& tasks() const { return tasks_; }

    // With probability easy_mix, uniform over easy tasks (falls through when
    // none exist); otherwise proportional to decayed priority, uniform over
    // everything when all priorities have decayed to nothing.
    const UedTask& sample(int now_step, std::mt19937_64& rng) const;

  private:
    UedConfig cfg_;
    std::vector<UedTask> tasks_;
};

}  // namespace skeetrl

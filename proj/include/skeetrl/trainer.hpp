#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "skeetrl/config.hpp"
#include "skeetrl/env.hpp"
#include "skeetrl/monitor.hpp"
#include "skeetrl/policy.hpp"
#include "skeetrl/records.hpp"
#include "skeetrl/reward.hpp"
#include "skeetrl/ued.hpp"

namespace skeetrl {

// One trainable unit: an article context, its feature vector and the
// historical exemplar pool the reward engine scores against.
struct TrainTask {
    int id = 0;
    ArticleContext article;
    std::vector<double> features;
    std::vector<HistoricalExemplar> exemplars;
    double top_success = 0.0;  // best exemplar success score in the pool
    bool easy = false;         // top decile of top_success across tasks
};

// Feature layout: one-hot over the sorted domain vocabulary, then a bias 1.
std::vector<std::string> domain_vocabulary(const std::vector<ArticleContext>& articles);
std::vector<double> features_for(const std::string& domain,
                                 const std::vector<std::string>& vocab);

std::vector<TrainTask> tasks_from_dataset(const TrainingDataset& ds, const RunConfig& cfg);
std::vector<TrainTask> tasks_from_env(SyntheticEnv& env, const RunConfig& cfg);

struct StepRecord {
    int step = 0;
    double loss = 0.0;
    double reward_mean = 0.0;
    double reward_var = 0.0;
    double diversity = 0.0;
    double kl = 0.0;
    Phase phase = Phase::learning;
    int task_id = 0;
    bool penalty_flagged = false;
    bool ued = false;
    double regret = 0.0;  // meaningful only when ued
};

struct TrainingReport {
    std::vector<StepRecord> steps;
    std::string stop_reason;  // "max_steps" or "collapse_early_stop"
    int optimizer_updates = 0;
};

class Trainer {
  public:
    Trainer(const RunConfig& cfg, std::vector<TrainTask> tasks);

    // Standard loop: one task group per step, optimizer update every
    // gradient_accumulation_steps steps, cosine-decayed learning rate.
    // Stops early when the monitor sees `patience` consecutive collapses.
    TrainingReport run(int max_steps);

    // Regret-driven phase: prioritized task draws, one undecayed update per
    // step. Freezes the current policy as the reference (KL anchor and the
    // rho rollout policy) at phase start.
    TrainingReport run_ued_phase(int steps);

    ToyPolicy& policy() { return policy_; }
    const ToyPolicy& policy() const { return policy_; }
    const std::vector<TrainTask>& tasks() const { return tasks_; }
    TaskBuffer& buffer() { return buffer_; }
    Monitor& monitor() { return monitor_; }
    int global_step() const { return global_step_; }

    void freeze_reference() { reference_ = policy_; }

    // When set, run()/run_ued_phase() drop checkpoints every save_steps.
    void set_output_dir(std::string dir) { output_dir_ = std::move(dir); }

  private:
    struct MicroResult {
        double loss = 0.0, kl = 0.0, diversity = 0.0, regret = 0.0;
        std::vector<double> rewards;
        std::vector<double> grad;
        bool penalty_flagged = false;
    };
    MicroResult micro_batch(const TrainTask& task, int variant, bool ued_mode);
    void accumulate(const std::vector<double>& grad);
    void apply_update(double lr);
    double cosine_lr(int update_index, int total_updates) const;
    void maybe_checkpoint();

    RunConfig cfg_;
    std::vector<TrainTask> tasks_;
    ToyPolicy policy_;
    ToyPolicy reference_;
    std::unique_ptr<RewardFunction> reward_;
    Monitor monitor_;
    TaskBuffer buffer_;
    std::string output_dir_;

    std::mt19937_64 task_rng_, sample_rng_, ued_rng_, rho_rng_;
    std::vector<double> grad_accum_;
    int accum_count_ = 0;
    int updates_done_ = 0;
    int global_step_ = 0;
    int variant_counter_ = 0;

    std::vector<double> adam_m_, adam_v_;
    int adam_t_ = 0;
};

// ------------------------ reporting ------------------------

void write_report_jsonl(const std::string& path, const TrainingReport& report);
void write_summary_json(const std::string& path, const TrainingReport& report,
                        const RunConfig& cfg, const std::string& final_checkpoint);

// ------------------------ evaluation ------------------------

struct EvalMetrics {
    int n = 0;
    double repetition_rate = 0.0;  // fraction with a nonzero n-gram repetition component
    double completion_rate = 0.0;  // fraction not truncated by the length cap
    double mean_total_reward = 0.0;
    double mean_diversity = 0.0;   // batch diversity across all eval responses
};

// One greedy response per task, scored against that task's exemplars.
EvalMetrics evaluate(const ToyPolicy& policy, const std::vector<TrainTask>& tasks,
                     const RunConfig& cfg);

}  // namespace skeetrl

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "skeetrl/embedding.hpp"
#include "skeetrl/engagement.hpp"
#include "skeetrl/env.hpp"
#include "skeetrl/gspo.hpp"
#include "skeetrl/monitor.hpp"
#include "skeetrl/policy.hpp"
#include "skeetrl/reward.hpp"
#include "skeetrl/ued.hpp"

namespace skeetrl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One run, one document. Unknown keys are load errors, not warnings: a
// misspelled knob must fail loudly instead of silently training on defaults.
struct RunConfig {
    std::string model_name = "toy-softmax";
    std::string run_name = "engagement-run";
    std::string output_dir = "runs/out";

    std::uint64_t seed = 42;
    int max_steps = 200;
    double learning_rate = 5e-6;
    int batch_size = 1;
    int gradient_accumulation_steps = 8;
    int num_epochs = 1;
    int max_completion_length = 150;
    int save_steps = 20;
    int logging_steps = 1;
    int num_generations = 8;
    double max_grad_norm = 0.3;
    std::string optimizer = "sgd";  // sgd | adam
    bool use_ued = false;

    std::string source = "synthetic";  // synthetic | csv
    std::string data_dir = "data";
    int sample_size = 100;
    int min_skeets = 3;
    bool low_skeets_only = false;

    SamplingConfig sampling_train{0.9, 0.95, 50, 150};
    SamplingConfig sampling_infer{0.7, 0.9, 50, 150};

    EngagementWeights weights;
    int baseline_window = 5;

    std::string reward_function = "transfer_penalties";
    RewardConfig reward;  // reward.embedder mirrors the embedding block
    GspoConfig gspo;
    UedConfig ued;
    MonitorConfig monitor;
    SyntheticEnvConfig env;  // env.seed defaults to the run seed
};

// Parse + validate. Hard problems throw ConfigError; soft ones (the penalty
// ratio audit) append to `warnings` when given.
RunConfig parse_config(const std::string& yaml_text, std::vector<std::string>* warnings);
RunConfig load_config(const std::string& path, std::vector<std::string>* warnings);

// Full document with every key explicit; load(config_to_yaml(c)) == c.
std::string config_to_yaml(const RunConfig& cfg);

// Validation separated out so programmatically-built configs go through the
// same gate. Throws ConfigError; appends audit warnings.
void validate_config(const RunConfig& cfg, std::vector<std::string>* warnings);

}  // namespace skeetrl

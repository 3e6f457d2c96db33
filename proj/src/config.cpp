#include "skeetrl/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace skeetrl {

namespace {

// Wraps one mapping node: typed reads mark keys as consumed, finish() turns
// anything left over into a hard error with its dotted path.
class Block {
  public:
    Block(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
        if (node_ && !node_.IsMap()) {
            throw ConfigError("config: '" + path_ + "' must be a mapping");
        }
    }

    bool has(const std::string& key) const { return node_ && node_[key].IsDefined(); }

    template <typename T>
    void read(const std::string& key, T* out) {
        if (!has(key)) return;
        seen_.insert(key);
        try {
            *out = node_[key].as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError("config: bad value for '" + dotted(key) + "'");
        }
    }

    void read_list(const std::string& key, std::vector<std::string>* out) {
        if (!has(key)) return;
        seen_.insert(key);
        const YAML::Node n = node_[key];
        if (!n.IsSequence()) {
            throw ConfigError("config: '" + dotted(key) + "' must be a list");
        }
        out->clear();
        for (const auto& item : n) out->push_back(item.as<std::string>());
    }

    Block block(const std::string& key) {
        seen_.insert(key);
        return Block(node_ ? node_[key] : YAML::Node(YAML::NodeType::Undefined), dotted(key));
    }

    void finish() const {
        if (!node_) return;
        for (const auto& kv : node_) {
            const std::string key = kv.first.as<std::string>();
            if (!seen_.count(key)) {
                throw ConfigError("config: unknown key '" + dotted(key) + "'");
            }
        }
    }

    std::string dotted(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

  private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text, std::vector<std::string>* warnings) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config: yaml parse error: ") + e.what());
    }
    if (root.IsNull() || !root.IsDefined()) root = YAML::Node(YAML::NodeType::Map);

    RunConfig cfg;
    Block top(root, "");

    top.read("model_name", &cfg.model_name);
    top.read("run_name", &cfg.run_name);
    top.read("output_dir", &cfg.output_dir);
    top.read("seed", &cfg.seed);
    top.read("max_steps", &cfg.max_steps);
    top.read("learning_rate", &cfg.learning_rate);
    top.read("batch_size", &cfg.batch_size);
    top.read("gradient_accumulation_steps", &cfg.gradient_accumulation_steps);
    top.read("num_epochs", &cfg.num_epochs);
    top.read("max_completion_length", &cfg.max_completion_length);
    top.read("save_steps", &cfg.save_steps);
    top.read("logging_steps", &cfg.logging_steps);
    top.read("num_generations", &cfg.num_generations);
    top.read("max_grad_norm", &cfg.max_grad_norm);
    top.read("optimizer", &cfg.optimizer);
    top.read("use_ued", &cfg.use_ued);
    top.read("source", &cfg.source);
    top.read("data_dir", &cfg.data_dir);
    top.read("sample_size", &cfg.sample_size);
    top.read("min_skeets", &cfg.min_skeets);
    top.read("low_skeets_only", &cfg.low_skeets_only);

    // These two exist both as flat template keys and inside the reward
    // block; either place works, both at once is ambiguous.
    const bool flat_div = top.has("diversity_threshold");
    const bool flat_ratio = top.has("penalty_ratio_limit");
    top.read("diversity_threshold", &cfg.reward.penalties.diversity_threshold);
    top.read("penalty_ratio_limit", &cfg.reward.penalty_ratio_limit);

    {
        Block sampling = top.block("sampling");
        Block train = sampling.block("train");
        train.read("temperature", &cfg.sampling_train.temperature);
        train.read("top_p", &cfg.sampling_train.top_p);
        train.read("top_k", &cfg.sampling_train.top_k);
        train.finish();
        Block infer = sampling.block("infer");
        infer.read("temperature", &cfg.sampling_infer.temperature);
        infer.read("top_p", &cfg.sampling_infer.top_p);
        infer.read("top_k", &cfg.sampling_infer.top_k);
        infer.read("max_tokens", &cfg.sampling_infer.max_tokens);
        infer.finish();
        sampling.finish();
    }
    {
        Block eng = top.block("engagement");
        Block w = eng.block("weights");
        w.read("reposts", &cfg.weights.reposts);
        w.read("replies", &cfg.weights.replies);
        w.read("likes", &cfg.weights.likes);
        w.finish();
        eng.read("baseline_window", &cfg.baseline_window);
        eng.finish();
    }
    {
        Block emb = top.block("embedding");
        std::string kind = "reference_hash";
        emb.read("kind", &kind);
        if (kind == "reference_hash") cfg.reward.embedder.kind = EmbedderKind::reference_hash;
        else if (kind == "external") cfg.reward.embedder.kind = EmbedderKind::external;
        else throw ConfigError("config: embedding.kind must be reference_hash or external");
        emb.read("seed", &cfg.reward.embedder.seed);
        emb.finish();
    }
    {
        Block rew = top.block("reward");
        rew.read("function", &cfg.reward_function);
        std::string weighting = "minmax";
        rew.read("weighting", &weighting);
        if (weighting == "minmax") cfg.reward.weighting = WeightingKind::minmax;
        else if (weighting == "legacy_affine") cfg.reward.weighting = WeightingKind::legacy_affine;
        else throw ConfigError("config: reward.weighting must be minmax or legacy_affine");

        Block pen = rew.block("penalties");
        pen.read("anti_echo", &cfg.reward.penalties.anti_echo);
        pen.read("diversity", &cfg.reward.penalties.diversity);
        pen.read("repetition", &cfg.reward.penalties.repetition);
        pen.read("pattern", &cfg.reward.penalties.pattern);
        pen.read("empty", &cfg.reward.penalties.empty);
        pen.read("max_stacked", &cfg.reward.penalties.max_stacked);
        pen.finish();

        if (rew.has("diversity_threshold") && flat_div) {
            throw ConfigError(
                "config: diversity_threshold set both top-level and under reward");
        }
        if (rew.has("penalty_ratio_limit") && flat_ratio) {
            throw ConfigError(
                "config: penalty_ratio_limit set both top-level and under reward");
        }
        rew.read("diversity_threshold", &cfg.reward.penalties.diversity_threshold);
        rew.read("repetition_ratio", &cfg.reward.penalties.repetition_ratio);
        rew.read("penalty_ratio_limit", &cfg.reward.penalty_ratio_limit);
        int echo_min = static_cast<int>(cfg.reward.echo_min_scalars);
        rew.read("echo_min_chars", &echo_min);
        require(echo_min >= 1, "reward.echo_min_chars must be >= 1");
        cfg.reward.echo_min_scalars = static_cast<std::size_t>(echo_min);
        rew.read_list("refusal_phrases", &cfg.reward.refusal_phrases);
        rew.read_list("echo_fragments", &cfg.reward.echo_fragments);
        rew.finish();
    }
    {
        Block g = top.block("gspo");
        g.read("epsilon", &cfg.gspo.epsilon);
        g.read("clip", &cfg.gspo.clip);
        g.read("variance_floor", &cfg.gspo.variance_floor);
        g.read("kl_target", &cfg.gspo.kl_target);
        g.read("kl_weight", &cfg.gspo.kl_weight);
        g.finish();
    }
    {
        Block u = top.block("ued");
        u.read("decay_tau", &cfg.ued.decay_tau);
        u.read("easy_mix", &cfg.ued.easy_mix);
        u.read("regret_scale", &cfg.ued.regret_scale);
        u.read("clip", &cfg.ued.clip);
        u.read("epsilon", &cfg.ued.epsilon);
        u.read("variance_floor", &cfg.ued.variance_floor);
        int capacity = static_cast<int>(cfg.ued.capacity);
        u.read("buffer_capacity", &capacity);
        require(capacity >= 1, "ued.buffer_capacity must be >= 1");
        cfg.ued.capacity = static_cast<std::size_t>(capacity);
        u.read("phase_steps", &cfg.ued.phase_steps);
        u.finish();
    }
    {
        Block m = top.block("monitor");
        m.read("collapse_var", &cfg.monitor.collapse_var);
        m.read("collapse_div", &cfg.monitor.collapse_div);
        m.read("convergence_var", &cfg.monitor.convergence_var);
        m.read("patience", &cfg.monitor.patience);
        m.finish();
    }
    {
        Block e = top.block("env");
        cfg.env.seed = cfg.seed;  // default: follow the run seed
        e.read("n_contexts", &cfg.env.n_contexts);
        e.read("n_users", &cfg.env.n_users);
        e.read("posts_per_user", &cfg.env.posts_per_user);
        e.read("noise_scale", &cfg.env.noise_scale);
        e.read("bias_min", &cfg.env.bias_min);
        e.read("bias_max", &cfg.env.bias_max);
        e.read("seed", &cfg.env.seed);
        e.finish();
    }
    top.finish();

    // The training-side cap applies to rollout rendering.
    cfg.sampling_train.max_tokens = cfg.max_completion_length;

    validate_config(cfg, warnings);
    return cfg;
}

RunConfig load_config(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), warnings);
}

void validate_config(const RunConfig& cfg, std::vector<std::string>* warnings) {
    // Fail fast on the cap mismatch: a model trained to one length and
    // served at another silently truncates everything it learned to say.
    if (cfg.max_completion_length != cfg.sampling_infer.max_tokens) {
        throw ConfigError(
            "config: training max_completion_length (" +
            std::to_string(cfg.max_completion_length) + ") must equal inference max_tokens (" +
            std::to_string(cfg.sampling_infer.max_tokens) + ")");
    }

    require(cfg.learning_rate > 0.0, "learning_rate must be > 0");
    require(cfg.max_steps >= 0, "max_steps must be >= 0");
    require(cfg.batch_size >= 1, "batch_size must be >= 1");
    require(cfg.gradient_accumulation_steps >= 1, "gradient_accumulation_steps must be >= 1");
    require(cfg.num_epochs >= 1, "num_epochs must be >= 1");
    require(cfg.max_completion_length > 0, "max_completion_length must be > 0");
    require(cfg.save_steps >= 1, "save_steps must be >= 1");
    require(cfg.logging_steps >= 1, "logging_steps must be >= 1");
    require(cfg.num_generations >= 2, "num_generations must be >= 2 for group advantages");
    require(cfg.max_grad_norm > 0.0, "max_grad_norm must be > 0");
    require(cfg.optimizer == "sgd" || cfg.optimizer == "adam", "optimizer must be sgd or adam");
    require(cfg.source == "synthetic" || cfg.source == "csv", "source must be synthetic or csv");
    require(cfg.sample_size >= 1, "sample_size must be >= 1");
    require(cfg.min_skeets >= 1, "min_skeets must be >= 1");

    for (const SamplingConfig* s : {&cfg.sampling_train, &cfg.sampling_infer}) {
        require(s->temperature >= 0.0, "sampling temperature must be >= 0");
        require(s->top_p > 0.0 && s->top_p <= 1.0, "sampling top_p must be in (0, 1]");
        require(s->top_k >= 0, "sampling top_k must be >= 0");
        require(s->max_tokens > 0, "sampling max_tokens must be > 0");
    }

    require(cfg.weights.reposts >= 0 && cfg.weights.replies >= 0 && cfg.weights.likes >= 0,
            "engagement weights must be >= 0");
    require(cfg.baseline_window >= 1, "engagement.baseline_window must be >= 1");

    const PenaltyConfig& p = cfg.reward.penalties;
    for (double v : {p.anti_echo, p.diversity, p.repetition, p.pattern, p.empty, p.max_stacked}) {
        require(v <= 0.0 && v >= -1.0, "penalty values must lie in [-1, 0]");
    }
    require(p.diversity_threshold > 0.0 && p.diversity_threshold <= 1.0,
            "diversity_threshold must be in (0, 1]");
    require(p.repetition_ratio > 0.0 && p.repetition_ratio < 1.0,
            "repetition_ratio must be in (0, 1)");
    require(cfg.reward.penalty_ratio_limit > 0.0, "penalty_ratio_limit must be > 0");
    require(cfg.reward.echo_min_scalars >= 1, "echo_min_chars must be >= 1");

    require(cfg.gspo.epsilon > 0.0, "gspo.epsilon must be > 0");
    require(cfg.gspo.clip > 0.0, "gspo.clip must be > 0");
    require(cfg.gspo.variance_floor > 0.0, "gspo.variance_floor must be > 0");
    require(cfg.gspo.kl_target >= 0.0, "gspo.kl_target must be >= 0");
    require(cfg.gspo.kl_weight >= 0.0, "gspo.kl_weight must be >= 0");

    require(cfg.ued.decay_tau > 0.0, "ued.decay_tau must be > 0");
    require(cfg.ued.easy_mix >= 0.0 && cfg.ued.easy_mix < 1.0, "ued.easy_mix must be in [0, 1)");
    require(cfg.ued.regret_scale > 0.0, "ued.regret_scale must be > 0");
    require(cfg.ued.clip > 0.0, "ued.clip must be > 0");
    require(cfg.ued.epsilon > 0.0, "ued.epsilon must be > 0");
    require(cfg.ued.variance_floor > 0.0, "ued.variance_floor must be > 0");
    require(cfg.ued.phase_steps >= 1, "ued.phase_steps must be >= 1");

    require(cfg.monitor.collapse_var > 0.0, "monitor.collapse_var must be > 0");
    require(cfg.monitor.collapse_div > 0.0, "monitor.collapse_div must be > 0");
    require(cfg.monitor.convergence_var > 0.0, "monitor.convergence_var must be > 0");
    require(cfg.monitor.patience >= 1, "monitor.patience must be >= 1");

    require(cfg.env.n_contexts > 0 && cfg.env.n_users > 0 && cfg.env.posts_per_user >= 1,
            "env sizes must be positive");
    require(cfg.env.noise_scale >= 0.0, "env.noise_scale must be >= 0");
    require(cfg.env.bias_min > 0.0 && cfg.env.bias_max >= cfg.env.bias_min,
            "env bias range must satisfy 0 < bias_min <= bias_max");

    bool known_reward = false;
    for (const std::string& n : reward_names()) {
        if (n == cfg.reward_function) known_reward = true;
    }
    require(known_reward, "reward.function '" + cfg.reward_function + "' is not registered");

    // Golden-rule audit: worst-case stacked penalty against a typical good
    // base transfer of 0.8. Advisory only, with the calibration tolerance.
    if (warnings) {
        const double ratio = std::fabs(p.max_stacked) / 0.8;
        if (ratio > cfg.reward.penalty_ratio_limit + 0.32) {
            warnings->push_back(
                "penalty audit: |max_stacked| / 0.8 = " + fmt_double(ratio) +
                " exceeds penalty_ratio_limit " + fmt_double(cfg.reward.penalty_ratio_limit) +
                " beyond the 0.32 tolerance; penalties may dominate the reward signal");
        }
    }
}

std::string config_to_yaml(const RunConfig& cfg) {
    std::ostringstream o;
    o << "model_name: " << quote(cfg.model_name) << '\n';
    o << "run_name: " << quote(cfg.run_name) << '\n';
    o << "output_dir: " << quote(cfg.output_dir) << '\n';
    o << "seed: " << cfg.seed << '\n';
    o << "max_steps: " << cfg.max_steps << '\n';
    o << "learning_rate: " << fmt_double(cfg.learning_rate) << '\n';
    o << "batch_size: " << cfg.batch_size << '\n';
    o << "gradient_accumulation_steps: " << cfg.gradient_accumulation_steps << '\n';
    o << "num_epochs: " << cfg.num_epochs << '\n';
    o << "max_completion_length: " << cfg.max_completion_length << '\n';
    o << "save_steps: " << cfg.save_steps << '\n';
    o << "logging_steps: " << cfg.logging_steps << '\n';
    o << "num_generations: " << cfg.num_generations << '\n';
    o << "max_grad_norm: " << fmt_double(cfg.max_grad_norm) << '\n';
    o << "optimizer: " << quote(cfg.optimizer) << '\n';
    o << "use_ued: " << (cfg.use_ued ? "true" : "false") << '\n';
    o << "source: " << quote(cfg.source) << '\n';
    o << "data_dir: " << quote(cfg.data_dir) << '\n';
    o << "sample_size: " << cfg.sample_size << '\n';
    o << "min_skeets: " << cfg.min_skeets << '\n';
    o << "low_skeets_only: " << (cfg.low_skeets_only ? "true" : "false") << '\n';

    o << "sampling:\n";
    o << "  train:\n";
    o << "    temperature: " << fmt_double(cfg.sampling_train.temperature) << '\n';
    o << "    top_p: " << fmt_double(cfg.sampling_train.top_p) << '\n';
    o << "    top_k: " << cfg.sampling_train.top_k << '\n';
    o << "  infer:\n";
    o << "    temperature: " << fmt_double(cfg.sampling_infer.temperature) << '\n';
    o << "    top_p: " << fmt_double(cfg.sampling_infer.top_p) << '\n';
    o << "    top_k: " << cfg.sampling_infer.top_k << '\n';
    o << "    max_tokens: " << cfg.sampling_infer.max_tokens << '\n';

    o << "engagement:\n";
    o << "  weights:\n";
    o << "    reposts: " << fmt_double(cfg.weights.reposts) << '\n';
    o << "    replies: " << fmt_double(cfg.weights.replies) << '\n';
    o << "    likes: " << fmt_double(cfg.weights.likes) << '\n';
    o << "  baseline_window: " << cfg.baseline_window << '\n';

    o << "embedding:\n";
    o << "  kind: "
      << (cfg.reward.embedder.kind == EmbedderKind::reference_hash ? "\"reference_hash\""
                                                                   : "\"external\"")
      << '\n';
    o << "  seed: " << cfg.reward.embedder.seed << '\n';

    o << "reward:\n";
    o << "  function: " << quote(cfg.reward_function) << '\n';
    o << "  weighting: "
      << (cfg.reward.weighting == WeightingKind::minmax ? "\"minmax\"" : "\"legacy_affine\"")
      << '\n';
    o << "  penalties:\n";
    o << "    anti_echo: " << fmt_double(cfg.reward.penalties.anti_echo) << '\n';
    o << "    diversity: " << fmt_double(cfg.reward.penalties.diversity) << '\n';
    o << "    repetition: " << fmt_double(cfg.reward.penalties.repetition) << '\n';
    o << "    pattern: " << fmt_double(cfg.reward.penalties.pattern) << '\n';
    o << "    empty: " << fmt_double(cfg.reward.penalties.empty) << '\n';
    o << "    max_stacked: " << fmt_double(cfg.reward.penalties.max_stacked) << '\n';
    o << "  diversity_threshold: " << fmt_double(cfg.reward.penalties.diversity_threshold) << '\n';
    o << "  repetition_ratio: " << fmt_double(cfg.reward.penalties.repetition_ratio) << '\n';
    o << "  penalty_ratio_limit: " << fmt_double(cfg.reward.penalty_ratio_limit) << '\n';
    o << "  echo_min_chars: " << cfg.reward.echo_min_scalars << '\n';
    o << "  refusal_phrases: [";
    for (std::size_t i = 0; i < cfg.reward.refusal_phrases.size(); ++i) {
        o << (i ? ", " : "") << quote(cfg.reward.refusal_phrases[i]);
    }
    o << "]\n";
    o << "  echo_fragments: [";
    for (std::size_t i = 0; i < cfg.reward.echo_fragments.size(); ++i) {
        o << (i ? ", " : "") << quote(cfg.reward.echo_fragments[i]);
    }
    o << "]\n";

    o << "gspo:\n";
    o << "  epsilon: " << fmt_double(cfg.gspo.epsilon) << '\n';
    o << "  clip: " << fmt_double(cfg.gspo.clip) << '\n';
    o << "  variance_floor: " << fmt_double(cfg.gspo.variance_floor) << '\n';
    o << "  kl_target: " << fmt_double(cfg.gspo.kl_target) << '\n';
    o << "  kl_weight: " << fmt_double(cfg.gspo.kl_weight) << '\n';

    o << "ued:\n";
    o << "  decay_tau: " << fmt_double(cfg.ued.decay_tau) << '\n';
    o << "  easy_mix: " << fmt_double(cfg.ued.easy_mix) << '\n';
    o << "  regret_scale: " << fmt_double(cfg.ued.regret_scale) << '\n';
    o << "  clip: " << fmt_double(cfg.ued.clip) << '\n';
    o << "  epsilon: " << fmt_double(cfg.ued.epsilon) << '\n';
    o << "  variance_floor: " << fmt_double(cfg.ued.variance_floor) << '\n';
    o << "  buffer_capacity: " << cfg.ued.capacity << '\n';
    o << "  phase_steps: " << cfg.ued.phase_steps << '\n';

    o << "monitor:\n";
    o << "  collapse_var: " << fmt_double(cfg.monitor.collapse_var) << '\n';
    o << "  collapse_div: " << fmt_double(cfg.monitor.collapse_div) << '\n';
    o << "  convergence_var: " << fmt_double(cfg.monitor.convergence_var) << '\n';
    o << "  patience: " << cfg.monitor.patience << '\n';

    o << "env:\n";
    o << "  n_contexts: " << cfg.env.n_contexts << '\n';
    o << "  n_users: " << cfg.env.n_users << '\n';
    o << "  posts_per_user: " << cfg.env.posts_per_user << '\n';
    o << "  noise_scale: " << fmt_double(cfg.env.noise_scale) << '\n';
    o << "  bias_min: " << fmt_double(cfg.env.bias_min) << '\n';
    o << "  bias_max: " << fmt_double(cfg.env.bias_max) << '\n';
    o << "  seed: " << cfg.env.seed << '\n';
    return o.str();
}

}  // namespace skeetrl

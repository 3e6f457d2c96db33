#include "skeetrl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "skeetrl/kernels.hpp"
#include "skeetrl/rng.hpp"

namespace skeetrl {

namespace {

// Derived-stream ids. env.cpp owns 1..4; keep these disjoint.
constexpr std::uint64_t kStreamTasks = 10;
constexpr std::uint64_t kStreamSampling = 11;
constexpr std::uint64_t kStreamBuffer = 12;
constexpr std::uint64_t kStreamRho = 13;

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Nearest-rank 90th percentile threshold; ties all count as easy.
void flag_easy_tasks(std::vector<TrainTask>& tasks) {
    if (tasks.empty()) return;
    std::vector<double> tops;
    tops.reserve(tasks.size());
    for (const auto& t : tasks) tops.push_back(t.top_success);
    std::sort(tops.begin(), tops.end());
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(tops.size())));
    const double threshold = tops[std::min(rank, tops.size()) - 1];
    for (auto& t : tasks) t.easy = t.top_success >= threshold;
}

}  // namespace

std::vector<std::string> domain_vocabulary(const std::vector<ArticleContext>& articles) {
    std::vector<std::string> vocab;
    vocab.reserve(articles.size());
    for (const auto& a : articles) vocab.push_back(a.domain);
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    return vocab;
}

std::vector<double> features_for(const std::string& domain,
                                 const std::vector<std::string>& vocab) {
    std::vector<double> x(vocab.size() + 1, 0.0);
    const auto it = std::lower_bound(vocab.begin(), vocab.end(), domain);
    if (it != vocab.end() && *it == domain)
        x[static_cast<std::size_t>(it - vocab.begin())] = 1.0;
    x.back() = 1.0;  // bias
    return x;
}

std::vector<TrainTask> tasks_from_dataset(const TrainingDataset& ds, const RunConfig& cfg) {
    std::vector<const ArticleGroup*> kept;
    for (const auto& g : ds.groups) {
        const auto n = g.posts.size();
        if (n < static_cast<std::size_t>(cfg.min_skeets)) continue;
        // "low skeets" keeps only the thin end: at most twice the minimum.
        if (cfg.low_skeets_only && n > 2 * static_cast<std::size_t>(cfg.min_skeets)) continue;
        kept.push_back(&g);
        if (kept.size() == static_cast<std::size_t>(cfg.sample_size)) break;
    }
    if (kept.empty()) throw std::runtime_error("dataset: no article group survived the filters");

    std::vector<ArticleContext> articles;
    articles.reserve(kept.size());
    for (const auto* g : kept)
        articles.push_back({g->article.url, g->article.title, domain_of(g->article.url)});
    const auto vocab = domain_vocabulary(articles);

    std::vector<TrainTask> tasks;
    tasks.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        TrainTask t;
        t.id = static_cast<int>(i);
        t.article = articles[i];
        t.features = features_for(t.article.domain, vocab);
        for (const auto& sp : kept[i]->posts)
            t.exemplars.push_back({sp.post.text, sp.score, {}, 0.0});
        finalize_exemplars(t.exemplars, cfg.reward);
        t.top_success = 0.0;
        for (const auto& e : t.exemplars) t.top_success = std::max(t.top_success, e.success_score);
        tasks.push_back(std::move(t));
    }
    flag_easy_tasks(tasks);
    return tasks;
}

std::vector<TrainTask> tasks_from_env(SyntheticEnv& env, const RunConfig& cfg) {
    const auto posts = simulate_posts(env, cfg.weights, cfg.baseline_window);
    const auto vocab = domain_vocabulary(env.contexts);

    std::vector<TrainTask> tasks(static_cast<std::size_t>(env.cfg.n_contexts));
    for (int c = 0; c < env.cfg.n_contexts; ++c) {
        auto& t = tasks[static_cast<std::size_t>(c)];
        t.id = c;
        t.article = env.contexts[static_cast<std::size_t>(c)];
        t.features = features_for(t.article.domain, vocab);
    }
    for (const auto& p : posts)
        tasks[static_cast<std::size_t>(p.ctx)].exemplars.push_back({p.text, p.normalized, {}, 0.0});
    for (auto& t : tasks) {
        if (t.exemplars.empty())
            throw std::runtime_error("synthetic env: context with no simulated posts");
        finalize_exemplars(t.exemplars, cfg.reward);
        t.top_success = t.exemplars.front().success_score;
        for (const auto& e : t.exemplars) t.top_success = std::max(t.top_success, e.success_score);
    }
    flag_easy_tasks(tasks);
    return tasks;
}

// ------------------------ trainer ------------------------

Trainer::Trainer(const RunConfig& cfg, std::vector<TrainTask> tasks)
    : cfg_(cfg),
      tasks_(std::move(tasks)),
      monitor_(cfg.monitor),
      buffer_(cfg.ued),
      task_rng_(derive_seed(cfg.seed, kStreamTasks)),
      sample_rng_(derive_seed(cfg.seed, kStreamSampling)),
      ued_rng_(derive_seed(cfg.seed, kStreamBuffer)),
      rho_rng_(derive_seed(cfg.seed, kStreamRho)) {
    if (tasks_.empty()) throw std::runtime_error("trainer: empty task set");
    const std::size_t nf = tasks_[0].features.size();
    for (const auto& t : tasks_)
        if (t.features.size() != nf)
            throw std::runtime_error("trainer: inconsistent feature dimensions");

    policy_ = ToyPolicy::zeros(static_cast<int>(nf), kNumActions);
    reference_ = policy_;
    reward_ = make_reward(cfg_.reward_function, cfg_.reward);
    grad_accum_.assign(policy_.params.size(), 0.0);
    adam_m_.assign(policy_.params.size(), 0.0);
    adam_v_.assign(policy_.params.size(), 0.0);

    const int n_variants = static_cast<int>(prompt_variants().size());
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        UedTask ut;
        ut.id = tasks_[i].id;
        ut.task_index = static_cast<int>(i);
        ut.prompt_variant = static_cast<int>(i) % n_variants;
        ut.is_easy = tasks_[i].easy;
        buffer_.insert(ut, 0);
    }
}

Trainer::MicroResult Trainer::micro_batch(const TrainTask& task, int variant, bool ued_mode) {
    const Rollout roll =
        sample_responses(policy_, task.features, task.article, task.id, cfg_.num_generations,
                         cfg_.sampling_train, variant, sample_rng_);
    const ScoreResult scored = reward_->score(roll.prompt, roll.responses, task.exemplars);

    MicroResult out;
    out.rewards.reserve(scored.breakdowns.size());
    for (const auto& b : scored.breakdowns) out.rewards.push_back(b.total);

    const AdvantageGroup adv = compute_advantages(out.rewards, cfg_.gspo);
    LossGrad lg = loss_and_gradient(policy_, reference_, task.features, roll.actions,
                                    adv.advantages, cfg_.gspo);
    out.loss = lg.loss;
    out.kl = lg.kl;
    out.grad = std::move(lg.grad);
    out.diversity =
        scored.embeddings.size() >= 2 ? kernels::batch_diversity(scored.embeddings) : 0.0;
    out.penalty_flagged =
        penalty_ratio_flag(scored.breakdowns, cfg_.reward.penalty_ratio_limit);

    if (ued_mode) {
        const Rollout ref_roll =
            sample_responses(reference_, task.features, task.article, task.id,
                             cfg_.num_generations, cfg_.sampling_train, variant, rho_rng_);
        const ScoreResult ref_scored =
            reward_->score(ref_roll.prompt, ref_roll.responses, task.exemplars);
        std::vector<double> ref_totals;
        ref_totals.reserve(ref_scored.breakdowns.size());
        for (const auto& b : ref_scored.breakdowns) ref_totals.push_back(b.total);

        RegretInputs in;
        in.best = *std::max_element(out.rewards.begin(), out.rewards.end());
        in.avg = mean_of(out.rewards);
        in.rho = mean_of(ref_totals);
        out.regret = regret(in, cfg_.ued);
    }
    return out;
}

void Trainer::accumulate(const std::vector<double>& grad) {
    for (std::size_t i = 0; i < grad_accum_.size(); ++i) grad_accum_[i] += grad[i];
    ++accum_count_;
}

void Trainer::apply_update(double lr) {
    if (accum_count_ == 0) return;
    std::vector<double> g(grad_accum_.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = grad_accum_[i] / static_cast<double>(accum_count_);

    double norm_sq = 0.0;
    for (double v : g) norm_sq += v * v;
    const double norm = std::sqrt(norm_sq);
    if (norm > cfg_.max_grad_norm && norm > 0.0) {
        const double scale = cfg_.max_grad_norm / norm;
        for (double& v : g) v *= scale;
    }

    if (cfg_.optimizer == "adam") {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        ++adam_t_;
        const double c1 = 1.0 - std::pow(b1, adam_t_);
        const double c2 = 1.0 - std::pow(b2, adam_t_);
        for (std::size_t i = 0; i < g.size(); ++i) {
            adam_m_[i] = b1 * adam_m_[i] + (1.0 - b1) * g[i];
            adam_v_[i] = b2 * adam_v_[i] + (1.0 - b2) * g[i] * g[i];
            policy_.params[i] -= lr * (adam_m_[i] / c1) / (std::sqrt(adam_v_[i] / c2) + eps);
        }
    } else {
        for (std::size_t i = 0; i < g.size(); ++i) policy_.params[i] -= lr * g[i];
    }

    std::fill(grad_accum_.begin(), grad_accum_.end(), 0.0);
    accum_count_ = 0;
    ++updates_done_;
}

double Trainer::cosine_lr(int update_index, int total_updates) const {
    const double u = static_cast<double>(update_index);
    const double total = static_cast<double>(std::max(1, total_updates));
    return cfg_.learning_rate * 0.5 * (1.0 + std::cos(3.14159265358979323846 * u / total));
}

void Trainer::maybe_checkpoint() {
    if (output_dir_.empty() || cfg_.save_steps <= 0) return;
    if (global_step_ % cfg_.save_steps != 0) return;
    std::filesystem::create_directories(output_dir_);
    save_checkpoint(output_dir_ + "/checkpoint-" + std::to_string(global_step_) + ".txt",
                    policy_, global_step_);
}

TrainingReport Trainer::run(int max_steps) {
    TrainingReport report;
    const int accum = std::max(1, cfg_.gradient_accumulation_steps);
    const int total_updates = (max_steps + accum - 1) / accum;
    const int n_variants = static_cast<int>(prompt_variants().size());

    for (int s = 0; s < max_steps; ++s) {
        ++global_step_;

        std::vector<double> pooled;
        double loss_sum = 0.0, kl_sum = 0.0, div_sum = 0.0;
        bool flagged = false;
        int last_task = 0;
        for (int b = 0; b < cfg_.batch_size; ++b) {
            const TrainTask& task = tasks_[uniform_index(task_rng_, tasks_.size())];
            const int variant = variant_counter_++ % n_variants;
            MicroResult m = micro_batch(task, variant, false);
            accumulate(m.grad);
            pooled.insert(pooled.end(), m.rewards.begin(), m.rewards.end());
            loss_sum += m.loss;
            kl_sum += m.kl;
            div_sum += m.diversity;
            flagged = flagged || m.penalty_flagged;
            last_task = task.id;
        }
        if ((s + 1) % accum == 0) apply_update(cosine_lr(updates_done_, total_updates));

        const double diversity = div_sum / cfg_.batch_size;
        const Phase phase = monitor_.update(pooled, diversity);

        StepRecord rec;
        rec.step = global_step_;
        rec.loss = loss_sum / cfg_.batch_size;
        rec.reward_mean = mean_of(pooled);
        rec.reward_var = monitor_.variances().back();
        rec.diversity = diversity;
        rec.kl = kl_sum / cfg_.batch_size;
        rec.phase = phase;
        rec.task_id = last_task;
        rec.penalty_flagged = flagged;
        report.steps.push_back(rec);

        maybe_checkpoint();
        if (monitor_.should_stop()) {
            report.stop_reason = "collapse_early_stop";
            break;
        }
    }
    apply_update(cosine_lr(updates_done_, total_updates));  // flush a partial tail
    if (report.stop_reason.empty()) report.stop_reason = "max_steps";
    report.optimizer_updates = updates_done_;
    return report;
}

TrainingReport Trainer::run_ued_phase(int steps) {
    TrainingReport report;
    freeze_reference();
    apply_update(cfg_.learning_rate);  // clear any pending accumulation

    for (int s = 0; s < steps; ++s) {
        ++global_step_;
        const UedTask& ut = buffer_.sample(global_step_, ued_rng_);
        const int task_index = ut.task_index;
        const int task_id = ut.id;
        const int variant = ut.prompt_variant;
        const TrainTask& task = tasks_[static_cast<std::size_t>(task_index)];

        MicroResult m = micro_batch(task, variant, true);
        buffer_.update_priority(task_id, m.regret, global_step_);
        accumulate(m.grad);
        apply_update(cfg_.learning_rate);  // one undecayed update per step

        const Phase phase = monitor_.update(m.rewards, m.diversity);

        StepRecord rec;
        rec.step = global_step_;
        rec.loss = m.loss;
        rec.reward_mean = mean_of(m.rewards);
        rec.reward_var = monitor_.variances().back();
        rec.diversity = m.diversity;
        rec.kl = m.kl;
        rec.phase = phase;
        rec.task_id = task_id;
        rec.penalty_flagged = m.penalty_flagged;
        rec.ued = true;
        rec.regret = m.regret;
        report.steps.push_back(rec);

        maybe_checkpoint();
    }
    report.stop_reason = "phase_complete";
    report.optimizer_updates = updates_done_;
    return report;
}

// ------------------------ reporting ------------------------

void write_report_jsonl(const std::string& path, const TrainingReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& r : report.steps) {
        nlohmann::json j{{"step", r.step},
                         {"loss", r.loss},
                         {"reward_mean", r.reward_mean},
                         {"reward_var", r.reward_var},
                         {"diversity", r.diversity},
                         {"kl", r.kl},
                         {"phase", phase_name(r.phase)},
                         {"task", r.task_id},
                         {"penalty_flagged", r.penalty_flagged},
                         {"ued", r.ued}};
        if (r.ued) j["regret"] = r.regret;
        out << j.dump() << "\n";
    }
}

void write_summary_json(const std::string& path, const TrainingReport& report,
                        const RunConfig& cfg, const std::string& final_checkpoint) {
    const auto& steps = report.steps;
    const std::size_t window = std::min<std::size_t>(20, steps.size());
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < window; ++i) {
        first += steps[i].reward_mean;
        last += steps[steps.size() - window + i].reward_mean;
    }
    if (window > 0) {
        first /= static_cast<double>(window);
        last /= static_cast<double>(window);
    }

    nlohmann::json j{{"run_name", cfg.run_name},
                     {"seed", cfg.seed},
                     {"steps_run", steps.size()},
                     {"stop_reason", report.stop_reason},
                     {"optimizer_updates", report.optimizer_updates},
                     {"reward_mean_first_window", first},
                     {"reward_mean_last_window", last},
                     {"final_checkpoint", final_checkpoint}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

// ------------------------ evaluation ------------------------

EvalMetrics evaluate(const ToyPolicy& policy, const std::vector<TrainTask>& tasks,
                     const RunConfig& cfg) {
    EvalMetrics m;
    if (tasks.empty()) return m;

    const auto reward = make_reward(cfg.reward_function, cfg.reward);
    const auto& templates = action_templates();
    std::vector<Embedding> embeddings;
    embeddings.reserve(tasks.size());

    for (const auto& task : tasks) {
        const auto logits = logits_of(policy, task.features);
        const int action = static_cast<int>(
            std::max_element(logits.begin(), logits.end()) - logits.begin());

        const std::string prompt = base_prompt(task.article);
        bool truncated = false;
        const std::string text =
            render_template(templates[static_cast<std::size_t>(action)], task.article, prompt,
                            static_cast<std::size_t>(cfg.sampling_infer.max_tokens), &truncated);

        const ScoreResult scored = reward->score(prompt, {text}, task.exemplars);
        m.mean_total_reward += scored.breakdowns[0].total;
        if (ngram_repetition_ratio(text) > cfg.reward.penalties.repetition_ratio)
            m.repetition_rate += 1.0;
        if (!truncated) m.completion_rate += 1.0;
        embeddings.push_back(scored.embeddings[0]);
        ++m.n;
    }

    const double n = static_cast<double>(m.n);
    m.mean_total_reward /= n;
    m.repetition_rate /= n;
    m.completion_rate /= n;
    m.mean_diversity = embeddings.size() >= 2 ? kernels::batch_diversity(embeddings) : 0.0;
    return m;
}

}  // namespace skeetrl

// Command-line front end: ingest (CSV trio -> dataset JSON), train, eval,
// and template (print the default config document).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skeetrl/config.hpp"
#include "skeetrl/ingest.hpp"
#include "skeetrl/trainer.hpp"

namespace {

using nlohmann::json;
using namespace skeetrl;

template <typename T>
void print_load(const char* label, const LoadResult<T>& r) {
    std::size_t dropped = 0;
    for (const auto& [_, n] : r.dropped) dropped += static_cast<std::size_t>(n);
    std::cout << label << ": " << r.items.size() + dropped << " rows, " << r.items.size()
              << " loaded";
    if (dropped > 0) {
        std::cout << ", " << dropped << " dropped [";
        bool first = true;
        for (const auto& [reason, n] : r.dropped) {
            if (!first) std::cout << ", ";
            std::cout << reason << ": " << n;
            first = false;
        }
        std::cout << "]";
    }
    std::cout << "\n";
}

json dataset_to_json(const TrainingDataset& ds) {
    json groups = json::array();
    for (const auto& g : ds.groups) {
        json posts = json::array();
        for (const auto& sp : g.posts) {
            posts.push_back({{"uri", sp.post.uri},
                             {"text", sp.post.text},
                             {"article_url", sp.post.article_url},
                             {"author", sp.post.author},
                             {"created_at", sp.post.created_at},
                             {"likes", sp.post.counts.likes},
                             {"replies", sp.post.counts.replies},
                             {"reposts", sp.post.counts.reposts},
                             {"score", sp.score}});
        }
        groups.push_back({{"article", {{"url", g.article.url}, {"title", g.article.title}}},
                          {"posts", posts}});
    }
    return {{"input_posts", ds.input_posts},
            {"retained_posts", ds.retained_posts},
            {"dropped", ds.dropped},
            {"groups", groups}};
}

TrainingDataset dataset_from_json(const json& j) {
    TrainingDataset ds;
    ds.input_posts = j.at("input_posts").get<std::size_t>();
    ds.retained_posts = j.at("retained_posts").get<std::size_t>();
    for (const auto& [reason, n] : j.at("dropped").items()) ds.dropped[reason] = n.get<int>();
    for (const auto& jg : j.at("groups")) {
        ArticleGroup g;
        g.article.url = jg.at("article").at("url").get<std::string>();
        g.article.title = jg.at("article").at("title").get<std::string>();
        for (const auto& jp : jg.at("posts")) {
            ScoredPost sp;
            sp.post.uri = jp.at("uri").get<std::string>();
            sp.post.text = jp.at("text").get<std::string>();
            sp.post.article_url = jp.at("article_url").get<std::string>();
            sp.post.author = jp.at("author").get<std::string>();
            sp.post.created_at = jp.at("created_at").get<std::string>();
            sp.post.counts.likes = jp.at("likes").get<double>();
            sp.post.counts.replies = jp.at("replies").get<double>();
            sp.post.counts.reposts = jp.at("reposts").get<double>();
            sp.score = jp.at("score").get<double>();
            g.posts.push_back(std::move(sp));
        }
        ds.groups.push_back(std::move(g));
    }
    return ds;
}

int cmd_ingest(const std::string& articles_path, const std::string& posts_path,
               const std::string& scores_path, const std::string& out_path) {
    const auto articles = load_articles(articles_path);
    const auto posts = load_posts(posts_path);
    const auto scores = load_scores(scores_path);
    print_load("articles", articles);
    print_load("posts", posts);
    print_load("scores", scores);

    const TrainingDataset ds = join_dataset(articles.items, posts.items, scores.items);
    std::cout << "join: " << ds.groups.size() << " article groups, " << ds.retained_posts
              << " of " << ds.input_posts << " posts retained";
    if (!ds.dropped.empty()) {
        std::cout << " [";
        bool first = true;
        for (const auto& [reason, n] : ds.dropped) {
            if (!first) std::cout << ", ";
            std::cout << reason << ": " << n;
            first = false;
        }
        std::cout << "]";
    }
    std::cout << "\n";

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << dataset_to_json(ds).dump(2) << "\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

std::vector<TrainTask> build_tasks(const RunConfig& cfg) {
    if (cfg.source == "synthetic") {
        SyntheticEnv env = SyntheticEnv::make(cfg.env, kNumActions);
        return tasks_from_env(env, cfg);
    }
    const auto dir = std::filesystem::path(cfg.data_dir);
    const auto articles = load_articles((dir / "articles.csv").string());
    const auto posts = load_posts((dir / "posts.csv").string());
    const auto scores = load_scores((dir / "scores.csv").string());
    const TrainingDataset ds = join_dataset(articles.items, posts.items, scores.items);
    return tasks_from_dataset(ds, cfg);
}

int cmd_train(const std::string& config_path, bool use_ued, bool has_seed, std::uint64_t seed,
              const std::string& output_dir, int max_steps_override) {
    std::vector<std::string> warnings;
    RunConfig cfg = load_config(config_path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (has_seed) {
        cfg.seed = seed;
        cfg.env.seed = seed;
    }
    if (use_ued) cfg.use_ued = true;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (max_steps_override > 0) cfg.max_steps = max_steps_override;

    auto tasks = build_tasks(cfg);
    std::cout << "tasks: " << tasks.size() << ", features: " << tasks[0].features.size()
              << ", actions: " << kNumActions << "\n";

    Trainer trainer(cfg, std::move(tasks));
    std::filesystem::create_directories(cfg.output_dir);
    trainer.set_output_dir(cfg.output_dir);

    TrainingReport report = trainer.run(cfg.max_steps);
    if (cfg.use_ued) {
        TrainingReport phase = trainer.run_ued_phase(cfg.ued.phase_steps);
        report.steps.insert(report.steps.end(), phase.steps.begin(), phase.steps.end());
        report.optimizer_updates = phase.optimizer_updates;
    }

    const int every = std::max(1, cfg.logging_steps);
    for (std::size_t i = 0; i < report.steps.size(); ++i) {
        const auto& r = report.steps[i];
        if (r.step % every != 0 && i + 1 != report.steps.size()) continue;
        std::printf("step %4d  loss %+9.4f  reward %+7.4f  var %8.5f  div %6.4f  kl %8.5f  %s%s\n",
                    r.step, r.loss, r.reward_mean, r.reward_var, r.diversity, r.kl,
                    phase_name(r.phase), r.ued ? "  [ued]" : "");
    }

    const std::string final_ckpt = cfg.output_dir + "/checkpoint-final.txt";
    save_checkpoint(final_ckpt, trainer.policy(), trainer.global_step());
    write_report_jsonl(cfg.output_dir + "/report.jsonl", report);
    write_summary_json(cfg.output_dir + "/summary.json", report, cfg, final_ckpt);

    std::cout << "stop: " << report.stop_reason << " after " << report.steps.size()
              << " steps, " << report.optimizer_updates << " optimizer updates\n"
              << "wrote " << cfg.output_dir << "/{report.jsonl, summary.json, checkpoint-final.txt}\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& config_path) {
    const bool data_is_json = data_path.size() >= 5 &&
                              data_path.compare(data_path.size() - 5, 5, ".json") == 0;
    std::vector<std::string> warnings;
    RunConfig cfg;
    if (!config_path.empty()) {
        cfg = load_config(config_path, &warnings);
    } else if (!data_is_json) {
        cfg = load_config(data_path, &warnings);
    } else {
        throw std::runtime_error("eval: --config is required when --data is a dataset JSON");
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    std::vector<TrainTask> tasks;
    if (data_is_json) {
        std::ifstream in(data_path);
        if (!in) throw std::runtime_error("cannot read " + data_path);
        tasks = tasks_from_dataset(dataset_from_json(json::parse(in)), cfg);
    } else {
        SyntheticEnv env = SyntheticEnv::make(cfg.env, kNumActions);
        tasks = tasks_from_env(env, cfg);
    }

    const ToyPolicy policy = load_checkpoint(checkpoint_path);
    if (policy.n_features != static_cast<int>(tasks[0].features.size()))
        throw std::runtime_error("eval: checkpoint expects " + std::to_string(policy.n_features) +
                                 " features but the data produces " +
                                 std::to_string(tasks[0].features.size()));

    const EvalMetrics m = evaluate(policy, tasks, cfg);
    std::printf("contexts evaluated: %d\n", m.n);
    std::printf("repetition rate:    %.4f\n", m.repetition_rate);
    std::printf("completion rate:    %.4f\n", m.completion_rate);
    std::printf("mean total reward:  %.4f\n", m.mean_total_reward);
    std::printf("batch diversity:    %.4f\n", m.mean_diversity);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"engagement-reward training lab"};
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "join article/post/score CSVs into a dataset JSON");
    std::string articles_path, posts_path, scores_path, out_path = "dataset.json";
    ingest->add_option("--articles", articles_path, "articles CSV")->required();
    ingest->add_option("--posts", posts_path, "posts CSV")->required();
    ingest->add_option("--scores", scores_path, "scores CSV")->required();
    ingest->add_option("--out", out_path, "output dataset JSON");

    auto* train = app.add_subcommand("train", "run the training loop");
    std::string config_path, output_dir;
    std::uint64_t seed = 0;
    bool use_ued = false;
    int max_steps_override = 0;
    train->add_option("--config", config_path, "run config YAML")->required();
    auto* seed_opt = train->add_option("--seed", seed, "override run and env seed");
    train->add_flag("--use-ued", use_ued, "append the regret-driven phase");
    train->add_option("--output-dir", output_dir, "override output directory");
    train->add_option("--max-steps", max_steps_override, "override max_steps");

    auto* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
    std::string checkpoint_path, data_path, eval_config_path;
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    eval->add_option("--data", data_path, "dataset JSON from ingest, or a config YAML for the synthetic env")
        ->required();
    eval->add_option("--config", eval_config_path, "run config (required for dataset JSON)");

    auto* tmpl = app.add_subcommand("template", "print the default config document");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(articles_path, posts_path, scores_path, out_path);
        if (train->parsed())
            return cmd_train(config_path, use_ued, seed_opt->count() > 0, seed, output_dir,
                             max_steps_override);
        if (eval->parsed()) return cmd_eval(checkpoint_path, data_path, eval_config_path);
        if (tmpl->parsed()) {
            std::cout << skeetrl::config_to_yaml(skeetrl::RunConfig{});
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

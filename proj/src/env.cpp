#include "skeetrl/env.hpp"

#include <cmath>
#include <stdexcept>

#include "skeetrl/rng.hpp"

namespace skeetrl {

namespace {

// Deterministic title bank; composed with an index suffix past the end.
const char* kTitleBank[] = {
    "Reusable rockets keep cutting launch costs",
    "Grid batteries are reshaping evening power prices",
    "A small lab grows durable coral for reef repair",
    "Open data is changing how cities time traffic lights",
    "New alloys survive twice the heat in jet engines",
    "Urban farms are quietly feeding school kitchens",
    "Cheap sensors catch water leaks weeks earlier",
    "Language models are entering the repair manual",
    "Fermentation startups rethink industrial chemistry",
    "Solid state batteries clear another safety hurdle",
    "Satellite imagery tracks crop stress in real time",
    "Old rail corridors find new life as freight links",
};

std::string title_for(int i) {
    const int bank = static_cast<int>(sizeof(kTitleBank) / sizeof(kTitleBank[0]));
    std::string t = kTitleBank[i % bank];
    if (i >= bank) t += ", part " + std::to_string(i / bank + 1);
    return t;
}

}  // namespace

SyntheticEnv SyntheticEnv::make(const SyntheticEnvConfig& cfg, int n_actions) {
    if (cfg.n_contexts <= 0 || cfg.n_users <= 0 || n_actions <= 0) {
        throw std::invalid_argument("SyntheticEnv: sizes must be positive");
    }
    SyntheticEnv env;
    env.cfg = cfg;
    env.n_actions = n_actions;

    for (int i = 0; i < cfg.n_contexts; ++i) {
        ArticleContext ctx;
        ctx.domain = "news" + std::to_string(i) + ".example";
        ctx.url = "https://" + ctx.domain + "/story-" + std::to_string(i);
        ctx.title = title_for(i);
        env.contexts.push_back(std::move(ctx));
    }

    std::mt19937_64 qrng(derive_seed(cfg.seed, 1));
    env.quality.resize(static_cast<std::size_t>(cfg.n_contexts) * n_actions);
    for (double& q : env.quality) q = uniform01(qrng);

    std::mt19937_64 brng(derive_seed(cfg.seed, 2));
    env.user_bias.resize(static_cast<std::size_t>(cfg.n_users));
    const double llo = std::log(cfg.bias_min), lhi = std::log(cfg.bias_max);
    for (double& b : env.user_bias) b = std::exp(uniform_range(brng, llo, lhi));

    env.noise_rng.seed(derive_seed(cfg.seed, 3));
    return env;
}

double SyntheticEnv::latent_quality(int ctx, int action) const {
    return quality[static_cast<std::size_t>(ctx) * n_actions + action];
}

EngagementCounts synth_engagement(SyntheticEnv& env, int ctx, int action, int user) {
    const double q = env.latent_quality(ctx, action);
    const double bias = env.user_bias[static_cast<std::size_t>(user)];
    const double base = q * 10.0;
    const double ns = env.cfg.noise_scale;
    const auto channel = [&](double factor) {
        const double v = bias * base * factor + ns * gaussian(env.noise_rng);
        return std::round(std::max(0.0, v));
    };
    EngagementCounts c;
    c.likes = channel(1.0);
    c.replies = channel(0.4);
    c.reposts = channel(0.2);
    return c;
}

std::vector<SyntheticPost> simulate_posts(SyntheticEnv& env, const EngagementWeights& w,
                                          int baseline_window) {
    // Good actions only: the complement of the trap templates.
    std::vector<int> good;
    {
        const std::vector<int>& traps = trap_actions();
        for (int a = 0; a < env.n_actions; ++a) {
            bool is_trap = false;
            for (int t : traps) {
                if (t == a) {
                    is_trap = true;
                    break;
                }
            }
            if (!is_trap) good.push_back(a);
        }
    }

    std::mt19937_64 rng(derive_seed(env.cfg.seed, 4));
    std::vector<SyntheticPost> posts;
    posts.reserve(static_cast<std::size_t>(env.cfg.n_users) * env.cfg.posts_per_user);
    const auto& templates = action_templates();

    for (int u = 0; u < env.cfg.n_users; ++u) {
        std::vector<double> history;  // this user's raw composites, oldest first
        for (int k = 0; k < env.cfg.posts_per_user; ++k) {
            SyntheticPost p;
            p.user = u;
            p.ctx = static_cast<int>(uniform_index(rng, env.contexts.size()));
            p.action = good[uniform_index(rng, good.size())];
            p.quality = env.latent_quality(p.ctx, p.action);
            p.counts = synth_engagement(env, p.ctx, p.action, u);
            p.raw_composite = composite_score(p.counts, w);

            UserHistory h;
            h.scores = history;
            p.normalized = normalized_score(p.raw_composite, baseline(h, baseline_window));

            bool truncated = false;
            p.text = render_template(templates[static_cast<std::size_t>(p.action)],
                                     env.contexts[static_cast<std::size_t>(p.ctx)], "", 300,
                                     &truncated);
            history.push_back(p.raw_composite);
            posts.push_back(std::move(p));
        }
    }
    return posts;
}

}  // namespace skeetrl

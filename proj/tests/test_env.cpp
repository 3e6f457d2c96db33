#include <doctest.h>

#include <algorithm>
#include <set>

#include "skeetrl/env.hpp"
#include "skeetrl/policy.hpp"

using namespace skeetrl;

TEST_CASE("noise-free engagement is round(bias * quality * 10 * factor)") {
    SyntheticEnvConfig cfg;
    cfg.noise_scale = 0.0;
    SyntheticEnv env = SyntheticEnv::make(cfg, kNumActions);
    env.quality[0] = 1.0;     // ctx 0, action 0
    env.user_bias[0] = 1.0;

    const EngagementCounts c = synth_engagement(env, 0, 0, 0);
    CHECK(c.likes == doctest::Approx(10.0));
    CHECK(c.replies == doctest::Approx(4.0));
    CHECK(c.reposts == doctest::Approx(2.0));

    const EngagementWeights w;
    CHECK(composite_score(c, w) == doctest::Approx(44.0));

    env.user_bias[1] = 3.0;
    const EngagementCounts boosted = synth_engagement(env, 0, 0, 1);
    CHECK(boosted.likes == doctest::Approx(30.0));
}

TEST_CASE("counts never go negative") {
    SyntheticEnvConfig cfg;
    cfg.noise_scale = 50.0;  // noise dwarfs the signal
    SyntheticEnv env = SyntheticEnv::make(cfg, kNumActions);
    for (int i = 0; i < 200; ++i) {
        const EngagementCounts c = synth_engagement(env, i % cfg.n_contexts, i % kNumActions,
                                                    i % cfg.n_users);
        CHECK(c.likes >= 0.0);
        CHECK(c.replies >= 0.0);
        CHECK(c.reposts >= 0.0);
    }
}

TEST_CASE("latent quality and user bias live in their configured ranges") {
    const SyntheticEnvConfig cfg;
    const SyntheticEnv env = SyntheticEnv::make(cfg, kNumActions);
    REQUIRE(env.quality.size() == static_cast<std::size_t>(cfg.n_contexts) * kNumActions);
    for (double q : env.quality) {
        CHECK(q >= 0.0);
        CHECK(q < 1.0);
    }
    for (double b : env.user_bias) {
        CHECK(b >= cfg.bias_min);
        CHECK(b <= cfg.bias_max);
    }
}

TEST_CASE("the same seed rebuilds the same world, a different seed does not") {
    SyntheticEnvConfig cfg;
    const SyntheticEnv a = SyntheticEnv::make(cfg, kNumActions);
    const SyntheticEnv b = SyntheticEnv::make(cfg, kNumActions);
    CHECK(a.quality == b.quality);
    CHECK(a.user_bias == b.user_bias);

    cfg.seed = 43;
    const SyntheticEnv c = SyntheticEnv::make(cfg, kNumActions);
    CHECK(a.quality != c.quality);
}

TEST_CASE("contexts have distinct domains and substantive titles") {
    const SyntheticEnvConfig cfg;
    const SyntheticEnv env = SyntheticEnv::make(cfg, kNumActions);
    std::set<std::string> domains;
    for (const auto& ctx : env.contexts) {
        domains.insert(ctx.domain);
        CHECK(ctx.title.size() > 16);
        CHECK(ctx.url.find(ctx.domain) != std::string::npos);
    }
    CHECK(domains.size() == env.contexts.size());
}

TEST_CASE("simulate_posts avoids traps and normalizes against prefix history") {
    SyntheticEnvConfig cfg;
    cfg.n_users = 3;
    cfg.posts_per_user = 10;
    SyntheticEnv env = SyntheticEnv::make(cfg, kNumActions);
    const EngagementWeights w;
    const auto posts = simulate_posts(env, w, 5);
    REQUIRE(posts.size() == 30);

    const auto& traps = trap_actions();
    for (const auto& p : posts) {
        CHECK(std::find(traps.begin(), traps.end(), p.action) == traps.end());
        CHECK_FALSE(p.text.empty());
    }

    // Rebuild each user's baseline by hand from the raw composites.
    for (int u = 0; u < cfg.n_users; ++u) {
        std::vector<double> history;
        for (const auto& p : posts) {
            if (p.user != u) continue;
            double expect = p.raw_composite;
            if (!history.empty()) {
                const std::size_t take = std::min<std::size_t>(history.size(), 5);
                double sum = 0.0;
                for (std::size_t i = history.size() - take; i < history.size(); ++i)
                    sum += history[i];
                expect = p.raw_composite - sum / static_cast<double>(take);
            }
            CHECK(p.normalized == doctest::Approx(expect).epsilon(1e-12));
            history.push_back(p.raw_composite);
        }
    }
}

TEST_CASE("simulation is bitwise reproducible for a fixed seed") {
    SyntheticEnvConfig cfg;
    cfg.n_users = 2;
    cfg.posts_per_user = 8;
    const EngagementWeights w;

    SyntheticEnv e1 = SyntheticEnv::make(cfg, kNumActions);
    SyntheticEnv e2 = SyntheticEnv::make(cfg, kNumActions);
    const auto p1 = simulate_posts(e1, w, 5);
    const auto p2 = simulate_posts(e2, w, 5);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1[i].ctx == p2[i].ctx);
        CHECK(p1[i].action == p2[i].action);
        CHECK(p1[i].raw_composite == p2[i].raw_composite);
        CHECK(p1[i].normalized == p2[i].normalized);
        CHECK(p1[i].text == p2[i].text);
    }
}

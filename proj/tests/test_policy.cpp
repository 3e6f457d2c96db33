#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <vector>

#include "skeetrl/policy.hpp"
#include "skeetrl/reward.hpp"
#include "skeetrl/rng.hpp"
#include "skeetrl/text.hpp"

using namespace skeetrl;

namespace {

ArticleContext test_ctx() {
    return {"https://news3.example/story-3", "Open data is changing how cities time traffic lights",
            "news3.example"};
}

ToyPolicy seeded_policy(int nf, std::uint64_t seed) {
    ToyPolicy p = ToyPolicy::zeros(nf, kNumActions);
    std::mt19937_64 rng(seed);
    for (double& v : p.params) v = uniform_range(rng, -1.0, 1.0);
    return p;
}

std::vector<double> one_hot_features(int nf, int hot) {
    std::vector<double> x(static_cast<std::size_t>(nf), 0.0);
    x[static_cast<std::size_t>(hot)] = 1.0;
    x.back() = 1.0;
    return x;
}

}  // namespace

TEST_CASE("domain_of strips scheme, path and query") {
    CHECK(domain_of("https://a.b.example/c/d?e=1") == "a.b.example");
    CHECK(domain_of("http://plain.example") == "plain.example");
    CHECK(domain_of("bare.example/path") == "bare.example");
}

TEST_CASE("the action space is 32 templates with a degenerate tail") {
    const auto& templates = action_templates();
    REQUIRE(templates.size() == kNumActions);
    const auto& traps = trap_actions();
    for (int t : traps) {
        CHECK(t >= 0);
        CHECK(t < kNumActions);
    }
    // Trap renders actually trip their targets.
    const ArticleContext ctx = test_ctx();
    const RewardConfig rcfg;
    bool trunc = false;
    const std::string prompt = prompt_for(ctx, 0);

    const std::string echoed = render_template(templates[22], ctx, prompt, 150, &trunc);
    CHECK(is_echo(echoed, prompt, rcfg));
    CHECK(ngram_repetition_ratio(render_template(templates[23], ctx, prompt, 150, &trunc)) > 0.3);
    CHECK(has_pattern_artifact(render_template(templates[24], ctx, prompt, 150, &trunc)));
    CHECK(has_pattern_artifact(render_template(templates[25], ctx, prompt, 150, &trunc)));
    CHECK(quality_check(render_template(templates[26], ctx, prompt, 150, &trunc), rcfg) ==
          QualityViolation::too_short);
    CHECK(quality_check(render_template(templates[27], ctx, prompt, 150, &trunc), rcfg) ==
          QualityViolation::low_alphabetic);
    CHECK(quality_check(render_template(templates[28], ctx, prompt, 150, &trunc), rcfg) ==
          QualityViolation::refusal);
    CHECK(quality_check(render_template(templates[29], ctx, prompt, 150, &trunc), rcfg) ==
          QualityViolation::empty);
}

TEST_CASE("render_template substitutes every placeholder and respects the cap") {
    const ArticleContext ctx = test_ctx();
    bool trunc = false;
    const std::string s =
        render_template({"t", "{title} via {domain}: {url}"}, ctx, "", 300, &trunc);
    CHECK(s ==
          "Open data is changing how cities time traffic lights via news3.example: "
          "https://news3.example/story-3");
    CHECK_FALSE(trunc);

    const std::string cut = render_template({"t", "{title} {title} {title}"}, ctx, "", 60, &trunc);
    CHECK(trunc);
    CHECK(scalar_count(cut) <= 60);
}

TEST_CASE("prompt variants rotate around the base prompt") {
    const ArticleContext ctx = test_ctx();
    const auto& variants = prompt_variants();
    REQUIRE(variants.size() == 8);
    CHECK(prompt_for(ctx, 0) == base_prompt(ctx));
    CHECK(prompt_for(ctx, 1) == base_prompt(ctx) + " " + variants[1]);
    CHECK(prompt_for(ctx, 8) == prompt_for(ctx, 0));  // wraps
}

TEST_CASE("a zero policy is uniform over actions") {
    const ToyPolicy p = ToyPolicy::zeros(4, kNumActions);
    const auto dist = action_distribution(p, one_hot_features(4, 1));
    for (double v : dist) CHECK(v == doctest::Approx(1.0 / kNumActions).epsilon(1e-12));
}

TEST_CASE("restricted_distribution degrades to greedy") {
    const ToyPolicy p = seeded_policy(4, 11);
    const auto x = one_hot_features(4, 2);
    const auto logits = logits_of(p, x);
    int best = 0;
    for (int a = 1; a < kNumActions; ++a) {
        if (logits[static_cast<std::size_t>(a)] > logits[static_cast<std::size_t>(best)]) best = a;
    }

    for (const SamplingConfig sc : {SamplingConfig{0.0, 0.95, 50, 150},
                                    SamplingConfig{0.9, 0.95, 1, 150}}) {
        const auto r = restricted_distribution(p, x, sc);
        REQUIRE(r.size() == 1);
        CHECK(r[0].first == best);
        CHECK(r[0].second == 1.0);
    }
}

TEST_CASE("top_k truncates and renormalizes") {
    const ToyPolicy p = seeded_policy(4, 12);
    const auto x = one_hot_features(4, 0);
    const SamplingConfig sc{1.0, 1.0, 5, 150};
    const auto r = restricted_distribution(p, x, sc);
    REQUIRE(r.size() == 5);
    double mass = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i].second <= r[i - 1].second);
    for (const auto& [a, prob] : r) mass += prob;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nucleus cut keeps the smallest prefix reaching top_p") {
    // Uniform distribution over 32 actions: 31 of them sum to 0.96875, the
    // first prefix at or above 0.95.
    const ToyPolicy p = ToyPolicy::zeros(4, kNumActions);
    const auto x = one_hot_features(4, 1);
    const SamplingConfig sc{0.9, 0.95, 50, 150};
    const auto r = restricted_distribution(p, x, sc);
    CHECK(r.size() == 31);
    for (const auto& [a, prob] : r) CHECK(prob == doctest::Approx(1.0 / 31.0).epsilon(1e-12));
}

TEST_CASE("sample_responses is deterministic for a fixed stream") {
    const ToyPolicy p = seeded_policy(4, 13);
    const auto x = one_hot_features(4, 3);
    const ArticleContext ctx = test_ctx();
    const SamplingConfig sc{0.9, 0.95, 50, 150};

    std::mt19937_64 r1(99), r2(99);
    const Rollout a = sample_responses(p, x, ctx, 7, 8, sc, 2, r1);
    const Rollout b = sample_responses(p, x, ctx, 7, 8, sc, 2, r2);
    CHECK(a.actions == b.actions);
    CHECK(a.responses == b.responses);
    CHECK(a.logprobs == b.logprobs);
    CHECK(a.prompt == prompt_for(ctx, 2));

    // Logprobs are the full-distribution logprobs of the chosen actions.
    const auto dist = action_distribution(p, x);
    for (std::size_t i = 0; i < a.actions.size(); ++i) {
        CHECK(a.logprobs[i] ==
              doctest::Approx(std::log(dist[static_cast<std::size_t>(a.actions[i])]))
                  .epsilon(1e-12));
    }
}

TEST_CASE("exact_kl is zero for identical policies and positive otherwise") {
    const ToyPolicy p = seeded_policy(4, 14);
    const auto x = one_hot_features(4, 1);
    CHECK(exact_kl(p, p, x) == 0.0);

    ToyPolicy q = p;
    q.at(1, 3) += 0.5;
    const double kl = exact_kl(p, q, x);
    CHECK(kl > 0.0);

    // Hand-rolled sum as an independent check.
    const auto pp = action_distribution(p, x);
    const auto qq = action_distribution(q, x);
    double expect = 0.0;
    for (std::size_t a = 0; a < pp.size(); ++a) expect += pp[a] * std::log(pp[a] / qq[a]);
    CHECK(kl == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
    const GspoConfig cfg;
    const int nf = 3;
    ToyPolicy policy = seeded_policy(nf, 21);
    const ToyPolicy reference = seeded_policy(nf, 22);
    const auto x = one_hot_features(nf, 1);
    const std::vector<int> actions = {0, 5, 0, 7, 31, 5};
    const std::vector<double> adv = {1.0, -1.0, 0.5, 2.0, -0.25, 0.0};

    const LossGrad lg = loss_and_gradient(policy, reference, x, actions, adv, cfg);
    const double h = 1e-5;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < policy.params.size(); ++i) {
        const double keep = policy.params[i];
        policy.params[i] = keep + h;
        const double up = loss_and_gradient(policy, reference, x, actions, adv, cfg).loss;
        policy.params[i] = keep - h;
        const double dn = loss_and_gradient(policy, reference, x, actions, adv, cfg).loss;
        policy.params[i] = keep;
        const double fd = (up - dn) / (2.0 * h);
        const double denom = std::max({std::fabs(fd), std::fabs(lg.grad[i]), 1e-8});
        max_rel = std::max(max_rel, std::fabs(fd - lg.grad[i]) / denom);
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("gradient is zero outside active features") {
    const GspoConfig cfg;
    const ToyPolicy policy = seeded_policy(4, 23);
    const ToyPolicy reference = ToyPolicy::zeros(4, kNumActions);
    auto x = one_hot_features(4, 1);  // features 1 and 3 (bias) active
    const LossGrad lg = loss_and_gradient(policy, reference, x, {2, 9}, {1.0, -1.0}, cfg);
    for (int a = 0; a < kNumActions; ++a) {
        CHECK(lg.grad[static_cast<std::size_t>(0) * kNumActions + a] == 0.0);
        CHECK(lg.grad[static_cast<std::size_t>(2) * kNumActions + a] == 0.0);
    }
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    const ToyPolicy p = seeded_policy(5, 31);
    const auto path = std::filesystem::temp_directory_path() / "skeetrl_ckpt_test.txt";
    save_checkpoint(path.string(), p, 42);
    int step = 0;
    const ToyPolicy q = load_checkpoint(path.string(), &step);
    std::filesystem::remove(path);
    CHECK(step == 42);
    CHECK(q.n_features == p.n_features);
    CHECK(q.n_actions == p.n_actions);
    CHECK(q.params == p.params);
    CHECK_THROWS(load_checkpoint("/nonexistent/skeetrl.ckpt"));
}

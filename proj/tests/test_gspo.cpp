#include <doctest.h>

#include <cmath>
#include <vector>

#include "skeetrl/gspo.hpp"

using namespace skeetrl;

TEST_CASE("compute_advantages z-scores against population stats") {
    const GspoConfig cfg;
    const auto g = compute_advantages({0.0, 2.0}, cfg);
    CHECK(g.mean == doctest::Approx(1.0));
    CHECK(g.std_dev == doctest::Approx(1.0));  // population, not sample
    CHECK_FALSE(g.degenerate);
    const double expected = 1.0 / (1.0 + cfg.epsilon);
    CHECK(g.advantages[0] == doctest::Approx(-expected).epsilon(1e-15));
    CHECK(g.advantages[1] == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("compute_advantages clips extreme z-scores") {
    const GspoConfig cfg;
    // One outlier among 16: its population z-score is sqrt(15) = 3.873.
    std::vector<double> rewards(16, 0.0);
    rewards[7] = 1.0;
    const auto g = compute_advantages(rewards, cfg);
    CHECK(g.advantages[7] == doctest::Approx(3.0));
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        CHECK(std::fabs(g.advantages[i]) <= 3.0);
    }
}

TEST_CASE("near-constant groups are degenerate with zero advantages") {
    const GspoConfig cfg;
    const auto g = compute_advantages({0.5, 0.5 + 1e-7, 0.5}, cfg);
    CHECK(g.degenerate);
    for (double a : g.advantages) CHECK(a == 0.0);

    const auto live = compute_advantages({0.5, 0.6}, cfg);
    CHECK_FALSE(live.degenerate);
}

TEST_CASE("compute_advantages needs a real group") {
    const GspoConfig cfg;
    CHECK_THROWS(compute_advantages({}, cfg));
    CHECK_THROWS(compute_advantages({1.0}, cfg));
}

TEST_CASE("kl_loss only charges divergence beyond the budget") {
    const GspoConfig cfg;
    CHECK(kl_loss(0.0, cfg) == 0.0);
    CHECK(kl_loss(0.01, cfg) == 0.0);
    CHECK(kl_loss(0.02, cfg) == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(kl_loss(0.11, cfg) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("policy_loss is the advantage-weighted logprob mean plus the KL term") {
    const GspoConfig cfg;
    const std::vector<double> adv = {1.0, -1.0};
    const std::vector<double> logp = {-1.0, -2.0};
    // -( (1)(-1) + (-1)(-2) ) / 2 = -0.5, KL under budget adds nothing.
    CHECK(policy_loss(adv, logp, 0.0, cfg) == doctest::Approx(-0.5));
    CHECK(policy_loss(adv, logp, 0.03, cfg) == doctest::Approx(-0.5 + 0.002));
    CHECK_THROWS(policy_loss(adv, {-1.0}, 0.0, cfg));
    CHECK_THROWS(policy_loss({}, {}, 0.0, cfg));
}

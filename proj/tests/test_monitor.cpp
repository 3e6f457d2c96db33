#include <doctest.h>

#include <cmath>
#include <vector>

#include "skeetrl/monitor.hpp"

using namespace skeetrl;

TEST_CASE("phase classification needs both collapse signals") {
    const MonitorConfig cfg;
    CHECK(classify_phase(0.005, 0.05, cfg) == Phase::collapse);
    // Either signal alone is only convergence (or learning).
    CHECK(classify_phase(0.005, 0.5, cfg) == Phase::convergence);
    CHECK(classify_phase(0.05, 0.05, cfg) == Phase::convergence);
    CHECK(classify_phase(0.5, 0.05, cfg) == Phase::learning);
}

TEST_CASE("thresholds are strict") {
    const MonitorConfig cfg;
    // Sitting exactly on a boundary is not past it.
    CHECK(classify_phase(0.01, 0.0, cfg) == Phase::convergence);
    CHECK(classify_phase(0.0, 0.1, cfg) == Phase::convergence);
    CHECK(classify_phase(0.1, 0.5, cfg) == Phase::learning);
}

TEST_CASE("reference traces classify as labeled") {
    const MonitorConfig cfg;
    for (const ReferenceTrace& t : reference_traces()) {
        Monitor m(cfg);
        const Phase p = m.update(t.rewards, t.diversity);
        INFO(t.name);
        CHECK(p == t.expected);
    }
}

TEST_CASE("reference trace variances match hand computation") {
    const MonitorConfig cfg;
    Monitor m(cfg);
    const auto& traces = reference_traces();
    for (const ReferenceTrace& t : traces) m.update(t.rewards, t.diversity);
    CHECK(m.variances()[0] == doctest::Approx(0.0051734375).epsilon(1e-9));
    CHECK(m.variances()[1] == doctest::Approx(0.000175).epsilon(1e-9));
    CHECK(m.variances()[2] == doctest::Approx(0.0));
}

TEST_CASE("should_stop needs patience consecutive collapses") {
    MonitorConfig cfg;
    cfg.patience = 3;
    Monitor m(cfg);
    const std::vector<double> flat(8, 0.35);
    const std::vector<double> spread = {0.9, 0.1, 0.5, 0.3, 0.7, 0.2, 0.8, 0.4};

    m.update(flat, 0.0);
    m.update(flat, 0.0);
    CHECK_FALSE(m.should_stop());
    m.update(spread, 0.9);  // breaks the streak
    m.update(flat, 0.0);
    m.update(flat, 0.0);
    CHECK_FALSE(m.should_stop());
    m.update(flat, 0.0);
    CHECK(m.should_stop());
}

TEST_CASE("an empty batch counts as zero variance") {
    Monitor m(MonitorConfig{});
    CHECK(m.update({}, 0.0) == Phase::collapse);
}

static RewardBreakdown make_breakdown(double base, double total, bool penalized,
                                      bool gated = false) {
    RewardBreakdown b;
    b.base_transfer = base;
    b.total = total;
    if (penalized) b.penalties["repetition"] = total - base;
    if (gated) {
        b.quality_violation = QualityViolation::refusal;
        b.total = -1.0;
    }
    return b;
}

TEST_CASE("penalty_ratio compares mean applied penalty to mean positive base") {
    // One clean response at base 0.8, one penalized from 0.5 down to 0.2:
    // mean penalty 0.3, mean positive base 0.65.
    std::vector<RewardBreakdown> b = {
        make_breakdown(0.8, 0.8, false),
        make_breakdown(0.5, 0.2, true),
    };
    CHECK(penalty_ratio(b) == doctest::Approx(0.3 / 0.65).epsilon(1e-12));
    CHECK_FALSE(penalty_ratio_flag(b, 0.5));
    CHECK(penalty_ratio_flag(b, 0.4));
}

TEST_CASE("gate violations are excluded from the ratio") {
    std::vector<RewardBreakdown> b = {
        make_breakdown(0.8, 0.8, false),
        make_breakdown(0.5, 0.2, true),
        make_breakdown(0.0, 0.0, false, true),  // refusal, ignored entirely
    };
    CHECK(penalty_ratio(b) == doctest::Approx(0.3 / 0.65).epsilon(1e-12));
}

TEST_CASE("no penalties means ratio zero") {
    std::vector<RewardBreakdown> b = {
        make_breakdown(0.8, 0.8, false),
        make_breakdown(0.6, 0.6, false),
    };
    CHECK(penalty_ratio(b) == 0.0);
    CHECK_FALSE(penalty_ratio_flag(b, 0.0));
}

TEST_CASE("all-penalized batch with no positive base divides by the floor") {
    // Penalty mean 0.2 against max(mean base, 1e-6) = 1e-6.
    std::vector<RewardBreakdown> b = {make_breakdown(0.0, -0.2, true)};
    CHECK(penalty_ratio(b) == doctest::Approx(0.2 / 1e-6));
}

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "troupe/errors.hpp"
#include "troupe/trust.hpp"

using namespace troupe;

namespace {

RoutingPlan single_agent_plan(const std::string& category) {
    RoutingPlan plan;
    plan.category = category;
    plan.assignments.push_back({"A", "implicit_visual", 1.0});
    return plan;
}

} // namespace

TEST_CASE("reward agreement branch") {
    CHECK(compute_reward(1.0, 1.0, true, 0.5) == doctest::Approx(1.0));
    CHECK(compute_reward(0.5, 1.0, true, 0.5) == doctest::Approx(0.0));
    CHECK(compute_reward(0.0, 1.0, true, 0.5) == doctest::Approx(-1.0));
}

TEST_CASE("reward divergence branch with penalty") {
    // 2*0.2 - 1 - 0.5*max(0, 0.6-0.2)
    CHECK(compute_reward(0.2, 0.6, false, 0.5) == doctest::Approx(-0.8));
    // agent outperformed the wrong final answer, penalty clamps at zero
    CHECK(compute_reward(0.9, 0.1, false, 0.5) == doctest::Approx(0.8));
}

TEST_CASE("reward rejects out-of-range similarity") {
    CHECK_THROWS_AS(compute_reward(1.2, 0.5, true, 0.5), domain_error);
    CHECK_THROWS_AS(compute_reward(0.5, -0.1, false, 0.5), domain_error);
}

TEST_CASE("reward clamp") {
    CHECK(clamp_reward(-1.2) == -1.0);
    CHECK(clamp_reward(0.3) == 0.3);
    CHECK(clamp_reward(1.5) == 1.0);
}

TEST_CASE("ramp factor fixed points and monotonicity") {
    CHECK(ramp_factor(0, 5.0) == 0.0);
    CHECK(ramp_factor(5, 5.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(ramp_factor(50, 5.0) == doctest::Approx(0.9999546).epsilon(1e-6));
    double prev = -1.0;
    for (std::uint64_t n = 0; n < 100; ++n) {
        double phi = ramp_factor(n, 5.0);
        CHECK(phi >= prev);
        CHECK(phi < 1.0);
        prev = phi;
    }
}

TEST_CASE("bayes update soft counts") {
    TrustEntry e;
    double q = bayes_update(e, 1.0);
    CHECK(e.pos_count == doctest::Approx(2.0));
    CHECK(e.neg_count == doctest::Approx(1.0));
    CHECK(q == doctest::Approx(2.0 / 3.0));

    TrustEntry neutral;
    CHECK(bayes_update(neutral, 0.5) == doctest::Approx(0.5));

    TrustEntry skewed;
    skewed.pos_count = 3.0;
    skewed.neg_count = 1.0;
    CHECK(bayes_update(skewed, 0.0) == doctest::Approx(0.6));
    CHECK(skewed.pos_count + skewed.neg_count == doctest::Approx(5.0));
}

TEST_CASE("bayes update grows the total by exactly one") {
    TrustEntry e;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double before = e.pos_count + e.neg_count;
        bayes_update(e, unit(rng));
        CHECK(e.pos_count + e.neg_count == doctest::Approx(before + 1.0).epsilon(1e-12));
    }
}

TEST_CASE("ema update one-step arithmetic") {
    HyperParams params;
    TrustEntry e;
    ema_update(e, 1.0, 0.5, params);
    CHECK(e.ema_short == doctest::Approx(0.3));
    CHECK(e.ema_long == doctest::Approx(0.5)); // fixed point when q equals g

    TrustEntry e2;
    e2.ema_short = 0.3;
    ema_update(e2, -1.0, 0.5, params);
    CHECK(e2.ema_short == doctest::Approx(-0.09));
}

TEST_CASE("ema contraction property") {
    HyperParams params;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> reward(-1.0, 1.0);
    std::uniform_real_distribution<double> mean(0.01, 0.99);
    TrustEntry e;
    for (int i = 0; i < 200; ++i) {
        double r = reward(rng), q = mean(rng);
        double df = std::abs(e.ema_short - r);
        double dg = std::abs(e.ema_long - q);
        ema_update(e, r, q, params);
        CHECK(std::abs(e.ema_short - r) <= (1.0 - params.lambda_f) * df + 1e-12);
        CHECK(std::abs(e.ema_long - q) <= (1.0 - params.lambda_g) * dg + 1e-12);
    }
}

TEST_CASE("final score blend and clamping") {
    HyperParams params;
    CHECK(final_score(0.3, 0.55, 1.0, params) == doctest::Approx(0.775));
    CHECK(final_score(0.0, 0.5, 0.0, params) == doctest::Approx(0.35));
    CHECK(final_score(1.0, 1.0, 1.0, params) == 1.0);  // raw 1.3 clamps
    CHECK(final_score(-1.0, 0.0, -1.0, params) == 0.0); // raw -0.6 clamps
}

TEST_CASE("apply_outcome single-step chain") {
    HyperParams params;
    TrustStore store;
    RoutingPlan plan = single_agent_plan("counting");
    for (int i = 0; i < 5; ++i) store.record_query("counting");
    plan.step = store.step();

    auto records = apply_outcome(store, plan, {{"A", 1.0}}, 1.0, true, params);
    REQUIRE(records.size() == 1);

    double ramp = 1.0 - std::exp(-1.0);
    double r_tilde = (ramp + 1.0) / 2.0;
    double q = (1.0 + r_tilde) / (3.0);
    double f = 0.3 * ramp;
    double g = 0.9 * 0.5 + 0.1 * q;
    double s = 0.3 * f + 0.7 * g + 0.3 * ramp;

    const TrustEntry e = store.entry({"A", "implicit_visual", "counting"});
    CHECK(records[0].reward_raw == doctest::Approx(1.0));
    CHECK(records[0].reward_scaled == doctest::Approx(ramp).epsilon(1e-12));
    CHECK(e.pos_count == doctest::Approx(1.0 + r_tilde).epsilon(1e-12));
    CHECK(e.neg_count == doctest::Approx(2.0 - r_tilde).epsilon(1e-12));
    CHECK(e.posterior_mean() == doctest::Approx(q).epsilon(1e-12));
    CHECK(e.ema_short == doctest::Approx(f).epsilon(1e-12));
    CHECK(e.ema_long == doctest::Approx(g).epsilon(1e-12));
    CHECK(e.score == doctest::Approx(s).epsilon(1e-12));

    // frozen reference values for the same chain
    CHECK(q == doctest::Approx(0.6053534264714263).epsilon(1e-12));
    CHECK(f == doctest::Approx(0.1896361676485673).epsilon(1e-12));
    CHECK(g == doctest::Approx(0.5105353426471426).epsilon(1e-12));
    CHECK(s == doctest::Approx(0.6039017577961373).epsilon(1e-12));
    CHECK(store.step() == 1);
}

TEST_CASE("apply_outcome gates on category and assignment") {
    HyperParams params;
    TrustStore store;
    // populate some unrelated entries
    store.obtain({"A", "implicit_visual", "size"}).score = 0.9;
    store.obtain({"B", "scene_graph", "counting"}).score = 0.2;
    TrustStore before = store;

    RoutingPlan plan = single_agent_plan("counting");
    store.record_query("counting");
    apply_outcome(store, plan, {{"A", 0.7}}, 0.7, true, params);

    CHECK(store.entry({"A", "implicit_visual", "size"}) ==
          before.entry({"A", "implicit_visual", "size"}));
    CHECK(store.entry({"B", "scene_graph", "counting"}) ==
          before.entry({"B", "scene_graph", "counting"}));
    // only the exercised triple plus the step counter changed
    CHECK(store.entries().size() == 3);
}

TEST_CASE("apply_outcome empty plan only advances the step") {
    HyperParams params;
    TrustStore store;
    RoutingPlan plan;
    plan.category = "counting";
    store.record_query("counting");
    apply_outcome(store, plan, {}, 1.0, true, params);
    CHECK(store.entries().empty());
    CHECK(store.step() == 1);
}

TEST_CASE("apply_outcome requires similarity for every selected agent") {
    HyperParams params;
    TrustStore store;
    RoutingPlan plan = single_agent_plan("counting");
    store.record_query("counting");
    CHECK_THROWS_AS(apply_outcome(store, plan, {{"B", 1.0}}, 1.0, true, params),
                    contract_error);
}

TEST_CASE("apply_outcome is deterministic and order-independent") {
    HyperParams params;
    RoutingPlan plan;
    plan.category = "counting";
    plan.assignments.push_back({"A", "implicit_visual", 0.5});
    plan.assignments.push_back({"B", "explicit_3d", 0.3});
    plan.assignments.push_back({"C", "scene_graph", 0.2});

    RoutingPlan reversed = plan;
    std::reverse(reversed.assignments.begin(), reversed.assignments.end());

    std::map<std::string, double> sims{{"A", 0.9}, {"B", 0.4}, {"C", 0.1}};
    TrustStore s1, s2;
    s1.record_query("counting");
    s2.record_query("counting");
    apply_outcome(s1, plan, sims, 0.9, true, params);
    apply_outcome(s2, reversed, sims, 0.9, true, params);
    CHECK(s1 == s2);
}

TEST_CASE("ablation toggles freeze stages at neutral values") {
    HyperParams params;
    std::map<std::string, double> sims{{"A", 1.0}};

    // scaling off: full-strength reward regardless of N_c
    {
        TrustStore store;
        RoutingPlan plan = single_agent_plan("counting");
        store.record_query("counting");
        auto rec = apply_outcome(store, plan, sims, 1.0, true, params,
                                 UpdateToggles{false, true, true});
        CHECK(rec[0].reward_scaled == doctest::Approx(1.0));
    }
    // bayes off: posterior pinned at 0.5 and counts untouched
    {
        TrustStore store;
        RoutingPlan plan = single_agent_plan("counting");
        store.record_query("counting");
        auto rec = apply_outcome(store, plan, sims, 1.0, true, params,
                                 UpdateToggles{true, false, true});
        CHECK(rec[0].posterior_mean == 0.5);
        const TrustEntry e = store.entry({"A", "implicit_visual", "counting"});
        CHECK(e.pos_count == kPriorAlpha);
        CHECK(e.neg_count == kPriorBeta);
    }
    // dual EMA off: score is the clamped scaled reward itself
    {
        TrustStore store;
        RoutingPlan plan = single_agent_plan("counting");
        store.record_query("counting");
        auto rec = apply_outcome(store, plan, sims, 1.0, true, params,
                                 UpdateToggles{true, true, false});
        CHECK(rec[0].score == doctest::Approx(1.0 - std::exp(-1.0 / 5.0)).epsilon(1e-12));
    }
}

TEST_CASE("range safety under long random update sequences") {
    HyperParams params;
    TrustStore store;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RoutingPlan plan = single_agent_plan("counting");
    for (int i = 0; i < 500; ++i) {
        store.record_query("counting");
        double sa = unit(rng), sf = unit(rng);
        apply_outcome(store, plan, {{"A", sa}}, sf, unit(rng) < 0.5, params);
        const TrustEntry e = store.entry({"A", "implicit_visual", "counting"});
        CHECK(e.ema_short >= -1.0);
        CHECK(e.ema_short <= 1.0);
        CHECK(e.ema_long >= 0.0);
        CHECK(e.ema_long <= 1.0);
        CHECK(e.score >= 0.0);
        CHECK(e.score <= 1.0);
        CHECK(e.pos_count > 0.0);
        CHECK(e.neg_count > 0.0);
    }
}

TEST_CASE("posterior history oracle") {
    HyperParams params;
    TrustStore store;
    RoutingPlan plan = single_agent_plan("counting");
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double sum_pos = 0.0, sum_neg = 0.0;
    for (int i = 0; i < 300; ++i) {
        store.record_query("counting");
        double sa = unit(rng), sf = unit(rng);
        bool agreement = unit(rng) < 0.5;
        // recompute the success fraction independently
        double r = agreement ? 2.0 * sa - 1.0
                             : 2.0 * sa - 1.0 - params.kappa * std::max(0.0, sf - sa);
        r = std::min(1.0, std::max(-1.0, r));
        double phi = 1.0 - std::exp(-static_cast<double>(store.category_count("counting")) /
                                    params.ramp_t);
        double frac = (phi * r + 1.0) / 2.0;
        sum_pos += frac;
        sum_neg += 1.0 - frac;
        apply_outcome(store, plan, {{"A", sa}}, sf, agreement, params);
    }
    const TrustEntry e = store.entry({"A", "implicit_visual", "counting"});
    CHECK(e.pos_count == doctest::Approx(kPriorAlpha + sum_pos).epsilon(1e-12));
    CHECK(e.neg_count == doctest::Approx(kPriorBeta + sum_neg).epsilon(1e-12));
}

TEST_CASE("posterior mean converges to the Bernoulli rate") {
    // r-tilde i.i.d. Bernoulli(0.7): after 500 updates q should sit near 0.7
    int good = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::mt19937_64 rng(1000 + trial);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        TrustEntry e;
        double q = 0.5;
        for (int i = 0; i < 500; ++i) q = bayes_update(e, unit(rng) < 0.7 ? 1.0 : 0.0);
        if (std::abs(q - 0.7) < 0.05) ++good;
    }
    CHECK(good >= 95);
}

TEST_CASE("fresh store reads as score 0.5 everywhere") {
    TrustStore store;
    CHECK(store.score("anyone", "any_role", "any_category") == 0.5);
    CHECK(store.entry({"x", "y", "z"}).score == 0.5);
    CHECK(store.entry({"x", "y", "z"}).posterior_mean() == 0.5);
}

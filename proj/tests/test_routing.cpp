#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "troupe/errors.hpp"
#include "troupe/routing.hpp"

using namespace troupe;

namespace {

void set_score(TrustStore& store, const std::string& agent, const std::string& role,
               const std::string& category, double score) {
    store.obtain({agent, role, category}).score = score;
}

const RoleSet kRoles = RoleSet::canonical();

} // namespace

TEST_CASE("aggregate score is the mean over roles, missing cells read 0.5") {
    TrustStore store;
    CHECK(aggregate_score(store, "A", "counting", kRoles) == doctest::Approx(0.5));

    set_score(store, "A", "implicit_visual", "counting", 0.9);
    set_score(store, "A", "explicit_3d", "counting", 0.5);
    set_score(store, "A", "scene_graph", "counting", 0.1);
    CHECK(aggregate_score(store, "A", "counting", kRoles) == doctest::Approx(0.5));

    set_score(store, "B", "implicit_visual", "counting", 0.8);
    set_score(store, "B", "explicit_3d", "counting", 0.6);
    set_score(store, "B", "scene_graph", "counting", 0.7);
    CHECK(aggregate_score(store, "B", "counting", kRoles) == doctest::Approx(0.7));

    CHECK_THROWS_AS(aggregate_score(store, "A", "counting", RoleSet{}), domain_error);
}

TEST_CASE("top-k selection order and tie-breaks") {
    TrustStore store;
    // aggregates: a1=0.7, a2=0.5, a3=0.5, a4=0.6, a5=0.4
    auto pin = [&](const std::string& agent, double v) {
        for (const auto& role : kRoles.roles) set_score(store, agent, role, "size", v);
    };
    pin("a1", 0.7);
    pin("a2", 0.5);
    pin("a3", 0.5);
    pin("a4", 0.6);
    pin("a5", 0.4);

    auto top = select_topk(store, {"a1", "a2", "a3", "a4", "a5"}, "size", kRoles, 3);
    CHECK(top == std::vector<std::string>{"a1", "a4", "a2"});

    CHECK(select_topk(store, {"a5", "a1"}, "size", kRoles, 1) ==
          std::vector<std::string>{"a1"});

    // all equal: first k in id order, independent of pool order
    TrustStore fresh;
    CHECK(select_topk(fresh, {"c", "a", "b"}, "size", kRoles, 2) ==
          std::vector<std::string>{"a", "b"});

    // pool smaller than k returns the whole pool
    CHECK(select_topk(fresh, {"b", "a"}, "size", kRoles, 5).size() == 2);

    CHECK_THROWS_AS(select_topk(fresh, {}, "size", kRoles, 3), domain_error);
    CHECK_THROWS_AS(select_topk(fresh, {"a"}, "size", kRoles, 0), domain_error);
}

TEST_CASE("greedy role assignment resolves contention globally") {
    TrustStore store;
    // rows: A (0.9, 0.2, 0.2), B (0.8, 0.7, 0.1), C (0.1, 0.1, 0.6)
    set_score(store, "A", "implicit_visual", "size", 0.9);
    set_score(store, "A", "explicit_3d", "size", 0.2);
    set_score(store, "A", "scene_graph", "size", 0.2);
    set_score(store, "B", "implicit_visual", "size", 0.8);
    set_score(store, "B", "explicit_3d", "size", 0.7);
    set_score(store, "B", "scene_graph", "size", 0.1);
    set_score(store, "C", "implicit_visual", "size", 0.1);
    set_score(store, "C", "explicit_3d", "size", 0.1);
    set_score(store, "C", "scene_graph", "size", 0.6);

    auto pairs = assign_roles(store, {"A", "B", "C"}, "size", kRoles);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == std::pair<std::string, std::string>{"A", "implicit_visual"});
    CHECK(pairs[1] == std::pair<std::string, std::string>{"B", "explicit_3d"});
    CHECK(pairs[2] == std::pair<std::string, std::string>{"C", "scene_graph"});
}

TEST_CASE("assignment tie-breaks fall back to rank order") {
    TrustStore fresh;
    auto pairs = assign_roles(fresh, {"x", "y", "z"}, "size", kRoles);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == std::pair<std::string, std::string>{"x", "implicit_visual"});
    CHECK(pairs[1] == std::pair<std::string, std::string>{"y", "explicit_3d"});
    CHECK(pairs[2] == std::pair<std::string, std::string>{"z", "scene_graph"});
}

TEST_CASE("single agent gets its best role") {
    TrustStore store;
    set_score(store, "A", "implicit_visual", "size", 0.2);
    set_score(store, "A", "explicit_3d", "size", 0.9);
    set_score(store, "A", "scene_graph", "size", 0.4);
    auto pairs = assign_roles(store, {"A"}, "size", kRoles);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].second == "explicit_3d");
}

TEST_CASE("role weights are a stable softmax") {
    TrustStore store;

    SUBCASE("uniform at equal scores") {
        auto w = role_weights(store, "A", "size", kRoles, 5.0);
        for (double x : w) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }

    SUBCASE("reference values at beta 5") {
        set_score(store, "A", "implicit_visual", "size", 1.0);
        set_score(store, "A", "explicit_3d", "size", 0.5);
        set_score(store, "A", "scene_graph", "size", 0.0);
        auto w = role_weights(store, "A", "size", kRoles, 5.0);
        CHECK(w[0] == doctest::Approx(0.9184).epsilon(1e-3));
        CHECK(w[1] == doctest::Approx(0.0754).epsilon(1e-2));
        CHECK(w[2] == doctest::Approx(0.0062).epsilon(1e-1));
        CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("beta zero is uniform regardless of scores") {
        set_score(store, "A", "implicit_visual", "size", 1.0);
        set_score(store, "A", "scene_graph", "size", 0.0);
        auto w = role_weights(store, "A", "size", kRoles, 0.0);
        for (double x : w) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }

    SUBCASE("shift invariance") {
        set_score(store, "A", "implicit_visual", "size", 0.9);
        set_score(store, "A", "explicit_3d", "size", 0.4);
        set_score(store, "A", "scene_graph", "size", 0.2);
        auto w1 = role_weights(store, "A", "size", kRoles, 5.0);
        set_score(store, "A", "implicit_visual", "size", 0.99);
        set_score(store, "A", "explicit_3d", "size", 0.49);
        set_score(store, "A", "scene_graph", "size", 0.29);
        auto w2 = role_weights(store, "A", "size", kRoles, 5.0);
        for (std::size_t i = 0; i < w1.size(); ++i)
            CHECK(w1[i] == doctest::Approx(w2[i]).epsilon(1e-12));
    }

    SUBCASE("sharpness grows toward the argmax") {
        set_score(store, "A", "implicit_visual", "size", 0.8);
        set_score(store, "A", "explicit_3d", "size", 0.5);
        set_score(store, "A", "scene_graph", "size", 0.3);
        double prev = 0.0;
        for (double beta : {0.0, 5.0, 50.0, 500.0}) {
            auto w = role_weights(store, "A", "size", kRoles, beta);
            CHECK(w[0] >= prev);
            prev = w[0];
        }
        CHECK(prev > 0.999);
    }
}

TEST_CASE("routing plan composition and category counting") {
    TrustStore store;
    HyperParams params;

    SUBCASE("cold start: first k agents by id, roles in order, uniform weights") {
        auto plan = build_routing_plan(store, {"gamma", "alpha", "beta", "delta"}, "counting",
                                       kRoles, params);
        REQUIRE(plan.assignments.size() == 3);
        CHECK(plan.assignments[0].agent_id == "alpha");
        CHECK(plan.assignments[0].role_id == "implicit_visual");
        CHECK(plan.assignments[1].agent_id == "beta");
        CHECK(plan.assignments[1].role_id == "explicit_3d");
        CHECK(plan.assignments[2].agent_id == "delta");
        CHECK(plan.assignments[2].role_id == "scene_graph");
        for (const auto& a : plan.assignments)
            CHECK(a.weight == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(store.category_count("counting") == 1);
    }

    SUBCASE("pool of two yields two assignments") {
        auto plan = build_routing_plan(store, {"a", "b"}, "counting", kRoles, params);
        CHECK(plan.assignments.size() == 2);
    }

    SUBCASE("frozen planning leaves the category count untouched") {
        build_routing_plan(store, {"a", "b", "c"}, "counting", kRoles, params, false);
        CHECK(store.category_count("counting") == 0);
    }

    SUBCASE("pool order never changes the plan") {
        set_score(store, "m", "implicit_visual", "counting", 0.9);
        set_score(store, "k", "scene_graph", "counting", 0.8);
        auto plan1 = build_routing_plan(store, {"k", "m", "z"}, "counting", kRoles, params);
        auto plan2 = build_routing_plan(store, {"z", "k", "m"}, "counting", kRoles, params);
        REQUIRE(plan1.assignments.size() == plan2.assignments.size());
        for (std::size_t i = 0; i < plan1.assignments.size(); ++i) {
            CHECK(plan1.assignments[i].agent_id == plan2.assignments[i].agent_id);
            CHECK(plan1.assignments[i].role_id == plan2.assignments[i].role_id);
            CHECK(plan1.assignments[i].weight ==
                  doctest::Approx(plan2.assignments[i].weight).epsilon(1e-12));
        }
    }

    SUBCASE("selection consistency") {
        set_score(store, "p", "implicit_visual", "counting", 0.95);
        set_score(store, "q", "explicit_3d", "counting", 0.2);
        auto plan = build_routing_plan(store, {"p", "q", "r", "s"}, "counting", kRoles, params);
        double worst_in = 1.0;
        for (const auto& a : plan.assignments)
            worst_in = std::min(worst_in,
                                aggregate_score(store, a.agent_id, "counting", kRoles));
        for (const auto& agent : {"p", "q", "r", "s"}) {
            if (plan.find_agent(agent)) continue;
            CHECK(aggregate_score(store, agent, "counting", kRoles) <= worst_in + 1e-12);
        }
    }
}

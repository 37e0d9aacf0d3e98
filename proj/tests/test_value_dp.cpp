#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <dgame/dgame.hpp>

#include "oracles.hpp"

using namespace dgame;

namespace {

SpatialGrid grid_for(const Game& g, std::size_t nodes) { return game_grid(g, nodes); }

// Pursuit-line dynamics as a plain scalar function for the oracle.
double pursuit_f(double, double, double u, double v) { return u - v; }

} // namespace

TEST(SpatialGrid, InterpolationIsExactOnAffineFunctions) {
    const SpatialGrid grid(Box{{-1.0, 0.0}, {2.0, 1.0}}, {7, 5});
    std::vector<double> vals(grid.node_count());
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const auto x = grid.node(k);
        vals[k] = 2.0 * x[0] - 3.0 * x[1] + 0.25;
    }
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const auto x = random_point(rng, grid.box());
        EXPECT_NEAR(grid.interpolate(vals, x), 2.0 * x[0] - 3.0 * x[1] + 0.25, 1e-13);
    }
    // clamping outside the box
    EXPECT_NEAR(grid.interpolate(vals, std::vector<double>{5.0, 0.5}), 2.0 * 2.0 - 1.5 + 0.25, 1e-13);
}

TEST(SpatialGrid, RejectsBadResolution) {
    EXPECT_THROW(SpatialGrid(Box{{0.0}, {1.0}}, {1}), ArgumentError);
    EXPECT_THROW(SpatialGrid(Box{{0.0, 0.0}, {1.0, 1.0}}, {3, 3, 3}), ArgumentError);
}

TEST(ValueDP, TerminalSliceEqualsPayoff) {
    for (const auto& name : {"sum", "pursuit-line", "rot2d"}) {
        const auto g = games::builtin(name);
        const auto grid = grid_for(g, g.dynamics.state_dim == 1 ? 41 : 15);
        const auto v = compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 5), grid);
        for (std::size_t k = 0; k < grid.node_count(); ++k) EXPECT_EQ(v.slice(5)[k], g.payoff.g(grid.node(k))) << name;
    }
}

TEST(ValueDP, PursuitLineClosedForm) {
    // V(t, x) = x + (1 - t)/2 away from the clamped boundary
    const auto g = games::pursuit_line();
    const auto p = Partition::uniform(0, 1, 20);
    const auto grid = grid_for(g, 101);
    for (auto kind : {ValueKind::lower, ValueKind::upper}) {
        const auto v = compute_value(g.dynamics, g.payoff, p, grid, kind);
        EXPECT_EQ(v.out_of_box, 0u);
        for (std::size_t m = 0; m <= 20; ++m)
            for (double x : {-0.5, -0.1, 0.0, 0.3, 0.5}) {
                const std::vector<double> xv{x};
                EXPECT_NEAR(v.at(p[m], xv), x + 0.5 * (1 - p[m]), 1e-12);
            }
    }
    EXPECT_NEAR(compute_lower_value(g.dynamics, g.payoff, p, grid).at(0.0, g.x0), 0.5, 1e-12);
}

TEST(ValueDP, SumGameValueIsIdentity) {
    const auto g = games::sum();
    const auto v = compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 10), grid_for(g, 81));
    for (double x : {-0.5, 0.0, 0.25}) EXPECT_NEAR(v.at(0.0, std::vector<double>{x}), x, 1e-12);
}

TEST(ValueDP, MatchesIndependentOracleAtSameResolution) {
    auto g = games::pursuit_line();
    g.payoff = payoffs::abs({1.0}, 0.1);
    const std::size_t nodes = 61, slices = 30;
    const auto grid = grid_for(g, nodes);
    const auto p = Partition::uniform(0, 1, slices);
    const auto& box = grid.box();
    for (bool lower : {true, false}) {
        const auto v = compute_value(g.dynamics, g.payoff, p, grid, lower ? ValueKind::lower : ValueKind::upper);
        for (double x0 : {-0.4, 0.0, 0.1, 0.37}) {
            const double ref = oracle::dp_1d(pursuit_f, {-1, 0, 1}, {-0.5, 0, 0.5},
                                             [](double x) { return std::abs(x - 0.1); }, box.lo[0], box.hi[0],
                                             nodes, slices, 0.0, x0, lower);
            EXPECT_NEAR(v.at(0.0, std::vector<double>{x0}), ref, 1e-12) << x0;
        }
    }
}

TEST(ValueDPProperties, LowerNeverExceedsUpper) {
    for (const auto& name : games::builtin_names()) {
        const auto g = games::builtin(name);
        const auto grid = grid_for(g, g.dynamics.state_dim == 1 ? 41 : 13);
        const auto p = Partition::uniform(g.t0, 1, 8);
        const auto lo = compute_lower_value(g.dynamics, g.payoff, p, grid);
        const auto up = compute_upper_value(g.dynamics, g.payoff, p, grid);
        for (std::size_t i = 0; i < lo.values.size(); ++i) ASSERT_LE(lo.values[i], up.values[i] + 1e-12) << name;
    }
}

TEST(ValueDPProperties, CoupledGameHasPositiveGap) {
    const auto g = games::coupled_uv();
    const auto p = Partition::uniform(0, 1, 10);
    const auto grid = grid_for(g, 41);
    const auto lo = compute_lower_value(g.dynamics, g.payoff, p, grid);
    const auto up = compute_upper_value(g.dynamics, g.payoff, p, grid);
    EXPECT_GT(up.at(0.0, g.x0) - lo.at(0.0, g.x0), 0.5);
}

TEST(ValueDPProperties, LipschitzBound) {
    // |V(t, x) - V(t, y)| <= kappa e^{c (1 - t)} |x - y|, plus interpolation slack
    for (const auto& name : {"sum", "pursuit-line", "rot2d", "zero", "linear"}) {
        const auto g = games::builtin(name);
        const std::size_t nodes = g.dynamics.state_dim == 1 ? 101 : 21;
        const auto grid = grid_for(g, nodes);
        const auto p = Partition::uniform(g.t0, 1, 10);
        const double h = grid.max_spacing();
        const double bound = g.payoff.kappa * std::exp(g.dynamics.lip_c) * (1 + 2 * h);
        for (auto kind : {ValueKind::lower, ValueKind::upper}) {
            const auto v = compute_value(g.dynamics, g.payoff, p, grid, kind);
            EXPECT_LE(lipschitz_estimate(v), bound + 1e-12) << name;
        }
    }
}

TEST(ValueDPProperties, ConvergesUnderRefinement) {
    // smooth nonlinear payoff; reference is the independent oracle at 4x resolution
    auto g = games::pursuit_line();
    g.payoff = payoffs::polynomial({0.0, 0.3, -1.0, 0.0, 0.5}, 1.25);
    auto gfun = [&](double x) { return g.payoff.g(std::vector<double>{x}); };
    const auto box = grid_for(g, 3).box();
    const std::size_t base = 25, base_slices = 12;
    const double ref = oracle::dp_1d(pursuit_f, {-1, 0, 1}, {-0.5, 0, 0.5}, gfun, box.lo[0], box.hi[0],
                                     4 * 8 * (base - 1) + 1, 4 * 8 * base_slices, 0.0, 0.2, true);
    std::vector<double> h, err;
    for (std::size_t r : {1u, 2u, 4u, 8u}) {
        const auto grid = grid_for(g, r * (base - 1) + 1);
        const auto v = compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, r * base_slices), grid);
        h.push_back(grid.max_spacing());
        err.push_back(std::abs(v.at(0.0, std::vector<double>{0.2}) - ref));
    }
    const double order = fit_power(h, err);
    EXPECT_GE(order, 0.9) << "errors " << err[0] << " " << err[1] << " " << err[2] << " " << err[3];
}

TEST(ValueDP, OutOfBoxTransitionsAreCounted) {
    auto g = games::pursuit_line();
    const SpatialGrid grid(Box{{-0.6}, {0.6}}, {25}, g.initial_box);
    const auto v = compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 5), grid);
    EXPECT_GT(v.out_of_box, 0u);
    const auto ok = compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 5), grid_for(g, 25));
    EXPECT_EQ(ok.out_of_box, 0u);
}

TEST(ValueDP, ThreadCountDoesNotChangeResults) {
    const auto g = games::rot2d();
    const auto p = Partition::uniform(0, 1, 6);
    const auto grid = grid_for(g, 71);  // above the parallel threshold
    const std::size_t saved = thread_cap();
    set_thread_cap(1);
    const auto a = compute_lower_value(g.dynamics, g.payoff, p, grid);
    set_thread_cap(4);
    const auto b = compute_lower_value(g.dynamics, g.payoff, p, grid);
    set_thread_cap(saved);
    EXPECT_EQ(a.values, b.values);
}

TEST(ValueGrid, TimeQueries) {
    const auto g = games::pursuit_line();
    const auto v = compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 4), grid_for(g, 41));
    EXPECT_EQ(v.slice_index(0.25), std::optional<std::size_t>(1));
    EXPECT_FALSE(v.slice_index(0.3).has_value());
    EXPECT_NEAR(v.at(0.3, std::vector<double>{0.0}), 0.35, 1e-12);
    EXPECT_THROW(v.values_at_time(1.5), ArgumentError);
}

TEST(ValueGrid, SerializationRoundTrip) {
    const auto g = games::rot2d();
    const auto v = compute_upper_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 3), grid_for(g, 9));
    std::stringstream ss;
    write_value_grid(ss, v);
    const auto r = read_value_grid(ss);
    EXPECT_EQ(r.kind, ValueKind::upper);
    EXPECT_EQ(r.values, v.values);
    EXPECT_EQ(r.partition.times(), v.partition.times());
    EXPECT_EQ(r.grid.resolution(), v.grid.resolution());
    EXPECT_EQ(r.grid.region().lo, v.grid.region().lo);
    std::stringstream again;
    write_value_grid(again, r);
    EXPECT_EQ(again.str(), [&] {
        std::stringstream s;
        write_value_grid(s, v);
        return s.str();
    }());
}

TEST(ValueGrid, CorruptFileRejected) {
    std::stringstream ss("dgame-value-grid 1\nkind sideways\n");
    EXPECT_THROW(read_value_grid(ss), Error);
    std::stringstream empty("");
    EXPECT_THROW(read_value_grid(empty), Error);
}

// --- level sets and projection -----------------------------------------------

class LevelSetTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto g = games::pursuit_line();
        phi = std::make_shared<ValueGrid>(
            compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 10), grid_for(g, 101)));
    }
    std::shared_ptr<ValueGrid> phi;
};

TEST_F(LevelSetTest, MemberProjectsToItself) {
    const LevelSet w{phi.get(), 0.5};
    const std::vector<double> x{0.05};
    const auto pr = project_to_levelset(x, 0.2, w);
    EXPECT_TRUE(pr.member);
    EXPECT_EQ(pr.point, x);
    EXPECT_EQ(pr.distance, 0.0);
    EXPECT_EQ(distance_to_set(x, 0.2, w), 0.0);
}

TEST_F(LevelSetTest, ProjectsOntoBoundary) {
    // W(0.2) = {x <= 0.1}
    const LevelSet w{phi.get(), 0.5};
    const auto pr = project_to_levelset(std::vector<double>{0.2}, 0.2, w);
    EXPECT_FALSE(pr.member);
    EXPECT_NEAR(pr.point[0], 0.1, 2e-9);  // boundary shifted by the membership tol
    EXPECT_NEAR(pr.distance, 0.1, 2e-9);
}

TEST_F(LevelSetTest, ProjectionInvariant) {
    // no sub-level node is strictly closer than the returned point
    Rng rng(12);
    const auto& grid = phi->grid;
    for (int k = 0; k < 200; ++k) {
        const LevelSet w{phi.get(), rng.uniform(0.0, 1.0)};
        const double t = (*phi).partition[rng.index(11)];
        const auto x = random_point(rng, grid.box());
        const auto pr = project_to_levelset(x, t, w);
        EXPECT_TRUE(w.contains(t, pr.point));
        const auto vals = phi->values_at_time(t);
        for (std::size_t n = 0; n < grid.node_count(); ++n)
            if (vals[n] <= w.level + w.tol) ASSERT_GE(distance(x, grid.node(n)), pr.distance - 1e-12);
    }
}

TEST_F(LevelSetTest, EmptyLevelSetThrows) {
    const LevelSet w{phi.get(), -100.0};
    try {
        project_to_levelset(std::vector<double>{0.0}, 0.5, w);
        FAIL();
    } catch (const EmptyLevelSetError& e) {
        EXPECT_EQ(e.time(), 0.5);
        EXPECT_EQ(e.level(), -100.0);
    }
}

// --- candidate checks ------------------------------------------------------------

TEST(CandidateCheck, LowerValuePasses) {
    for (const auto& name : {"pursuit-line", "rot2d"}) {
        const auto g = games::builtin(name);
        const auto phi = compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 5),
                                             grid_for(g, g.dynamics.state_dim == 1 ? 41 : 13));
        const auto rep = check_candidate_properties(phi, g.dynamics, g.payoff, 0, 1);
        EXPECT_TRUE(rep.ok()) << name;
        EXPECT_EQ(rep.checked_nodes, 5 * phi.grid.node_count());
    }
}

TEST(CandidateCheck, PerturbationIsFlagged) {
    const auto g = games::pursuit_line();
    auto phi = compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 5), grid_for(g, 41));
    phi.slice(2)[20] -= 0.1;
    const auto rep = check_candidate_properties(phi, g.dynamics, g.payoff, 0, 1);
    ASSERT_FALSE(rep.ok());
    ASSERT_EQ(rep.step_violations.size(), 1u);
    EXPECT_EQ(rep.step_violations[0].slice, 2u);
    EXPECT_EQ(rep.step_violations[0].node, 20u);
    EXPECT_TRUE(rep.terminal_violations.empty());
}

TEST(CandidateCheck, TerminalDeficitIsFlagged) {
    const auto g = games::pursuit_line();
    auto phi = compute_lower_value(g.dynamics, g.payoff, Partition::uniform(0, 1, 5), grid_for(g, 41));
    phi.slice(5)[3] -= 1e-3;
    const auto rep = check_candidate_properties(phi, g.dynamics, g.payoff, 10, 1);
    ASSERT_EQ(rep.terminal_violations.size(), 1u);
    EXPECT_EQ(rep.terminal_violations[0].node, 3u);
}

TEST(CandidateCheck, LipschitzEstimateNeedsValueKind) {
    const auto g = games::pursuit_line();
    ValueGrid phi(Partition::uniform(0, 1, 2), grid_for(g, 5), ValueKind::candidate);
    EXPECT_THROW(lipschitz_estimate(phi), ArgumentError);
}

#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include <dgame/dgame.hpp>

using namespace dgame;

TEST(Bounds, ClosedForms) {
    // pursuit-line: A = 3, B = 9
    EXPECT_DOUBLE_EQ(lemma1_bound(0.0, 0.1, 3.0, 9.0), 9.0 * 0.01);
    EXPECT_DOUBLE_EQ(lemma1_bound(0.5, 0.1, 3.0, 9.0), 1.3 * 0.25 + 0.09);
    EXPECT_DOUBLE_EQ(corollary1_bound(0.0, 0.01, 3.0, 9.0), std::exp(3.0) * 0.09);
    EXPECT_DOUBLE_EQ(corollary3_bound(0.01, 3.0, 9.0), std::exp(3.0) * 9.0 * 0.01);
    EXPECT_NEAR(proposition_constant(1.0, 3.0, 9.0), 13.445, 1e-3);
    EXPECT_EQ(corollary3_bound(0.0, 3.0, 9.0), 0.0);
    EXPECT_THROW(lemma1_bound(-1.0, 0.1, 3.0, 9.0), ArgumentError);
    EXPECT_THROW(corollary3_bound(-0.1, 3.0, 9.0), ArgumentError);
}

TEST(Bounds, LemmaOneIsMonotone) {
    Rng rng(6);
    for (int k = 0; k < 1000; ++k) {
        const double d = rng.uniform(0, 2), dt = rng.uniform(0, 1), A = rng.uniform(0, 5), B = rng.uniform(0, 20);
        EXPECT_LE(lemma1_bound(d, dt, A, B), lemma1_bound(d + 0.1, dt, A, B));
        EXPECT_LE(lemma1_bound(d, dt, A, B), lemma1_bound(d, dt + 0.1, A, B));
        EXPECT_GE(lemma1_bound(d, dt, A, B), d * d);
    }
}

TEST(AimingDirection, ZeroOffsetGivesZeroCovector) {
    const std::vector<double> x{0.3, 0.3}, w{0.3, 0.3 + 1e-14};
    const auto xi = aiming_direction(x, w);
    EXPECT_EQ(xi[0], 0.0);
    EXPECT_EQ(xi[1], 0.0);
    const auto xi2 = aiming_direction(std::vector<double>{1.0}, std::vector<double>{0.25});
    EXPECT_DOUBLE_EQ(xi2[0], 0.75);
}

TEST(PairedTrajectories, IdenticalStartsStayTogetherOnSeparatedGames) {
    const auto g = games::pursuit_line();
    const auto p = Partition::uniform(0, 1, 10);
    Rng rng(1);
    const auto u = random_control(rng, 0, 1, 3, 5), v = random_control(rng, 0, 1, 3, 5);
    const auto run = paired_trajectories(g.dynamics, g.x0, g.x0, u, v, p);
    ASSERT_EQ(run.distances.size(), 11u);
    // with xi = 0 both players pick index 0 for the interval, so the offsets can grow by
    // at most the Lemma 1 bound per interval
    const auto [A, B] = derived_constants(g.dynamics);
    for (std::size_t m = 0; m + 1 < run.distances.size(); ++m) {
        const double d0 = run.distances[m], d1 = run.distances[m + 1];
        EXPECT_LE(d1 * d1, lemma1_bound(d0, p[m + 1] - p[m], A, B) + 1e-12);
    }
}

TEST(PairedTrajectories, CorollaryOneHoldsOverPartition) {
    for (const auto& name : {"sum", "pursuit-line", "rot2d"}) {
        const auto g = games::builtin(name);
        const auto [A, B] = derived_constants(g.dynamics);
        Rng rng(17);
        for (std::size_t N : {5u, 40u}) {
            const auto p = Partition::uniform(0, 1, N);
            const auto x0 = random_point(rng, g.initial_box), w0 = random_point(rng, g.initial_box);
            const auto u = random_control(rng, 0, 1, g.dynamics.u_set.size(), 6);
            const auto v = random_control(rng, 0, 1, g.dynamics.v_set.size(), 6);
            const auto run = paired_trajectories(g.dynamics, x0, w0, u, v, p);
            const double dN = run.distances.back();
            EXPECT_LE(dN * dN, corollary1_bound(distance(x0, w0), mesh(p), A, B) + 1e-8) << name;
        }
    }
}

class ExtremalTest : public ::testing::Test {
protected:
    void SetUp() override {
        phi = std::make_shared<const ValueGrid>(
            compute_lower_value(game.dynamics, game.payoff, p, game_grid(game, 101)));
    }
    Game game = games::pursuit_line();
    Partition p = Partition::uniform(0, 1, 10);
    std::shared_ptr<const ValueGrid> phi;
};

TEST_F(ExtremalTest, LevelFromStart) {
    auto s = ExtremalStrategy::at_start(game.dynamics, phi, p, game.x0);
    EXPECT_NEAR(s.level(), 0.5, 1e-12);
}

TEST_F(ExtremalTest, StepAimsAtProjection) {
    // at t = 0.2 the level set is {x <= 0.1}; x = 0.2 lies above it, so v pushes down hard
    ExtremalStrategy s(game.dynamics, phi, p, 0.5);
    s.step(0, std::vector<double>{0.0});
    s.step(1, std::vector<double>{0.0});
    const auto v = s.step(2, std::vector<double>{0.2});
    const auto& rec = s.records().back();
    EXPECT_DOUBLE_EQ(rec.t, 0.2);
    EXPECT_NEAR(rec.w[0], 0.1, 2e-9);
    EXPECT_NEAR(rec.distance, 0.1, 2e-9);
    EXPECT_DOUBLE_EQ(game.dynamics.v_set[v][0], 0.5);
}

TEST_F(ExtremalTest, InsideLevelSetUsesFirstAction) {
    ExtremalStrategy s(game.dynamics, phi, p, 0.5);
    const auto v = s.step(0, std::vector<double>{-0.2});
    EXPECT_EQ(s.records().back().distance, 0.0);
    EXPECT_EQ(v, 0u);
}

TEST_F(ExtremalTest, StepsMustBeInOrder) {
    ExtremalStrategy s(game.dynamics, phi, p, 0.5);
    EXPECT_THROW(s.step(1, std::vector<double>{0.0}), ArgumentError);
    for (std::size_t m = 0; m < 10; ++m) s.step(m, std::vector<double>{0.0});
    EXPECT_THROW(s.step(10, std::vector<double>{0.0}), ArgumentError);
    EXPECT_THROW(ExtremalStrategy(game.dynamics, phi, p, 0.5).step(0, std::vector<double>{NAN}), NumericError);
}

TEST_F(ExtremalTest, Nonanticipative) {
    // changing u after t_k must not change any action emitted at t_0..t_k
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const auto u = random_control(rng, 0, 1, 3, 6);
        const std::size_t k = 1 + rng.index(8);
        const auto u2 = u.overridden_after(p[k], rng.index(3));
        auto s1 = ExtremalStrategy::at_start(game.dynamics, phi, p, game.x0);
        auto s2 = ExtremalStrategy::at_start(game.dynamics, phi, p, game.x0);
        play_vs_control(game.dynamics, game.payoff, game.x0, u, s1);
        play_vs_control(game.dynamics, game.payoff, game.x0, u2, s2);
        for (std::size_t m = 0; m <= k; ++m) {
            ASSERT_EQ(s1.records()[m].v, s2.records()[m].v) << "trial " << trial << " m " << m;
            ASSERT_EQ(s1.records()[m].x, s2.records()[m].x);
        }
    }
}

TEST_F(ExtremalTest, DeterministicReplay) {
    Rng rng(8);
    const auto u = random_control(rng, 0, 1, 3, 6);
    auto s = ExtremalStrategy::at_start(game.dynamics, phi, p, game.x0);
    const auto a = play_vs_control(game.dynamics, game.payoff, game.x0, u, s);
    const auto rec = s.records();
    const auto b = play_vs_control(game.dynamics, game.payoff, game.x0, u, s);
    EXPECT_EQ(a.payoff, b.payoff);
    EXPECT_EQ(a.trajectory.states, b.trajectory.states);
    ASSERT_EQ(rec.size(), s.records().size());
    for (std::size_t m = 0; m < rec.size(); ++m) EXPECT_EQ(rec[m].v, s.records()[m].v);
}

TEST_F(ExtremalTest, GuaranteesValueAgainstEveryConstantControl) {
    const auto [A, B] = derived_constants(game.dynamics);
    const double C = proposition_constant(game.payoff.kappa, A, B);
    for (std::size_t a = 0; a < game.dynamics.u_set.size(); ++a) {
        auto s = ExtremalStrategy::at_start(game.dynamics, phi, p, game.x0);
        const auto r = play_vs_control(game.dynamics, game.payoff, game.x0, PiecewiseControl::constant(0, 1, a), s);
        EXPECT_LE(r.payoff, s.level() + C * std::sqrt(mesh(p)) + 1e-8);
        EXPECT_TRUE(trajectory_speed_ok(r.trajectory, game.dynamics.f_bound));
    }
}

TEST_F(ExtremalTest, ControlMustCoverPartition) {
    auto s = ExtremalStrategy::at_start(game.dynamics, phi, p, game.x0);
    EXPECT_THROW(play_vs_control(game.dynamics, game.payoff, game.x0, PiecewiseControl::constant(0, 0.5, 0), s),
                 ArgumentError);
}

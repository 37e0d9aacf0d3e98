#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include <dgame/dgame.hpp>

using namespace dgame;

namespace {

std::string data(const std::string& name) { return std::string(DGAME_TEST_DATA) + "/" + name; }

} // namespace

TEST(ConfigParse, ScalarsStringsListsIntervals) {
    const auto t = config::parse(R"(
# comment line
a = 1.5   # trailing comment
name = hello
m = [[1, 2],
     [3, 4]]
u = interval(-1, 1, 5)
)");
    EXPECT_DOUBLE_EQ(t.at("a").number, 1.5);
    EXPECT_EQ(t.at("name").text, "hello");
    ASSERT_EQ(t.at("m").items.size(), 2u);
    EXPECT_DOUBLE_EQ(t.at("m").items[1].items[0].number, 3.0);
    EXPECT_EQ(t.at("u").kind, config::Value::Kind::Interval);
}

TEST(ConfigParse, DuplicateKeyIsAnError) { EXPECT_THROW(config::parse("a = 1\na = 2\n"), ConfigError); }

TEST(ConfigParse, MalformedInputIsAnError) {
    EXPECT_THROW(config::parse("a 1\n"), ConfigError);
    EXPECT_THROW(config::parse("a = [1, 2\n"), ConfigError);
}

TEST(ConfigGame, AffineFile) {
    const auto g = config::load_game_file(data("linear.cfg"));
    EXPECT_EQ(g.id, "affine-linear");
    EXPECT_EQ(g.dynamics.state_dim, 1u);
    EXPECT_EQ(g.dynamics.u_set.size(), 3u);
    EXPECT_DOUBLE_EQ(g.dynamics.lip_c, 1.0);
    EXPECT_DOUBLE_EQ(g.dynamics.f_bound, 4.0);  // |x| <= 3 plus |u - v| <= 1
    const std::vector<double> x{2.0}, u{0.5}, v{-0.5};
    EXPECT_DOUBLE_EQ(eval_dynamics(g.dynamics, 0.0, x, u, v)[0], 3.0);
    const auto c = check_declared_constants(g.dynamics, 5000, 1);
    EXPECT_TRUE(c.bound_ok && c.lipschitz_ok);
}

TEST(ConfigGame, BuiltinWithPayoffOverride) {
    const auto g = config::load_game_file(data("pursuit-line.cfg"));
    EXPECT_EQ(g.id, "pursuit-line");
    EXPECT_DOUBLE_EQ(g.x0[0], 0.1);
    EXPECT_DOUBLE_EQ(g.payoff.g(std::vector<double>{-0.4}), 0.4);
}

TEST(ConfigGame, TwoDimensionalAffine) {
    const auto g = config::load_game_file(data("rotation-2d.cfg"));
    EXPECT_EQ(g.dynamics.state_dim, 2u);
    EXPECT_NEAR(g.payoff.g(std::vector<double>{0.5, 1.0}), 1.0, 1e-15);
    const auto c = check_declared_constants(g.dynamics, 5000, 1);
    EXPECT_TRUE(c.bound_ok && c.lipschitz_ok);
}

TEST(ConfigGame, RunningCostIsKept) {
    const auto g = config::load_game_file(data("running-cost.cfg"));
    EXPECT_TRUE(g.payoff.gamma.has_value());
}

TEST(ConfigGame, MissingFile) {
    EXPECT_THROW(config::load_game_file(data("does-not-exist.cfg")), ConfigError);
    EXPECT_THROW(config::resolve_game("no-such-game"), ConfigError);
}

TEST(ConfigGame, MissingAffineKey) {
    EXPECT_THROW(config::game_from_table(config::parse("M = [[1]]\nBu = [[1]]\nstate_box = [[-1, 1]]\n")),
                 ConfigError);
}

TEST(ConfigGame, KappaBelowSampledLipschitzRejected) {
    EXPECT_THROW(config::game_from_table(config::parse("builtin = sum\npayoff = linear\npayoff_coeffs = [2]\nkappa = 1\n")),
                 ConfigError);
}

TEST(ConfigGame, BadT0AndX0) {
    EXPECT_THROW(config::game_from_table(config::parse("builtin = sum\nt0 = 1\n")), ConfigError);
    EXPECT_THROW(config::game_from_table(config::parse("builtin = sum\nx0 = [0, 0]\n")), ConfigError);
    EXPECT_THROW(config::game_from_table(config::parse("builtin = sum\nx0 = [100]\n")), ConfigError);
}

TEST(Builtins, NamesResolve) {
    for (const auto& name : games::builtin_names()) EXPECT_EQ(config::resolve_game(name).id, name);
    EXPECT_THROW(games::builtin("nope"), ConfigError);
}

TEST(Builtins, DeclaredConstants) {
    EXPECT_DOUBLE_EQ(games::pursuit_line().dynamics.f_bound, 1.5);
    EXPECT_DOUBLE_EQ(games::pursuit_line().dynamics.lip_c, 0.0);
    EXPECT_DOUBLE_EQ(games::sum().dynamics.f_bound, 2.0);
    EXPECT_DOUBLE_EQ(games::rot2d().dynamics.lip_c, 0.5);
    EXPECT_FALSE(games::coupled_uv().dynamics.separated);
}

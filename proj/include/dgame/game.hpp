#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dynamics.hpp"

namespace dgame {

/// A fully specified benchmark: dynamics, payoff, initial condition and the boxes
/// used for sampling (initial_box) and for grid dynamic programming (grid_box).
struct Game {
    std::string id;
    GameDynamics dynamics;
    PayoffSpec payoff;
    double t0 = 0.0;
    State x0;
    Box initial_box;
    Box grid_box;
};

using Matrix = std::vector<std::vector<double>>;  // row-major, rows = state components

// Affine-in-controls dynamics f = M x + Bu u + Bv v + b with constant coefficients.
// |f| is maximized over the vertices of `box` (|f| is convex in x); c = |M|_F.
inline GameDynamics affine_dynamics(std::string name, Matrix M, Matrix Bu, Matrix Bv, std::vector<double> b,
                                    ControlSet u_set, ControlSet v_set, Box box) {
    const std::size_t n = M.size();
    box.validate();
    if (n == 0 || box.dim() != n) throw ConfigError("affine: M must be n x n with n = box dimension");
    if (b.empty()) b.assign(n, 0.0);
    if (Bu.size() != n || Bv.size() != n || b.size() != n) throw ConfigError("affine: Bu, Bv, b need n rows");
    for (std::size_t i = 0; i < n; ++i) {
        if (M[i].size() != n) throw ConfigError("affine: M must be square");
        if (Bu[i].size() != u_set.dim()) throw ConfigError("affine: Bu columns must match u dimension");
        if (Bv[i].size() != v_set.dim()) throw ConfigError("affine: Bv columns must match v dimension");
    }

    GameDynamics dyn;
    dyn.name = std::move(name);
    dyn.state_dim = n;
    dyn.f = [M, Bu, Bv, b, n](double, ConstVec x, ConstVec u, ConstVec v, std::span<double> out) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = b[i];
            for (std::size_t j = 0; j < n; ++j) s += M[i][j] * x[j];
            for (std::size_t j = 0; j < u.size(); ++j) s += Bu[i][j] * u[j];
            for (std::size_t j = 0; j < v.size(); ++j) s += Bv[i][j] * v[j];
            out[i] = s;
        }
    };
    dyn.u_set = std::move(u_set);
    dyn.v_set = std::move(v_set);
    dyn.separated = true;
    dyn.state_box = box;

    double frob = 0.0;
    for (const auto& row : M)
        for (double m : row) frob += m * m;
    dyn.lip_c = std::sqrt(frob);

    double fmax = 0.0;
    State x(n), out(n);
    for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
        for (std::size_t i = 0; i < n; ++i) x[i] = (corner >> i) & 1 ? box.hi[i] : box.lo[i];
        for (std::size_t ui = 0; ui < dyn.u_set.size(); ++ui)
            for (std::size_t vi = 0; vi < dyn.v_set.size(); ++vi) {
                dyn.eval(0.0, x, ui, vi, out);
                fmax = std::max(fmax, norm(out));
            }
    }
    dyn.f_bound = fmax;
    return dyn;
}

namespace games {

namespace detail {

inline Box around(const State& x0, double r) {
    Box b{x0, x0};
    return b.inflated(r);
}

inline Game finish(std::string id, GameDynamics dyn, PayoffSpec payoff, State x0, double radius) {
    Game g;
    g.id = std::move(id);
    g.x0 = std::move(x0);
    g.initial_box = around(g.x0, radius);
    g.grid_box = g.initial_box.inflated(dyn.f_bound * (dyn.horizon - g.t0));
    dyn.state_box = g.grid_box;
    g.dynamics = std::move(dyn);
    g.payoff = std::move(payoff);
    return g;
}

} // namespace detail

// f = u + v, U = V = {-1, 0, 1}.
inline Game sum() {
    GameDynamics d;
    d.name = "sum";
    d.state_dim = 1;
    d.f = [](double, ConstVec, ConstVec u, ConstVec v, std::span<double> out) { out[0] = u[0] + v[0]; };
    d.u_set = ControlSet::interval("U", -1.0, 1.0, 3);
    d.v_set = ControlSet::interval("V", -1.0, 1.0, 3);
    d.f_bound = 2.0;
    d.lip_c = 0.0;
    d.separated = true;
    return detail::finish("sum", std::move(d), payoffs::linear({1.0}), {0.0}, 0.5);
}

// f = u - v, U = {-1, 0, 1}, V = {-1/2, 0, 1/2}. Value x + (1 - t)/2 for g(x) = x.
inline Game pursuit_line() {
    GameDynamics d;
    d.name = "pursuit-line";
    d.state_dim = 1;
    d.f = [](double, ConstVec, ConstVec u, ConstVec v, std::span<double> out) { out[0] = u[0] - v[0]; };
    d.u_set = ControlSet::interval("U", -1.0, 1.0, 3);
    d.v_set = ControlSet::interval("V", -0.5, 0.5, 3);
    d.f_bound = 1.5;
    d.lip_c = 0.0;
    d.separated = true;
    return detail::finish("pursuit-line", std::move(d), payoffs::linear({1.0}), {0.0}, 0.5);
}

// Planar drift (-sin y, sin x)/2 plus u - v; U unit compass directions and origin,
// V the same scaled by 1/2.
inline Game rot2d() {
    std::vector<std::vector<double>> dirs{{0.0, 0.0}};
    for (int k = 0; k < 8; ++k) {
        const double a = std::numbers::pi * k / 4.0;
        dirs.push_back({std::cos(a), std::sin(a)});
    }
    auto half = dirs;
    for (auto& p : half)
        for (double& c : p) c *= 0.5;

    GameDynamics d;
    d.name = "rot2d";
    d.state_dim = 2;
    d.f = [](double, ConstVec x, ConstVec u, ConstVec v, std::span<double> out) {
        out[0] = -0.5 * std::sin(x[1]) + u[0] - v[0];
        out[1] = 0.5 * std::sin(x[0]) + u[1] - v[1];
    };
    d.u_set = ControlSet("U", dirs);
    d.v_set = ControlSet("V", half);
    d.f_bound = 0.5 * std::numbers::sqrt2 + 1.5;
    d.lip_c = 0.5;
    d.separated = true;
    return detail::finish("rot2d", std::move(d), payoffs::linear({1.0, 0.0}), {0.0, 0.0}, 0.25);
}

// f = 0.
inline Game zero() {
    GameDynamics d;
    d.name = "zero";
    d.state_dim = 1;
    d.f = [](double, ConstVec, ConstVec, ConstVec, std::span<double> out) { out[0] = 0.0; };
    d.u_set = ControlSet::interval("U", -1.0, 1.0, 3);
    d.v_set = ControlSet::interval("V", -1.0, 1.0, 3);
    d.f_bound = 0.0;
    d.lip_c = 0.0;
    d.separated = true;
    return detail::finish("zero", std::move(d), payoffs::linear({1.0}), {0.3}, 0.5);
}

// f = u * v with U = V = {-1, 1}: local games have no pure value.
inline Game coupled_uv() {
    GameDynamics d;
    d.name = "coupled-uv";
    d.state_dim = 1;
    d.f = [](double, ConstVec, ConstVec u, ConstVec v, std::span<double> out) { out[0] = u[0] * v[0]; };
    d.u_set = ControlSet("U", {{-1.0}, {1.0}});
    d.v_set = ControlSet("V", {{-1.0}, {1.0}});
    d.f_bound = 1.0;
    d.lip_c = 0.0;
    d.separated = false;
    return detail::finish("coupled-uv", std::move(d), payoffs::linear({1.0}), {0.0}, 0.5);
}

// f = x + u - v on the box [-3, 3], U = V = {-1/2, 0, 1/2}.
inline Game linear() {
    Box box{{-3.0}, {3.0}};
    auto d = affine_dynamics("linear", {{1.0}}, {{1.0}}, {{-1.0}}, {0.0}, ControlSet::interval("U", -0.5, 0.5, 3),
                             ControlSet::interval("V", -0.5, 0.5, 3), box);
    Game g;
    g.id = "linear";
    g.x0 = {0.0};
    g.initial_box = detail::around(g.x0, 0.25);
    g.grid_box = box;
    g.dynamics = std::move(d);
    g.payoff = payoffs::linear({1.0});
    return g;
}

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"sum", "pursuit-line", "rot2d", "zero", "coupled-uv", "linear"};
    return names;
}

inline Game builtin(const std::string& name) {
    if (name == "sum") return sum();
    if (name == "pursuit-line") return pursuit_line();
    if (name == "rot2d") return rot2d();
    if (name == "zero") return zero();
    if (name == "coupled-uv") return coupled_uv();
    if (name == "linear") return linear();
    throw ConfigError("unknown builtin game '" + name + "'");
}

} // namespace games
} // namespace dgame

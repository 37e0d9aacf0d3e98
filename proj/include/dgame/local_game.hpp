#pragma once

#include <limits>
#include <vector>

#include "dynamics.hpp"

namespace dgame {

/// Lower/upper value of the one-shot game with payoff <xi, f(t, x, u, v)>.
struct LocalGameResult {
    double h_minus = 0.0;  // max_u min_v
    double h_plus = 0.0;   // min_v max_u
    std::size_t u_star = 0;  // attains the maxmin
    std::size_t v_star = 0;  // attains the minmax
    double gap = 0.0;        // h_plus - h_minus
};

// Exhaustive enumeration over U x V. Ties go to the lowest index, u first then v.
inline LocalGameResult solve_local_game(const GameDynamics& dyn, double t, ConstVec x, ConstVec xi) {
    if (!all_finite(x)) throw NumericError("solve_local_game: non-finite state", t);
    if (!all_finite(xi)) throw NumericError("solve_local_game: non-finite covector", t);
    const std::size_t nu = dyn.u_set.size(), nv = dyn.v_set.size();

    std::vector<double> payoff(nu * nv);
    State fx(dyn.state_dim);
    for (std::size_t ui = 0; ui < nu; ++ui)
        for (std::size_t vi = 0; vi < nv; ++vi) {
            dyn.eval(t, x, ui, vi, fx);
            payoff[ui * nv + vi] = dot(xi, fx);
        }

    LocalGameResult r;
    r.h_minus = -std::numeric_limits<double>::infinity();
    for (std::size_t ui = 0; ui < nu; ++ui) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t vi = 0; vi < nv; ++vi) worst = std::min(worst, payoff[ui * nv + vi]);
        if (worst > r.h_minus) {
            r.h_minus = worst;
            r.u_star = ui;
        }
    }
    r.h_plus = std::numeric_limits<double>::infinity();
    for (std::size_t vi = 0; vi < nv; ++vi) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t ui = 0; ui < nu; ++ui) best = std::max(best, payoff[ui * nv + vi]);
        if (best < r.h_plus) {
            r.h_plus = best;
            r.v_star = vi;
        }
    }
    r.gap = r.h_plus - r.h_minus;
    return r;
}

/// Selection rule for player 2: an optimal action of the local game at (t, x, xi).
inline std::size_t optimal_action_v(const GameDynamics& dyn, double t, ConstVec x, ConstVec xi) {
    return solve_local_game(dyn, t, x, xi).v_star;
}

struct GapSample {
    double t = 0.0;
    State x;
    State xi;
};

struct IsaacsGapReport {
    double max_gap = 0.0;
    GapSample argmax;
    std::size_t samples = 0;
};

// Samples t uniform on [0, horizon], x uniform in the state box, xi uniform on the unit sphere.
inline IsaacsGapReport isaacs_gap_report(const GameDynamics& dyn, std::size_t sample_count, std::uint64_t seed) {
    if (sample_count == 0) throw ArgumentError("isaacs_gap_report: sample_count must be >= 1");
    Rng rng(seed);
    const std::size_t n = dyn.state_dim;
    IsaacsGapReport rep;
    rep.samples = sample_count;
    rep.max_gap = -std::numeric_limits<double>::infinity();
    State x(n), xi(n);
    for (std::size_t k = 0; k < sample_count; ++k) {
        const double t = rng.uniform(0.0, dyn.horizon);
        for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(dyn.state_box.lo[i], dyn.state_box.hi[i]);
        double len = 0.0;
        while (len < 1e-12) {
            for (std::size_t i = 0; i < n; ++i) xi[i] = rng.normal();
            len = norm(xi);
        }
        for (double& c : xi) c /= len;
        const auto r = solve_local_game(dyn, t, x, xi);
        if (r.gap > rep.max_gap) {
            rep.max_gap = r.gap;
            rep.argmax = {t, x, xi};
        }
    }
    return rep;
}

} // namespace dgame

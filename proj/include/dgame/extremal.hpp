#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "dynamics.hpp"
#include "local_game.hpp"
#include "value_dp.hpp"

namespace dgame {

namespace detail {

inline void require_non_negative(std::initializer_list<double> xs, const char* who) {
    for (double x : xs)
        if (!(x >= 0.0)) throw ArgumentError(std::string(who) + ": arguments must be non-negative");
}

} // namespace detail

// Squared-distance bound after time dt for trajectories started d0 apart that play
// the local-game optimal actions against each other's controls.
inline double lemma1_bound(double d0, double dt, double A, double B) {
    detail::require_non_negative({d0, dt, A, B}, "lemma1_bound");
    return (1.0 + dt * A) * d0 * d0 + B * dt * dt;
}

// Same bound chained over a whole partition of mesh `mesh`.
inline double corollary1_bound(double d0, double mesh, double A, double B) {
    detail::require_non_negative({d0, mesh, A, B}, "corollary1_bound");
    return std::exp(A) * (d0 * d0 + B * mesh);
}

// Squared distance to a stable bridge at the horizon when starting on it.
inline double corollary3_bound(double mesh, double A, double B) {
    detail::require_non_negative({mesh, A, B}, "corollary3_bound");
    return std::exp(A) * B * mesh;
}

// Constant C in  g(x(1)) <= phi(t0, x0) + C sqrt(mesh):  kappa * sqrt(e^A B).
inline double proposition_constant(double kappa, double A, double B) {
    detail::require_non_negative({kappa, A, B}, "proposition_constant");
    return kappa * std::exp(0.5 * A) * std::sqrt(B);
}

// Offsets shorter than this are treated as xi = 0 (every action pair optimal).
inline constexpr double kZeroOffset = 1e-12;

inline State aiming_direction(ConstVec x, ConstVec w) {
    State xi(x.size());
    for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = x[i] - w[i];
    if (norm(xi) < kZeroOffset) std::fill(xi.begin(), xi.end(), 0.0);
    return xi;
}

struct PairedRun {
    Trajectory x_traj;
    Trajectory w_traj;
    std::vector<double> distances;  // |x(t_m) - w(t_m)| for every partition time
    std::vector<std::size_t> u_star;
    std::vector<std::size_t> v_star;
};

/// Inductive pair: on [t_m, t_{m+1}] x plays (u_ctrl, v*_m) and w plays (u*_m, v_ctrl),
/// where (u*_m, v*_m) are optimal in the local game at (t_m, x(t_m), x(t_m) - w(t_m)).
inline PairedRun paired_trajectories(const GameDynamics& dyn, ConstVec x0, ConstVec w0,
                                     const PiecewiseControl& u_ctrl, const PiecewiseControl& v_ctrl,
                                     const Partition& p, double step = 0.0) {
    if (step <= 0.0) step = default_step(mesh(p));
    PairedRun run;
    State x(x0.begin(), x0.end()), w(w0.begin(), w0.end());
    run.distances.push_back(distance(x, w));
    run.x_traj.sample_times = {p.front()};
    run.x_traj.states = {x};
    run.w_traj = run.x_traj;
    run.w_traj.states = {w};
    for (std::size_t m = 0; m < p.intervals(); ++m) {
        const double a = p[m], b = p[m + 1];
        const auto lg = solve_local_game(dyn, a, x, aiming_direction(x, w));
        run.u_star.push_back(lg.u_star);
        run.v_star.push_back(lg.v_star);
        auto xs = integrate(dyn, a, x, u_ctrl, PiecewiseControl::constant(a, b, lg.v_star), b, step);
        auto ws = integrate(dyn, a, w, PiecewiseControl::constant(a, b, lg.u_star), v_ctrl, b, step);
        x = xs.final_state();
        w = ws.final_state();
        run.x_traj.append(xs);
        run.w_traj.append(ws);
        run.distances.push_back(distance(x, w));
    }
    return run;
}

/// Player-2 extremal aiming strategy driven by the level set {phi <= level}.
/// Online: at each partition time it observes the state and emits a constant action
/// for the coming interval. Calls must come in order m = 0, 1, ...
class ExtremalStrategy {
public:
    struct Step {
        std::size_t m = 0;
        double t = 0.0;
        State x;
        State w;          // projection of x on W(t_m)
        double distance = 0.0;
        std::size_t v = 0;
    };

    ExtremalStrategy(const GameDynamics& dyn, std::shared_ptr<const ValueGrid> phi, Partition partition, double level)
        : dyn_(&dyn), phi_(std::move(phi)), partition_(std::move(partition)), level_{phi_.get(), level} {}

    // Level taken as phi(t0, x0) with t0 the first partition time.
    static ExtremalStrategy at_start(const GameDynamics& dyn, std::shared_ptr<const ValueGrid> phi,
                                     Partition partition, ConstVec x0) {
        const double level = phi->at(partition.front(), x0);
        return ExtremalStrategy(dyn, std::move(phi), std::move(partition), level);
    }

    std::size_t step(std::size_t m, ConstVec x_m) {
        if (m != records_.size()) throw ArgumentError("extremal strategy: steps must be taken in order");
        if (m >= partition_.intervals()) throw ArgumentError("extremal strategy: step index past the last interval");
        if (!all_finite(x_m)) throw NumericError("extremal strategy: non-finite state", partition_[m]);
        const double t = partition_[m];
        auto proj = project_to_levelset(x_m, t, level_);
        const State xi = aiming_direction(x_m, proj.point);
        Step s;
        s.m = m;
        s.t = t;
        s.x.assign(x_m.begin(), x_m.end());
        s.w = std::move(proj.point);
        s.distance = proj.distance;
        s.v = optimal_action_v(*dyn_, t, x_m, xi);
        records_.push_back(std::move(s));
        return records_.back().v;
    }

    void reset() { records_.clear(); }

    double level() const { return level_.level; }
    const LevelSet& level_set() const { return level_; }
    const Partition& partition() const { return partition_; }
    const ValueGrid& phi() const { return *phi_; }
    const std::vector<Step>& records() const { return records_; }

private:
    const GameDynamics* dyn_;
    std::shared_ptr<const ValueGrid> phi_;
    Partition partition_;
    LevelSet level_;
    std::vector<Step> records_;
};

struct PlayResult {
    Trajectory trajectory;
    double payoff = 0.0;
};

/// Plays an open-loop control for player 1 against the extremal strategy on the
/// strategy's partition, which must start at t0 and end at the horizon.
inline PlayResult play_vs_control(const GameDynamics& dyn, const PayoffSpec& payoff, ConstVec x0,
                                  const PiecewiseControl& u_ctrl, ExtremalStrategy& strategy, double step = 0.0) {
    const Partition& p = strategy.partition();
    if (!u_ctrl.covers(p.front(), p.back())) throw ArgumentError("play_vs_control: u control must cover the partition");
    if (step <= 0.0) step = default_step(mesh(p));
    strategy.reset();
    PlayResult out;
    State x(x0.begin(), x0.end());
    out.trajectory.sample_times = {p.front()};
    out.trajectory.states = {x};
    for (std::size_t m = 0; m < p.intervals(); ++m) {
        const double a = p[m], b = p[m + 1];
        const std::size_t v = strategy.step(m, x);
        auto seg = integrate(dyn, a, x, u_ctrl, PiecewiseControl::constant(a, b, v), b, step);
        x = seg.final_state();
        out.trajectory.append(seg);
    }
    out.payoff = payoff.g(x);
    return out;
}

} // namespace dgame

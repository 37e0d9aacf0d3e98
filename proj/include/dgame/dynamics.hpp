#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace dgame {

using State = std::vector<double>;
using ConstVec = std::span<const double>;

inline double dot(ConstVec a, ConstVec b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(ConstVec a) { return std::sqrt(dot(a, a)); }

inline double distance(ConstVec a, ConstVec b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline bool all_finite(ConstVec a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

/// Axis-aligned box in state space.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }

    bool contains(ConstVec x, double tol = 0.0) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
        return true;
    }

    Box inflated(double r) const {
        Box b = *this;
        for (std::size_t i = 0; i < b.lo.size(); ++i) {
            b.lo[i] -= r;
            b.hi[i] += r;
        }
        return b;
    }

    void validate() const {
        if (lo.size() != hi.size() || lo.empty()) throw ConfigError("box: lo/hi dimension mismatch or empty");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw ConfigError("box: axis " + std::to_string(i) + " needs lo < hi");
    }
};

/// Finite, ordered action set. Index order is the tie-breaking order everywhere.
class ControlSet {
public:
    ControlSet() = default;

    ControlSet(std::string label, std::vector<std::vector<double>> actions)
        : label_(std::move(label)), actions_(std::move(actions)) {
        if (actions_.empty()) throw ConfigError("control set '" + label_ + "' is empty");
        const std::size_t d = actions_.front().size();
        if (d == 0) throw ConfigError("control set '" + label_ + "' has zero-dimensional actions");
        for (const auto& a : actions_) {
            if (a.size() != d) throw ConfigError("control set '" + label_ + "' mixes action dimensions");
            if (!all_finite(a)) throw ConfigError("control set '" + label_ + "' has non-finite action");
        }
    }

    // Scalar discretization lo, lo+h, ..., hi with `count` points.
    static ControlSet interval(std::string label, double lo, double hi, std::size_t count) {
        if (count == 0) throw ConfigError("interval(): count must be positive");
        if (count == 1) return ControlSet(std::move(label), {{lo}});
        if (!(lo < hi)) throw ConfigError("interval(): needs lo < hi");
        std::vector<std::vector<double>> pts;
        pts.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(count - 1);
            pts.push_back({i + 1 == count ? hi : lo + s * (hi - lo)});
        }
        return ControlSet(std::move(label), std::move(pts));
    }

    const std::string& label() const { return label_; }
    std::size_t size() const { return actions_.size(); }
    std::size_t dim() const { return actions_.front().size(); }
    const std::vector<double>& operator[](std::size_t i) const { return actions_[i]; }
    const std::vector<std::vector<double>>& actions() const { return actions_; }

    std::optional<std::size_t> find(ConstVec a) const {
        for (std::size_t i = 0; i < actions_.size(); ++i)
            if (actions_[i].size() == a.size() && std::equal(a.begin(), a.end(), actions_[i].begin())) return i;
        return std::nullopt;
    }

    double max_norm() const {
        double m = 0.0;
        for (const auto& a : actions_) m = std::max(m, norm(a));
        return m;
    }

private:
    std::string label_;
    std::vector<std::vector<double>> actions_;
};

// f(t, x, u, v) written into `out` (size = state dimension).
using DynamicsFn = std::function<void(double t, ConstVec x, ConstVec u, ConstVec v, std::span<double> out)>;

/// Controlled dynamics x' = f(t,x,u,v) with declared regularity constants.
struct GameDynamics {
    std::string name;
    std::size_t state_dim = 0;
    DynamicsFn f;
    ControlSet u_set;
    ControlSet v_set;
    double f_bound = 0.0;  // sup |f|
    double lip_c = 0.0;    // |f(t,x)-f(s,y)| <= c(|t-s| + |x-y|)
    bool separated = false;  // f = a(t,x,u) + b(t,x,v)
    Box state_box;           // region where the constants were established / validated
    double horizon = 1.0;

    void eval(double t, ConstVec x, std::size_t ui, std::size_t vi, std::span<double> out) const {
        f(t, x, u_set[ui], v_set[vi], out);
    }

    State eval(double t, ConstVec x, std::size_t ui, std::size_t vi) const {
        State out(state_dim);
        eval(t, x, ui, vi, out);
        return out;
    }
};

/// Checked evaluation of f with action vectors that must belong to the declared sets.
inline State eval_dynamics(const GameDynamics& dyn, double t, ConstVec x, ConstVec u, ConstVec v) {
    if (!(t >= 0.0 && t <= dyn.horizon)) throw ArgumentError("eval_dynamics: t outside [0, horizon]");
    if (x.size() != dyn.state_dim) throw ArgumentError("eval_dynamics: state dimension mismatch");
    if (!all_finite(x)) throw NumericError("eval_dynamics: non-finite state", t);
    const auto ui = dyn.u_set.find(u);
    if (!ui) throw InvalidActionError("eval_dynamics: u not in " + dyn.u_set.label());
    const auto vi = dyn.v_set.find(v);
    if (!vi) throw InvalidActionError("eval_dynamics: v not in " + dyn.v_set.label());
    return dyn.eval(t, x, *ui, *vi);
}

struct DerivedConstants {
    double A = 0.0;
    double B = 0.0;
};

// Growth constants of the trajectory comparison estimate.
inline DerivedConstants derived_constants(double f_bound, double lip_c) {
    if (f_bound < 0.0 || lip_c < 0.0 || !std::isfinite(f_bound) || !std::isfinite(lip_c))
        throw ConfigError("derived_constants: constants must be finite and non-negative");
    return {3.0 * lip_c + 2.0 * f_bound, 4.0 * f_bound * f_bound + 2.0 * lip_c * (1.0 + f_bound)};
}

inline DerivedConstants derived_constants(const GameDynamics& dyn) {
    return derived_constants(dyn.f_bound, dyn.lip_c);
}

struct ConstantCheck {
    double max_speed = 0.0;      // sampled sup |f|
    double max_quotient = 0.0;   // sampled Lipschitz quotient
    bool bound_ok = true;
    bool lipschitz_ok = true;
};

// Samples (t, x, u, v) over [0, horizon] x state_box and checks the declared constants.
inline ConstantCheck check_declared_constants(const GameDynamics& dyn, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    ConstantCheck out;
    const std::size_t n = dyn.state_dim;
    State x(n), y(n), fx(n), fy(n);
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = rng.uniform(0.0, dyn.horizon);
        const double s = rng.uniform(0.0, dyn.horizon);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.uniform(dyn.state_box.lo[i], dyn.state_box.hi[i]);
            y[i] = rng.uniform(dyn.state_box.lo[i], dyn.state_box.hi[i]);
        }
        const std::size_t ui = rng.index(dyn.u_set.size());
        const std::size_t vi = rng.index(dyn.v_set.size());
        dyn.eval(t, x, ui, vi, fx);
        dyn.eval(s, y, ui, vi, fy);
        out.max_speed = std::max({out.max_speed, norm(fx), norm(fy)});
        const double denom = std::abs(t - s) + distance(x, y);
        if (denom > 1e-9) out.max_quotient = std::max(out.max_quotient, distance(fx, fy) / denom);
    }
    out.bound_ok = out.max_speed <= dyn.f_bound + 1e-12;
    out.lipschitz_ok = out.max_quotient <= dyn.lip_c + 1e-9;
    return out;
}

/// Ordered times t_0 < ... < t_N.
class Partition {
public:
    explicit Partition(std::vector<double> times, double horizon = 1.0) : times_(std::move(times)) {
        if (times_.size() < 2) throw ArgumentError("partition needs at least two times");
        for (std::size_t i = 1; i < times_.size(); ++i)
            if (!(times_[i] > times_[i - 1])) throw ArgumentError("partition times must be strictly increasing");
        if (times_.back() != horizon) throw ArgumentError("partition must end at the horizon");
    }

    static Partition uniform(double t0, double t1, std::size_t intervals) {
        if (intervals == 0) throw ArgumentError("uniform partition needs at least one interval");
        if (!(t0 < t1)) throw ArgumentError("uniform partition needs t0 < t1");
        std::vector<double> t(intervals + 1);
        for (std::size_t m = 0; m <= intervals; ++m)
            t[m] = t0 + (t1 - t0) * static_cast<double>(m) / static_cast<double>(intervals);
        t.back() = t1;
        return Partition(std::move(t), t1);
    }

    const std::vector<double>& times() const { return times_; }
    std::size_t intervals() const { return times_.size() - 1; }
    double operator[](std::size_t m) const { return times_[m]; }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }

private:
    std::vector<double> times_;
};

inline double mesh(const Partition& p) {
    double m = 0.0;
    const auto& t = p.times();
    for (std::size_t i = 1; i < t.size(); ++i) m = std::max(m, t[i] - t[i - 1]);
    return m;
}

/// Right-continuous piecewise-constant control: action index `actions[k]` on
/// [breaks[k], breaks[k+1]).
class PiecewiseControl {
public:
    PiecewiseControl() = default;

    PiecewiseControl(std::vector<double> breaks, std::vector<std::size_t> actions)
        : breaks_(std::move(breaks)), actions_(std::move(actions)) {
        if (breaks_.size() < 2 || actions_.size() + 1 != breaks_.size())
            throw ArgumentError("piecewise control: need K+1 breakpoints for K actions");
        for (std::size_t i = 1; i < breaks_.size(); ++i)
            if (!(breaks_[i] > breaks_[i - 1])) throw ArgumentError("piecewise control: breakpoints must increase");
    }

    static PiecewiseControl constant(double t0, double t1, std::size_t action) {
        return PiecewiseControl({t0, t1}, {action});
    }

    // One action per partition interval.
    static PiecewiseControl on_partition(const Partition& p, std::vector<std::size_t> actions) {
        return PiecewiseControl(p.times(), std::move(actions));
    }

    double start() const { return breaks_.front(); }
    double end() const { return breaks_.back(); }
    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<std::size_t>& actions() const { return actions_; }

    std::size_t at(double t) const {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        std::size_t k = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
        return actions_[std::min(k, actions_.size() - 1)];
    }

    bool covers(double t0, double t1, double tol = 1e-12) const {
        return start() <= t0 + tol && end() >= t1 - tol;
    }

    // Copy with the action on [t, end) replaced by `action`; used to vary a control
    // only after a given time.
    PiecewiseControl overridden_after(double t, std::size_t action) const {
        if (t <= start()) return constant(start(), end(), action);
        if (t >= end()) return *this;
        std::vector<double> b;
        std::vector<std::size_t> a;
        for (std::size_t k = 0; k < actions_.size() && breaks_[k] < t; ++k) {
            b.push_back(breaks_[k]);
            a.push_back(actions_[k]);
        }
        b.push_back(t);
        a.push_back(action);
        b.push_back(end());
        return PiecewiseControl(std::move(b), std::move(a));
    }

private:
    std::vector<double> breaks_;
    std::vector<std::size_t> actions_;
};

/// Sampled solution of x' = f(t, x, u(t), v(t)). Step k runs from sample k to k+1.
struct Trajectory {
    std::vector<double> sample_times;
    std::vector<State> states;
    std::vector<std::size_t> u_record;
    std::vector<std::size_t> v_record;

    const State& final_state() const { return states.back(); }
    double final_time() const { return sample_times.back(); }

    void append(const Trajectory& tail) {
        if (states.empty()) {
            *this = tail;
            return;
        }
        sample_times.insert(sample_times.end(), tail.sample_times.begin() + 1, tail.sample_times.end());
        states.insert(states.end(), tail.states.begin() + 1, tail.states.end());
        u_record.insert(u_record.end(), tail.u_record.begin(), tail.u_record.end());
        v_record.insert(v_record.end(), tail.v_record.begin(), tail.v_record.end());
    }
};

// Default integration step for a partition of mesh `m`.
inline double default_step(double m) { return std::min(m / 20.0, 1e-3); }

/// Classical RK4 on [t0, t1] with substeps that never straddle a control breakpoint.
inline Trajectory integrate(const GameDynamics& dyn, double t0, ConstVec x0, const PiecewiseControl& u_ctrl,
                            const PiecewiseControl& v_ctrl, double t1, double step) {
    if (!(t0 <= t1)) throw ArgumentError("integrate: need t0 <= t1");
    if (!(step > 0.0)) throw ArgumentError("integrate: step must be positive");
    if (x0.size() != dyn.state_dim) throw ArgumentError("integrate: state dimension mismatch");
    if (!u_ctrl.covers(t0, t1) || !v_ctrl.covers(t0, t1))
        throw ArgumentError("integrate: controls must be defined on [t0, t1]");
    if (!all_finite(x0)) throw NumericError("integrate: non-finite initial state", t0);

    std::vector<double> cuts{t0, t1};
    for (const auto* c : {&u_ctrl, &v_ctrl})
        for (double b : c->breaks())
            if (b > t0 && b < t1) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const std::size_t n = dyn.state_dim;
    Trajectory tr;
    tr.sample_times.push_back(t0);
    tr.states.emplace_back(x0.begin(), x0.end());
    State x(x0.begin(), x0.end()), k1(n), k2(n), k3(n), k4(n), tmp(n);

    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        const double mid = 0.5 * (a + b);
        const std::size_t ui = u_ctrl.at(mid), vi = v_ctrl.at(mid);
        if (ui >= dyn.u_set.size()) throw InvalidActionError("integrate: u index out of range");
        if (vi >= dyn.v_set.size()) throw InvalidActionError("integrate: v index out of range");
        const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / step - 1e-9)));
        const double h = (b - a) / static_cast<double>(substeps);
        for (std::size_t k = 0; k < substeps; ++k) {
            const double t = a + h * static_cast<double>(k);
            dyn.eval(t, x, ui, vi, k1);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
            dyn.eval(t + 0.5 * h, tmp, ui, vi, k2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
            dyn.eval(t + 0.5 * h, tmp, ui, vi, k3);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
            dyn.eval(t + h, tmp, ui, vi, k4);
            for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            const double t_next = k + 1 == substeps ? b : a + h * static_cast<double>(k + 1);
            if (!all_finite(x)) {
                std::ostringstream os;
                os << "integrate: non-finite state at t=" << t_next;
                throw NumericError(os.str(), t_next);
            }
            tr.sample_times.push_back(t_next);
            tr.states.push_back(x);
            tr.u_record.push_back(ui);
            tr.v_record.push_back(vi);
        }
    }
    return tr;
}

// |x_{k+1} - x_k| <= f_bound * dt * (1 + tol) for every step.
inline bool trajectory_speed_ok(const Trajectory& tr, double f_bound, double tol = 1e-9) {
    for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
        const double dt = tr.sample_times[k + 1] - tr.sample_times[k];
        if (distance(tr.states[k + 1], tr.states[k]) > f_bound * dt * (1.0 + tol) + 1e-15) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Payoffs

using TerminalFn = std::function<double(ConstVec x)>;
using RunningFn = std::function<double(double t, ConstVec x, ConstVec u, ConstVec v)>;

struct RunningPayoff {
    std::string descriptor;
    RunningFn gamma;
    double bound = 0.0;      // sup |gamma|
    double lipschitz = 0.0;  // in (t, x), same sense as lip_c
};

struct PayoffSpec {
    std::string descriptor;
    TerminalFn g;
    double kappa = 0.0;
    std::optional<RunningPayoff> gamma;

    double operator()(ConstVec x) const { return g(x); }
};

namespace payoffs {

// g(x) = <a, x> + b
inline PayoffSpec linear(std::vector<double> a, double b = 0.0) {
    const double k = norm(a);
    std::ostringstream os;
    os << "linear";
    return {os.str(), [a = std::move(a), b](ConstVec x) { return dot(a, x) + b; }, k, std::nullopt};
}

inline PayoffSpec constant(double c) {
    return {"constant", [c](ConstVec) { return c; }, 0.0, std::nullopt};
}

// g(x) = |<a, x> - b|
inline PayoffSpec abs(std::vector<double> a, double b = 0.0) {
    const double k = norm(a);
    return {"abs", [a = std::move(a), b](ConstVec x) { return std::abs(dot(a, x) - b); }, k, std::nullopt};
}

// g(x) = |x - center|
inline PayoffSpec norm_to(std::vector<double> center) {
    return {"norm", [c = std::move(center)](ConstVec x) { return distance(x, c); }, 1.0, std::nullopt};
}

// g(x) = sum_k coeffs[k] * x_0^k; Lipschitz constant taken over |x_0| <= radius.
inline PayoffSpec polynomial(std::vector<double> coeffs, double radius) {
    double k = 0.0;
    for (std::size_t j = 1; j < coeffs.size(); ++j)
        k += static_cast<double>(j) * std::abs(coeffs[j]) * std::pow(radius, static_cast<double>(j - 1));
    return {"polynomial",
            [c = std::move(coeffs)](ConstVec x) {
                double s = 0.0;
                for (std::size_t j = c.size(); j-- > 0;) s = s * x[0] + c[j];
                return s;
            },
            k, std::nullopt};
}

inline RunningPayoff running_one() {
    return {"one", [](double, ConstVec, ConstVec, ConstVec) { return 1.0; }, 1.0, 0.0};
}

inline RunningPayoff running_zero() {
    return {"zero", [](double, ConstVec, ConstVec, ConstVec) { return 0.0; }, 0.0, 0.0};
}

// gamma = <u, v>; needs equal action dimensions.
inline RunningPayoff running_uv(const ControlSet& u_set, const ControlSet& v_set) {
    if (u_set.dim() != v_set.dim()) throw ConfigError("running payoff u.v needs equal action dimensions");
    return {"uv", [](double, ConstVec, ConstVec u, ConstVec v) { return dot(u, v); },
            u_set.max_norm() * v_set.max_norm(), 0.0};
}

} // namespace payoffs

struct MayerGame {
    GameDynamics dynamics;
    PayoffSpec payoff;
    std::optional<std::string> warning;
};

/// Absorbs the running payoff into an extra state coordinate y with y' = gamma and
/// terminal payoff g(x) + y. Without a running payoff the game is returned unchanged.
inline MayerGame bolza_to_mayer(const GameDynamics& dyn, const PayoffSpec& payoff) {
    if (!payoff.gamma) return {dyn, payoff, std::string("bolza_to_mayer: no running payoff, game unchanged")};
    const RunningPayoff run = *payoff.gamma;
    const std::size_t n = dyn.state_dim;

    GameDynamics aug = dyn;
    aug.name = dyn.name + "+mayer";
    aug.state_dim = n + 1;
    aug.f = [f = dyn.f, gamma = run.gamma, n](double t, ConstVec x, ConstVec u, ConstVec v, std::span<double> out) {
        f(t, x.first(n), u, v, out.first(n));
        out[n] = gamma(t, x.first(n), u, v);
    };
    aug.f_bound = std::hypot(dyn.f_bound, run.bound);
    aug.lip_c = dyn.lip_c + run.lipschitz;
    aug.separated = dyn.separated && run.bound == 0.0;
    aug.state_box.lo.push_back(-run.bound * dyn.horizon - 1.0);
    aug.state_box.hi.push_back(run.bound * dyn.horizon + 1.0);

    PayoffSpec mayer;
    mayer.descriptor = payoff.descriptor + "+y";
    mayer.g = [g = payoff.g, n](ConstVec x) { return g(x.first(n)) + x[n]; };
    mayer.kappa = std::hypot(payoff.kappa, 1.0);
    return {std::move(aug), std::move(mayer), std::nullopt};
}

} // namespace dgame

#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "parallel.hpp"

namespace dgame {

/// Tensor-product grid of `resolution[i]` equally spaced nodes per axis over `box`.
/// Node index is axis-0-fastest. `region` is the box of initial states of interest;
/// the reachable tube grown from it is where transitions must stay inside `box`.
class SpatialGrid {
public:
    SpatialGrid() = default;

    SpatialGrid(Box box, std::vector<std::size_t> resolution, std::optional<Box> region = std::nullopt)
        : box_(std::move(box)), res_(std::move(resolution)), region_(region ? std::move(*region) : box_) {
        box_.validate();
        if (res_.size() == 1 && box_.dim() > 1) res_.assign(box_.dim(), res_.front());
        if (res_.size() != box_.dim()) throw ArgumentError("grid: one resolution per axis required");
        for (auto r : res_)
            if (r < 2) throw ArgumentError("grid: resolution must be >= 2");
        if (region_.dim() != box_.dim()) throw ArgumentError("grid: region dimension mismatch");
        strides_.resize(res_.size());
        std::size_t s = 1;
        for (std::size_t i = 0; i < res_.size(); ++i) {
            strides_[i] = s;
            s *= res_[i];
        }
        count_ = s;
    }

    const Box& box() const { return box_; }
    const Box& region() const { return region_; }
    const std::vector<std::size_t>& resolution() const { return res_; }
    std::size_t dim() const { return res_.size(); }
    std::size_t node_count() const { return count_; }
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

    double spacing(std::size_t axis) const {
        return (box_.hi[axis] - box_.lo[axis]) / static_cast<double>(res_[axis] - 1);
    }

    double max_spacing() const {
        double h = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) h = std::max(h, spacing(i));
        return h;
    }

    double cell_diagonal() const {
        double s = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) s += spacing(i) * spacing(i);
        return std::sqrt(s);
    }

    double coord(std::size_t axis, std::size_t i) const {
        return i + 1 == res_[axis] ? box_.hi[axis] : box_.lo[axis] + spacing(axis) * static_cast<double>(i);
    }

    void node(std::size_t index, std::span<double> out) const {
        for (std::size_t a = 0; a < dim(); ++a) out[a] = coord(a, (index / strides_[a]) % res_[a]);
    }

    State node(std::size_t index) const {
        State x(dim());
        node(index, x);
        return x;
    }

    // Multilinear interpolation of nodal `values` at x; x is clamped into the box.
    double interpolate(std::span<const double> values, ConstVec x) const {
        constexpr std::size_t kMaxDim = 4;
        const std::size_t n = dim();
        std::size_t base = 0;
        double w[kMaxDim];
        for (std::size_t a = 0; a < n; ++a) {
            const double h = spacing(a);
            double s = (std::clamp(x[a], box_.lo[a], box_.hi[a]) - box_.lo[a]) / h;
            auto i = static_cast<std::size_t>(std::floor(s));
            if (i >= res_[a] - 1) i = res_[a] - 2;
            w[a] = std::clamp(s - static_cast<double>(i), 0.0, 1.0);
            base += i * strides_[a];
        }
        double acc = 0.0;
        for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
            double weight = 1.0;
            std::size_t idx = base;
            for (std::size_t a = 0; a < n; ++a) {
                if ((corner >> a) & 1) {
                    weight *= w[a];
                    idx += strides_[a];
                } else {
                    weight *= 1.0 - w[a];
                }
            }
            if (weight != 0.0) acc += weight * values[idx];
        }
        return acc;
    }

private:
    Box box_;
    std::vector<std::size_t> res_;
    Box region_;
    std::vector<std::size_t> strides_;
    std::size_t count_ = 0;
};

enum class ValueKind { lower, upper, candidate };

inline std::string to_string(ValueKind k) {
    switch (k) {
    case ValueKind::lower: return "lower";
    case ValueKind::upper: return "upper";
    case ValueKind::candidate: return "candidate";
    }
    return "candidate";
}

inline ValueKind value_kind_from_string(const std::string& s) {
    if (s == "lower") return ValueKind::lower;
    if (s == "upper") return ValueKind::upper;
    if (s == "candidate") return ValueKind::candidate;
    throw ConfigError("unknown value grid kind '" + s + "'");
}

/// A function phi(t, x) sampled on partition slices x grid nodes (slice-major).
struct ValueGrid {
    Partition partition;
    SpatialGrid grid;
    ValueKind kind = ValueKind::candidate;
    std::vector<double> values;
    std::size_t out_of_box = 0;  // tube nodes whose DP transitions left the grid box

    ValueGrid(Partition p, SpatialGrid g, ValueKind k)
        : partition(std::move(p)), grid(std::move(g)), kind(k),
          values((partition.intervals() + 1) * grid.node_count(), 0.0) {}

    std::size_t slices() const { return partition.intervals() + 1; }

    std::span<const double> slice(std::size_t m) const {
        return {values.data() + m * grid.node_count(), grid.node_count()};
    }
    std::span<double> slice(std::size_t m) { return {values.data() + m * grid.node_count(), grid.node_count()}; }

    double at_slice(std::size_t m, ConstVec x) const { return grid.interpolate(slice(m), x); }

    // Index of the slice at time t, if t is (within 1e-12) a partition time.
    std::optional<std::size_t> slice_index(double t) const {
        const auto& ts = partition.times();
        auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-12);
        if (it != ts.end() && std::abs(*it - t) <= 1e-12) return static_cast<std::size_t>(it - ts.begin());
        return std::nullopt;
    }

    // Nodal values at time t, linear in time between adjacent slices.
    std::vector<double> values_at_time(double t) const {
        if (auto m = slice_index(t)) return {slice(*m).begin(), slice(*m).end()};
        const auto& ts = partition.times();
        if (t < ts.front() || t > ts.back()) throw ArgumentError("value grid: time outside the partition range");
        const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
        const std::size_t lo = hi - 1;
        const double s = (t - ts[lo]) / (ts[hi] - ts[lo]);
        std::vector<double> out(grid.node_count());
        const auto a = slice(lo), b = slice(hi);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - s) * a[i] + s * b[i];
        return out;
    }

    double at(double t, ConstVec x) const {
        if (auto m = slice_index(t)) return at_slice(*m, x);
        return grid.interpolate(values_at_time(t), x);
    }

    bool all_finite() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }
};

namespace detail {

// Per-slice axis-aligned over-approximation of the states reachable from the grid
// region, grown with the largest speed found at nodes of the current tube.
inline std::vector<Box> reachable_tube(const GameDynamics& dyn, const Partition& p, const SpatialGrid& grid) {
    std::vector<Box> tube{grid.region()};
    State x(grid.dim()), fx(grid.dim());
    const double pad = grid.cell_diagonal();
    for (std::size_t m = 0; m + 1 < p.times().size(); ++m) {
        const double dt = p[m + 1] - p[m];
        const Box probe = tube.back().inflated(pad);
        double speed = 0.0;
        for (std::size_t k = 0; k < grid.node_count(); ++k) {
            grid.node(k, x);
            if (!probe.contains(x)) continue;
            for (std::size_t ui = 0; ui < dyn.u_set.size(); ++ui)
                for (std::size_t vi = 0; vi < dyn.v_set.size(); ++vi) {
                    dyn.eval(p[m], x, ui, vi, fx);
                    speed = std::max(speed, norm(fx));
                }
        }
        speed = std::min(dyn.f_bound, speed + dyn.lip_c * (pad + dt));
        tube.push_back(tube.back().inflated(speed * dt));
    }
    return tube;
}

} // namespace detail

struct OneStep {
    double value = 0.0;
    bool left_box = false;
};

// One semi-Lagrangian step at state x: max_u min_v (lower) or min_v max_u (upper) of
// next(x + dt f(t, x, u, v)) with multilinear interpolation of `next`.
inline OneStep one_step(const GameDynamics& dyn, const SpatialGrid& grid, std::span<const double> next, double t,
                        double dt, ConstVec x, ValueKind kind) {
    const std::size_t n = grid.dim();
    const std::size_t nu = dyn.u_set.size(), nv = dyn.v_set.size();
    State fx(n), y(n);
    OneStep out;
    auto look = [&](std::size_t ui, std::size_t vi) {
        dyn.eval(t, x, ui, vi, fx);
        for (std::size_t a = 0; a < n; ++a) y[a] = x[a] + dt * fx[a];
        if (!grid.box().contains(y, 1e-12)) out.left_box = true;
        return grid.interpolate(next, y);
    };
    if (kind == ValueKind::upper) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t vi = 0; vi < nv; ++vi) {
            double inner = -std::numeric_limits<double>::infinity();
            for (std::size_t ui = 0; ui < nu; ++ui) inner = std::max(inner, look(ui, vi));
            best = std::min(best, inner);
        }
        out.value = best;
    } else {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t ui = 0; ui < nu; ++ui) {
            double inner = std::numeric_limits<double>::infinity();
            for (std::size_t vi = 0; vi < nv; ++vi) inner = std::min(inner, look(ui, vi));
            best = std::max(best, inner);
        }
        out.value = best;
    }
    return out;
}

/// Backward grid dynamic programming for the lower (max-min) or upper (min-max) value.
inline ValueGrid compute_value(const GameDynamics& dyn, const PayoffSpec& payoff, const Partition& p,
                               const SpatialGrid& grid, ValueKind kind) {
    if (kind == ValueKind::candidate) throw ArgumentError("compute_value: kind must be lower or upper");
    if (grid.dim() != dyn.state_dim) throw ArgumentError("compute_value: grid dimension != state dimension");
    if (grid.dim() > 4) throw ArgumentError("compute_value: at most 4 state dimensions");

    ValueGrid v(p, grid, kind);
    const std::size_t N = p.intervals();
    const std::size_t nodes = grid.node_count();
    {
        auto last = v.slice(N);
        State x(grid.dim());
        for (std::size_t k = 0; k < nodes; ++k) {
            grid.node(k, x);
            last[k] = payoff.g(x);
        }
    }
    const auto tube = detail::reachable_tube(dyn, p, grid);
    std::vector<unsigned char> flagged(nodes);
    for (std::size_t m = N; m-- > 0;) {
        const double t = p[m], dt = p[m + 1] - p[m];
        const auto next = v.slice(m + 1);
        auto cur = v.slice(m);
        std::fill(flagged.begin(), flagged.end(), 0);
        parallel_for(
            nodes,
            [&](std::size_t k) {
                const State x = grid.node(k);
                const auto step = one_step(dyn, grid, next, t, dt, x, kind);
                cur[k] = step.value;
                if (step.left_box && tube[m].contains(x, 1e-12)) flagged[k] = 1;
            },
            4096);
        for (auto f : flagged) v.out_of_box += f;
        for (std::size_t k = 0; k < nodes; ++k)
            if (!std::isfinite(cur[k])) throw NumericError("compute_value: non-finite value", t);
    }
    return v;
}

inline ValueGrid compute_lower_value(const GameDynamics& dyn, const PayoffSpec& payoff, const Partition& p,
                                     const SpatialGrid& grid) {
    return compute_value(dyn, payoff, p, grid, ValueKind::lower);
}

inline ValueGrid compute_upper_value(const GameDynamics& dyn, const PayoffSpec& payoff, const Partition& p,
                                     const SpatialGrid& grid) {
    return compute_value(dyn, payoff, p, grid, ValueKind::upper);
}

// ---------------------------------------------------------------------------
// Level sets {x : phi(t, x) <= level}

struct LevelSet {
    const ValueGrid* phi = nullptr;
    double level = 0.0;
    double tol = 1e-9;  // membership slack on interpolated values

    bool contains(double t, ConstVec x) const { return phi->at(t, x) <= level + tol; }
};

struct Projection {
    State point;
    double distance = 0.0;
    std::size_t node = 0;   // closest sub-level node found by the scan
    bool member = false;    // x itself satisfies phi(t, x) <= level + tol
};

/// Closest point of W(t) to x. Members project to themselves. Otherwise the
/// sub-level nodes are scanned (ties to the lowest index) and the winner is moved
/// towards x along the connecting segment by bisection while it stays in W(t).
inline Projection project_to_levelset(ConstVec x, double t, const LevelSet& w) {
    const ValueGrid& phi = *w.phi;
    const SpatialGrid& grid = phi.grid;
    const auto vals = phi.values_at_time(t);
    const double cut = w.level + w.tol;
    Projection out;
    if (grid.interpolate(vals, x) <= cut) {
        out.point.assign(x.begin(), x.end());
        out.member = true;
        double best = std::numeric_limits<double>::infinity();
        State z(grid.dim());
        for (std::size_t k = 0; k < grid.node_count(); ++k) {
            if (vals[k] > cut) continue;
            grid.node(k, z);
            const double d = distance(x, z);
            if (d < best) {
                best = d;
                out.node = k;
            }
        }
        return out;
    }
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    State z(grid.dim());
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
        if (vals[k] > cut) continue;
        grid.node(k, z);
        const double d = distance(x, z);
        if (d < best) {
            best = d;
            out.node = k;
            found = true;
        }
    }
    if (!found) {
        std::ostringstream os;
        os << "level set is empty at t=" << t << " for level " << w.level;
        throw EmptyLevelSetError(os.str(), t, w.level);
    }
    const State base = grid.node(out.node);
    double lo = 0.0, hi = 1.0;
    State probe(grid.dim());
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        for (std::size_t a = 0; a < probe.size(); ++a) probe[a] = base[a] + mid * (x[a] - base[a]);
        if (grid.interpolate(vals, probe) <= cut) lo = mid;
        else hi = mid;
    }
    out.point.resize(grid.dim());
    for (std::size_t a = 0; a < probe.size(); ++a) out.point[a] = base[a] + lo * (x[a] - base[a]);
    out.distance = distance(x, out.point);
    return out;
}

inline double distance_to_set(ConstVec x, double t, const LevelSet& w) {
    return project_to_levelset(x, t, w).distance;
}

// ---------------------------------------------------------------------------
// Candidate checks

struct PropertyViolation {
    std::size_t slice = 0;
    std::size_t node = 0;
    double lhs = 0.0;  // phi(t_m, x)
    double rhs = 0.0;  // g(x) for (iii), one-step max-min for (ii)
};

struct CandidateReport {
    std::vector<PropertyViolation> terminal_violations;  // phi(1, x) >= g(x)
    std::vector<PropertyViolation> step_violations;      // one-step super-solution inequality
    std::string semicontinuity = "vacuous: multilinear interpolants are continuous";
    std::size_t checked_nodes = 0;
    double tol = 1e-9;

    bool ok() const { return terminal_violations.empty() && step_violations.empty(); }
};

// Checks phi(1, .) >= g at every node and, on every slice, the one-step inequality
// phi(t_m, x) >= max_u min_v phi(t_{m+1}, x + dt f) at all nodes (sample_count == 0)
// or at `sample_count` seeded random nodes per slice.
inline CandidateReport check_candidate_properties(const ValueGrid& phi, const GameDynamics& dyn,
                                                  const PayoffSpec& payoff, std::size_t sample_count,
                                                  std::uint64_t seed, double tol = 1e-9) {
    CandidateReport rep;
    rep.tol = tol;
    const auto& grid = phi.grid;
    const std::size_t N = phi.partition.intervals();
    State x(grid.dim());
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
        grid.node(k, x);
        const double gx = payoff.g(x);
        if (phi.slice(N)[k] < gx - tol) rep.terminal_violations.push_back({N, k, phi.slice(N)[k], gx});
    }
    Rng rng(seed);
    const bool all = sample_count == 0 || sample_count >= grid.node_count();
    for (std::size_t m = 0; m < N; ++m) {
        const double t = phi.partition[m], dt = phi.partition[m + 1] - t;
        const std::size_t count = all ? grid.node_count() : sample_count;
        for (std::size_t j = 0; j < count; ++j) {
            const std::size_t k = all ? j : rng.index(grid.node_count());
            grid.node(k, x);
            const double rhs = one_step(dyn, grid, phi.slice(m + 1), t, dt, x, ValueKind::lower).value;
            const double lhs = phi.slice(m)[k];
            ++rep.checked_nodes;
            if (lhs < rhs - tol) rep.step_violations.push_back({m, k, lhs, rhs});
        }
    }
    return rep;
}

/// Largest difference quotient between axis-adjacent nodes over all slices.
inline double lipschitz_estimate(const ValueGrid& v) {
    if (v.kind == ValueKind::candidate) throw ArgumentError("lipschitz_estimate: needs a lower or upper value grid");
    const auto& grid = v.grid;
    double best = 0.0;
    for (std::size_t m = 0; m < v.slices(); ++m) {
        const auto s = v.slice(m);
        for (std::size_t k = 0; k < grid.node_count(); ++k)
            for (std::size_t a = 0; a < grid.dim(); ++a) {
                const std::size_t i = (k / grid.stride(a)) % grid.resolution()[a];
                if (i + 1 >= grid.resolution()[a]) continue;
                best = std::max(best, std::abs(s[k + grid.stride(a)] - s[k]) / grid.spacing(a));
            }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Text serialization

inline void write_value_grid(std::ostream& os, const ValueGrid& v) {
    const auto& g = v.grid;
    os << std::setprecision(17);
    os << "dgame-value-grid 1\n";
    os << "kind " << to_string(v.kind) << "\n";
    os << "dim " << g.dim() << "\n";
    os << "box";
    for (std::size_t a = 0; a < g.dim(); ++a) os << ' ' << g.box().lo[a] << ' ' << g.box().hi[a];
    os << "\nregion";
    for (std::size_t a = 0; a < g.dim(); ++a) os << ' ' << g.region().lo[a] << ' ' << g.region().hi[a];
    os << "\nresolution";
    for (auto r : g.resolution()) os << ' ' << r;
    os << "\nslices " << v.slices() << "\ntimes";
    for (double t : v.partition.times()) os << ' ' << t;
    os << "\nout_of_box " << v.out_of_box << "\nvalues\n";
    for (std::size_t m = 0; m < v.slices(); ++m) {
        const auto s = v.slice(m);
        for (std::size_t k = 0; k < s.size(); ++k) os << (k ? " " : "") << s[k];
        os << '\n';
    }
}

inline ValueGrid read_value_grid(std::istream& is) {
    auto expect = [&](const std::string& word) {
        std::string got;
        if (!(is >> got) || got != word) throw ConfigError("value grid file: expected '" + word + "', got '" + got + "'");
    };
    auto num = [&]() {
        std::string tok;
        if (!(is >> tok)) throw ConfigError("value grid file: truncated");
        try {
            return std::stod(tok);
        } catch (const std::exception&) {
            throw ConfigError("value grid file: bad number '" + tok + "'");
        }
    };
    expect("dgame-value-grid");
    if (num() != 1) throw ConfigError("value grid file: unsupported version");
    expect("kind");
    std::string kind;
    is >> kind;
    expect("dim");
    const auto dim = static_cast<std::size_t>(num());
    if (dim == 0 || dim > 4) throw ConfigError("value grid file: bad dimension");
    Box box, region;
    expect("box");
    for (std::size_t a = 0; a < dim; ++a) {
        box.lo.push_back(num());
        box.hi.push_back(num());
    }
    expect("region");
    for (std::size_t a = 0; a < dim; ++a) {
        region.lo.push_back(num());
        region.hi.push_back(num());
    }
    expect("resolution");
    std::vector<std::size_t> res;
    for (std::size_t a = 0; a < dim; ++a) res.push_back(static_cast<std::size_t>(num()));
    expect("slices");
    const auto slices = static_cast<std::size_t>(num());
    expect("times");
    std::vector<double> times;
    for (std::size_t m = 0; m < slices; ++m) times.push_back(num());
    expect("out_of_box");
    const auto oob = static_cast<std::size_t>(num());
    expect("values");
    ValueGrid v(Partition(times, times.back()), SpatialGrid(box, res, region), value_kind_from_string(kind));
    v.out_of_box = oob;
    for (double& x : v.values) x = num();
    return v;
}

} // namespace dgame

#pragma once

// Command-line front end. Exit codes: 0 success, 1 violation / failed run,
// 2 configuration or input error, 3 experiment refused (precondition).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dgame/dgame.hpp>

namespace dgame::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kConfig = 2, kPrecondition = 3 };

namespace detail {

inline std::vector<double> parse_doubles(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "' in list '" + list + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

inline std::vector<Resolution> parse_resolutions(const std::string& list) {
    std::vector<Resolution> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        if (x == std::string::npos) throw ConfigError("resolution '" + item + "' must look like NODESxSLICES");
        try {
            out.push_back({std::stoul(item.substr(0, x)), std::stoul(item.substr(x + 1))});
        } catch (const std::exception&) {
            throw ConfigError("resolution '" + item + "' must look like NODESxSLICES");
        }
    }
    if (out.empty()) throw ConfigError("empty resolution list");
    return out;
}

// CSV rows `start,end,u_1,...,u_d` tiling [t0, horizon]; each action must be in U.
inline PiecewiseControl read_control_file(const std::string& path, const Game& game) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open control file '" + path + "'");
    std::vector<double> breaks;
    std::vector<std::size_t> actions;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("start", 0) == 0) continue;
        const auto vals = parse_doubles(line);
        if (vals.size() != 2 + game.dynamics.u_set.dim()) throw ConfigError("control file: wrong number of columns");
        if (breaks.empty()) breaks.push_back(vals[0]);
        else if (vals[0] != breaks.back()) throw ConfigError("control file: segments must be contiguous");
        breaks.push_back(vals[1]);
        const auto idx = game.dynamics.u_set.find(std::span<const double>(vals).subspan(2));
        if (!idx) throw ConfigError("control file: action not in U");
        actions.push_back(*idx);
    }
    if (breaks.empty()) throw ConfigError("control file: no segments");
    if (std::abs(breaks.front() - game.t0) > 1e-12 || std::abs(breaks.back() - game.dynamics.horizon) > 1e-12)
        throw ConfigError("control file: segments must cover [t0, 1] exactly (horizon mismatch)");
    try {
        return PiecewiseControl(std::move(breaks), std::move(actions));
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("control file: ") + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Zero-sum differential games: value grids, extremal aiming, bound verification", "dgame"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker cap (also DGAME_THREADS)");

    std::string game_spec = "pursuit-line";
    std::size_t slices = 100, nodes = 0, trials = 1000, samples = 1000;
    std::uint64_t seed = kDefaultSeed;
    std::string out_path, csv_path, cache_path, u_file;
    long u_const = -1;
    std::string meshes = "0.1,0.01,0.001", intervals = "10,100,1000", resolutions = "51x25,101x50,201x100";
    std::size_t random_controls = 100;

    auto game_opt = [&](CLI::App* sub) {
        sub->add_option("--game", game_spec, "Builtin name or game config file")->capture_default_str();
        sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    };

    auto* solve = app.add_subcommand("solve", "Lower and upper value grids; prints values at (t0, x0)");
    game_opt(solve);
    solve->add_option("--slices", slices, "Partition intervals")->capture_default_str();
    solve->add_option("--nodes", nodes, "Grid nodes per axis (0 = default)");
    solve->add_option("--out", out_path, "Write PREFIX.lower.vg and PREFIX.upper.vg");

    auto* simulate = app.add_subcommand("simulate", "Play a player-1 control against the extremal strategy");
    game_opt(simulate);
    simulate->add_option("--slices", slices, "Partition intervals")->capture_default_str();
    simulate->add_option("--nodes", nodes, "Grid nodes per axis (0 = default)");
    simulate->add_option("--cache", cache_path, "Lower value grid file (read if present, else written)");
    simulate->add_option("--u-const", u_const, "Constant action index in U");
    simulate->add_option("--u-file", u_file, "CSV control: start,end,u...");
    simulate->add_option("--out", out_path, "Trajectory CSV");

    auto* verify = app.add_subcommand("verify", "Run a verification experiment");
    std::string experiment;
    verify->add_option("experiment", experiment, "lemma1 | corollary1 | corollary3 | convergence | value-gap")
        ->required()
        ->check(CLI::IsMember({"lemma1", "corollary1", "corollary3", "convergence", "value-gap"}));
    game_opt(verify);
    verify->add_option("--trials", trials, "Trials (lemma1, corollary1) or random controls (corollary3)")
        ->capture_default_str();
    verify->add_option("--meshes", meshes, "Comma-separated meshes (corollary3, convergence)")->capture_default_str();
    verify->add_option("--intervals", intervals, "Comma-separated N (corollary1)")->capture_default_str();
    verify->add_option("--resolutions", resolutions, "NODESxSLICES list (value-gap)")->capture_default_str();
    verify->add_option("--random-controls", random_controls, "Random controls (convergence)")->capture_default_str();
    verify->add_option("--nodes", nodes, "Grid nodes per axis (0 = default)");
    verify->add_option("--out", out_path, "Report JSON path");
    verify->add_option("--csv", csv_path, "Per-trial CSV path");

    auto* gap = app.add_subcommand("gap", "Sampled Isaacs gap of the local games");
    game_opt(gap);
    gap->add_option("--samples", samples, "Samples")->capture_default_str();
    gap->add_option("--out", out_path, "Report JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kConfig;
    }

    try {
        if (threads > 0) set_thread_cap(threads);
        const Game game = config::resolve_game(game_spec);
        if (nodes == 0) nodes = default_nodes(game);

        if (solve->parsed()) {
            const Partition p = Partition::uniform(game.t0, game.dynamics.horizon, slices);
            const auto grid = game_grid(game, nodes);
            const auto lo = compute_lower_value(game.dynamics, game.payoff, p, grid);
            const auto up = compute_upper_value(game.dynamics, game.payoff, p, grid);
            if (!out_path.empty()) {
                std::ostringstream a, b;
                write_value_grid(a, lo);
                write_value_grid(b, up);
                detail::write_text(out_path + ".lower.vg", a.str());
                detail::write_text(out_path + ".upper.vg", b.str());
            }
            if (lo.out_of_box + up.out_of_box > 0) {
                err << "error: " << lo.out_of_box + up.out_of_box
                    << " grid transitions from the reachable tube left the state box; enlarge it\n";
                return kViolation;
            }
            const double vl = lo.at(game.t0, game.x0), vu = up.at(game.t0, game.x0);
            out.precision(10);
            out << "game=" << game.id << " lower=" << vl << " upper=" << vu << " gap=" << vu - vl << "\n";
            return kOk;
        }

        if (simulate->parsed()) {
            if ((u_const >= 0) == !u_file.empty())
                throw ConfigError("simulate: give exactly one of --u-const or --u-file");
            const Partition p = Partition::uniform(game.t0, game.dynamics.horizon, slices);
            PiecewiseControl u_ctrl;
            if (u_const >= 0) {
                if (static_cast<std::size_t>(u_const) >= game.dynamics.u_set.size())
                    throw ConfigError("simulate: --u-const index out of range");
                u_ctrl = PiecewiseControl::constant(p.front(), p.back(), static_cast<std::size_t>(u_const));
            } else {
                u_ctrl = detail::read_control_file(u_file, game);
            }
            std::shared_ptr<const ValueGrid> phi;
            if (!cache_path.empty() && std::ifstream(cache_path)) {
                std::ifstream in(cache_path);
                phi = std::make_shared<const ValueGrid>(read_value_grid(in));
                if (phi->grid.dim() != game.dynamics.state_dim) throw ConfigError("cache dimension does not match game");
            } else {
                phi = std::make_shared<const ValueGrid>(
                    compute_lower_value(game.dynamics, game.payoff, p, game_grid(game, nodes)));
                if (!cache_path.empty()) {
                    std::ostringstream s;
                    write_value_grid(s, *phi);
                    detail::write_text(cache_path, s.str());
                }
            }
            auto strat = ExtremalStrategy::at_start(game.dynamics, phi, p, game.x0);
            const auto res = play_vs_control(game.dynamics, game.payoff, game.x0, u_ctrl, strat);
            if (!out_path.empty()) {
                std::ostringstream s;
                s.precision(17);
                s << "t";
                for (std::size_t i = 0; i < game.dynamics.state_dim; ++i) s << ",x" << i;
                s << ",u_index,v_index\n";
                const auto& tr = res.trajectory;
                for (std::size_t k = 0; k < tr.states.size(); ++k) {
                    s << tr.sample_times[k];
                    for (double c : tr.states[k]) s << ',' << c;
                    const std::size_t step = std::min(k, tr.u_record.size() - 1);
                    s << ',' << tr.u_record[step] << ',' << tr.v_record[step] << '\n';
                }
                detail::write_text(out_path, s.str());
            }
            const auto [A, B] = derived_constants(game.dynamics);
            const double bound = strat.level() + proposition_constant(game.payoff.kappa, A, B) * std::sqrt(mesh(p));
            out.precision(10);
            out << "game=" << game.id << " payoff=" << res.payoff << " value=" << strat.level() << " bound=" << bound
                << "\n";
            return kOk;
        }

        ExperimentReport rep;
        if (gap->parsed()) {
            rep = isaacs_gap_experiment(game, samples, seed);
        } else if (experiment == "lemma1") {
            rep = verify_lemma1(game, trials, seed);
        } else if (experiment == "corollary1") {
            std::vector<std::size_t> ns;
            for (double d : detail::parse_doubles(intervals)) ns.push_back(static_cast<std::size_t>(d));
            rep = verify_corollary1(game, ns, trials, seed);
        } else if (experiment == "corollary3") {
            rep = verify_corollary3(game, detail::parse_doubles(meshes), std::min<std::size_t>(trials, 100), seed, nodes);
        } else if (experiment == "convergence") {
            rep = convergence_study(game, detail::parse_doubles(meshes), seed, nodes, random_controls);
        } else {
            rep = value_gap_study(game, detail::parse_resolutions(resolutions), seed);
        }
        const std::string text = report_json(rep);
        if (!out_path.empty()) detail::write_text(out_path, text);
        if (!csv_path.empty()) {
            std::ostringstream s;
            write_report_csv(s, rep);
            detail::write_text(csv_path, s.str());
        }
        out << rep.experiment << " game=" << rep.game << " trials=" << rep.summary.trials
            << " violations=" << rep.summary.violations << " worst_slack=" << rep.summary.worst_slack;
        if (rep.extra.contains("fitted_exponent")) out << " fitted_exponent=" << rep.extra["fitted_exponent"].dump();
        out << "\n";
        return rep.passed() ? kOk : kViolation;
    } catch (const PreconditionError& e) {
        err << "precondition: " << e.what() << "\n";
        return kPrecondition;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const ArgumentError& e) {
        err << "invalid argument: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kViolation;
    }
}

} // namespace dgame::cli

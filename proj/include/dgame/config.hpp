#pragma once

// Game configuration files.
//
// Line-oriented `key = value` text; `#` starts a comment. Values are numbers,
// double-quoted strings, bracketed lists (nestable, may span lines) or
// `interval(lo, hi, count)`. Either `builtin = "<name>"` (optionally overriding
// x0, t0 and the payoff keys), or an affine game
//
//     f = M x + Bu u + Bv v + b
//
// with keys M, Bu, Bv, b, u_set, v_set, state_box and optionally x0,
// initial_box, t0, name. Payoff keys: payoff ("linear" | "abs" | "norm" |
// "polynomial" | "constant"), payoff_coeffs, payoff_offset, payoff_center,
// kappa (declared Lipschitz constant, checked by sampling) and running
// ("none" | "zero" | "one" | "uv").

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "game.hpp"

namespace dgame::config {

struct Value {
    enum class Kind { Number, String, List, Interval };
    Kind kind = Kind::Number;
    double number = 0.0;
    std::string text;
    std::vector<Value> items;
};

using Table = std::map<std::string, Value>;

namespace detail {

class Parser {
public:
    Parser(std::string_view src, std::string key) : s_(src), key_(std::move(key)) {}

    Value parse() {
        Value v = value();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("config key '" + key_ + "': " + why + " at column " + std::to_string(pos_ + 1));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    Value value() {
        skip_ws();
        if (pos_ >= s_.size()) fail("missing value");
        const char c = s_[pos_];
        if (c == '"') return string();
        if (c == '[') return list();
        if (s_.substr(pos_, 8) == "interval" && s_.find('(', pos_) != std::string_view::npos) return interval();
        if (std::isalpha(static_cast<unsigned char>(c))) return bareword();
        return number();
    }

    // Unquoted identifier: letters, digits, '-', '_', '.', '/'.
    Value bareword() {
        const std::size_t start = pos_;
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == '/')) break;
            ++pos_;
        }
        Value v;
        v.kind = Value::Kind::String;
        v.text = std::string(s_.substr(start, pos_ - start));
        return v;
    }

    Value string() {
        ++pos_;
        const auto close = s_.find('"', pos_);
        if (close == std::string_view::npos) fail("unterminated string");
        Value v;
        v.kind = Value::Kind::String;
        v.text = std::string(s_.substr(pos_, close - pos_));
        pos_ = close + 1;
        return v;
    }

    Value list() {
        expect('[');
        Value v;
        v.kind = Value::Kind::List;
        if (eat(']')) return v;
        do {
            v.items.push_back(value());
        } while (eat(','));
        expect(']');
        return v;
    }

    Value interval() {
        pos_ += 8;
        expect('(');
        Value v;
        v.kind = Value::Kind::Interval;
        for (int i = 0; i < 3; ++i) {
            if (i > 0) expect(',');
            v.items.push_back(number());
        }
        expect(')');
        return v;
    }

    Value number() {
        skip_ws();
        const std::string rest(s_.substr(pos_));
        std::size_t used = 0;
        double d = 0.0;
        try {
            d = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        pos_ += used;
        Value v;
        v.number = d;
        return v;
    }

    std::string_view s_;
    std::string key_;
    std::size_t pos_ = 0;
};

inline std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline int bracket_balance(const std::string& s) {
    int depth = 0;
    for (char c : s) depth += (c == '[' || c == '(') - (c == ']' || c == ')');
    return depth;
}

} // namespace detail

inline Table parse(std::istream& in) {
    Table table;
    std::string line, pending;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        pending += " " + detail::strip_comment(line);
        if (detail::bracket_balance(pending) > 0) continue;
        const std::string stmt = detail::trim(pending);
        pending.clear();
        if (stmt.empty()) continue;
        const auto eq = stmt.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(stmt.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (table.count(key)) throw ConfigError("config key '" + key + "' given twice");
        table[key] = detail::Parser(detail::trim(stmt.substr(eq + 1)), key).parse();
    }
    if (!detail::trim(pending).empty()) throw ConfigError("config: unbalanced brackets at end of file");
    return table;
}

inline Table parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

namespace detail {

inline double as_number(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::Number) throw ConfigError("config key '" + key + "': expected a number");
    return v.number;
}

inline std::string as_string(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::String) throw ConfigError("config key '" + key + "': expected a string");
    return v.text;
}

inline std::vector<double> as_vector(const Value& v, const std::string& key) {
    if (v.kind == Value::Kind::Number) return {v.number};
    if (v.kind != Value::Kind::List) throw ConfigError("config key '" + key + "': expected a list of numbers");
    std::vector<double> out;
    for (const auto& item : v.items) out.push_back(as_number(item, key));
    return out;
}

inline Matrix as_matrix(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::List) throw ConfigError("config key '" + key + "': expected a matrix");
    Matrix m;
    for (const auto& row : v.items) m.push_back(as_vector(row, key));
    return m;
}

inline ControlSet as_control_set(const Value& v, const std::string& key, const std::string& label) {
    if (v.kind == Value::Kind::Interval) {
        const double count = v.items[2].number;
        if (count < 1 || count != std::floor(count)) throw ConfigError("config key '" + key + "': bad interval count");
        return ControlSet::interval(label, v.items[0].number, v.items[1].number, static_cast<std::size_t>(count));
    }
    if (v.kind != Value::Kind::List) throw ConfigError("config key '" + key + "': expected interval(...) or a point list");
    std::vector<std::vector<double>> pts;
    for (const auto& item : v.items) pts.push_back(as_vector(item, key));
    return ControlSet(label, std::move(pts));
}

inline Box as_box(const Value& v, const std::string& key) {
    const Matrix rows = as_matrix(v, key);
    Box b;
    for (const auto& r : rows) {
        if (r.size() != 2) throw ConfigError("config key '" + key + "': each axis is [lo, hi]");
        b.lo.push_back(r[0]);
        b.hi.push_back(r[1]);
    }
    b.validate();
    return b;
}

inline const Value* find(const Table& t, const std::string& key) {
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
}

inline const Value& require(const Table& t, const std::string& key) {
    if (const Value* v = find(t, key)) return *v;
    throw ConfigError("config: missing required key '" + key + "'");
}

inline double sampled_lipschitz(const TerminalFn& g, const Box& box, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = box.dim();
    State x(n), y(n);
    double q = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.uniform(box.lo[i], box.hi[i]);
            y[i] = rng.uniform(box.lo[i], box.hi[i]);
        }
        const double d = distance(x, y);
        if (d > 1e-9) q = std::max(q, std::abs(g(x) - g(y)) / d);
    }
    return q;
}

inline void apply_payoff(const Table& t, Game& game) {
    const std::size_t n = game.dynamics.state_dim;
    if (const Value* p = find(t, "payoff")) {
        const std::string kind = as_string(*p, "payoff");
        auto coeffs = [&] {
            if (const Value* c = find(t, "payoff_coeffs")) return as_vector(*c, "payoff_coeffs");
            std::vector<double> e(n, 0.0);
            e[0] = 1.0;
            return e;
        };
        const double offset = find(t, "payoff_offset") ? as_number(*find(t, "payoff_offset"), "payoff_offset") : 0.0;
        if (kind == "linear" || kind == "abs") {
            auto a = coeffs();
            if (a.size() != n) throw ConfigError("config key 'payoff_coeffs': need one coefficient per state axis");
            game.payoff = kind == "linear" ? payoffs::linear(std::move(a), offset) : payoffs::abs(std::move(a), offset);
        } else if (kind == "norm") {
            std::vector<double> c(n, 0.0);
            if (const Value* v = find(t, "payoff_center")) c = as_vector(*v, "payoff_center");
            if (c.size() != n) throw ConfigError("config key 'payoff_center': wrong dimension");
            game.payoff = payoffs::norm_to(std::move(c));
        } else if (kind == "polynomial") {
            const double radius = std::max(std::abs(game.grid_box.lo[0]), std::abs(game.grid_box.hi[0]));
            game.payoff = payoffs::polynomial(as_vector(require(t, "payoff_coeffs"), "payoff_coeffs"), radius);
        } else if (kind == "constant") {
            game.payoff = payoffs::constant(offset);
        } else {
            throw ConfigError("config key 'payoff': unknown kind '" + kind + "'");
        }
    }
    if (const Value* k = find(t, "kappa")) {
        const double declared = as_number(*k, "kappa");
        const double sampled = sampled_lipschitz(game.payoff.g, game.grid_box, 2000, 7);
        if (declared < 0.0 || sampled > declared + 1e-9)
            throw ConfigError("config key 'kappa': declared " + std::to_string(declared) +
                              " is below the sampled Lipschitz quotient " + std::to_string(sampled));
        game.payoff.kappa = declared;
    }
    if (const Value* r = find(t, "running")) {
        const std::string kind = as_string(*r, "running");
        if (kind == "none") game.payoff.gamma.reset();
        else if (kind == "zero") game.payoff.gamma = payoffs::running_zero();
        else if (kind == "one") game.payoff.gamma = payoffs::running_one();
        else if (kind == "uv") game.payoff.gamma = payoffs::running_uv(game.dynamics.u_set, game.dynamics.v_set);
        else throw ConfigError("config key 'running': unknown kind '" + kind + "'");
    }
}

} // namespace detail

inline Game game_from_table(const Table& t) {
    using namespace detail;
    Game game;
    if (const Value* b = find(t, "builtin")) {
        game = games::builtin(as_string(*b, "builtin"));
    } else {
        const Matrix M = as_matrix(require(t, "M"), "M");
        const Box box = as_box(require(t, "state_box"), "state_box");
        const std::string name = find(t, "name") ? as_string(*find(t, "name"), "name") : "affine";
        std::vector<double> bvec;
        if (const Value* v = find(t, "b")) bvec = as_vector(*v, "b");
        game.dynamics = affine_dynamics(name, M, as_matrix(require(t, "Bu"), "Bu"), as_matrix(require(t, "Bv"), "Bv"),
                                        bvec, as_control_set(require(t, "u_set"), "u_set", "U"),
                                        as_control_set(require(t, "v_set"), "v_set", "V"), box);
        game.id = name;
        game.grid_box = box;
        game.x0.resize(M.size());
        for (std::size_t i = 0; i < M.size(); ++i) game.x0[i] = 0.5 * (box.lo[i] + box.hi[i]);
        game.payoff = payoffs::linear([&] {
            std::vector<double> e(M.size(), 0.0);
            e[0] = 1.0;
            return e;
        }());
        game.initial_box = Box{game.x0, game.x0};
    }
    if (const Value* v = find(t, "x0")) {
        game.x0 = as_vector(*v, "x0");
        if (game.x0.size() != game.dynamics.state_dim) throw ConfigError("config key 'x0': wrong dimension");
        if (!find(t, "initial_box")) game.initial_box = Box{game.x0, game.x0};
    }
    if (const Value* v = find(t, "initial_box")) game.initial_box = as_box(*v, "initial_box");
    if (const Value* v = find(t, "t0")) {
        game.t0 = as_number(*v, "t0");
        if (!(game.t0 >= 0.0 && game.t0 < game.dynamics.horizon)) throw ConfigError("config key 't0': must lie in [0, 1)");
    }
    if (!game.grid_box.contains(game.x0)) throw ConfigError("config: x0 lies outside the state box");
    apply_payoff(t, game);
    return game;
}

inline Game load_game_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open game file '" + path + "'");
    return game_from_table(parse(in));
}

// A builtin name or a path to a config file.
inline Game resolve_game(const std::string& spec) {
    for (const auto& name : games::builtin_names())
        if (spec == name) return games::builtin(spec);
    return load_game_file(spec);
}

} // namespace dgame::config

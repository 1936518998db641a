#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ostream>
#include <sstream>
#include <thread>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

namespace warplab::cli {

namespace {

enum class Kind { Int, Real, Text };

struct KeyInfo {
    Kind kind;
    bool sweepable;
    const char* help;
};

const std::map<std::string, KeyInfo>& key_table() {
    static const std::map<std::string, KeyInfo> table = {
        {"n", {Kind::Int, true, "dimension"}},
        {"gamma", {Kind::Real, true, "coefficient of the Laplacian"}},
        {"lambda", {Kind::Real, true, "curvature scale"}},
        {"L", {Kind::Real, true, "half-length of the flat weight region"}},
        {"epsilon", {Kind::Real, true, "starting conformal scale, halved as needed"}},
        {"grid", {Kind::Int, true, "grid points (WARPLAB_GRID overrides the default)"}},
        {"tol", {Kind::Real, true, "verdict tolerance"}},
        {"ode-tol", {Kind::Real, true, "ODE integrator tolerance"}},
        {"delta-tol", {Kind::Real, true, "shooting tolerance on Q(2 delta) + a"}},
        {"residual-tol", {Kind::Real, true, "barrier residual tolerance"}},
        {"radius", {Kind::Real, true, "sphere radius; auto = lambda^{-1/2}"}},
        {"u-max", {Kind::Real, true, "weight maximum"}},
        {"u-min", {Kind::Real, true, "weight minimum"}},
        {"zeta", {Kind::Real, true, "model profile constant; auto = vol(S^{n-1})"}},
        {"base", {Kind::Real, true, "f = base + amplitude cos(frequency r)"}},
        {"amplitude", {Kind::Real, true, "f = base + amplitude cos(frequency r)"}},
        {"frequency", {Kind::Int, true, "f = base + amplitude cos(frequency r)"}},
        {"samples", {Kind::Int, true, "random tuples"}},
        {"seed", {Kind::Int, true, "random seed"}},
        {"metric", {Kind::Text, false, "sphere | file | auto (file when --input is given)"}},
        {"potential", {Kind::Text, false, "ric | zero"}},
        {"input", {Kind::Text, false, "input CSV (metric, or curve for profile check)"}},
        {"weight", {Kind::Text, false, "weight CSV r,u[,du,d2u]; default u = 1"}},
    };
    return table;
}

struct CommandInfo {
    const char* description;
    std::vector<std::pair<std::string, std::string>> defaults;  // "grid" default is a placeholder
    std::size_t grid_default = 4096;
};

const std::map<std::string, CommandInfo>& command_table() {
    static const std::map<std::string, CommandInfo> table = {
        {"spectrum",
         {"principal eigenvalue of -gamma Laplacian + V; passes when lambda1 >= (n-1) lambda - tol",
          {{"n", "3"}, {"gamma", "1"}, {"lambda", "1"}, {"metric", "auto"}, {"radius", "auto"},
           {"input", ""}, {"potential", "ric"}, {"grid", ""}, {"tol", "1e-6"}}}},
        {"bounds volume",
         {"volume against lambda^{-n/2} vol(S^n)",
          {{"n", "3"}, {"lambda", "1"}, {"metric", "auto"}, {"radius", "auto"}, {"input", ""}, {"grid", ""},
           {"tol", "1e-6"}}}},
        {"bounds diameter",
         {"diameter against pi lambda^{-1/2} (u_max/u_min)^{gamma (n-3)/(n-1)}",
          {{"n", "3"}, {"gamma", "1"}, {"lambda", "1"}, {"metric", "auto"}, {"radius", "auto"}, {"input", ""},
           {"u-max", "1"}, {"u-min", "1"}, {"grid", ""}, {"tol", "1e-6"}}}},
        {"bounds gamma-range",
         {"classify gamma; passes inside the sharp range", {{"n", "3"}, {"gamma", "1"}}}},
        {"counterexample large-diameter",
         {"large-diameter construction; passes when diameter > 2L and lambda1 >= n-1 - tol",
          {{"n", "5"}, {"gamma", "1.25"}, {"L", "10"}, {"epsilon", "1"}, {"grid", ""}, {"ode-tol", "1e-12"},
           {"delta-tol", "1e-12"}, {"tol", "1e-3"}},
          8193}},
        {"counterexample supercritical",
         {"periodic example above the critical gamma; passes when lambda1 > 0 and lambda1 >= c(M) - tol",
          {{"n", "3"}, {"gamma", "2.5"}, {"base", "2"}, {"amplitude", "1"}, {"frequency", "1"},
           {"epsilon", "1"}, {"grid", ""}, {"tol", "1e-6"}},
          4097}},
        {"profile model",
         {"sampled model profile and its comparison verdict",
          {{"n", "3"}, {"lambda", "1"}, {"zeta", "auto"}, {"grid", ""}, {"residual-tol", "1e-4"}}}},
        {"profile radial",
         {"centered-ball weighted profile of a metric and its comparison verdict",
          {{"n", "3"}, {"gamma", "0"}, {"lambda", "1"}, {"metric", "auto"}, {"radius", "auto"}, {"input", ""},
           {"weight", ""}, {"grid", ""}, {"residual-tol", "1e-4"}}}},
        {"profile check",
         {"barrier residual and comparison verdict of a v,I curve", {{"input", ""}, {"residual-tol", "1e-4"}}}},
        {"identity grouping",
         {"grouping identity on random admissible tuples; passes when max |residual| <= tol",
          {{"n", "3"}, {"samples", "100000"}, {"seed", "1"}, {"tol", "1e-12"}}}},
    };
    return table;
}

std::string shortest(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::optional<double> to_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(x)) return std::nullopt;
    return x;
}

std::optional<long> to_int(const std::string& s) {
    long x = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
    return x;
}

std::string canonical_scalar(const std::string& key, const std::string& raw) {
    const KeyInfo& info = key_table().at(key);
    if (info.kind == Kind::Text || raw == "auto") return raw;
    if (info.kind == Kind::Int) {
        if (auto v = to_int(raw)) return std::to_string(*v);
        if (auto d = to_real(raw); d && *d == std::floor(*d) && std::abs(*d) < 1e15) {
            return std::to_string(static_cast<long>(*d));
        }
        throw UsageError("--" + key + ": expected an integer, got '" + raw + "'");
    }
    if (auto v = to_real(raw)) return shortest(*v);
    throw UsageError("--" + key + ": expected a finite number, got '" + raw + "'");
}

std::optional<Sweep> parse_sweep(const std::string& key, const std::string& raw) {
    const KeyInfo& info = key_table().at(key);
    if (info.kind == Kind::Text || raw.find(':') == std::string::npos) return std::nullopt;
    if (!info.sweepable) throw UsageError("--" + key + " cannot be swept");
    std::vector<std::string> parts;
    std::stringstream ss(raw);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    const auto start = parts.size() == 3 ? to_real(parts[0]) : std::nullopt;
    const auto stop = parts.size() == 3 ? to_real(parts[1]) : std::nullopt;
    const auto count = parts.size() == 3 ? to_int(parts[2]) : std::nullopt;
    if (!start || !stop || !count) {
        throw UsageError("--" + key + ": sweep must look like start:stop:count, got '" + raw + "'");
    }
    if (*count < 1) throw UsageError("--" + key + ": sweep count must be at least 1");
    Sweep s{key, *start, *stop, static_cast<std::size_t>(*count)};
    for (const auto& v : s.values(info.kind == Kind::Int)) canonical_scalar(key, v);
    return s;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

bool has(const Point& p, const char* key) { return p.values.count(key) > 0; }

// Range checks shared by every command.
void validate_point(const Point& p, const std::set<std::string>& explicit_keys) {
    const std::string& c = p.command;
    if (has(p, "n")) {
        const long n = p.integer("n");
        require(n >= 2, "--n must be at least 2");
        if (c == "counterexample large-diameter") require(n >= 4, "--n must be at least 4 for large-diameter");
        if (c == "counterexample supercritical") require(n >= 3, "--n must be at least 3 for supercritical");
        if (c == "identity grouping") require(n >= 3 && n <= 5, "--n must lie in 3..5 for the grouping identity");
        if (c == "bounds gamma-range") require(n >= 3, "--n must be at least 3 for gamma-range");
    }
    if (has(p, "gamma")) require(p.real("gamma") >= 0, "--gamma must be >= 0");
    for (const char* k : {"lambda", "L", "epsilon", "tol", "ode-tol", "delta-tol", "residual-tol", "u-min", "base"}) {
        if (has(p, k)) require(p.real(k) > 0, std::string("--") + k + " must be > 0");
    }
    for (const char* k : {"radius", "zeta"}) {
        if (has(p, k) && !p.is_auto(k)) require(p.real(k) > 0, std::string("--") + k + " must be > 0 or auto");
    }
    if (has(p, "u-max")) require(p.real("u-max") >= p.real("u-min"), "--u-max must be >= --u-min");
    if (has(p, "amplitude")) {
        require(p.real("amplitude") >= 0, "--amplitude must be >= 0");
        require(p.real("amplitude") < p.real("base"), "--amplitude must be below --base so that f > 0");
    }
    if (has(p, "frequency")) require(p.integer("frequency") >= 1, "--frequency must be at least 1");
    if (has(p, "samples")) require(p.integer("samples") >= 1, "--samples must be at least 1");
    if (has(p, "seed")) require(p.integer("seed") >= 0, "--seed must be >= 0");
    if (has(p, "grid")) require(p.integer("grid") >= 17, "--grid must be at least 17");
    if (has(p, "potential")) {
        require(p.text("potential") == "ric" || p.text("potential") == "zero", "--potential must be ric or zero");
    }
    if (has(p, "metric")) {
        const std::string& m = p.text("metric");
        const bool input = !p.text("input").empty();
        require(m == "sphere" || m == "file" || m == "auto", "--metric must be sphere, file or auto");
        require(!(m == "sphere" && input), "--metric sphere conflicts with --input; drop one of them");
        require(!(m == "file" && !input), "--metric file needs --input <metric.csv>");
        if (input) {
            for (const char* k : {"radius", "grid", "n"}) {
                require(!explicit_keys.count(k),
                        std::string("--") + k + " conflicts with --input; the metric file fixes it");
            }
        }
    }
    if (c == "profile check") require(!p.text("input").empty(), "profile check needs --input <curve.csv>");
    for (const char* k : {"input", "weight"}) {
        if (has(p, k) && !p.text(k).empty()) {
            require(fs::exists(p.text(k)), std::string("--") + k + ": no such file '" + p.text(k) + "'");
        }
    }
}

// CLI11 only reads the config file when --config precedes the subcommand.
std::vector<std::string> hoist_config(const std::vector<std::string>& args) {
    std::vector<std::string> front, rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            front.push_back(args[i]);
            if (i + 1 < args.size()) front.push_back(args[++i]);
        } else if (args[i].rfind("--config=", 0) == 0) {
            front.push_back(args[i]);
        } else {
            rest.push_back(args[i]);
        }
    }
    front.insert(front.end(), rest.begin(), rest.end());
    return front;
}

struct Leaf {
    std::string command;
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string out = "warplab_out";
    unsigned jobs = 1;
};

}  // namespace

Environment Environment::from_process() {
    Environment env;
    if (const char* g = std::getenv("WARPLAB_GRID"); g && *g) env.grid = g;
    return env;
}

std::vector<std::string> Sweep::values(bool integral) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) {
        double x = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
        if (i + 1 == count && count > 1) x = stop;
        if (integral) x = std::round(x);
        // drop the last bits of interpolation noise: 1.13, not 1.1300000000000001
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.15g", x);
        out.push_back(shortest(std::strtod(buf, nullptr)));
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double Point::real(const std::string& key) const { return *to_real(values.at(key)); }

long Point::integer(const std::string& key) const { return *to_int(values.at(key)); }

const std::string& Point::text(const std::string& key) const { return values.at(key); }

std::string Point::canonical() const {
    std::string section = command;
    std::replace(section.begin(), section.end(), ' ', '.');
    std::string s = "[" + section + "]\n";
    for (const auto& [k, v] : values) s += k + " = \"" + v + "\"\n";
    return s;
}

std::string Point::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<Point> RunConfig::points() const {
    std::vector<Point> pts{{command, values}};
    for (const auto& s : sweeps) {
        const bool integral = key_table().at(s.key).kind == Kind::Int;
        std::vector<Point> next;
        for (const auto& p : pts) {
            for (const auto& v : s.values(integral)) {
                Point q = p;
                q.values[s.key] = v;
                next.push_back(std::move(q));
            }
        }
        pts = std::move(next);
    }
    return pts;
}

std::optional<RunConfig> parse_config(const std::vector<std::string>& args, std::ostream& out, const Environment& env) {
    std::optional<std::size_t> env_grid;
    if (env.grid) {
        const auto g = to_int(*env.grid);
        if (!g || *g < 17) throw UsageError("WARPLAB_GRID must be an integer >= 17, got '" + *env.grid + "'");
        env_grid = static_cast<std::size_t>(*g);
    }

    CLI::App app{"warplab: spectral and comparison geometry on warped products"};
    app.name("warplab");
    app.set_config("--config", "", "INI file with [command.subcommand] sections of key = value; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.footer("Scalar keys accept start:stop:count to sweep. Exit: 0 all pass, 1 a verdict failed, 2 usage, "
               "3 computation or stage failure.");

    std::map<std::string, CLI::App*> groups;
    std::vector<std::unique_ptr<Leaf>> leaves;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    for (const auto& [name, info] : command_table()) {
        CLI::App* parent = &app;
        std::string leaf_name = name;
        if (const auto space = name.find(' '); space != std::string::npos) {
            const std::string group = name.substr(0, space);
            leaf_name = name.substr(space + 1);
            if (!groups.count(group)) {
                groups[group] = app.add_subcommand(group, group + " subcommands");
                groups[group]->require_subcommand(1);
            }
            parent = groups[group];
        }
        auto leaf = std::make_unique<Leaf>();
        leaf->command = name;
        leaf->app = parent->add_subcommand(leaf_name, info.description);
        leaf->jobs = hw;
        for (const auto& [key, def] : info.defaults) {
            std::string value = def;
            if (key == "grid") value = std::to_string(env_grid.value_or(info.grid_default));
            leaf->values[key] = value;
            const KeyInfo& k = key_table().at(key);
            const char* type = k.kind == Kind::Int ? "INT" : k.kind == Kind::Real ? "REAL" : "TEXT";
            auto* opt = leaf->app->add_option("--" + key, leaf->values[key], k.help)->capture_default_str();
            opt->type_name(k.sweepable ? std::string(type) + "|A:B:N" : std::string(type));
            leaf->options[key] = opt;
        }
        leaf->app->add_option("--out", leaf->out, "output directory")->capture_default_str();
        leaf->app->add_option("--jobs", leaf->jobs, "worker threads for sweeps")->capture_default_str();
        leaves.push_back(std::move(leaf));
    }

    std::vector<std::string> argv = hoist_config(args);
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, out);
        return std::nullopt;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, out);
        return std::nullopt;
    } catch (const CLI::ConfigError& e) {
        throw UsageError(std::string("config file: ") + e.what() +
                         " (keys must sit under a [command.subcommand] section that accepts them)");
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const Leaf* chosen = nullptr;
    for (const auto& leaf : leaves) {
        if (leaf->app->parsed()) chosen = leaf.get();
    }
    if (!chosen) throw UsageError("no command given; run with --help");

    RunConfig cfg;
    cfg.command = chosen->command;
    cfg.out = chosen->out;
    require(!cfg.out.empty(), "--out must not be empty");
    require(chosen->jobs >= 1, "--jobs must be at least 1");
    cfg.jobs = chosen->jobs;
    for (const auto& [key, opt] : chosen->options) {
        if (opt->count() > 0) cfg.explicit_keys.insert(key);
    }
    for (const auto& [key, raw] : chosen->values) {
        if (auto s = parse_sweep(key, raw)) {
            cfg.sweeps.push_back(*s);
            cfg.values[key] = canonical_scalar(key, s->values(key_table().at(key).kind == Kind::Int).front());
        } else {
            cfg.values[key] = canonical_scalar(key, raw);
        }
    }
    for (const auto& p : cfg.points()) validate_point(p, cfg.explicit_keys);
    return cfg;
}

}  // namespace warplab::cli

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace warplab::cli {

namespace fs = std::filesystem;

// Exit codes.
inline constexpr int exit_pass = 0;
inline constexpr int exit_verdict_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_error = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Environment {
    std::optional<std::string> grid;  // WARPLAB_GRID

    static Environment from_process();
};

// start:stop:count, inclusive of both ends.
struct Sweep {
    std::string key;
    double start;
    double stop;
    std::size_t count;

    std::vector<std::string> values(bool integral) const;
};

// One fully resolved run: every key of the command has a scalar value.
struct Point {
    std::string command;
    std::map<std::string, std::string> values;

    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    bool is_auto(const std::string& key) const { return text(key) == "auto"; }

    // key = value lines under a [command] section; loadable with --config.
    std::string canonical() const;
    // 16 hex digits of a 64-bit FNV-1a hash of canonical().
    std::string hash() const;
};

struct RunConfig {
    std::string command;  // "spectrum", "bounds volume", ...
    std::map<std::string, std::string> values;
    std::set<std::string> explicit_keys;  // set by flag or config file
    std::vector<Sweep> sweeps;
    fs::path out;
    unsigned jobs = 1;

    // Cartesian product of the sweeps, first sweep varying slowest.
    std::vector<Point> points() const;
};

// Parses argv (without the program name). Returns nullopt after printing
// help to `out`. Throws UsageError for unknown commands or keys, malformed
// or conflicting values.
std::optional<RunConfig> parse_config(const std::vector<std::string>& args, std::ostream& out,
                                      const Environment& env = Environment::from_process());

struct RunOutcome {
    enum class Status { Pass, Fail, Error } status;
    std::string summary;  // one line
    std::string stage;    // set for pipeline failures
};

// Runs one point, writing artifacts into dir.
RunOutcome run_point(const Point& point, const fs::path& dir);

// Runs every point (in a worker pool when there is a sweep), prints one
// summary line per run and returns the exit code.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_config + execute.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace warplab::cli

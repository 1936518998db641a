#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "warplab/bounds.hpp"
#include "warplab/counterexamples.hpp"
#include "warplab/errors.hpp"
#include "warplab/io.hpp"
#include "warplab/profile.hpp"
#include "warplab/spectral.hpp"
#include "warplab/warped_metric.hpp"

namespace warplab::cli {

namespace {

using Status = RunOutcome::Status;

std::string g10(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string kv(const char* key, double x) { return std::string(key) + "=" + g10(x); }

std::string status_word(Status s) {
    switch (s) {
        case Status::Pass: return "PASS";
        case Status::Fail: return "FAIL";
        case Status::Error: return "ERROR";
    }
    return "ERROR";
}

RunOutcome outcome(bool pass, std::string details) {
    return {pass ? Status::Pass : Status::Fail, std::move(details), {}};
}

geometry::WarpedMetric make_metric(const Point& p) {
    if (!p.text("input").empty()) return io::read_metric(p.text("input"));
    const double radius = p.is_auto("radius") ? 1.0 / std::sqrt(p.real("lambda")) : p.real("radius");
    return geometry::round_sphere(static_cast<int>(p.integer("n")), static_cast<std::size_t>(p.integer("grid")),
                                  radius);
}

RunOutcome run_spectrum(const Point& p, const fs::path& dir) {
    const auto metric = make_metric(p);
    const auto potential = p.text("potential") == "ric"
                               ? geometry::RadialField(geometry::curvature_profile(metric).ric_min)
                               : geometry::RadialField::constant(metric, 0.0);
    const auto res = spectral::principal_eigenvalue({metric, p.real("gamma"), potential});
    io::write_metric(dir / "metric.csv", metric);
    io::write_spectral(dir / "lambda1.json", dir / "phi.csv", metric, res);
    const double target = (metric.dimension() - 1) * p.real("lambda");
    return outcome(res.lambda1 >= target - p.real("tol"), kv("lambda1", res.lambda1) + " " +
                                                              kv("extrapolated", res.extrapolated) + " " +
                                                              kv("target", target));
}

RunOutcome report_verdict(const bounds::BoundVerdict& v, const Point& p, const fs::path& dir) {
    io::write_text(dir / "verdict.json", io::verdict_json(v));
    io::write_text(dir / "verdict.csv", std::string(io::verdict_csv_header) + "\n" + io::verdict_csv_row(v) + "\n");
    return outcome(v.lhs <= v.rhs + p.real("tol") * std::abs(v.rhs),
                   kv("lhs", v.lhs) + " " + kv("rhs", v.rhs) + " " + kv("slack", v.slack) +
                       " rigid=" + (v.rigid ? "true" : "false"));
}

RunOutcome run_bounds_volume(const Point& p, const fs::path& dir) {
    const auto metric = make_metric(p);
    io::write_metric(dir / "metric.csv", metric);
    return report_verdict(bounds::volume_verdict(metric, p.real("lambda")), p, dir);
}

RunOutcome run_bounds_diameter(const Point& p, const fs::path& dir) {
    const auto metric = make_metric(p);
    io::write_metric(dir / "metric.csv", metric);
    return report_verdict(
        bounds::diameter_verdict(metric, p.real("gamma"), p.real("lambda"), p.real("u-max"), p.real("u-min")), p,
        dir);
}

RunOutcome run_gamma_range(const Point& p, const fs::path& dir) {
    const int n = static_cast<int>(p.integer("n"));
    const auto r = bounds::gamma_range_check(n, p.real("gamma"));
    const nlohmann::json j = {
        {"n", n}, {"gamma", p.real("gamma")}, {"sharp", r.sharp}, {"universal_diameter", r.universal_diameter}};
    io::write_text(dir / "gamma_range.json", j.dump(2) + "\n");
    return outcome(r.sharp, std::string("sharp=") + (r.sharp ? "true" : "false") +
                                " universal_diameter=" + (r.universal_diameter ? "true" : "false"));
}

RunOutcome run_large_diameter(const Point& p, const fs::path& dir) {
    counterexamples::LargeDiameterParams params;
    params.n = static_cast<int>(p.integer("n"));
    params.gamma = p.real("gamma");
    params.L = p.real("L");
    params.epsilon_start = p.real("epsilon");
    params.grid = static_cast<std::size_t>(p.integer("grid"));
    params.ode_tol = p.real("ode-tol");
    params.delta_search_tol = p.real("delta-tol");
    const auto rep = counterexamples::build_large_diameter_metric(params);
    io::write_report(dir, rep);
    const bool pass = rep.diameter > 2 * params.L && rep.lambda1.lambda1 >= params.n - 1 - p.real("tol");
    return outcome(pass, kv("delta", rep.delta) + " " + kv("mu", rep.mu) + " " + kv("r0", rep.r0) + " " +
                             kv("epsilon", rep.epsilon) + " " + kv("diameter", rep.diameter) + " " +
                             kv("lambda1", rep.lambda1.lambda1) + " " + kv("residual", rep.residual_identity));
}

RunOutcome run_supercritical(const Point& p, const fs::path& dir) {
    counterexamples::SupercriticalParams params;
    params.n = static_cast<int>(p.integer("n"));
    params.gamma = p.real("gamma");
    params.f = {p.real("base"), p.real("amplitude"), static_cast<int>(p.integer("frequency"))};
    params.epsilon = p.real("epsilon");
    params.grid = static_cast<std::size_t>(p.integer("grid"));
    const auto rep = counterexamples::build_supercritical_example(params);
    io::write_report(dir, rep);
    const double c = rep.coercivity ? rep.coercivity->lambda1 : std::nan("");
    const double l1 = rep.lambda1.lambda1;
    const double tol = p.real("tol");
    const bool pass = l1 > 0 && l1 >= c - tol && rep.residual_identity <= tol;
    return outcome(pass, kv("lambda1", l1) + " " + kv("coercivity", c) + " " + kv("epsilon", rep.epsilon) + " " +
                             kv("residual", rep.residual_identity));
}

RunOutcome check_curve(const profile::ProfileCurve& curve, const Point& p, const fs::path& dir) {
    profile::ComparisonOptions opts;
    opts.residual_tol = p.real("residual-tol");
    const auto verdict = profile::comparison_verdict(curve, opts);
    const auto residual = profile::viscosity_residual(curve, opts.trim);
    io::write_text(dir / "residual.csv", io::to_csv({"v", "residual"}, {residual.v, residual.residual}));
    io::write_text(dir / "comparison.json", io::comparison_json(verdict));
    return outcome(verdict.status == profile::VerdictStatus::Holds,
                   "status=" + profile::to_string(verdict.status) + " " + kv("volume", verdict.v_measured) + " " +
                       kv("bound", verdict.v_bound) + " " + kv("worst_residual", verdict.worst_residual) + " " +
                       kv("coefficient", verdict.asymptotic.coefficient));
}

RunOutcome run_profile_model(const Point& p, const fs::path& dir) {
    const int n = static_cast<int>(p.integer("n"));
    const double zeta = p.is_auto("zeta") ? bounds::vol_round_sphere(n - 1) : p.real("zeta");
    const profile::ModelProfile model(zeta, p.real("lambda"), n);
    const auto curve = model.sample(static_cast<std::size_t>(p.integer("grid")));
    io::write_curve(dir / "model.csv", curve);
    return check_curve(curve, p, dir);
}

RunOutcome run_profile_radial(const Point& p, const fs::path& dir) {
    const auto metric = make_metric(p);
    const auto u = p.text("weight").empty()
                       ? geometry::RadialField::constant(metric, 1.0, geometry::FieldKind::Weight)
                       : io::read_field(p.text("weight"), geometry::FieldKind::Weight);
    const auto curve = profile::radial_weighted_profile(metric, u, p.real("gamma"), p.real("lambda"));
    io::write_curve(dir / "curve.csv", curve);
    return check_curve(curve, p, dir);
}

RunOutcome run_profile_check(const Point& p, const fs::path& dir) {
    return check_curve(io::read_curve(p.text("input")), p, dir);
}

RunOutcome run_identity(const Point& p, const fs::path& dir) {
    const int n = static_cast<int>(p.integer("n"));
    const long samples = p.integer("samples");
    std::mt19937_64 rng(static_cast<std::uint64_t>(p.integer("seed")));
    // admissible: 0 <= gamma < 6 - n, and gamma <= 2 when n = 4
    const double gamma_max = n == 4 ? 2.0 : 6.0 - n;
    std::uniform_real_distribution<double> gam(0.0, gamma_max), sym(-1.0, 1.0);
    double worst = 0.0;
    for (long i = 0; i < samples; ++i) {
        const double g = gam(rng), h = sym(rng), y = sym(rng);
        worst = std::max(worst, std::abs(bounds::grouping_identity_residual(n, g, h, y)));
    }
    const nlohmann::json j = {
        {"n", n}, {"samples", samples}, {"seed", p.integer("seed")}, {"max_residual", worst}};
    io::write_text(dir / "identity.json", j.dump(2) + "\n");
    return outcome(worst <= p.real("tol"), kv("max_residual", worst));
}

std::string label(const Point& p) {
    std::string s = p.command;
    for (const char* k : {"n", "gamma", "lambda", "L", "zeta", "u-max", "u-min", "base", "amplitude", "frequency",
                          "grid", "samples", "seed"}) {
        if (p.values.count(k) && !p.is_auto(k)) s += std::string(" ") + k + "=" + p.text(k);
    }
    if (p.values.count("input") && !p.text("input").empty()) s += " input=" + p.text("input");
    return s;
}

}  // namespace

RunOutcome run_point(const Point& p, const fs::path& dir) {
    try {
        fs::create_directories(dir);
        io::write_text(dir / "params.ini", p.canonical());
        const std::string& c = p.command;
        if (c == "spectrum") return run_spectrum(p, dir);
        if (c == "bounds volume") return run_bounds_volume(p, dir);
        if (c == "bounds diameter") return run_bounds_diameter(p, dir);
        if (c == "bounds gamma-range") return run_gamma_range(p, dir);
        if (c == "counterexample large-diameter") return run_large_diameter(p, dir);
        if (c == "counterexample supercritical") return run_supercritical(p, dir);
        if (c == "profile model") return run_profile_model(p, dir);
        if (c == "profile radial") return run_profile_radial(p, dir);
        if (c == "profile check") return run_profile_check(p, dir);
        if (c == "identity grouping") return run_identity(p, dir);
        return {Status::Error, "unknown command '" + c + "'", {}};
    } catch (const StageError& e) {
        std::string msg = e.what();
        if (const auto pos = msg.find("': "); pos != std::string::npos) msg = msg.substr(pos + 3);
        return {Status::Error, "stage=" + e.stage() + " " + msg, e.stage()};
    } catch (const std::exception& e) {
        return {Status::Error, e.what(), {}};
    }
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto points = config.points();
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (ec || !fs::is_directory(config.out)) {
        err << "warplab: cannot create output directory '" << config.out.string() << "'\n";
        return exit_usage;
    }

    const bool sweep = points.size() > 1 || !config.sweeps.empty();
    std::vector<fs::path> dirs;
    for (const auto& p : points) dirs.push_back(sweep ? config.out / p.hash() : config.out);

    std::vector<RunOutcome> results(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) results[i] = run_point(points[i], dirs[i]);
    };
    const std::size_t threads = std::min<std::size_t>(config.jobs, points.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    int code = exit_pass;
    std::string table = "dir";
    for (const auto& s : config.sweeps) table += "," + s.key;
    table += ",status\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& r = results[i];
        out << label(points[i]) << " " << status_word(r.status) << " " << r.summary;
        if (sweep) out << " dir=" << dirs[i].filename().string();
        out << "\n";
        if (r.status == Status::Error) code = exit_error;
        if (r.status == Status::Fail && code == exit_pass) code = exit_verdict_failed;
        table += dirs[i].filename().string();
        for (const auto& s : config.sweeps) table += "," + points[i].text(s.key);
        table += "," + status_word(r.status) + "\n";
    }
    if (sweep) io::write_text(config.out / "sweep.csv", table);
    return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> cfg;
    try {
        cfg = parse_config(args, out);
    } catch (const UsageError& e) {
        err << "warplab: " << e.what() << "\n";
        return exit_usage;
    }
    if (!cfg) return exit_pass;
    return execute(*cfg, out, err);
}

}  // namespace warplab::cli

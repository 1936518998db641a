#include "warplab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "warplab/errors.hpp"

namespace warplab::io {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw InvalidInput("not a number: '" + s + "'");
    return x;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
}

// JSON cannot hold non-finite numbers; they travel as strings.
json num(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double num(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) return parse_double(j.get<std::string>());
    return j.get<double>();
}

fs::path sidecar(const fs::path& csv) {
    fs::path p = csv;
    return p.replace_extension(".json");
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
}

template <class F>
auto json_field(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("JSON field: ") + e.what());
    }
}

}  // namespace

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return columns[i];
    }
    throw InvalidInput("CSV column '" + name + "' missing");
}

bool CsvTable::has(const std::string& name) const {
    for (const auto& h : header) {
        if (h == name) return true;
    }
    return false;
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw InvalidInput("CSV header and column count differ");
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out += ',';
        out += header[j];
    }
    out += '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != rows) throw InvalidInput("CSV columns differ in length");
    }
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j) out += ',';
            out += format_double(columns[j][i]);
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    CsvTable t;
    if (!std::getline(is, line)) throw InvalidInput("empty CSV");
    t.header = split(strip_cr(line), ',');
    t.columns.assign(t.header.size(), {});
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != t.header.size()) {
            throw InvalidInput("CSV line " + std::to_string(lineno) + ": expected " +
                               std::to_string(t.header.size()) + " fields");
        }
        for (std::size_t j = 0; j < cells.size(); ++j) t.columns[j].push_back(parse_double(cells[j]));
    }
    return t;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw InvalidInput("write failed for '" + path.string() + "'");
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text(path)); }

void write_metric(const fs::path& csv, const geometry::WarpedMetric& metric) {
    auto vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
    if (metric.derivatives_registered()) {
        write_text(csv, to_csv({"r", "w", "dw", "d2w"}, {vec(metric.grid()), vec(metric.warp()),
                                                        vec(metric.warp_d1()), vec(metric.warp_d2())}));
    } else {
        write_text(csv, to_csv({"r", "w"}, {vec(metric.grid()), vec(metric.warp())}));
    }
    const json meta = {{"n", metric.dimension()},
                       {"topology", geometry::to_string(metric.topology())},
                       {"derivatives_registered", metric.derivatives_registered()}};
    write_text(sidecar(csv), meta.dump(2) + "\n");
}

geometry::WarpedMetric read_metric(const fs::path& csv) {
    const CsvTable t = read_csv(csv);
    const json meta = parse_json(read_text(sidecar(csv)));
    const int n = json_field([&] { return meta.at("n").get<int>(); });
    const auto topo = geometry::topology_from_string(json_field([&] { return meta.at("topology").get<std::string>(); }));
    if (t.has("dw") && t.has("d2w")) {
        return geometry::WarpedMetric(n, t.column("r"), t.column("w"), t.column("dw"), t.column("d2w"), topo);
    }
    return geometry::WarpedMetric(n, t.column("r"), t.column("w"), topo);
}

void write_field(const fs::path& csv, const geometry::WarpedMetric& metric, const geometry::RadialField& u) {
    if (u.size() != metric.size()) throw GridMismatch("field and metric sizes differ");
    auto vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
    if (u.has_derivatives()) {
        write_text(csv, to_csv({"r", "u", "du", "d2u"}, {vec(metric.grid()), vec(u.values()), vec(u.d1()), vec(u.d2())}));
    } else {
        write_text(csv, to_csv({"r", "u"}, {vec(metric.grid()), vec(u.values())}));
    }
}

geometry::RadialField read_field(const fs::path& csv, geometry::FieldKind kind) {
    const CsvTable t = read_csv(csv);
    if (t.has("du") && t.has("d2u")) return geometry::RadialField(t.column("u"), t.column("du"), t.column("d2u"), kind);
    return geometry::RadialField(t.column("u"), kind);
}

void write_curvature(const fs::path& csv, const geometry::CurvatureProfile& p) {
    write_text(csv, to_csv({"r", "ric_radial", "ric_tangential", "biric_min"},
                           {p.r, p.ric_radial, p.ric_tangential, p.biric_min}));
}

namespace {

json spectral_to_json(const spectral::SpectralResult& r) {
    json levels = json::array();
    for (const auto& g : r.grid_levels) levels.push_back({{"points", g.points}, {"lambda1", num(g.lambda1)}});
    return {{"lambda1", num(r.lambda1)}, {"extrapolated", num(r.extrapolated)}, {"grid_levels", levels}};
}

spectral::SpectralResult spectral_from_json(const json& j, geometry::RadialField phi) {
    return json_field([&] {
        spectral::SpectralResult r{num(j.at("lambda1")), num(j.at("extrapolated")), std::move(phi), {}};
        for (const auto& g : j.at("grid_levels")) {
            r.grid_levels.push_back({g.at("points").get<std::size_t>(), num(g.at("lambda1"))});
        }
        return r;
    });
}

void write_phi(const fs::path& csv, const geometry::WarpedMetric& metric, const spectral::SpectralResult& r) {
    if (r.eigenfunction.size() != metric.size()) throw GridMismatch("eigenfunction and metric sizes differ");
    write_text(csv, to_csv({"r", "phi"}, {std::vector<double>(metric.grid().begin(), metric.grid().end()),
                                          std::vector<double>(r.eigenfunction.values().begin(),
                                                              r.eigenfunction.values().end())}));
}

geometry::RadialField read_phi(const fs::path& csv) {
    return geometry::RadialField(read_csv(csv).column("phi"), geometry::FieldKind::Generic);
}

json verdict_to_json(const bounds::BoundVerdict& v) {
    return {{"kind", bounds::to_string(v.kind)}, {"lhs", num(v.lhs)}, {"rhs", num(v.rhs)},
            {"slack", num(v.slack)}, {"rigid", v.rigid}};
}

json fit_to_json(const profile::SmallVolumeFit& f) {
    return {{"coefficient", num(f.coefficient)}, {"bound", num(f.bound)}, {"ok", f.ok}, {"samples", f.samples}};
}

}  // namespace

std::string spectral_json(const spectral::SpectralResult& result) { return spectral_to_json(result).dump(2) + "\n"; }

void write_spectral(const fs::path& json_path, const fs::path& csv, const geometry::WarpedMetric& metric,
                    const spectral::SpectralResult& result) {
    write_text(json_path, spectral_json(result));
    write_phi(csv, metric, result);
}

spectral::SpectralResult read_spectral(const fs::path& json_path, const fs::path& csv) {
    return spectral_from_json(parse_json(read_text(json_path)), read_phi(csv));
}

std::string verdict_json(const bounds::BoundVerdict& v) { return verdict_to_json(v).dump(2) + "\n"; }

bounds::BoundVerdict parse_verdict_json(const std::string& text) {
    const json j = parse_json(text);
    return json_field([&] {
        return bounds::BoundVerdict{bounds::bound_kind_from_string(j.at("kind").get<std::string>()), num(j.at("lhs")),
                                    num(j.at("rhs")), num(j.at("slack")), j.at("rigid").get<bool>()};
    });
}

std::string verdict_csv_row(const bounds::BoundVerdict& v) {
    return bounds::to_string(v.kind) + "," + format_double(v.lhs) + "," + format_double(v.rhs) + "," +
           format_double(v.slack) + "," + (v.rigid ? "true" : "false");
}

bounds::BoundVerdict parse_verdict_csv_row(const std::string& row) {
    const auto cells = split(strip_cr(row), ',');
    if (cells.size() != 5) throw InvalidInput("verdict row needs 5 fields");
    if (cells[4] != "true" && cells[4] != "false") throw InvalidInput("rigid must be true or false");
    return {bounds::bound_kind_from_string(cells[0]), parse_double(cells[1]), parse_double(cells[2]),
            parse_double(cells[3]), cells[4] == "true"};
}

void write_curve(const fs::path& csv, const profile::ProfileCurve& c) {
    profile::validate(c);
    write_text(csv, to_csv({"v", "I"}, {c.v, c.I}));
    const json meta = {{"n", c.n},
                       {"lambda", num(c.lambda)},
                       {"gamma", num(c.gamma)},
                       {"alpha", num(c.alpha)},
                       {"v_total", num(c.v_total)},
                       {"flags", {{"upper_bound", c.upper_bound}}}};
    write_text(sidecar(csv), meta.dump(2) + "\n");
}

profile::ProfileCurve read_curve(const fs::path& csv) {
    const CsvTable t = read_csv(csv);
    profile::ProfileCurve c;
    c.v = t.column("v");
    c.I = t.column("I");
    const fs::path meta_path = sidecar(csv);
    if (fs::exists(meta_path)) {
        const json meta = parse_json(read_text(meta_path));
        json_field([&] {
            c.n = meta.at("n").get<int>();
            c.lambda = num(meta.at("lambda"));
            c.gamma = num(meta.value("gamma", json(0.0)));
            c.alpha = num(meta.value("alpha", json(0.0)));
            c.v_total = num(meta.value("v_total", json("inf")));
            if (meta.contains("flags")) c.upper_bound = meta.at("flags").value("upper_bound", false);
            return 0;
        });
    } else if (!c.v.empty()) {
        c.v_total = c.v.back();
    }
    profile::validate(c);
    return c;
}

std::string comparison_json(const profile::ComparisonVerdict& v) {
    const json j = {{"status", profile::to_string(v.status)},
                    {"volume_ok", v.volume_ok},
                    {"v_measured", num(v.v_measured)},
                    {"v_bound", num(v.v_bound)},
                    {"worst_residual", num(v.worst_residual)},
                    {"asymptotic", fit_to_json(v.asymptotic)},
                    {"reason", v.reason}};
    return j.dump(2) + "\n";
}

profile::ComparisonVerdict parse_comparison_json(const std::string& text) {
    const json j = parse_json(text);
    return json_field([&] {
        const json& a = j.at("asymptotic");
        return profile::ComparisonVerdict{
            profile::verdict_status_from_string(j.at("status").get<std::string>()),
            j.at("volume_ok").get<bool>(),
            num(j.at("v_measured")),
            num(j.at("v_bound")),
            num(j.at("worst_residual")),
            {num(a.at("coefficient")), num(a.at("bound")), a.at("ok").get<bool>(), a.at("samples").get<std::size_t>()},
            j.at("reason").get<std::string>()};
    });
}

void write_report(const fs::path& dir, const counterexamples::ConstructionReport& rep) {
    fs::create_directories(dir);
    write_metric(dir / "metric.csv", rep.metric);
    write_field(dir / "u.csv", rep.metric, rep.u);
    write_spectral(dir / "lambda1.json", dir / "phi.csv", rep.metric, rep.lambda1);
    if (rep.coercivity) write_spectral(dir / "coercivity.json", dir / "coercivity_phi.csv", rep.metric, *rep.coercivity);
    json diag = json::object();
    for (const auto& [k, v] : rep.diagnostics) diag[k] = num(v);
    json j = {{"kind", rep.kind},
              {"n", rep.n},
              {"gamma", num(rep.gamma)},
              {"delta", num(rep.delta)},
              {"mu", num(rep.mu)},
              {"a", num(rep.a)},
              {"b", num(rep.b)},
              {"r0", num(rep.r0)},
              {"epsilon", num(rep.epsilon)},
              {"residual_identity", num(rep.residual_identity)},
              {"diameter", num(rep.diameter)},
              {"diameter_exact", rep.diameter_exact},
              {"u_kind", geometry::to_string(rep.u.kind())},
              {"lambda1", spectral_to_json(rep.lambda1)},
              {"diagnostics", diag}};
    if (rep.coercivity) j["coercivity"] = spectral_to_json(*rep.coercivity);
    write_text(dir / "report.json", j.dump(2) + "\n");
}

counterexamples::ConstructionReport read_report(const fs::path& dir) {
    const json j = parse_json(read_text(dir / "report.json"));
    auto metric = read_metric(dir / "metric.csv");
    const auto kind = geometry::field_kind_from_string(json_field([&] { return j.at("u_kind").get<std::string>(); }));
    auto u = read_field(dir / "u.csv", kind);
    return json_field([&] {
        counterexamples::ConstructionReport rep{j.at("kind").get<std::string>(),
                                                j.at("n").get<int>(),
                                                num(j.at("gamma")),
                                                metric,
                                                u,
                                                num(j.at("delta")),
                                                num(j.at("mu")),
                                                num(j.at("a")),
                                                num(j.at("b")),
                                                num(j.at("r0")),
                                                num(j.at("epsilon")),
                                                num(j.at("residual_identity")),
                                                spectral_from_json(j.at("lambda1"), read_phi(dir / "phi.csv")),
                                                num(j.at("diameter")),
                                                j.at("diameter_exact").get<bool>(),
                                                std::nullopt,
                                                {}};
        if (j.contains("coercivity")) {
            rep.coercivity = spectral_from_json(j.at("coercivity"), read_phi(dir / "coercivity_phi.csv"));
        }
        for (const auto& [k, v] : j.at("diagnostics").items()) rep.diagnostics[k] = num(v);
        return rep;
    });
}

}  // namespace warplab::io

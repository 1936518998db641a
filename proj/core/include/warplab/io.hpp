#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "warplab/bounds.hpp"
#include "warplab/counterexamples.hpp"
#include "warplab/profile.hpp"
#include "warplab/spectral.hpp"
#include "warplab/warped_metric.hpp"

namespace warplab::io {

namespace fs = std::filesystem;

// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);
double parse_double(const std::string& s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    // Throws InvalidInput when the column is missing.
    const std::vector<double>& column(const std::string& name) const;
    bool has(const std::string& name) const;
};

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const fs::path& path);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

// `r,w` (plus `dw,d2w` when derivatives are registered) and a JSON sidecar
// with the same stem: {n, topology, derivatives_registered}.
void write_metric(const fs::path& csv, const geometry::WarpedMetric& metric);
geometry::WarpedMetric read_metric(const fs::path& csv);

// `r,u` (plus `du,d2u` when present).
void write_field(const fs::path& csv, const geometry::WarpedMetric& metric, const geometry::RadialField& u);
geometry::RadialField read_field(const fs::path& csv, geometry::FieldKind kind = geometry::FieldKind::Generic);

// `r,ric_radial,ric_tangential,biric_min`
void write_curvature(const fs::path& csv, const geometry::CurvatureProfile& profile);

// {lambda1, extrapolated, grid_levels: [{points, lambda1}]} and `r,phi`.
std::string spectral_json(const spectral::SpectralResult& result);
void write_spectral(const fs::path& json, const fs::path& csv, const geometry::WarpedMetric& metric,
                    const spectral::SpectralResult& result);
spectral::SpectralResult read_spectral(const fs::path& json, const fs::path& csv);

std::string verdict_json(const bounds::BoundVerdict& v);
bounds::BoundVerdict parse_verdict_json(const std::string& text);
inline constexpr const char* verdict_csv_header = "kind,lhs,rhs,slack,rigid";
std::string verdict_csv_row(const bounds::BoundVerdict& v);
bounds::BoundVerdict parse_verdict_csv_row(const std::string& row);

// `v,I` and a JSON sidecar {n, lambda, gamma, alpha, v_total, flags: {upper_bound}}.
void write_curve(const fs::path& csv, const profile::ProfileCurve& curve);
profile::ProfileCurve read_curve(const fs::path& csv);

std::string comparison_json(const profile::ComparisonVerdict& v);
profile::ComparisonVerdict parse_comparison_json(const std::string& text);

// Directory with metric.csv (+ metric.json), u.csv, lambda1.json, phi.csv,
// optional coercivity.json / coercivity_phi.csv, and report.json.
void write_report(const fs::path& dir, const counterexamples::ConstructionReport& report);
counterexamples::ConstructionReport read_report(const fs::path& dir);

}  // namespace warplab::io

#pragma once
#include <string>
#include <vector>

#include "json.hpp"

#include "agesis/simulate.hpp"

namespace agesis {

inline constexpr const char* kToolVersion = "1.0.0";

// Shortest exact decimal with 17 significant digits, '.' decimal point,
// locale-independent (std::to_chars).
std::string format_value(double v);

// Output unit convention. Data is computed in rescaled variables; original
// units multiply times and ages by tau and divide the rate-like columns
// (boundary inflow b, age density i) by tau. The totals S, P, J are counts
// and carry no scale.
struct UnitScaling {
    bool original = false;
    double tau = 1.0;
};

// CSV writers. Files are byte-deterministic: '\n' newlines, no timestamps,
// 17-significant-digit values.
void write_trajectory_csv(const std::string& path, const Trajectory& tr,
                          const UnitScaling& units);
void write_phase_plane_csv(const std::string& path, const Trajectory& tr);
void write_age_surface_csv(const std::string& path, const AgeSurface& surf,
                           const UnitScaling& units);

void write_text_file(const std::string& path, const std::string& content);

// UTC wall-clock in ISO-8601 (manifests only; data files stay timestamp-free).
std::string iso8601_now();

// Writes <data_path>.manifest.json describing how the data file was produced.
void write_manifest(const std::string& data_path, const nlohmann::json& manifest);

// Structural JSON-schema subset: type, required, properties, items, enum.
struct SchemaIssue {
    std::string path;
    std::string message;
};
std::vector<SchemaIssue> validate_schema(const nlohmann::json& doc,
                                         const nlohmann::json& schema);

// Companion plot scripts for the CSV files.
std::string gnuplot_for_trajectory(const std::string& csv_name);
std::string gnuplot_for_surface(const std::string& csv_name);

}  // namespace agesis

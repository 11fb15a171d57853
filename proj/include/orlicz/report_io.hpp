#pragma once

// JSON and CSV persistence for reports and fields. Every double is written
// with 17 significant digits; non-finite values become null.

#include "orlicz/mesh.hpp"
#include "orlicz/moser.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace orlicz {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

std::string format_double(double v);
/// Indented JSON text with keys in insertion order and a trailing newline.
std::string dump_json(const Json& value);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

/// Header "node,x,y,value", one row per node.
void write_field_csv(const std::filesystem::path& path, const Field& field);
/// Reads the value column of a field CSV; rows must be numbered 0..n-1.
std::vector<double> read_field_values(const std::filesystem::path& path);

struct PlotTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};
void write_plot_csv(const std::filesystem::path& path, const PlotTable& table);

Json to_json(const ConditionReport& r);
Json to_json(const IndexEstimate& r);
Json to_json(const EquivalenceReport& r);
Json to_json(const NormReport& r);
Json to_json(const SolveReport& r);
Json to_json(const MoserReport& r);
Json to_json(const LadderReport& r);
Json to_json(const CritBound& r);
Json nfunction_json(const NFunction& nf);
Json mesh_json(const Mesh& mesh);

}  // namespace orlicz

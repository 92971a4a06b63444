#pragma once

#include "torsionlab/audit.hpp"
#include "torsionlab/constants.hpp"
#include "torsionlab/geometry.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace torsionlab {

using Json = nlohmann::ordered_json;

/// {"family": "disk", "R": 1} and friends. Throws BadSpec on malformed input.
DomainSpec domain_from_json(const Json& j);
Json to_json(const DomainSpec& spec);

Json to_json(const FunctionalSummary& s);
Json to_json(const BoundReport& r);
Json to_json(const ConstantTable& t);
Json to_json(const Cell& c);

/// Stable CSV columns shared by every report export.
std::string report_csv_header();
std::string report_csv_row(const BoundReport& r);

/// Pretty-printed with a trailing newline; the write goes through a temporary
/// file so readers never see a partial report.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace torsionlab

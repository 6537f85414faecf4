#pragma once

// JSON (nlohmann) and CSV encodings of every artifact the CLI writes. JSON
// values use SI units with the unit in the key name; mode numbers are 1-based.
// Every to_json has a from_json that reloads an equal value.

#include "ionweave/chain.hpp"
#include "ionweave/coupling.hpp"
#include "ionweave/designer.hpp"
#include "ionweave/sideband.hpp"
#include "ionweave/spin.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ionweave {

using json = nlohmann::json;

void to_json(json& j, const TrapConfig& v);
void from_json(const json& j, TrapConfig& v);
void to_json(json& j, const EquilibriumPositions& v);
void from_json(const json& j, EquilibriumPositions& v);
void to_json(json& j, const ModeSpectrum& v);
void from_json(const json& j, ModeSpectrum& v);
void to_json(json& j, const LambDickeMatrix& v);
void from_json(const json& j, LambDickeMatrix& v);
void to_json(json& j, const LaserLayer& v);
void from_json(const json& j, LaserLayer& v);
void to_json(json& j, const Schedule& v);
void from_json(const json& j, Schedule& v);
void to_json(json& j, const CouplingMatrix& v);
void from_json(const json& j, CouplingMatrix& v);
void to_json(json& j, const FidelityReport& v);
void from_json(const json& j, FidelityReport& v);
void to_json(json& j, const DesignRow& v);
void from_json(const json& j, DesignRow& v);
void to_json(json& j, const DesignReport& v);
void from_json(const json& j, DesignReport& v);
void to_json(json& j, const OffsetModel& v);
void from_json(const json& j, OffsetModel& v);
void to_json(json& j, const ObservableTrace& v);
void from_json(const json& j, ObservableTrace& v);
void to_json(json& j, const ThermalWeights& v);
void from_json(const json& j, ThermalWeights& v);
void to_json(json& j, const BsbTraces& v);
void from_json(const json& j, BsbTraces& v);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);

// Shortest decimal that parses back to the same double.
std::string format_number(double v);

// "# N=<rows>" header, then one comma-separated row per line.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
// Columns: step, time_s, site_1..site_N, average. Step labels go to JSON only.
void write_trace_csv(std::ostream& out, const ObservableTrace& trace);
// Columns: time_s, average_down, ion_1..ion_N.
void write_bsb_csv(std::ostream& out, const BsbTraces& traces);
// Header row then data rows, all comma separated.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

// Writes text to a file, creating parent directories; throws ValidationError
// when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);
json read_json_file(const std::filesystem::path& path);

} // namespace ionweave

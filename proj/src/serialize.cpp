#include "ionweave/serialize.hpp"

#include "ionweave/errors.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ionweave {

namespace {

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j)
{
    if (!j.is_array()) throw ValidationError("matrix JSON must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols) throw ValidationError("matrix JSON rows differ in length");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

void to_json(json& j, const TrapConfig& v)
{
    j = json{{"ion_count", v.ion_count},
             {"axial_com_frequency_hz", v.axial_com_frequency},
             {"quartic_coefficient", v.quartic_coefficient},
             {"ion_mass_kg", v.ion_mass},
             {"raman_wavevector_per_m", v.raman_wavevector}};
}
void from_json(const json& j, TrapConfig& v)
{
    j.at("ion_count").get_to(v.ion_count);
    j.at("axial_com_frequency_hz").get_to(v.axial_com_frequency);
    j.at("quartic_coefficient").get_to(v.quartic_coefficient);
    j.at("ion_mass_kg").get_to(v.ion_mass);
    j.at("raman_wavevector_per_m").get_to(v.raman_wavevector);
}

void to_json(json& j, const EquilibriumPositions& v)
{
    j = json{{"dimensionless", v.dimensionless},
             {"length_scale_m", v.length_scale},
             {"positions_m", v.physical()},
             {"gradient_residual", v.gradient_residual},
             {"iterations", v.iterations}};
}
void from_json(const json& j, EquilibriumPositions& v)
{
    j.at("dimensionless").get_to(v.dimensionless);
    j.at("length_scale_m").get_to(v.length_scale);
    j.at("gradient_residual").get_to(v.gradient_residual);
    j.at("iterations").get_to(v.iterations);
}

void to_json(json& j, const ModeSpectrum& v)
{
    j = json{{"frequencies_hz", vector_to_json(v.frequencies)},
             {"eigenvalues", vector_to_json(v.eigenvalues)},
             {"eigenvectors", matrix_to_json(v.eigenvectors)}};
}
void from_json(const json& j, ModeSpectrum& v)
{
    v.frequencies = vector_from_json(j.at("frequencies_hz"));
    v.eigenvalues = vector_from_json(j.at("eigenvalues"));
    v.eigenvectors = matrix_from_json(j.at("eigenvectors"));
}

void to_json(json& j, const LambDickeMatrix& v) { j = json{{"eta", matrix_to_json(v.eta)}}; }
void from_json(const json& j, LambDickeMatrix& v) { v.eta = matrix_from_json(j.at("eta")); }

void to_json(json& j, const LaserLayer& v)
{
    j = json{{"mode", v.mode + 1},
             {"detuning_hz", v.detuning},
             {"duration_s", v.duration},
             {"phase_rad", v.phase},
             {"rabi_hz", v.rabi}};
}
void from_json(const json& j, LaserLayer& v)
{
    v.mode = j.at("mode").get<int>() - 1;
    j.at("detuning_hz").get_to(v.detuning);
    j.at("duration_s").get_to(v.duration);
    j.at("phase_rad").get_to(v.phase);
    j.at("rabi_hz").get_to(v.rabi);
}

void to_json(json& j, const Schedule& v) { j = json{{"layers", v.layers}, {"repetitions", v.repetitions}}; }
void from_json(const json& j, Schedule& v)
{
    j.at("layers").get_to(v.layers);
    j.at("repetitions").get_to(v.repetitions);
}

void to_json(json& j, const CouplingMatrix& v)
{
    j = json{{"n", v.size()}, {"normalized", v.normalized()}, {"values", matrix_to_json(v.values())}};
}
void from_json(const json& j, CouplingMatrix& v)
{
    v = CouplingMatrix(matrix_from_json(j.at("values")), j.at("normalized").get<bool>());
}

void to_json(json& j, const FidelityReport& v)
{
    j = json{{"fidelity", v.fidelity},
             {"cosine", v.cosine},
             {"implemented", v.implemented},
             {"target", v.target},
             {"residuals", matrix_to_json(v.residuals)}};
}
void from_json(const json& j, FidelityReport& v)
{
    j.at("fidelity").get_to(v.fidelity);
    j.at("cosine").get_to(v.cosine);
    j.at("implemented").get_to(v.implemented);
    j.at("target").get_to(v.target);
    v.residuals = matrix_from_json(j.at("residuals"));
}

void to_json(json& j, const DesignRow& v)
{
    j = json{{"mode", v.mode},
             {"detuning_hz", v.detuning},
             {"duration_s", v.duration},
             {"multiplicity", v.multiplicity},
             {"weight", v.weight}};
}
void from_json(const json& j, DesignRow& v)
{
    j.at("mode").get_to(v.mode);
    j.at("detuning_hz").get_to(v.detuning);
    j.at("duration_s").get_to(v.duration);
    j.at("multiplicity").get_to(v.multiplicity);
    j.at("weight").get_to(v.weight);
}

void to_json(json& j, const DesignReport& v)
{
    j = json{{"target", v.target_name},
             {"rows", v.rows},
             {"achieved_fidelity", v.achieved_fidelity},
             {"rank_one_fidelity", v.rank_one_fidelity},
             {"base_detuning_hz", v.base_detuning},
             {"closure_satisfied", v.closure_satisfied},
             {"worst_closure_deviation", v.worst_closure_deviation},
             {"pattern_discrepancy", v.pattern_discrepancy},
             {"schedule", v.schedule},
             {"implemented_normalized", v.implemented},
             {"target_normalized", v.target}};
}
void from_json(const json& j, DesignReport& v)
{
    j.at("target").get_to(v.target_name);
    j.at("rows").get_to(v.rows);
    j.at("achieved_fidelity").get_to(v.achieved_fidelity);
    j.at("rank_one_fidelity").get_to(v.rank_one_fidelity);
    j.at("base_detuning_hz").get_to(v.base_detuning);
    j.at("closure_satisfied").get_to(v.closure_satisfied);
    j.at("worst_closure_deviation").get_to(v.worst_closure_deviation);
    j.at("pattern_discrepancy").get_to(v.pattern_discrepancy);
    j.at("schedule").get_to(v.schedule);
    j.at("implemented_normalized").get_to(v.implemented);
    j.at("target_normalized").get_to(v.target);
}

void to_json(json& j, const OffsetModel& v)
{
    j = json{{"qubit_gradient_hz_per_m", v.qubit_gradient},
             {"beam_width_m", v.beam_width_axial ? json(*v.beam_width_axial) : json(nullptr)},
             {"beam_center_offset_m", v.beam_center_offset},
             {"base_rabi_hz", v.base_rabi}};
}
void from_json(const json& j, OffsetModel& v)
{
    j.at("qubit_gradient_hz_per_m").get_to(v.qubit_gradient);
    const json& w = j.at("beam_width_m");
    v.beam_width_axial = w.is_null() ? std::nullopt : std::optional<double>(w.get<double>());
    j.at("beam_center_offset_m").get_to(v.beam_center_offset);
    j.at("base_rabi_hz").get_to(v.base_rabi);
}

void to_json(json& j, const ObservableTrace& v)
{
    j = json{{"qubits", v.qubits}, {"step", v.step},   {"label", v.label},
             {"time_s", v.time},   {"sites", v.sites}, {"average", v.average}};
}
void from_json(const json& j, ObservableTrace& v)
{
    j.at("qubits").get_to(v.qubits);
    j.at("step").get_to(v.step);
    j.at("label").get_to(v.label);
    j.at("time_s").get_to(v.time);
    j.at("sites").get_to(v.sites);
    j.at("average").get_to(v.average);
}

void to_json(json& j, const ThermalWeights& v) { j = json{{"mean_n", v.mean_n}, {"weights", v.weights}}; }
void from_json(const json& j, ThermalWeights& v)
{
    j.at("mean_n").get_to(v.mean_n);
    j.at("weights").get_to(v.weights);
}

void to_json(json& j, const BsbTraces& v)
{
    j = json{{"time_s", v.times},
             {"average_down", v.average_down},
             {"ion_down", v.ion_down},
             {"n_max", v.n_max},
             {"max_top_population", v.max_top_population},
             {"thermal", v.thermal}};
}
void from_json(const json& j, BsbTraces& v)
{
    j.at("time_s").get_to(v.times);
    j.at("average_down").get_to(v.average_down);
    j.at("ion_down").get_to(v.ion_down);
    j.at("n_max").get_to(v.n_max);
    j.at("max_top_population").get_to(v.max_top_population);
    j.at("thermal").get_to(v.thermal);
}

std::string format_number(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m)
{
    out << "# N=" << m.rows() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_number(m(i, c));
        out << '\n';
    }
}

void write_trace_csv(std::ostream& out, const ObservableTrace& trace)
{
    out << "step,time_s";
    for (int q = 0; q < trace.qubits; ++q) out << ",site_" << q + 1;
    out << ",average\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << trace.step[k] << ',' << format_number(trace.time[k]);
        for (double s : trace.sites[k]) out << ',' << format_number(s);
        out << ',' << format_number(trace.average[k]) << '\n';
    }
}

void write_bsb_csv(std::ostream& out, const BsbTraces& traces)
{
    out << "time_s,average_down";
    const std::size_t ions = traces.ion_down.empty() ? 0 : traces.ion_down.front().size();
    for (std::size_t i = 0; i < ions; ++i) out << ",ion_" << i + 1;
    out << '\n';
    for (std::size_t k = 0; k < traces.times.size(); ++k) {
        out << format_number(traces.times[k]) << ',' << format_number(traces.average_down[k]);
        for (double p : traces.ion_down[k]) out << ',' << format_number(p);
        out << '\n';
    }
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows)
{
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ValidationError("error while writing '" + path.string() + "'");
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

} // namespace ionweave

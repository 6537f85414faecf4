#include "ionweave/targets.hpp"

#include "ionweave/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace ionweave {

namespace {

bool is_power_of_two(long d) { return d > 0 && (d & (d - 1)) == 0; }

std::string location(int line) { return "line " + std::to_string(line) + ": "; }

bool skip_line(const std::string& line)
{
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

} // namespace

TargetGraph target_from_matrix(const Eigen::MatrixXd& m, std::string name)
{
    if (m.rows() < 2 || m.rows() != m.cols()) {
        throw ValidationError("target '" + name + "': expected a square matrix with N >= 2, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    CouplingMatrix raw(m, false); // validates symmetry and diagonal
    if (raw.is_zero()) throw ValidationError("target '" + name + "' has no couplings (zero matrix)");
    return TargetGraph{std::move(name), raw.max_normalized(), {}};
}

TargetGraph cross_polytope(int n_qubits)
{
    if (n_qubits < 4 || n_qubits % 2 != 0)
        throw ValidationError("cross_polytope: qubit count must be even and >= 4, got " + std::to_string(n_qubits));
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(n_qubits, n_qubits);
    for (int i = 0; i < n_qubits; ++i) {
        m(i, i) = 0.0;
        m(i, n_qubits - 1 - i) = 0.0;
    }
    auto t = target_from_matrix(m, "cross_polytope");
    t.parameters["n"] = n_qubits;
    t.parameters["dimension"] = n_qubits / 2;
    return t;
}

TargetGraph leaves_only_tree(int n_qubits, double s)
{
    if (n_qubits < 2) throw ValidationError("leaves_only_tree: need at least 2 qubits");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_qubits, n_qubits);
    for (int i = 0; i < n_qubits; ++i) {
        for (int j = 0; j < n_qubits; ++j) {
            const long d = std::labs(static_cast<long>(i) - j);
            if (!is_power_of_two(d)) continue;
            const int l = static_cast<int>(std::lround(std::log2(static_cast<double>(d))));
            m(i, j) = std::exp2(l * s);
        }
    }
    auto t = target_from_matrix(m, "leaves_only_tree");
    t.parameters["n"] = n_qubits;
    t.parameters["s"] = s;
    return t;
}

TargetGraph cayley_tree_c36()
{
    // 1-based: centers 3-4, leaves 1,5 on 3 and 2,6 on 4
    constexpr int edges[5][2] = {{3, 4}, {3, 1}, {3, 5}, {4, 2}, {4, 6}};
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
    for (const auto& e : edges) m(e[0] - 1, e[1] - 1) = m(e[1] - 1, e[0] - 1) = 1.0;
    auto t = target_from_matrix(m, "cayley_c36");
    t.parameters["n"] = 6;
    t.parameters["branching"] = 3;
    return t;
}

TargetGraph triangular_torus(int rows, int cols)
{
    if (rows < 3 || cols < 3)
        throw ValidationError("triangular_torus: rows and cols must be >= 3 for distinct neighbours");
    const int n = rows * cols;
    constexpr int offsets[6][2] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, 1}, {-1, -1}};
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            for (const auto& o : offsets) {
                const int rr = ((r + o[0]) % rows + rows) % rows;
                const int cc = ((c + o[1]) % cols + cols) % cols;
                m(r * cols + c, rr * cols + cc) = 1.0;
            }
        }
    }
    auto t = target_from_matrix(m, "triangular_torus");
    t.parameters["rows"] = rows;
    t.parameters["cols"] = cols;
    return t;
}

Eigen::MatrixXd read_matrix_csv(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skip_line(line)) continue;
        for (char& ch : line)
            if (ch == ',' || ch == ';') ch = ' ';
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw ValidationError(location(lineno) + "cannot parse '" + tok + "' as a number");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) throw ValidationError("matrix file is empty");
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n) {
            throw ValidationError("matrix row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                                  " entries, expected " + std::to_string(n));
        }
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Eigen::MatrixXd read_edge_list(std::istream& in)
{
    struct Edge {
        long i, j;
        double w;
        int line;
    };
    std::vector<Edge> edges;
    long declared = 0;
    long largest = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            const auto key = line.find("N=", hash);
            if (key != std::string::npos) declared = std::strtol(line.c_str() + key + 2, nullptr, 10);
            continue;
        }
        if (skip_line(line)) continue;
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ls(line);
        Edge e{0, 0, 0.0, lineno};
        std::string extra;
        if (!(ls >> e.i >> e.j >> e.w) || (ls >> extra))
            throw ValidationError(location(lineno) + "expected 'i j weight'");
        if (e.i < 1 || e.j < 1) throw ValidationError(location(lineno) + "indices are 1-based");
        if (e.i == e.j) throw ValidationError(location(lineno) + "self-coupling (" + std::to_string(e.i) + "," +
                                              std::to_string(e.j) + ") is not allowed");
        largest = std::max({largest, e.i, e.j});
        edges.push_back(e);
    }
    const long n = declared > 0 ? declared : largest;
    if (n < 2) throw ValidationError("edge list defines fewer than 2 qubits");
    if (largest > n)
        throw ValidationError("edge index " + std::to_string(largest) + " exceeds declared N=" + std::to_string(n));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges) {
        double& a = m(e.i - 1, e.j - 1);
        if (a != 0.0 && a != e.w)
            throw ValidationError(location(e.line) + "conflicting weight for pair (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + ")");
        a = e.w;
        m(e.j - 1, e.i - 1) = e.w;
    }
    return m;
}

TargetGraph custom_target(const std::filesystem::path& file, TargetFileFormat format)
{
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open target file '" + file.string() + "'");
    if (format == TargetFileFormat::automatic)
        format = file.extension() == ".csv" ? TargetFileFormat::matrix : TargetFileFormat::edges;
    const Eigen::MatrixXd m = format == TargetFileFormat::matrix ? read_matrix_csv(in) : read_edge_list(in);
    try {
        auto t = target_from_matrix(m, file.filename().string());
        t.parameters["n"] = static_cast<double>(m.rows());
        return t;
    } catch (const ValidationError& e) {
        throw ValidationError(file.string() + ": " + e.what());
    }
}

} // namespace ionweave

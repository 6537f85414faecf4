#pragma once

#include "ionweave/coupling.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace ionweave {

// A desired coupling graph J^d: symmetric, zero diagonal, max |J| = 1.
struct TargetGraph {
    std::string name;
    CouplingMatrix coupling;
    std::map<std::string, double> parameters;

    Eigen::Index size() const { return coupling.size(); }
};

// All pairs coupled except the chain-mirror pairs (i, N+1-i). N = 4, 6, 8 give
// the square plaquette, the octahedron and the 16-cell.
TargetGraph cross_polytope(int n_qubits);

// J_ij = 2^(l s) when |i-j| = 2^l, else 0; max-normalized.
TargetGraph leaves_only_tree(int n_qubits, double s);

// Six-vertex Cayley tree with two adjacent centers of degree 3. Centers sit on
// ions 3 and 4; ion 3 carries leaves 1 and 5, ion 4 carries leaves 2 and 6.
TargetGraph cayley_tree_c36();

// Periodic triangular lattice; site (r, c) couples to (r, c+-1), (r+-1, c),
// (r+1, c+1), (r-1, c-1) modulo the lattice shape. Ions are mapped row-major.
TargetGraph triangular_torus(int rows = 3, int cols = 3);

// Dense matrix in CSV form (comma or whitespace separated, '#' comment lines).
Eigen::MatrixXd read_matrix_csv(std::istream& in);
// Edge list "i j weight" with 1-based indices; '#' comments, optional "# N=<n>"
// header fixing the dimension. Without the header N is the largest index.
Eigen::MatrixXd read_edge_list(std::istream& in);

// Validates and max-normalizes an arbitrary matrix as a target.
TargetGraph target_from_matrix(const Eigen::MatrixXd& m, std::string name);

enum class TargetFileFormat { automatic, matrix, edges };
// automatic picks matrix for a ".csv" extension and edges otherwise.
TargetGraph custom_target(const std::filesystem::path& file, TargetFileFormat format = TargetFileFormat::automatic);

} // namespace ionweave

#pragma once

#include "ionweave/kernels.hpp"

namespace ionweave::kernels::detail {

void check_model(const SpinModel& model);
// Writes column c of the Hamiltonian; touches no other column.
void fill_column(const SpinModel& model, Eigen::Index c, Eigen::MatrixXcd& h);
double site_expectation(const Eigen::VectorXcd& psi, int qubits, int q);

} // namespace ionweave::kernels::detail

#include "kernels_detail.hpp"

#include "ionweave/errors.hpp"

#include <exception>

namespace ionweave::kernels {

namespace omp {

Eigen::MatrixXcd assemble_hamiltonian(const SpinModel& model)
{
    detail::check_model(model);
    const Eigen::Index dim = Eigen::Index{1} << model.qubits;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    // each iteration writes only column c
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < dim; ++c) detail::fill_column(model, c, h);
    return h;
}

Eigen::VectorXd site_magnetization(const Eigen::VectorXcd& psi, int qubits)
{
    if (psi.size() != (Eigen::Index{1} << qubits)) throw ValidationError("state dimension mismatch");
    Eigen::VectorXd out(qubits);
    // one site per iteration keeps each sum in serial order
#pragma omp parallel for schedule(static)
    for (int q = 0; q < qubits; ++q) out[q] = detail::site_expectation(psi, qubits, q);
    return out;
}

std::vector<double> map_indices(std::size_t count, const std::function<double(std::size_t)>& fn)
{
    std::vector<double> out(count);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < count; ++k) {
        try {
            out[k] = fn(k);
        } catch (...) {
#pragma omp critical(ionweave_map_indices)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

} // namespace omp
} // namespace ionweave::kernels

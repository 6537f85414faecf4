#include "kernels_detail.hpp"

#include "ionweave/errors.hpp"

#include <atomic>

namespace ionweave {

namespace {
std::atomic<Backend> g_backend{Backend::openmp};
} // namespace

Backend default_backend() { return g_backend.load(); }
void set_default_backend(Backend b) { g_backend.store(b); }

namespace kernels {

namespace detail {

void check_model(const SpinModel& model)
{
    if (model.qubits < 1 || model.qubits > 14) throw ValidationError("spin model: qubit count out of range [1, 14]");
    if (!model.z_field.empty() && static_cast<int>(model.z_field.size()) != model.qubits)
        throw ValidationError("spin model: z_field size mismatch");
    for (const auto& t : model.pairs) {
        if (t.i < 0 || t.j < 0 || t.i >= model.qubits || t.j >= model.qubits || t.i == t.j)
            throw ValidationError("spin model: invalid pair indices");
    }
}

// Column c of H: every term maps |c> to a single basis state.
void fill_column(const SpinModel& model, Eigen::Index c, Eigen::MatrixXcd& h)
{
    const int n = model.qubits;
    auto bit = [&](int q) { return (c >> (n - 1 - q)) & 1; };
    auto sz = [&](int q) { return bit(q) ? 1.0 : -1.0; };

    double diag = 0.0;
    for (int q = 0; q < static_cast<int>(model.z_field.size()); ++q) diag += model.z_field[q] * sz(q);
    for (const auto& t : model.pairs) {
        if (t.kind == PairTerm::Kind::zz) {
            diag += t.coefficient * sz(t.i) * sz(t.j);
        } else {
            // sigma_phi |0> = e^{i phi}|1>, sigma_phi |1> = e^{-i phi}|0>
            const double sign = (bit(t.i) ? -1.0 : 1.0) + (bit(t.j) ? -1.0 : 1.0);
            const Eigen::Index row = c ^ ((Eigen::Index{1} << (n - 1 - t.i)) | (Eigen::Index{1} << (n - 1 - t.j)));
            h(row, c) += t.coefficient * std::polar(1.0, sign * t.phase);
        }
    }
    h(c, c) += diag;
}

double site_expectation(const Eigen::VectorXcd& psi, int qubits, int q)
{
    double acc = 0.0;
    for (Eigen::Index c = 0; c < psi.size(); ++c) {
        const double p = std::norm(psi[c]);
        acc += ((c >> (qubits - 1 - q)) & 1) ? p : -p;
    }
    return acc;
}

} // namespace detail

namespace serial {

Eigen::MatrixXcd assemble_hamiltonian(const SpinModel& model)
{
    detail::check_model(model);
    const Eigen::Index dim = Eigen::Index{1} << model.qubits;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) detail::fill_column(model, c, h);
    return h;
}

Eigen::VectorXd site_magnetization(const Eigen::VectorXcd& psi, int qubits)
{
    if (psi.size() != (Eigen::Index{1} << qubits)) throw ValidationError("state dimension mismatch");
    Eigen::VectorXd out(qubits);
    for (int q = 0; q < qubits; ++q) out[q] = detail::site_expectation(psi, qubits, q);
    return out;
}

std::vector<double> map_indices(std::size_t count, const std::function<double(std::size_t)>& fn)
{
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = fn(k);
    return out;
}

} // namespace serial

Eigen::MatrixXcd assemble_hamiltonian(const SpinModel& model, Backend backend)
{
    return backend == Backend::serial ? serial::assemble_hamiltonian(model) : omp::assemble_hamiltonian(model);
}

Eigen::VectorXd site_magnetization(const Eigen::VectorXcd& psi, int qubits, Backend backend)
{
    return backend == Backend::serial ? serial::site_magnetization(psi, qubits) : omp::site_magnetization(psi, qubits);
}

std::vector<double> map_indices(std::size_t count, const std::function<double(std::size_t)>& fn, Backend backend)
{
    return backend == Backend::serial ? serial::map_indices(count, fn) : omp::map_indices(count, fn);
}

} // namespace kernels
} // namespace ionweave

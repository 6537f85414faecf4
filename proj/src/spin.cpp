#include "ionweave/spin.hpp"

#include "ionweave/errors.hpp"
#include "ionweave/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace ionweave {

namespace {

using cplx = std::complex<double>;
using Gate = Eigen::Matrix2cd;

constexpr double kPi = std::numbers::pi;

// Pauli matrices in the (down, up) = (bit 0, bit 1) basis.
Gate pauli(PauliAxis axis)
{
    Gate g;
    switch (axis) {
    case PauliAxis::x: g << 0, 1, 1, 0; break;
    case PauliAxis::y: g << 0, cplx(0, 1), cplx(0, -1), 0; break;
    case PauliAxis::z: g << -1, 0, 0, 1; break;
    }
    return g;
}

Gate rotation_gate(PauliAxis axis, double angle)
{
    return std::cos(angle / 2) * Gate::Identity() - cplx(0, std::sin(angle / 2)) * pauli(axis);
}

int qubits_of(const SpinState& s)
{
    int n = 0;
    while ((Eigen::Index{1} << n) < s.size()) ++n;
    if ((Eigen::Index{1} << n) != s.size() || n == 0) throw ValidationError("state size is not a power of two");
    return n;
}

void apply_single_qubit(SpinState& psi, int qubits, int q, const Gate& g)
{
    const Eigen::Index mask = Eigen::Index{1} << (qubits - 1 - q);
    for (Eigen::Index c = 0; c < psi.size(); ++c) {
        if (c & mask) continue;
        const cplx a0 = psi[c];
        const cplx a1 = psi[c | mask];
        psi[c] = g(0, 0) * a0 + g(0, 1) * a1;
        psi[c | mask] = g(1, 0) * a0 + g(1, 1) * a1;
    }
}

double axis_phase(PauliAxis a)
{
    // sigma_phi = sigma_x cos(phi) - sigma_y sin(phi): phi = -pi/2 selects sigma_y
    return a == PauliAxis::y ? -kPi / 2 : 0.0;
}

void check_coupling(const CouplingMatrix& j, int qubits)
{
    if (j.size() != qubits) throw ValidationError("coupling matrix dimension does not match the state");
}

} // namespace

SpinState basis_state(int qubits, std::uint64_t index)
{
    if (qubits < 1 || qubits > 14) throw ValidationError("qubit count out of range [1, 14]");
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    if (static_cast<Eigen::Index>(index) >= dim) throw ValidationError("basis index out of range");
    SpinState s = SpinState::Zero(dim);
    s[static_cast<Eigen::Index>(index)] = 1.0;
    return s;
}

SpinState all_down(int qubits) { return basis_state(qubits, 0); }

SpinState state_from_string(int qubits, const std::string& spec)
{
    if (spec == "down") return all_down(qubits);
    if (spec == "up") return basis_state(qubits, (std::uint64_t{1} << qubits) - 1);
    std::string bits = spec;
    if (spec == "neel") {
        bits.clear();
        for (int q = 0; q < qubits; ++q) bits.push_back(q % 2 ? '1' : '0');
    }
    if (static_cast<int>(bits.size()) != qubits)
        throw ValidationError("initial state '" + spec + "' must have " + std::to_string(qubits) + " bits");
    std::uint64_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw ValidationError("initial state '" + spec + "' may only contain 0 and 1");
        index = (index << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return basis_state(qubits, index);
}

void OffsetModel::validate() const
{
    if (beam_width_axial && !(*beam_width_axial > 0)) throw ValidationError("offsets.beam_width must be > 0");
    if (!std::isfinite(qubit_gradient) || !std::isfinite(beam_center_offset))
        throw ValidationError("offsets: non-finite parameter");
}

std::vector<double> OffsetModel::frequency_offsets(std::span<const double> positions) const
{
    const double centre = positions.empty() ? 0.0
                                            : std::accumulate(positions.begin(), positions.end(), 0.0) /
                                                  static_cast<double>(positions.size());
    std::vector<double> out;
    for (double x : positions) out.push_back(qubit_gradient * (x - centre));
    return out;
}

std::vector<double> OffsetModel::rabi_factors(std::span<const double> positions) const
{
    std::vector<double> out(positions.size(), 1.0);
    if (!beam_width_axial) return out;
    const double centre = positions.empty() ? 0.0
                                            : std::accumulate(positions.begin(), positions.end(), 0.0) /
                                                  static_cast<double>(positions.size());
    const double waist = *beam_width_axial / 2.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const double d = positions[i] - centre - beam_center_offset;
        out[i] = std::exp(-2.0 * d * d / (waist * waist));
    }
    return out;
}

Eigen::MatrixXcd pair_hamiltonian(const CouplingMatrix& j, std::span<const PauliAxis> axes, Backend backend)
{
    kernels::SpinModel model;
    model.qubits = static_cast<int>(j.size());
    for (int a = 0; a < model.qubits; ++a) {
        for (int b = a + 1; b < model.qubits; ++b) {
            if (j(a, b) == 0.0) continue;
            for (PauliAxis ax : axes) {
                kernels::PairTerm t;
                t.i = a;
                t.j = b;
                t.coefficient = j(a, b);
                t.kind = ax == PauliAxis::z ? kernels::PairTerm::Kind::zz : kernels::PairTerm::Kind::phase;
                t.phase = axis_phase(ax);
                model.pairs.push_back(t);
            }
        }
    }
    return kernels::assemble_hamiltonian(model, backend);
}

Eigen::MatrixXcd ising_hamiltonian(const CouplingMatrix& j, double phase, const LayerContext& ctx)
{
    kernels::SpinModel model;
    model.qubits = static_cast<int>(j.size());
    std::vector<double> r(static_cast<std::size_t>(model.qubits), 1.0);
    if (ctx.offsets) {
        ctx.offsets->validate();
        if (static_cast<int>(ctx.positions.size()) != model.qubits)
            throw ValidationError("offset model needs one position per ion");
        r = ctx.offsets->rabi_factors(ctx.positions);
        model.z_field = ctx.offsets->frequency_offsets(ctx.positions);
        for (double& h : model.z_field) h *= kPi; // 2 pi Delta f / 2
    }
    for (int a = 0; a < model.qubits; ++a) {
        for (int b = a + 1; b < model.qubits; ++b) {
            const double c = j(a, b) * r[a] * r[b];
            if (c == 0.0) continue;
            model.pairs.push_back(kernels::PairTerm{a, b, c, kernels::PairTerm::Kind::phase, phase});
        }
    }
    return kernels::assemble_hamiltonian(model, ctx.backend);
}

Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& h, double t)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian diagonalization failed");
    const Eigen::VectorXd& e = es.eigenvalues();
    Eigen::VectorXcd phases(e.size());
    for (Eigen::Index k = 0; k < e.size(); ++k) phases[k] = std::polar(1.0, -e[k] * t);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd ising_layer_unitary(const CouplingMatrix& j, double phase, double duration, const LayerContext& ctx)
{
    return hermitian_exp(ising_hamiltonian(j, phase, ctx), duration);
}

void global_rotation(SpinState& state, PauliAxis axis, double angle)
{
    const int n = qubits_of(state);
    const Gate g = rotation_gate(axis, angle);
    for (int q = 0; q < n; ++q) apply_single_qubit(state, n, q, g);
}

Eigen::MatrixXcd global_rotation_unitary(int qubits, PauliAxis axis, double angle)
{
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    Eigen::MatrixXcd u(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        SpinState col = basis_state(qubits, static_cast<std::uint64_t>(c));
        global_rotation(col, axis, angle);
        u.col(c) = col;
    }
    return u;
}

void apply_ry_quarter(SpinState& state) { global_rotation(state, PauliAxis::y, kPi / 2); }
void apply_ry_quarter_dagger(SpinState& state) { global_rotation(state, PauliAxis::y, -kPi / 2); }

void ObservableTrace::record(const SpinState& state, std::string lbl, double t, Backend backend)
{
    if (qubits == 0 && step.empty()) qubits = qubits_of(state);
    const Eigen::VectorXd m = kernels::site_magnetization(state, qubits, backend);
    step.push_back(static_cast<int>(step.size()));
    label.push_back(std::move(lbl));
    time.push_back(t);
    sites.emplace_back(m.data(), m.data() + m.size());
    average.push_back(m.mean());
}

double max_trace_deviation(const ObservableTrace& a, const ObservableTrace& b)
{
    if (a.size() != b.size() || a.qubits != b.qubits) throw ValidationError("traces have different shapes");
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        d = std::max(d, std::abs(a.average[k] - b.average[k]));
        for (int q = 0; q < a.qubits; ++q) d = std::max(d, std::abs(a.sites[k][q] - b.sites[k][q]));
    }
    return d;
}

ObservableTrace run_ising_schedule(const SpinState& state0, const Schedule& schedule,
                                   std::span<const CouplingMatrix> per_layer, const LayerContext& ctx)
{
    const int n = qubits_of(state0);
    if (per_layer.size() != schedule.layers.size()) throw ValidationError("one coupling matrix per layer required");
    if (schedule.repetitions < 0) throw ValidationError("repetitions must be >= 0");
    for (const auto& j : per_layer) check_coupling(j, n);

    ObservableTrace trace;
    trace.qubits = n;
    SpinState psi = state0;
    double t = 0.0;
    trace.record(psi, "init", t, ctx.backend);
    if (schedule.repetitions == 0) return trace;

    std::vector<Eigen::MatrixXcd> unitaries;
    unitaries.reserve(per_layer.size());
    for (std::size_t k = 0; k < per_layer.size(); ++k) {
        const auto& l = schedule.layers[k];
        unitaries.push_back(ising_layer_unitary(per_layer[k], l.phase, l.duration, ctx));
    }
    for (int rep = 0; rep < schedule.repetitions; ++rep) {
        for (std::size_t k = 0; k < unitaries.size(); ++k) {
            psi = unitaries[k] * psi;
            t += schedule.layers[k].duration;
            trace.record(psi, "c" + std::to_string(rep + 1) + "L" + std::to_string(k + 1), t, ctx.backend);
        }
    }
    return trace;
}

ObservableTrace floquet_xy(const SpinState& state0, double t1, double t3, const CouplingMatrix& j1,
                           const CouplingMatrix& j3, int n_periods, const LayerContext& ctx)
{
    const int n = qubits_of(state0);
    check_coupling(j1, n);
    check_coupling(j3, n);
    if (n_periods < 0) throw ValidationError("n_periods must be >= 0");
    const double py = axis_phase(PauliAxis::y);
    struct Op {
        Eigen::MatrixXcd u;
        double dt;
        const char* name;
    };
    const Op ops[4] = {{ising_layer_unitary(j1, 0.0, t1, ctx), t1, "XX1"},
                       {ising_layer_unitary(j3, 0.0, t3, ctx), t3, "XX3"},
                       {ising_layer_unitary(j1, py, t1, ctx), t1, "YY1"},
                       {ising_layer_unitary(j3, py, t3, ctx), t3, "YY3"}};
    ObservableTrace trace;
    trace.qubits = n;
    SpinState psi = state0;
    double t = 0.0;
    trace.record(psi, "init", t, ctx.backend);
    for (int p = 0; p < n_periods; ++p) {
        for (const auto& op : ops) {
            psi = op.u * psi;
            t += op.dt;
            trace.record(psi, op.name, t, ctx.backend);
        }
    }
    return trace;
}

ObservableTrace floquet_xyz(const SpinState& state0, double t1, double t3, const CouplingMatrix& j1,
                            const CouplingMatrix& j3, int n_steps, const LayerContext& ctx)
{
    const int n = qubits_of(state0);
    check_coupling(j1, n);
    check_coupling(j3, n);
    if (n_steps < 0) throw ValidationError("n_steps must be >= 0");
    const double py = axis_phase(PauliAxis::y);
    const Eigen::MatrixXcd xx1 = ising_layer_unitary(j1, 0.0, t1, ctx);
    const Eigen::MatrixXcd xx3 = ising_layer_unitary(j3, 0.0, t3, ctx);
    const Eigen::MatrixXcd yy1 = ising_layer_unitary(j1, py, t1, ctx);
    const Eigen::MatrixXcd yy3 = ising_layer_unitary(j3, py, t3, ctx);

    ObservableTrace trace;
    trace.qubits = n;
    SpinState psi = state0;
    double t = 0.0;
    trace.record(psi, "init", t, ctx.backend);
    auto layer = [&](const Eigen::MatrixXcd& u, double dt, const char* name) {
        psi = u * psi;
        t += dt;
        trace.record(psi, name, t, ctx.backend);
    };
    for (int s = 0; s < n_steps; ++s) {
        layer(xx1, t1, "XX1");
        layer(xx3, t3, "XX3");
        layer(yy1, t1, "YY1");
        layer(yy3, t3, "YY3");
        apply_ry_quarter(psi);
        trace.record(psi, "Ry", t, ctx.backend);
        layer(xx1, t1, "ZZ1");
        layer(xx3, t3, "ZZ3");
        apply_ry_quarter_dagger(psi);
        trace.record(psi, "Ry+", t, ctx.backend);
    }
    return trace;
}

ObservableTrace static_evolution(const SpinState& state0, const Eigen::MatrixXcd& h, std::span<const double> times,
                                 int qubits, Backend backend)
{
    if (h.rows() != state0.size()) throw ValidationError("Hamiltonian and state dimensions differ");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian diagonalization failed");
    const Eigen::VectorXcd c0 = es.eigenvectors().adjoint() * state0;
    ObservableTrace trace;
    trace.qubits = qubits;
    for (double t : times) {
        Eigen::VectorXcd c(c0.size());
        for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = std::polar(1.0, -es.eigenvalues()[k] * t) * c0[k];
        trace.record(es.eigenvectors() * c, "t", t, backend);
    }
    return trace;
}

ThreeWayComparison compare_three_ways(const SpinState& state0, const CouplingMatrix& desired, const Schedule& schedule,
                                      std::span<const CouplingMatrix> per_layer, const OffsetModel& offsets,
                                      std::span<const double> positions, Backend backend)
{
    ThreeWayComparison out;
    LayerContext ideal{nullptr, {positions.begin(), positions.end()}, backend};
    LayerContext real{&offsets, {positions.begin(), positions.end()}, backend};
    out.implemented = run_ising_schedule(state0, schedule, per_layer, ideal);
    out.with_offsets = run_ising_schedule(state0, schedule, per_layer, real);

    const double phase = schedule.layers.empty() ? 0.0 : schedule.layers.front().phase;
    const Eigen::MatrixXcd h = ising_hamiltonian(desired, phase, ideal);
    out.desired = static_evolution(state0, h, out.implemented.time, out.implemented.qubits, backend);
    out.desired.label = out.implemented.label;
    return out;
}

double calibrate_rabi(const ModeSpectrum& spectrum, const LambDickeMatrix& eta, const LaserLayer& layer, double phase)
{
    if (!(phase > 0)) throw ValidationError("calibration phase must be > 0");
    LaserLayer ref = layer;
    ref.rabi = 1e3;
    const double acquired = layer_coupling(spectrum, eta, ref).max_abs() * layer.duration;
    if (acquired == 0.0) throw ValidationError("layer produces no coupling; cannot calibrate");
    return ref.rabi * std::sqrt(phase / acquired);
}

Schedule calibrate_schedule(const Schedule& schedule, const ModeSpectrum& spectrum, const LambDickeMatrix& eta,
                            double phase)
{
    if (schedule.layers.empty()) throw ValidationError("cannot calibrate an empty schedule");
    double rabi = std::numeric_limits<double>::infinity();
    for (const auto& l : schedule.layers) rabi = std::min(rabi, calibrate_rabi(spectrum, eta, l, phase));
    Schedule out = schedule;
    for (auto& l : out.layers) l.rabi = rabi;
    return out;
}

} // namespace ionweave

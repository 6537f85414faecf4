#include "ionweave/designer.hpp"

#include "ionweave/errors.hpp"
#include "ionweave/units.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace ionweave {

namespace {

constexpr double kZeroWeight = 1e-8; // relative to the largest |w|
constexpr double kTieTolerance = 1e-12;

int sign(double x) { return x < 0 ? -1 : 1; }

std::vector<int> active_modes(const Eigen::VectorXd& w)
{
    std::vector<int> out;
    const double peak = w.cwiseAbs().maxCoeff();
    if (peak == 0.0) return out;
    for (Eigen::Index m = 0; m < w.size(); ++m)
        if (std::abs(w[m]) > kZeroWeight * peak) out.push_back(static_cast<int>(m));
    return out;
}

WeightSolution fit(const DesignProblem& problem, const std::vector<int>& modes)
{
    const Eigen::Index n = problem.spectrum.size();
    if (problem.target.size() != n) {
        throw ValidationError("design: target has " + std::to_string(problem.target.size()) + " qubits but the chain has " +
                              std::to_string(n) + " ions");
    }
    if (modes.empty()) throw ValidationError("design: no allowed modes");
    Eigen::VectorXd t = problem.target.coupling.upper_triangle();
    const double norm = t.norm();
    if (norm == 0.0) throw ValidationError("design: target is zero");
    t /= norm;

    Eigen::MatrixXd a(t.size(), static_cast<Eigen::Index>(modes.size()));
    for (std::size_t k = 0; k < modes.size(); ++k)
        a.col(static_cast<Eigen::Index>(k)) = mode_pattern(problem.spectrum, modes[k]).upper_triangle();

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(a);
    const Eigen::VectorXd x = cod.solve(t);

    WeightSolution sol;
    sol.weights = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < modes.size(); ++k) sol.weights[modes[k]] = x[static_cast<Eigen::Index>(k)];
    sol.rank = static_cast<int>(cod.rank());
    sol.nullspace_dimension = static_cast<int>(modes.size()) - sol.rank;
    sol.residual = (a * x - t).norm();
    const CouplingMatrix fitted = weighted_pattern(problem.spectrum, sol.weights);
    sol.rank_one_fidelity = fitted.is_zero() ? 0.5 : fidelity(fitted, problem.target.coupling).fidelity;
    return sol;
}

// Refits without negligible modes and, if requested, without all but the
// max_layers strongest ones.
WeightSolution pruned_fit(const DesignProblem& problem)
{
    std::vector<int> modes = problem.modes();
    WeightSolution sol = fit(problem, modes);
    for (std::size_t pass = 0; pass < modes.size(); ++pass) {
        const double peak = sol.weights.cwiseAbs().maxCoeff();
        std::vector<int> keep;
        for (int m : modes)
            if (std::abs(sol.weights[m]) > problem.min_relative_weight * peak) keep.push_back(m);
        if (problem.max_layers > 0 && static_cast<int>(keep.size()) > problem.max_layers) {
            std::stable_sort(keep.begin(), keep.end(),
                             [&](int a, int b) { return std::abs(sol.weights[a]) > std::abs(sol.weights[b]); });
            keep.resize(static_cast<std::size_t>(problem.max_layers));
            std::sort(keep.begin(), keep.end());
        }
        if (keep.size() == modes.size() || keep.empty()) break;
        modes = keep;
        sol = fit(problem, modes);
    }
    return sol;
}

} // namespace

std::vector<double> DetuningGrid::values() const
{
    if (!(min > 0) || !(max >= min) || !(step > 0)) throw ValidationError("detuning grid must satisfy 0 < min <= max, step > 0");
    const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k) v[k] = min + static_cast<double>(k) * step;
    return v;
}

std::vector<int> DesignProblem::modes() const
{
    const auto n = static_cast<int>(spectrum.size());
    if (allowed_modes.empty()) {
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    std::vector<int> m = allowed_modes;
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    for (int x : m)
        if (x < 0 || x >= n) throw ValidationError("design: allowed mode " + std::to_string(x + 1) + " out of range");
    return m;
}

double DesignProblem::max_detuning() const
{
    if (spectrum.size() < 2) return std::numeric_limits<double>::infinity();
    return max_detuning_fraction * spectrum.min_spacing();
}

CouplingMatrix mode_pattern(const ModeSpectrum& spectrum, int mode)
{
    const auto b = spectrum.eigenvectors.col(mode);
    Eigen::MatrixXd p = b * b.transpose();
    p.diagonal().setZero();
    return CouplingMatrix(std::move(p), false);
}

CouplingMatrix weighted_pattern(const ModeSpectrum& spectrum, const Eigen::VectorXd& weights)
{
    const Eigen::MatrixXd& b = spectrum.eigenvectors;
    Eigen::MatrixXd p = b * weights.asDiagonal() * b.transpose();
    p.diagonal().setZero();
    p = 0.5 * (p + p.transpose()).eval();
    return CouplingMatrix(std::move(p), false);
}

WeightSolution solve_weights(const DesignProblem& problem) { return fit(problem, problem.modes()); }
WeightSolution fit_weights(const DesignProblem& problem) { return pruned_fit(problem); }

Schedule weights_to_schedule(const Eigen::VectorXd& weights, const ModeSpectrum& spectrum, double base_detuning,
                             int k_max, double rabi, double phase, double max_detuning)
{
    if (!(base_detuning > 0)) throw ValidationError("base detuning must be > 0");
    if (k_max < 1) throw ValidationError("k_max must be >= 1");
    if (weights.size() != spectrum.size()) throw ValidationError("weights/spectrum size mismatch");
    const std::vector<int> modes = active_modes(weights);
    if (modes.empty()) throw InfeasibleDesignError("all weights are zero; nothing to realize");

    // strength of each layer relative to the strongest one
    std::vector<double> ratio;
    double strongest = 0.0;
    for (int m : modes) strongest = std::max(strongest, std::abs(weights[m]) * spectrum.frequencies[m]);
    for (int m : modes) ratio.push_back(strongest / (std::abs(weights[m]) * spectrum.frequencies[m]));

    if (base_detuning > max_detuning) {
        throw InfeasibleDesignError("base detuning exceeds the near-resonance cap of " +
                                    format_quantity(max_detuning, "kHz"));
    }

    for (int k_ref = 1; k_ref <= k_max; ++k_ref) {
        Schedule s;
        s.repetitions = 1;
        bool ok = true;
        for (std::size_t idx = 0; idx < modes.size() && ok; ++idx) {
            const int m = modes[idx];
            const double r = ratio[idx];
            const int k = std::max(1, static_cast<int>(std::ceil(k_ref / r - 1e-9)));
            const double delta = base_detuning * std::sqrt(k * r / k_ref);
            if (k > k_max || delta > max_detuning) {
                ok = false;
                break;
            }
            s.layers.push_back(LaserLayer{m, sign(weights[m]) * delta, k / delta, phase, rabi});
        }
        if (ok) return s;
    }
    const double worst = *std::max_element(ratio.begin(), ratio.end());
    const double cap_ratio = max_detuning / base_detuning;
    const int suggested = static_cast<int>(std::ceil(worst / (cap_ratio * cap_ratio)));
    throw InfeasibleDesignError("weights span a ratio of " + std::to_string(worst) +
                                    ", not realizable below the detuning cap with k_max=" + std::to_string(k_max) +
                                    "; try k_max=" + std::to_string(suggested),
                                suggested);
}

DesignSolution evaluate_design(const DesignProblem& problem, const Eigen::VectorXd& weights, double base_detuning)
{
    DesignSolution sol;
    sol.weights = weights;
    sol.base_detuning = base_detuning;
    sol.schedule = weights_to_schedule(weights, problem.spectrum, base_detuning, problem.k_max, problem.rabi,
                                       problem.phase, problem.max_detuning());
    sol.effective = schedule_effective_coupling(sol.schedule, problem.spectrum, problem.eta);
    sol.achieved_fidelity = fidelity(sol.effective, problem.target.coupling).fidelity;
    const CouplingMatrix ideal = weighted_pattern(problem.spectrum, weights);
    sol.rank_one_fidelity = fidelity(ideal, problem.target.coupling).fidelity;
    sol.scale = sol.effective.max_abs();
    sol.closure = loop_closure_report(sol.schedule, problem.spectrum, problem.closure_tolerance);
    sol.closure_satisfied = sol.closure.closed();
    sol.pattern_discrepancy =
        (sol.effective.max_normalized().values() - ideal.max_normalized().values()).cwiseAbs().maxCoeff();
    sol.candidates_evaluated = 1;
    sol.feasible_candidates = 1;
    sol.closed_candidates = sol.closure_satisfied ? 1 : 0;
    return sol;
}

DesignSolution design(const DesignProblem& problem)
{
    const WeightSolution weights = pruned_fit(problem);
    const std::vector<double> bases = problem.grid.values();

    struct Candidate {
        bool feasible = false;
        bool closed = false;
        double fidelity = 0.0;
        double cycle = 0.0;
        std::size_t layers = 0;
        int suggested_k_max = 0;
    };
    std::vector<Candidate> cands(bases.size());
    kernels::map_indices(
        bases.size(),
        [&](std::size_t k) {
            Candidate& c = cands[k];
            try {
                const DesignSolution s = evaluate_design(problem, weights.weights, bases[k]);
                c.feasible = true;
                c.closed = s.closure_satisfied;
                c.fidelity = s.achieved_fidelity;
                c.cycle = s.schedule.cycle_duration();
                c.layers = s.schedule.layers.size();
            } catch (const InfeasibleDesignError& e) {
                c.suggested_k_max = e.suggested_k_max();
            }
            return c.fidelity;
        },
        problem.backend);

    std::size_t feasible = 0;
    std::size_t closed = 0;
    int suggestion = 0;
    for (const auto& c : cands) {
        feasible += c.feasible;
        closed += c.closed;
        suggestion = std::max(suggestion, c.suggested_k_max);
    }
    if (feasible == 0) {
        throw InfeasibleDesignError("no base detuning in [" + format_quantity(problem.grid.min, "kHz") + ", " +
                                        format_quantity(problem.grid.max, "kHz") +
                                        "] realizes the weights; suggested k_max=" + std::to_string(suggestion),
                                    suggestion);
    }

    const bool need_closed = closed > 0;
    std::size_t best = bases.size();
    for (std::size_t k = 0; k < bases.size(); ++k) {
        const Candidate& c = cands[k];
        if (!c.feasible || (need_closed && !c.closed)) continue;
        if (best == bases.size()) {
            best = k;
            continue;
        }
        const Candidate& b = cands[best];
        if (c.fidelity > b.fidelity + kTieTolerance) {
            best = k;
        } else if (std::abs(c.fidelity - b.fidelity) <= kTieTolerance) {
            if (c.cycle < b.cycle || (c.cycle == b.cycle && c.layers < b.layers)) best = k;
        }
    }

    DesignSolution sol = evaluate_design(problem, weights.weights, bases[best]);
    sol.rank_one_fidelity = weights.rank_one_fidelity;
    sol.candidates_evaluated = bases.size();
    sol.feasible_candidates = feasible;
    sol.closed_candidates = closed;
    return sol;
}

DesignReport design_report(const DesignProblem& problem, const DesignSolution& solution)
{
    DesignReport r;
    r.target_name = problem.target.name;
    for (const auto& l : solution.schedule.layers) {
        DesignRow row;
        row.mode = l.mode + 1;
        row.detuning = l.detuning;
        row.duration = l.duration;
        row.multiplicity = static_cast<int>(std::lround(std::abs(l.detuning) * l.duration));
        row.weight = solution.weights[l.mode];
        r.rows.push_back(row);
    }
    r.achieved_fidelity = solution.achieved_fidelity;
    r.rank_one_fidelity = solution.rank_one_fidelity;
    r.base_detuning = solution.base_detuning;
    r.closure_satisfied = solution.closure_satisfied;
    r.worst_closure_deviation = solution.closure.worst_deviation();
    r.pattern_discrepancy = solution.pattern_discrepancy;
    r.schedule = solution.schedule;
    r.implemented = solution.effective.max_normalized();
    r.target = problem.target.coupling.max_normalized();
    return r;
}

std::string DesignReport::table() const
{
    std::ostringstream os;
    os << "target: " << target_name << '\n';
    os << std::left << std::setw(6) << "Mode" << std::setw(14) << "Detuning" << std::setw(12) << "Time" << std::setw(4)
       << "k" << "Weight" << '\n';
    os << std::fixed;
    for (const auto& row : rows) {
        std::ostringstream det, dur;
        det << std::fixed << std::setprecision(2) << row.detuning / 1e3 << " kHz";
        dur << std::fixed << std::setprecision(2) << row.duration * 1e6 << " us";
        os << std::setw(6) << row.mode << std::setw(14) << det.str() << std::setw(12) << dur.str() << std::setw(4)
           << row.multiplicity << std::setprecision(4) << row.weight << '\n';
    }
    os << std::setprecision(4);
    os << "fidelity (multimode): " << 100.0 * achieved_fidelity << " %\n";
    os << "fidelity (rank-one):  " << 100.0 * rank_one_fidelity << " %\n";
    os << "loop closure on all modes: " << (closure_satisfied ? "yes" : "no") << " (worst deviation "
       << worst_closure_deviation << ")\n";
    os << "pattern discrepancy: " << pattern_discrepancy << '\n';
    auto dump = [&](const char* title, const CouplingMatrix& m) {
        os << title << '\n';
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            for (Eigen::Index j = 0; j < m.size(); ++j) os << std::setw(9) << std::setprecision(4) << std::right << m(i, j);
            os << '\n';
        }
        os << std::left;
    };
    dump("implemented (max-normalized):", implemented);
    dump("target (max-normalized):", target);
    return os.str();
}

} // namespace ionweave

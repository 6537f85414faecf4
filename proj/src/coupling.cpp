#include "ionweave/coupling.hpp"

#include "ionweave/errors.hpp"
#include "ionweave/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ionweave {

namespace {

constexpr double kGuardBandHz = 1.0;
constexpr double kSymmetryTolerance = 1e-9;

double distance_to_integer(double x) { return std::abs(x - std::round(x)); }

} // namespace

double LaserLayer::beat_frequency(const ModeSpectrum& spectrum) const
{
    if (mode < 0 || mode >= spectrum.size()) throw ValidationError("layer mode index out of range");
    return spectrum.frequencies[mode] + detuning;
}

void Schedule::validate(Eigen::Index n_modes) const
{
    if (layers.empty()) throw ValidationError("schedule has no layers");
    if (repetitions < 0) throw ValidationError("schedule repetitions must be >= 0");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& l = layers[k];
        std::ostringstream where;
        where << "schedule layer " << k + 1 << ": ";
        if (l.mode < 0 || l.mode >= n_modes)
            throw ValidationError(where.str() + "mode " + std::to_string(l.mode + 1) + " out of range");
        if (!(l.duration > 0)) throw ValidationError(where.str() + "duration must be > 0");
        if (l.detuning == 0.0) throw ValidationError(where.str() + "detuning must be nonzero");
        if (!std::isfinite(l.phase) || !std::isfinite(l.rabi) || !std::isfinite(l.detuning))
            throw ValidationError(where.str() + "non-finite parameter");
    }
}

double Schedule::cycle_duration() const
{
    double t = 0.0;
    for (const auto& l : layers) t += l.duration;
    return t;
}

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd values, bool normalized) : values_(std::move(values)), normalized_(normalized)
{
    if (values_.rows() != values_.cols()) throw ValidationError("coupling matrix must be square");
    const double scale = std::max(1.0, values_.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        if (values_(i, i) != 0.0) {
            throw ValidationError("coupling matrix has nonzero diagonal at (" + std::to_string(i + 1) + "," +
                                  std::to_string(i + 1) + ")");
        }
        for (Eigen::Index j = i + 1; j < values_.cols(); ++j) {
            if (!std::isfinite(values_(i, j)) || !std::isfinite(values_(j, i)))
                throw ValidationError("coupling matrix has a non-finite entry");
            if (std::abs(values_(i, j) - values_(j, i)) > kSymmetryTolerance * scale) {
                throw ValidationError("coupling matrix is not symmetric at (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ")");
            }
            values_(j, i) = values_(i, j);
        }
    }
}

double CouplingMatrix::max_abs() const { return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }

Eigen::VectorXd CouplingMatrix::upper_triangle() const
{
    const Eigen::Index n = size();
    Eigen::VectorXd v(n * (n - 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) v[k++] = values_(i, j);
    return v;
}

CouplingMatrix CouplingMatrix::max_normalized() const
{
    const double m = max_abs();
    if (m == 0.0) throw ValidationError("cannot normalize a zero coupling matrix");
    CouplingMatrix out = *this;
    out.values_ /= m;
    out.normalized_ = true;
    return out;
}

CouplingMatrix CouplingMatrix::scaled(double factor) const
{
    CouplingMatrix out = *this;
    out.values_ *= factor;
    return out;
}

CouplingMatrix CouplingMatrix::permuted(std::span<const int> perm) const
{
    const Eigen::Index n = size();
    if (static_cast<Eigen::Index>(perm.size()) != n) throw ValidationError("permutation size mismatch");
    CouplingMatrix out = *this;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out.values_(perm[i], perm[j]) = values_(i, j);
    return out;
}

CouplingMatrix coupling_matrix(const ModeSpectrum& spectrum, const LambDickeMatrix& eta,
                               std::span<const double> rabi_per_ion, double mu)
{
    const Eigen::Index n = spectrum.size();
    if (eta.size() != n || static_cast<Eigen::Index>(rabi_per_ion.size()) != n)
        throw ValidationError("coupling_matrix: dimension mismatch between spectrum, eta and Rabi rates");
    for (Eigen::Index m = 0; m < n; ++m) {
        if (std::abs(mu - spectrum.frequencies[m]) < kGuardBandHz) {
            std::ostringstream os;
            os << "beat frequency " << mu << " Hz is inside the guard band of mode " << m + 1;
            throw ResonanceError(os.str());
        }
    }
    const double mu_ang = to_angular(mu);
    Eigen::VectorXd mode_factor(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        const double w = to_angular(spectrum.frequencies[m]);
        mode_factor[m] = w / (mu_ang * mu_ang - w * w);
    }
    Eigen::VectorXd omega(n);
    for (Eigen::Index i = 0; i < n; ++i) omega[i] = to_angular(rabi_per_ion[i]);

    Eigen::MatrixXd j = eta.eta * mode_factor.asDiagonal() * eta.eta.transpose();
    j = omega.asDiagonal() * j * omega.asDiagonal();
    j.diagonal().setZero();
    // exact symmetry; the triple product can differ in the last bit
    j = 0.5 * (j + j.transpose()).eval();
    return CouplingMatrix(std::move(j), false);
}

CouplingMatrix layer_coupling(const ModeSpectrum& spectrum, const LambDickeMatrix& eta, const LaserLayer& layer)
{
    const std::vector<double> rabi(static_cast<std::size_t>(spectrum.size()), layer.rabi);
    return coupling_matrix(spectrum, eta, rabi, layer.beat_frequency(spectrum));
}

CouplingMatrix layer_coupling(const ModeSpectrum& spectrum, const LambDickeMatrix& eta, const LaserLayer& layer,
                              std::span<const double> rabi_per_ion)
{
    return coupling_matrix(spectrum, eta, rabi_per_ion, layer.beat_frequency(spectrum));
}

CouplingMatrix effective_coupling(const Schedule& schedule, std::span<const CouplingMatrix> per_layer)
{
    if (schedule.layers.empty()) throw ValidationError("schedule has no layers");
    if (per_layer.size() != schedule.layers.size())
        throw ValidationError("effective_coupling: one coupling matrix per layer required");
    const double phase = schedule.layers.front().phase;
    for (const auto& l : schedule.layers) {
        if (l.phase != phase) {
            throw ValidationError("effective_coupling: layers with different phases do not commute; "
                                  "use the dynamics module for this schedule");
        }
    }
    const Eigen::Index n = per_layer.front().size();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    double total = 0.0;
    for (std::size_t k = 0; k < per_layer.size(); ++k) {
        if (per_layer[k].size() != n) throw ValidationError("effective_coupling: dimension mismatch");
        acc += per_layer[k].values() * schedule.layers[k].duration;
        total += schedule.layers[k].duration;
    }
    acc /= total;
    return CouplingMatrix(std::move(acc), false);
}

CouplingMatrix schedule_effective_coupling(const Schedule& schedule, const ModeSpectrum& spectrum,
                                           const LambDickeMatrix& eta)
{
    std::vector<CouplingMatrix> js;
    js.reserve(schedule.layers.size());
    for (const auto& l : schedule.layers) js.push_back(layer_coupling(spectrum, eta, l));
    return effective_coupling(schedule, js);
}

bool ClosureReport::addressed_closed() const
{
    return std::all_of(layers.begin(), layers.end(), [](const LayerClosure& l) { return l.addressed_closed; });
}

bool ClosureReport::closed() const
{
    return std::all_of(layers.begin(), layers.end(), [](const LayerClosure& l) { return l.closed; });
}

double ClosureReport::worst_deviation() const
{
    double w = 0.0;
    for (const auto& l : layers) w = std::max(w, l.worst_deviation);
    return w;
}

ClosureReport loop_closure_report(const Schedule& schedule, const ModeSpectrum& spectrum, double tolerance)
{
    ClosureReport report;
    report.tolerance = tolerance;
    for (const auto& layer : schedule.layers) {
        const double mu = layer.beat_frequency(spectrum);
        LayerClosure lc;
        for (Eigen::Index m = 0; m < spectrum.size(); ++m) {
            // the addressed mode uses the stated detuning directly so the product is not
            // polluted by cancellation in (w_M + delta) - w_M
            const double delta = (m == layer.mode) ? layer.detuning : mu - spectrum.frequencies[m];
            const double product = delta * layer.duration;
            lc.products.push_back(product);
            const double dev = distance_to_integer(product);
            lc.worst_deviation = std::max(lc.worst_deviation, dev);
            if (m == layer.mode) lc.addressed_deviation = dev;
        }
        lc.addressed_closed = lc.addressed_deviation <= tolerance;
        lc.closed = lc.worst_deviation <= tolerance;
        report.layers.push_back(std::move(lc));
    }
    return report;
}

double overlap_cosine(const CouplingMatrix& a, const CouplingMatrix& b)
{
    if (a.size() != b.size()) throw ValidationError("fidelity: matrices have different dimensions");
    const Eigen::VectorXd x = a.upper_triangle();
    const Eigen::VectorXd y = b.upper_triangle();
    const double xx = x.squaredNorm();
    const double yy = y.squaredNorm();
    if (xx == 0.0 || yy == 0.0) throw ValidationError("fidelity: overlap undefined for a zero coupling matrix");
    const double c = x.dot(y) / std::sqrt(xx * yy);
    return std::clamp(c, -1.0, 1.0);
}

FidelityReport fidelity(const CouplingMatrix& implemented, const CouplingMatrix& target)
{
    FidelityReport r;
    r.cosine = overlap_cosine(implemented, target);
    r.fidelity = 0.5 * (1.0 + r.cosine);
    r.implemented = implemented.max_normalized();
    r.target = target.max_normalized();
    r.residuals = r.implemented.values() - r.target.values();
    return r;
}

} // namespace ionweave

#include "ionweave/app.hpp"

#include "ionweave/errors.hpp"
#include "ionweave/serialize.hpp"
#include "ionweave/units.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace ionweave {

namespace {

constexpr const char* kVersion = "0.1.0";

struct Output {
    std::filesystem::path dir;
    OutputFormat format;

    bool csv() const { return format != OutputFormat::json; }
    bool json_files() const { return format != OutputFormat::csv; }

    void text(const std::string& name, const std::string& body) const { write_text_file(dir / name, body); }
    void json_file(const std::string& name, const json& j) const { text(name, j.dump(2) + "\n"); }
    template <class F>
    void csv_file(const std::string& name, F&& writer) const
    {
        std::ostringstream os;
        writer(os);
        text(name, os.str());
    }
};

Output output_for(const RunConfig* cfg, const CommandOptions& opt)
{
    Output o;
    o.dir = opt.out ? *opt.out : (cfg ? cfg->output.directory : std::filesystem::path("out"));
    o.format = opt.format ? *opt.format : (cfg ? cfg->output.format : OutputFormat::both);
    return o;
}

// The only file that carries wall-clock time; data files stay reproducible.
void write_metadata(const Output& o, const std::string& command, const CommandOptions& opt)
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream ts;
    ts << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    json meta{{"command", command},
              {"version", kVersion},
              {"argv", opt.argv},
              {"config", opt.config_path ? opt.config_path->string() : std::string()},
              {"backend", default_backend() == Backend::serial ? "serial" : "openmp"},
              {"created_utc", ts.str()}};
    o.json_file(command + ".meta.json", meta);
}

std::vector<double> uniform(std::size_t n, double v) { return std::vector<double>(n, v); }

double upper_dot(const CouplingMatrix& a, const CouplingMatrix& b) { return a.upper_triangle().dot(b.upper_triangle()); }

std::string percent(double f)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << 100.0 * f << " %";
    return os.str();
}

} // namespace

TargetGraph require_target(const RunConfig& cfg)
{
    if (!cfg.target) throw ValidationError("config: this command needs a 'target' section");
    return build_target(*cfg.target, cfg.trap.ion_count);
}

DesignProblem make_design_problem(const RunConfig& cfg, const Chain& chain, const TargetGraph& target)
{
    DesignProblem p;
    p.target = target;
    p.spectrum = chain.spectrum;
    p.eta = chain.eta;
    p.allowed_modes = cfg.design.modes;
    p.grid = cfg.design.grid;
    p.k_max = cfg.design.k_max;
    p.max_layers = cfg.design.max_layers;
    p.closure_tolerance = cfg.design.closure_tolerance;
    p.rabi = cfg.design.rabi;
    p.phase = cfg.design.phase;
    p.min_relative_weight = cfg.design.min_relative_weight;
    p.max_detuning_fraction = cfg.design.max_detuning_fraction;
    return p;
}

Schedule resolve_schedule(const RunConfig& cfg, const Chain& chain, DesignSolution* solution)
{
    if (cfg.schedule) return *cfg.schedule;
    if (!cfg.design_schedule) throw ValidationError("config: a 'schedule' section (or 'schedule: design') is required");
    const DesignSolution sol = design(make_design_problem(cfg, chain, require_target(cfg)));
    if (solution) *solution = sol;
    return sol.schedule;
}

EvolveResult run_evolution(const RunConfig& cfg, const Chain& chain)
{
    const int n = chain.config.ion_count;
    EvolveResult res;
    res.schedule = resolve_schedule(cfg, chain);
    if (cfg.dynamics.layer_phase)
        res.schedule = calibrate_schedule(res.schedule, chain.spectrum, chain.eta, *cfg.dynamics.layer_phase);
    if (cfg.dynamics.repetitions > 0) res.schedule.repetitions = cfg.dynamics.repetitions;
    res.schedule.validate(chain.spectrum.size());

    std::vector<CouplingMatrix> per_layer;
    for (const auto& l : res.schedule.layers) per_layer.push_back(layer_coupling(chain.spectrum, chain.eta, l));

    const SpinState psi0 = state_from_string(n, cfg.dynamics.initial_state);
    LayerContext ctx;
    ctx.positions = chain.positions.physical();
    if (cfg.offsets) ctx.offsets = &*cfg.offsets;

    auto two_layers = [&](const char* what) {
        if (res.schedule.layers.size() != 2)
            throw ValidationError(std::string(what) + " needs a two-layer schedule (J1 and J3), got " +
                                  std::to_string(res.schedule.layers.size()) + " layers");
    };

    switch (cfg.dynamics.sequence) {
    case Sequence::ising:
        if (cfg.dynamics.compare) {
            const CouplingMatrix effective = effective_coupling(res.schedule, per_layer);
            CouplingMatrix desired = effective;
            if (!cfg.dynamics.desired_is_effective && cfg.target) {
                // Target scaled to best match the implemented strength.
                const CouplingMatrix t = require_target(cfg).coupling;
                if (t.size() != n) throw ValidationError("target size does not match the ion count");
                desired = CouplingMatrix(t.values() * (upper_dot(effective, t) / upper_dot(t, t)), false);
            }
            const OffsetModel offsets = cfg.offsets ? *cfg.offsets : OffsetModel{};
            res.comparison = compare_three_ways(psi0, desired, res.schedule, per_layer, offsets, ctx.positions,
                                                ctx.backend);
            res.trace = cfg.offsets ? res.comparison->with_offsets : res.comparison->implemented;
        } else {
            res.trace = run_ising_schedule(psi0, res.schedule, per_layer, ctx);
        }
        break;
    case Sequence::floquet_xy:
        two_layers("floquet_xy");
        res.trace = floquet_xy(psi0, res.schedule.layers[0].duration, res.schedule.layers[1].duration, per_layer[0],
                               per_layer[1], res.schedule.repetitions, ctx);
        break;
    case Sequence::floquet_xyz:
        two_layers("floquet_xyz");
        res.trace = floquet_xyz(psi0, res.schedule.layers[0].duration, res.schedule.layers[1].duration, per_layer[0],
                                per_layer[1], res.schedule.repetitions, ctx);
        break;
    case Sequence::static_hamiltonian: {
        const CouplingMatrix effective = effective_coupling(res.schedule, per_layer);
        const Eigen::MatrixXcd h = ising_hamiltonian(effective, res.schedule.layers.front().phase, ctx);
        std::vector<double> times;
        for (int k = 0; k <= res.schedule.repetitions; ++k) times.push_back(k * res.schedule.cycle_duration());
        res.trace = static_evolution(psi0, h, times, n, ctx.backend);
        for (std::size_t k = 0; k < times.size(); ++k) res.trace.label[k] = "cycle" + std::to_string(k);
        break;
    }
    }
    return res;
}

BsbTraces run_bsb(const RunConfig& cfg, const Chain& chain)
{
    if (!cfg.bsb) throw ValidationError("config: the bsb command needs a 'bsb' section");
    const BsbSettings& b = *cfg.bsb;
    if (b.mode < 0 || b.mode >= chain.spectrum.size())
        throw ValidationError("bsb.mode " + std::to_string(b.mode + 1) + " out of range");
    std::vector<double> rabi = uniform(static_cast<std::size_t>(chain.config.ion_count), b.rabi);
    if (b.beam_profile) {
        if (!cfg.offsets || !cfg.offsets->beam_width_axial)
            throw ValidationError("bsb.beam_profile needs offsets.beam_width");
        const auto r = cfg.offsets->rabi_factors(chain.positions.physical());
        for (std::size_t i = 0; i < rabi.size(); ++i) rabi[i] *= r[i];
    }
    BsbOptions opt;
    opt.n_max = b.n_max;
    return bsb_evolution(chain.eta.eta.col(b.mode), rabi, b.times, b.mean_n, opt);
}

SweepTable run_sweep(const RunConfig& cfg)
{
    if (!cfg.sweep) throw ValidationError("config: the sweep command needs a 'sweep' section");
    const SweepSettings& sw = *cfg.sweep;
    if (sw.values.empty()) throw ValidationError("sweep: empty axis");
    if (!cfg.target) throw ValidationError("sweep: a target is required");
    const bool fixed = cfg.schedule.has_value();
    if (!fixed && !cfg.design_schedule) throw ValidationError("sweep: need an inline schedule or 'schedule: design'");
    if (sw.axis == SweepAxis::detuning && fixed)
        throw ValidationError("sweep over detuning re-realizes designed weights; use 'schedule: design'");
    if (sw.axis == SweepAxis::s && cfg.target->builtin != "leaves_only_tree")
        throw ValidationError("sweep over s needs the leaves_only_tree target");

    SweepTable table;
    table.header = {std::string(sweep_axis_name(sw.axis))};
    if (fixed) {
        table.header.insert(table.header.end(), {"fidelity", "worst_closure_deviation"});
    } else {
        table.header.insert(table.header.end(),
                            {"fidelity", "rank_one_fidelity", "base_detuning_hz", "closure_satisfied"});
    }
    if (sw.axis == SweepAxis::s) table.header.push_back("target_ratio_d2_d1");

    // Weights for the detuning axis are fitted once on the configured chain.
    std::optional<Eigen::VectorXd> fixed_weights;
    std::optional<Chain> base_chain;
    if (sw.axis == SweepAxis::detuning) {
        base_chain = solve_chain(cfg.trap);
        fixed_weights = fit_weights(make_design_problem(cfg, *base_chain, require_target(cfg))).weights;
    }

    table.rows.assign(sw.values.size(), {});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    kernels::map_indices(
        sw.values.size(),
        [&](std::size_t k) {
            const double v = sw.values[k];
            RunConfig point = cfg;
            if (sw.axis == SweepAxis::axial_frequency) point.trap.axial_com_frequency = v;
            if (sw.axis == SweepAxis::quartic) point.trap.quartic_coefficient = v;
            if (sw.axis == SweepAxis::s) point.target->parameters["s"] = v;
            const TargetGraph target = require_target(point);
            const Chain chain = base_chain ? *base_chain : solve_chain(point.trap);
            std::vector<double> row{v};
            if (fixed) {
                // A drive landing on a mode at this point is recorded, not fatal.
                try {
                    const CouplingMatrix eff = schedule_effective_coupling(*point.schedule, chain.spectrum, chain.eta);
                    row.push_back(fidelity(eff, target.coupling).fidelity);
                } catch (const ResonanceError&) {
                    row.push_back(nan);
                }
                row.push_back(loop_closure_report(*point.schedule, chain.spectrum, point.design.closure_tolerance)
                                  .worst_deviation());
            } else {
                DesignProblem problem = make_design_problem(point, chain, target);
                problem.backend = Backend::serial; // points already run concurrently
                try {
                    const DesignSolution sol =
                        fixed_weights ? evaluate_design(problem, *fixed_weights, v) : design(problem);
                    row.insert(row.end(), {sol.achieved_fidelity, sol.rank_one_fidelity, sol.base_detuning,
                                           sol.closure_satisfied ? 1.0 : 0.0});
                } catch (const InfeasibleDesignError&) {
                    row.insert(row.end(), {nan, nan, nan, 0.0});
                }
            }
            if (sw.axis == SweepAxis::s) {
                const auto& j = target.coupling;
                row.push_back(j.size() >= 3 && j(0, 1) != 0.0 ? j(0, 2) / j(0, 1) : nan);
            }
            table.rows[k] = row;
            return row[1];
        },
        default_backend());
    return table;
}

int command_modes(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const Output o = output_for(&cfg, opt);
    const Chain chain = solve_chain(cfg.trap);
    const auto x = chain.positions.physical();
    if (o.csv()) {
        o.csv_file("positions.csv", [&](std::ostream& os) {
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < x.size(); ++i)
                rows.push_back({static_cast<double>(i + 1), chain.positions.dimensionless[i], x[i]});
            write_table_csv(os, {"ion", "u", "x_m"}, rows);
        });
        o.csv_file("frequencies.csv", [&](std::ostream& os) {
            std::vector<std::vector<double>> rows;
            for (Eigen::Index m = 0; m < chain.spectrum.size(); ++m)
                rows.push_back({static_cast<double>(m + 1), chain.spectrum.frequencies[m],
                                chain.spectrum.frequencies[m] / chain.config.axial_com_frequency});
            write_table_csv(os, {"mode", "frequency_hz", "ratio"}, rows);
        });
        o.csv_file("eigenvectors.csv", [&](std::ostream& os) { write_matrix_csv(os, chain.spectrum.eigenvectors); });
        o.csv_file("lamb_dicke.csv", [&](std::ostream& os) { write_matrix_csv(os, chain.eta.eta); });
    }
    if (o.json_files()) {
        o.json_file("modes.json", json{{"trap", chain.config},
                                       {"positions", chain.positions},
                                       {"spectrum", chain.spectrum},
                                       {"lamb_dicke", chain.eta}});
    }
    write_metadata(o, "modes", opt);
    log << "mode  frequency\n";
    for (Eigen::Index m = 0; m < chain.spectrum.size(); ++m)
        log << std::setw(4) << m + 1 << "  " << format_quantity(chain.spectrum.frequencies[m], "kHz", 8) << '\n';
    if (!chain.eta.within_lamb_dicke_regime()) log << "warning: some |eta| >= 1, outside the Lamb-Dicke regime\n";
    return 0;
}

int command_design(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const Output o = output_for(&cfg, opt);
    const Chain chain = solve_chain(cfg.trap);
    const DesignProblem problem = make_design_problem(cfg, chain, require_target(cfg));
    DesignSolution sol;
    try {
        sol = design(problem);
    } catch (const InfeasibleDesignError& e) {
        o.json_file("design_infeasible.json", json{{"target", problem.target.name},
                                                   {"error", e.what()},
                                                   {"suggested_k_max", e.suggested_k_max()}});
        write_metadata(o, "design", opt);
        throw;
    }
    const DesignReport report = design_report(problem, sol);
    if (o.json_files()) {
        o.json_file("design.json", report);
        o.json_file("schedule.json", report.schedule);
    }
    if (o.csv()) {
        o.csv_file("implemented.csv", [&](std::ostream& os) { write_matrix_csv(os, report.implemented.values()); });
        o.csv_file("target.csv", [&](std::ostream& os) { write_matrix_csv(os, report.target.values()); });
        o.csv_file("schedule.csv", [&](std::ostream& os) {
            std::vector<std::vector<double>> rows;
            for (const auto& r : report.rows)
                rows.push_back({static_cast<double>(r.mode), r.detuning, r.duration,
                                static_cast<double>(r.multiplicity), r.weight});
            write_table_csv(os, {"mode", "detuning_hz", "duration_s", "multiplicity", "weight"}, rows);
        });
    }
    o.text("design.txt", report.table());
    write_metadata(o, "design", opt);
    log << report.table();

    const double threshold = opt.threshold ? *opt.threshold : cfg.design.threshold;
    if (report.achieved_fidelity < threshold) {
        log << "achieved fidelity " << percent(report.achieved_fidelity) << " is below the threshold "
            << percent(threshold) << '\n';
        return 2;
    }
    return 0;
}

int command_fidelity(const std::optional<RunConfig>& cfg, const CommandOptions& opt, std::ostream& log)
{
    const Output o = output_for(cfg ? &*cfg : nullptr, opt);
    FidelityReport report;
    if (opt.implemented_file || opt.target_file) {
        if (!opt.implemented_file || !opt.target_file)
            throw ValidationError("fidelity: give both --implemented and --target, or a config");
        auto load = [](const std::filesystem::path& p) {
            std::ifstream in(p);
            if (!in) throw ValidationError("cannot open '" + p.string() + "'");
            return CouplingMatrix(read_matrix_csv(in), false);
        };
        report = fidelity(load(*opt.implemented_file), load(*opt.target_file));
    } else {
        if (!cfg) throw ValidationError("fidelity: need --config or --implemented/--target");
        const Chain chain = solve_chain(cfg->trap);
        const Schedule schedule = resolve_schedule(*cfg, chain);
        report = fidelity(schedule_effective_coupling(schedule, chain.spectrum, chain.eta), require_target(*cfg).coupling);
        if (o.json_files())
            o.json_file("closure.json", [&] {
                const ClosureReport c = loop_closure_report(schedule, chain.spectrum, cfg->design.closure_tolerance);
                json layers = json::array();
                for (const auto& l : c.layers)
                    layers.push_back(json{{"products", l.products},
                                          {"addressed_deviation", l.addressed_deviation},
                                          {"worst_deviation", l.worst_deviation},
                                          {"closed", l.closed}});
                return json{{"tolerance", c.tolerance}, {"closed", c.closed()}, {"layers", layers}};
            }());
    }
    if (o.json_files()) o.json_file("fidelity.json", report);
    if (o.csv()) {
        o.csv_file("implemented.csv", [&](std::ostream& os) { write_matrix_csv(os, report.implemented.values()); });
        o.csv_file("target.csv", [&](std::ostream& os) { write_matrix_csv(os, report.target.values()); });
    }
    write_metadata(o, "fidelity", opt);
    log << "fidelity: " << percent(report.fidelity) << '\n';
    const double threshold = opt.threshold ? *opt.threshold : (cfg ? cfg->design.threshold : 0.0);
    return report.fidelity < threshold ? 2 : 0;
}

int command_evolve(const RunConfig& cfg_in, const CommandOptions& opt, std::ostream& log)
{
    RunConfig cfg = cfg_in;
    if (opt.sequence) cfg.dynamics.sequence = *opt.sequence;
    if (opt.compare) cfg.dynamics.compare = true;
    const Output o = output_for(&cfg, opt);
    const Chain chain = solve_chain(cfg.trap);
    const EvolveResult res = run_evolution(cfg, chain);

    if (o.csv()) o.csv_file("trace.csv", [&](std::ostream& os) { write_trace_csv(os, res.trace); });
    if (o.json_files())
        o.json_file("trace.json", json{{"sequence", sequence_name(cfg.dynamics.sequence)},
                                       {"schedule", res.schedule},
                                       {"trace", res.trace}});
    if (res.comparison) {
        const auto& c = *res.comparison;
        if (o.csv()) {
            o.csv_file("compare_desired.csv", [&](std::ostream& os) { write_trace_csv(os, c.desired); });
            o.csv_file("compare_implemented.csv", [&](std::ostream& os) { write_trace_csv(os, c.implemented); });
            o.csv_file("compare_offsets.csv", [&](std::ostream& os) { write_trace_csv(os, c.with_offsets); });
            o.csv_file("compare.csv", [&](std::ostream& os) {
                std::vector<std::vector<double>> rows;
                for (std::size_t k = 0; k < c.implemented.size(); ++k)
                    rows.push_back({static_cast<double>(k), c.implemented.time[k], c.desired.average[k],
                                    c.implemented.average[k], c.with_offsets.average[k]});
                write_table_csv(os, {"step", "time_s", "desired", "implemented", "with_offsets"}, rows);
            });
        }
        if (o.json_files())
            o.json_file("comparison.json",
                        json{{"desired", c.desired}, {"implemented", c.implemented}, {"with_offsets", c.with_offsets}});
        log << "max |implemented - desired|: " << max_trace_deviation(c.implemented, c.desired) << '\n';
        // Only full cycles are expected to agree with the desired Hamiltonian.
        const std::size_t per_cycle = res.schedule.layers.size();
        double boundary = 0.0;
        for (std::size_t k = 0; k < c.implemented.size(); k += per_cycle)
            for (std::size_t q = 0; q < c.implemented.sites[k].size(); ++q)
                boundary = std::max(boundary, std::abs(c.implemented.sites[k][q] - c.desired.sites[k][q]));
        log << "max |implemented - desired| at cycle boundaries: " << boundary << '\n';
        log << "max |with_offsets - implemented|: " << max_trace_deviation(c.with_offsets, c.implemented) << '\n';
    }
    write_metadata(o, "evolve", opt);
    log << sequence_name(cfg.dynamics.sequence) << ": " << res.trace.size() << " recorded points, final average <sz> "
        << res.trace.average.back() << '\n';
    return 0;
}

int command_bsb(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const Output o = output_for(&cfg, opt);
    const Chain chain = solve_chain(cfg.trap);
    const BsbTraces traces = run_bsb(cfg, chain);
    if (o.csv()) o.csv_file("bsb.csv", [&](std::ostream& os) { write_bsb_csv(os, traces); });
    if (o.json_files()) o.json_file("bsb.json", traces);
    write_metadata(o, "bsb", opt);
    log << "bsb: " << traces.times.size() << " time points, n_max " << traces.n_max << ", top-level population "
        << traces.max_top_population << '\n';
    return 0;
}

int command_sweep(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const Output o = output_for(&cfg, opt);
    const SweepTable table = run_sweep(cfg);
    if (o.csv()) o.csv_file("sweep.csv", [&](std::ostream& os) { write_table_csv(os, table.header, table.rows); });
    if (o.json_files()) o.json_file("sweep.json", json{{"columns", table.header}, {"rows", table.rows}});
    write_metadata(o, "sweep", opt);
    std::size_t best = 0;
    for (std::size_t k = 0; k < table.rows.size(); ++k)
        if (table.rows[k][1] > table.rows[best][1] || std::isnan(table.rows[best][1])) best = k;
    log << "sweep over " << table.header[0] << ": " << table.rows.size() << " points, best fidelity "
        << percent(table.rows[best][1]) << " at " << table.rows[best][0] << '\n';
    return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"ionweave: trapped-ion interaction-graph design and spin dynamics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_path, out_dir, format, backend = "openmp", sequence, implemented, target;
    double threshold = 0.0;
    bool seedless = false, compare = false;

    auto common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config_path, "YAML run configuration")->check(CLI::ExistingFile);
        if (config_required) c->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
        sub->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
        sub->add_option("--threshold", threshold, "minimum acceptable fidelity");
        sub->add_flag("--seedless", seedless, "accepted for compatibility; every computation is deterministic");
        sub->add_option("--backend", backend, "serial or openmp")->check(CLI::IsMember({"serial", "openmp"}));
    };
    CLI::App* modes = app.add_subcommand("modes", "equilibrium positions, normal modes, Lamb-Dicke matrix");
    CLI::App* design_cmd = app.add_subcommand("design", "synthesize a pulse schedule for a target graph");
    CLI::App* fid = app.add_subcommand("fidelity", "score a schedule or a coupling matrix against a target");
    CLI::App* evolve = app.add_subcommand("evolve", "spin dynamics under a layered schedule");
    CLI::App* bsb = app.add_subcommand("bsb", "blue-sideband calibration curves");
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep with one summary row per point");
    common(modes, true);
    common(design_cmd, true);
    common(fid, false);
    common(evolve, true);
    common(bsb, true);
    common(sweep, true);
    fid->add_option("--implemented", implemented, "implemented coupling matrix (CSV)")->check(CLI::ExistingFile);
    fid->add_option("--target", target, "target coupling matrix (CSV)")->check(CLI::ExistingFile);
    evolve->add_option("--sequence", sequence, "ising, floquet_xy, floquet_xyz or static")
        ->check(CLI::IsMember({"ising", "floquet_xy", "floquet_xyz", "static"}));
    evolve->add_flag("--compare", compare, "three-way comparison (desired / implemented / with offsets)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        set_default_backend(backend == "serial" ? Backend::serial : Backend::openmp);
        CommandOptions opt;
        for (int k = 0; k < argc; ++k) opt.argv.emplace_back(argv[k]);
        if (!out_dir.empty()) opt.out = out_dir;
        if (!format.empty()) opt.format = parse_output_format(format);
        CLI::App* sub = app.get_subcommands().front();
        if (sub->count("--threshold")) opt.threshold = threshold;
        if (!implemented.empty()) opt.implemented_file = implemented;
        if (!target.empty()) opt.target_file = target;
        opt.compare = compare;
        if (!sequence.empty()) {
            if (sequence == "ising") opt.sequence = Sequence::ising;
            if (sequence == "floquet_xy") opt.sequence = Sequence::floquet_xy;
            if (sequence == "floquet_xyz") opt.sequence = Sequence::floquet_xyz;
            if (sequence == "static") opt.sequence = Sequence::static_hamiltonian;
        }
        std::optional<RunConfig> cfg;
        if (!config_path.empty()) {
            opt.config_path = config_path;
            cfg = load_config(config_path);
        }
        if (sub == modes) return command_modes(*cfg, opt, out);
        if (sub == design_cmd) return command_design(*cfg, opt, out);
        if (sub == fid) return command_fidelity(cfg, opt, out);
        if (sub == evolve) return command_evolve(*cfg, opt, out);
        if (sub == bsb) return command_bsb(*cfg, opt, out);
        return command_sweep(*cfg, opt, out);
    } catch (const InfeasibleDesignError& e) {
        err << "infeasible design: " << e.what() << '\n';
        return exit_code(e);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace ionweave

#include "ionweave/config.hpp"

#include "ionweave/errors.hpp"
#include "ionweave/units.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace ionweave {

namespace {

class Section {
public:
    Section(YAML::Node node, std::string path, std::string source, std::initializer_list<const char*> allowed)
        : node_(std::move(node)), path_(std::move(path)), source_(std::move(source))
    {
        if (!node_.IsMap()) fail(node_, "", "expected a mapping");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!ok.count(key)) {
                std::string list;
                for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
                fail(kv.first, key, "unknown key (allowed: " + list + ")");
            }
        }
    }

    [[noreturn]] void fail(const YAML::Node& at, const std::string& key, const std::string& msg) const
    {
        std::string where = source_;
        if (at.Mark().line >= 0) where += ":" + std::to_string(at.Mark().line + 1);
        std::string name = path_;
        if (!key.empty()) name += (name.empty() ? "" : ".") + key;
        throw ValidationError(where + ": " + (name.empty() ? "" : name + ": ") + msg);
    }

    bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

    YAML::Node require(const std::string& key) const
    {
        YAML::Node n = node_[key];
        if (!n) fail(node_, key, "missing required key");
        return n;
    }

    Section child(const std::string& key, std::initializer_list<const char*> allowed) const
    {
        return Section(require(key), path_.empty() ? key : path_ + "." + key, source_, allowed);
    }

    std::string scalar(const YAML::Node& n, const std::string& key) const
    {
        if (!n.IsScalar()) fail(n, key, "expected a scalar value");
        return n.as<std::string>();
    }

    std::string text(const std::string& key) const { return scalar(require(key), key); }

    double quantity_of(const YAML::Node& n, const std::string& key, Dimension dim) const
    {
        try {
            return parse_quantity(scalar(n, key), dim);
        } catch (const ValidationError& e) {
            fail(n, key, e.what());
        }
    }
    double quantity(const std::string& key, Dimension dim) const { return quantity_of(require(key), key, dim); }
    double quantity(const std::string& key, Dimension dim, double fallback) const
    {
        return has(key) ? quantity(key, dim) : fallback;
    }

    double number_of(const YAML::Node& n, const std::string& key) const
    {
        const std::string s = scalar(n, key);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            fail(n, key, "expected a number, got '" + s + "'");
        }
        if (used != s.size()) fail(n, key, "expected a plain number, got '" + s + "'");
        return v;
    }
    double number(const std::string& key) const { return number_of(require(key), key); }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    int integer_of(const YAML::Node& n, const std::string& key) const
    {
        const std::string s = scalar(n, key);
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(s, &used);
        } catch (const std::exception&) {
            fail(n, key, "expected an integer, got '" + s + "'");
        }
        if (used != s.size()) fail(n, key, "expected an integer, got '" + s + "'");
        return static_cast<int>(v);
    }
    int integer(const std::string& key) const { return integer_of(require(key), key); }
    int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

    bool boolean(const std::string& key, bool fallback) const
    {
        if (!has(key)) return fallback;
        const std::string s = text(key);
        if (s == "true" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "no" || s == "off") return false;
        fail(require(key), key, "expected true or false, got '" + s + "'");
    }

    // A list of values, or {start, stop, count} expanded to an inclusive linear grid.
    template <class F>
    std::vector<double> series(const std::string& key, F&& convert) const
    {
        const YAML::Node n = require(key);
        std::vector<double> out;
        if (n.IsSequence()) {
            for (const auto& item : n) out.push_back(convert(item, key));
        } else if (n.IsMap()) {
            Section range(n, path_.empty() ? key : path_ + "." + key, source_, {"start", "stop", "count"});
            const double a = convert(range.require("start"), "start");
            const double b = convert(range.require("stop"), "stop");
            const int count = range.integer("count");
            if (count < 1) range.fail(range.require("count"), "count", "must be >= 1");
            for (int k = 0; k < count; ++k) out.push_back(count == 1 ? a : a + (b - a) * k / (count - 1));
        } else {
            fail(n, key, "expected a list or a {start, stop, count} range");
        }
        if (out.empty()) fail(n, key, "empty list");
        return out;
    }

    const YAML::Node& node() const { return node_; }
    const std::string& source() const { return source_; }

private:
    YAML::Node node_;
    std::string path_;
    std::string source_;
};

TrapConfig read_trap(const Section& s)
{
    TrapConfig t;
    t.ion_count = s.integer("ion_count");
    t.axial_com_frequency = s.quantity("axial_com_frequency", Dimension::frequency);
    t.quartic_coefficient = s.number("quartic_coefficient", 0.0);
    t.ion_mass = s.quantity("ion_mass", Dimension::mass);
    t.raman_wavevector = s.quantity("raman_wavevector", Dimension::wavevector);
    try {
        t.validate();
    } catch (const ValidationError& e) {
        s.fail(s.node(), "", e.what());
    }
    return t;
}

TargetSpec read_target(const Section& s, const std::filesystem::path& base)
{
    TargetSpec t;
    if (s.has("builtin") == s.has("file")) s.fail(s.node(), "", "give exactly one of 'builtin' or 'file'");
    if (s.has("builtin")) t.builtin = s.text("builtin");
    if (s.has("file")) {
        std::filesystem::path p = s.text("file");
        if (p.is_relative()) p = base / p;
        if (!std::filesystem::exists(p)) s.fail(s.require("file"), "file", "file not found: " + p.string());
        t.file = p;
    }
    if (s.has("format")) {
        const std::string f = s.text("format");
        if (f == "matrix") t.format = TargetFileFormat::matrix;
        else if (f == "edges") t.format = TargetFileFormat::edges;
        else if (f == "auto" || f == "automatic") t.format = TargetFileFormat::automatic;
        else s.fail(s.require("format"), "format", "expected matrix, edges or auto");
    }
    if (s.has("parameters")) {
        const YAML::Node p = s.require("parameters");
        if (!p.IsMap()) s.fail(p, "parameters", "expected a mapping");
        for (const auto& kv : p) t.parameters[kv.first.as<std::string>()] = s.number_of(kv.second, "parameters." + kv.first.as<std::string>());
    }
    return t;
}

Schedule read_schedule(const Section& s)
{
    Schedule sch;
    sch.repetitions = s.integer("repetitions", 1);
    const YAML::Node layers = s.require("layers");
    if (!layers.IsSequence() || layers.size() == 0) s.fail(layers, "layers", "expected a nonempty list of layers");
    int k = 0;
    for (const auto& item : layers) {
        ++k;
        Section l(item, "schedule.layers[" + std::to_string(k) + "]", s.source(), {"mode", "detuning", "duration", "phase", "rabi"});
        LaserLayer layer;
        layer.mode = l.integer("mode") - 1;
        layer.detuning = l.quantity("detuning", Dimension::frequency);
        layer.duration = l.quantity("duration", Dimension::time);
        layer.phase = l.quantity("phase", Dimension::angle, 0.0);
        layer.rabi = l.quantity("rabi", Dimension::frequency, 1e6);
        sch.layers.push_back(layer);
    }
    return sch;
}

OffsetModel read_offsets(const Section& s)
{
    OffsetModel o;
    o.qubit_gradient = s.quantity("qubit_gradient", Dimension::gradient, 0.0);
    if (s.has("beam_width")) o.beam_width_axial = s.quantity("beam_width", Dimension::length);
    o.beam_center_offset = s.quantity("beam_center_offset", Dimension::length, 0.0);
    o.base_rabi = s.quantity("base_rabi", Dimension::frequency, 0.0);
    try {
        o.validate();
    } catch (const ValidationError& e) {
        s.fail(s.node(), "", e.what());
    }
    return o;
}

DesignSettings read_design(const Section& s)
{
    DesignSettings d;
    if (s.has("modes")) {
        const YAML::Node m = s.require("modes");
        if (!m.IsSequence()) s.fail(m, "modes", "expected a list of 1-based mode numbers");
        for (const auto& item : m) d.modes.push_back(s.integer_of(item, "modes") - 1);
    }
    d.grid.min = s.quantity("detuning_min", Dimension::frequency, d.grid.min);
    d.grid.max = s.quantity("detuning_max", Dimension::frequency, d.grid.max);
    d.grid.step = s.quantity("detuning_step", Dimension::frequency, d.grid.step);
    d.k_max = s.integer("k_max", d.k_max);
    d.max_layers = s.integer("max_layers", d.max_layers);
    d.closure_tolerance = s.number("closure_tolerance", d.closure_tolerance);
    d.rabi = s.quantity("rabi", Dimension::frequency, d.rabi);
    d.phase = s.quantity("phase", Dimension::angle, d.phase);
    d.min_relative_weight = s.number("min_relative_weight", d.min_relative_weight);
    d.max_detuning_fraction = s.number("max_detuning_fraction", d.max_detuning_fraction);
    d.threshold = s.number("threshold", d.threshold);
    return d;
}

DynamicsSettings read_dynamics(const Section& s)
{
    DynamicsSettings d;
    if (s.has("sequence")) {
        const std::string q = s.text("sequence");
        if (q == "ising") d.sequence = Sequence::ising;
        else if (q == "floquet_xy") d.sequence = Sequence::floquet_xy;
        else if (q == "floquet_xyz") d.sequence = Sequence::floquet_xyz;
        else if (q == "static") d.sequence = Sequence::static_hamiltonian;
        else s.fail(s.require("sequence"), "sequence", "expected ising, floquet_xy, floquet_xyz or static");
    }
    d.repetitions = s.integer("repetitions", 0);
    if (d.repetitions < 0) s.fail(s.require("repetitions"), "repetitions", "must be >= 0");
    if (s.has("initial_state")) d.initial_state = s.text("initial_state");
    d.compare = s.boolean("compare", false);
    if (s.has("layer_phase")) d.layer_phase = s.quantity("layer_phase", Dimension::angle);
    if (s.has("desired")) {
        const std::string q = s.text("desired");
        if (q == "effective") d.desired_is_effective = true;
        else if (q != "target") s.fail(s.require("desired"), "desired", "expected target or effective");
    }
    return d;
}

BsbSettings read_bsb(const Section& s)
{
    BsbSettings b;
    b.mode = s.integer("mode") - 1;
    b.rabi = s.quantity("rabi", Dimension::frequency, b.rabi);
    b.mean_n = s.number("mean_n", b.mean_n);
    b.times = s.series("times", [&](const YAML::Node& n, const std::string& k) {
        return s.quantity_of(n, k, Dimension::time);
    });
    b.beam_profile = s.boolean("beam_profile", false);
    b.n_max = s.integer("n_max", 0);
    return b;
}

SweepSettings read_sweep(const Section& s)
{
    SweepSettings w;
    const std::string axis = s.text("axis");
    if (axis == "axial_frequency") w.axis = SweepAxis::axial_frequency;
    else if (axis == "quartic") w.axis = SweepAxis::quartic;
    else if (axis == "detuning") w.axis = SweepAxis::detuning;
    else if (axis == "s") w.axis = SweepAxis::s;
    else s.fail(s.require("axis"), "axis", "expected axial_frequency, quartic, detuning or s");
    const bool dimensional = w.axis == SweepAxis::axial_frequency || w.axis == SweepAxis::detuning;
    w.values = s.series("values", [&](const YAML::Node& n, const std::string& k) {
        return dimensional ? s.quantity_of(n, k, Dimension::frequency) : s.number_of(n, k);
    });
    return w;
}

} // namespace

std::string_view sequence_name(Sequence s)
{
    switch (s) {
    case Sequence::ising: return "ising";
    case Sequence::floquet_xy: return "floquet_xy";
    case Sequence::floquet_xyz: return "floquet_xyz";
    case Sequence::static_hamiltonian: return "static";
    }
    return "?";
}

std::string_view sweep_axis_name(SweepAxis a)
{
    switch (a) {
    case SweepAxis::axial_frequency: return "axial_frequency";
    case SweepAxis::quartic: return "quartic";
    case SweepAxis::detuning: return "detuning";
    case SweepAxis::s: return "s";
    }
    return "?";
}

OutputFormat parse_output_format(std::string_view s)
{
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    if (s == "both") return OutputFormat::both;
    throw ValidationError("output format must be csv, json or both, got '" + std::string(s) + "'");
}

TargetGraph build_target(const TargetSpec& spec, int ion_count)
{
    if (spec.file) return custom_target(*spec.file, spec.format);
    auto param = [&](const std::string& k, double fallback) {
        auto it = spec.parameters.find(k);
        return it == spec.parameters.end() ? fallback : it->second;
    };
    auto check_keys = [&](std::initializer_list<const char*> allowed) {
        for (const auto& kv : spec.parameters) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || kv.first == a;
            if (!ok) throw ValidationError("target " + spec.builtin + ": unknown parameter '" + kv.first + "'");
        }
    };
    if (spec.builtin == "cross_polytope") {
        check_keys({"n"});
        return cross_polytope(static_cast<int>(param("n", ion_count)));
    }
    if (spec.builtin == "leaves_only_tree") {
        check_keys({"n", "s"});
        return leaves_only_tree(static_cast<int>(param("n", ion_count)), param("s", 0.0));
    }
    if (spec.builtin == "cayley_tree_c36") {
        check_keys({});
        return cayley_tree_c36();
    }
    if (spec.builtin == "triangular_torus") {
        check_keys({"rows", "cols"});
        return triangular_torus(static_cast<int>(param("rows", 3)), static_cast<int>(param("cols", 3)));
    }
    throw ValidationError("unknown built-in target '" + spec.builtin +
                          "' (cross_polytope, leaves_only_tree, cayley_tree_c36, triangular_torus)");
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, std::string_view source_name)
{
    const std::string source(source_name);
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ValidationError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    Section top(root, "", source,
                {"trap", "target", "schedule", "offsets", "design", "dynamics", "bsb", "sweep", "output"});
    RunConfig cfg;
    cfg.trap = read_trap(top.child("trap", {"ion_count", "axial_com_frequency", "quartic_coefficient", "ion_mass",
                                            "raman_wavevector"}));
    if (top.has("target"))
        cfg.target = read_target(top.child("target", {"builtin", "file", "format", "parameters"}), base_dir);
    if (top.has("schedule")) {
        const YAML::Node n = top.require("schedule");
        if (n.IsScalar()) {
            if (n.as<std::string>() != "design") top.fail(n, "schedule", "expected 'design' or a schedule mapping");
            cfg.design_schedule = true;
        } else {
            cfg.schedule = read_schedule(top.child("schedule", {"repetitions", "layers"}));
        }
    }
    if (top.has("offsets"))
        cfg.offsets = read_offsets(top.child("offsets", {"qubit_gradient", "beam_width", "beam_center_offset", "base_rabi"}));
    if (top.has("design"))
        cfg.design = read_design(top.child("design", {"modes", "detuning_min", "detuning_max", "detuning_step", "k_max",
                                                      "max_layers", "closure_tolerance", "rabi", "phase",
                                                      "min_relative_weight", "max_detuning_fraction", "threshold"}));
    if (top.has("dynamics"))
        cfg.dynamics = read_dynamics(top.child(
            "dynamics", {"sequence", "repetitions", "initial_state", "compare", "layer_phase", "desired"}));
    if (top.has("bsb"))
        cfg.bsb = read_bsb(top.child("bsb", {"mode", "rabi", "mean_n", "times", "beam_profile", "n_max"}));
    if (top.has("sweep")) cfg.sweep = read_sweep(top.child("sweep", {"axis", "values"}));
    if (top.has("output")) {
        Section o = top.child("output", {"directory", "format"});
        if (o.has("directory")) cfg.output.directory = o.text("directory");
        if (o.has("format")) {
            try {
                cfg.output.format = parse_output_format(o.text("format"));
            } catch (const ValidationError& e) {
                o.fail(o.require("format"), "format", e.what());
            }
        }
    }
    if (cfg.schedule) {
        try {
            cfg.schedule->validate(cfg.trap.ion_count);
        } catch (const ValidationError& e) {
            top.fail(top.require("schedule"), "schedule", e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path(), path.string());
}

} // namespace ionweave

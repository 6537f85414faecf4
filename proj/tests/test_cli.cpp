#include "helpers.hpp"

#include "ionweave/app.hpp"
#include "ionweave/serialize.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace ionweave;
namespace fs = std::filesystem;

namespace {

const char* kTrap4 = R"(trap:
  ion_count: 4
  axial_com_frequency: 1.3 MHz
  ion_mass: 9.012182 u
  raman_wavevector: 28.3871 rad/um
)";

std::string trap(int n, double mhz = 1.3)
{
    std::ostringstream s;
    s << "trap:\n  ion_count: " << n << "\n  axial_com_frequency: " << mhz
      << " MHz\n  ion_mass: 9.012182 u\n  raman_wavevector: 28.3871 rad/um\n";
    return s.str();
}

const char* kPlaquetteSchedule = R"(schedule:
  repetitions: 12
  layers:
    - {mode: 1, detuning: 107.6 kHz, duration: 9.29 us}
    - {mode: 3, detuning: -71.14 kHz, duration: 14.06 us}
)";

struct Run {
    int code = 0;
    std::string out, err;
};

Run cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "ionweave");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path write_config(const fs::path& dir, const std::string& text)
{
    const fs::path p = dir / "run.yaml";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Data rows of a CSV file with a header line, parsed as doubles.
std::vector<std::vector<double>> csv_rows(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> column(const fs::path& p, std::size_t k)
{
    std::ifstream in(p);
    std::string line;
    std::vector<std::string> out;
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::string cell;
        for (std::size_t i = 0; i <= k && std::getline(ls, cell, ','); ++i) {}
        out.push_back(cell);
    }
    return out;
}

} // namespace

TEST_CASE("modes: COM frequency and three-ion ratios")
{
    const fs::path dir = testing::scratch_dir("cli_modes");
    Run r = cli({"modes", "--config", write_config(dir, kTrap4).string(), "--out", (dir / "o").string()});
    REQUIRE(r.code == 0);
    auto f = csv_rows(dir / "o" / "frequencies.csv");
    REQUIRE(f.size() == 4);
    CHECK(f[0][1] == doctest::Approx(1.3e6).epsilon(1e-10));
    for (std::size_t m = 1; m < 4; ++m) CHECK(f[m][1] > f[m - 1][1]);
    for (const char* name : {"positions.csv", "eigenvectors.csv", "lamb_dicke.csv", "modes.json", "modes.meta.json"})
        CHECK(fs::exists(dir / "o" / name));

    r = cli({"modes", "--config", write_config(dir, trap(3)).string(), "--out", (dir / "o3").string()});
    REQUIRE(r.code == 0);
    f = csv_rows(dir / "o3" / "frequencies.csv");
    CHECK(f[1][2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-8));
    CHECK(f[2][2] == doctest::Approx(std::sqrt(29.0 / 5.0)).epsilon(1e-8));

    // reloading the JSON gives the same spectrum
    const json j = read_json_file(dir / "o3" / "modes.json");
    const Eigen::VectorXd reloaded = j["spectrum"].get<ModeSpectrum>().frequencies;
    for (int m = 0; m < 3; ++m) CHECK(reloaded[m] == f[m][1]);
}

TEST_CASE("config errors give exit code 1 and name the key")
{
    const fs::path dir = testing::scratch_dir("cli_errors");
    const Run r = cli({"modes", "--config",
                       write_config(dir, "trap:\n  ion_count: 4\n  axial_com_frequency: 1 MHz\n  raman_wavevector: 1 rad/m\n").string(),
                       "--out", (dir / "o").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("ion_mass") != std::string::npos);
    CHECK(cli({"modes"}).code == 1);
    CHECK(cli({"teleport"}).code == 1);
}

TEST_CASE("design: cross polytopes and the Cayley threshold")
{
    const fs::path dir = testing::scratch_dir("cli_design");
    Run r = cli({"design", "--config",
                 write_config(dir, std::string(kTrap4) + "target: {builtin: cross_polytope}\nschedule: design\n").string(),
                 "--out", (dir / "o4").string(), "--threshold", "0.995"});
    REQUIRE(r.code == 0);
    Schedule s = read_json_file(dir / "o4" / "schedule.json").get<Schedule>();
    CHECK(s.layers.size() == 2);
    const DesignReport rep = read_json_file(dir / "o4" / "design.json").get<DesignReport>();
    CHECK(rep.achieved_fidelity >= 0.995);
    CHECK(fs::exists(dir / "o4" / "design.txt"));

    r = cli({"design", "--config", write_config(dir, trap(8) + "target: {builtin: cross_polytope}\nschedule: design\n").string(),
             "--out", (dir / "o8").string()});
    REQUIRE(r.code == 0);
    s = read_json_file(dir / "o8" / "schedule.json").get<Schedule>();
    REQUIRE(s.layers.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(s.layers[k].mode == 2 * k);

    r = cli({"design", "--config", write_config(dir, trap(6) + "target: {builtin: cayley_tree_c36}\nschedule: design\n").string(),
             "--out", (dir / "oc").string(), "--threshold", "0.999"});
    CHECK(r.code != 0);
    CHECK(fs::exists(dir / "oc" / "design.json"));
}

TEST_CASE("fidelity from matrix files")
{
    const fs::path dir = testing::scratch_dir("cli_fidelity");
    std::ofstream(dir / "a.csv") << "0,1,0\n1,0,1\n0,1,0\n";
    std::ofstream(dir / "b.csv") << "0,-1,0\n-1,0,-1\n0,-1,0\n";
    Run r = cli({"fidelity", "--implemented", (dir / "a.csv").string(), "--target", (dir / "a.csv").string(), "--out",
                 (dir / "o").string(), "--threshold", "0.99"});
    CHECK(r.code == 0);
    CHECK(read_json_file(dir / "o" / "fidelity.json")["fidelity"].get<double>() == doctest::Approx(1.0));
    r = cli({"fidelity", "--implemented", (dir / "a.csv").string(), "--target", (dir / "b.csv").string(), "--out",
             (dir / "o2").string(), "--threshold", "0.5"});
    CHECK(r.code == 2);
}

TEST_CASE("evolve: row counts, null dynamics and the offset comparison")
{
    const fs::path dir = testing::scratch_dir("cli_evolve");
    const std::string base = std::string(kTrap4) + "target: {builtin: cross_polytope}\n" + kPlaquetteSchedule;

    Run r = cli({"evolve", "--config", write_config(dir, base + "dynamics: {layer_phase: 0.39 rad}\n").string(), "--out",
                 (dir / "ising").string()});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(dir / "ising" / "trace.csv");
    CHECK(rows.size() == 25); // initial point plus two layers for each of 12 cycles

    const std::string zero = std::string(kTrap4) + R"(schedule:
  layers:
    - {mode: 1, detuning: 107.6 kHz, duration: 9.29 us, rabi: 0 Hz}
    - {mode: 3, detuning: -71.14 kHz, duration: 14.06 us, rabi: 0 Hz}
dynamics: {sequence: floquet_xy, repetitions: 6}
)";
    r = cli({"evolve", "--config", write_config(dir, zero).string(), "--out", (dir / "flat").string()});
    REQUIRE(r.code == 0);
    for (const auto& row : csv_rows(dir / "flat" / "trace.csv")) CHECK(row.back() == -1.0);

    r = cli({"evolve", "--config", write_config(dir, base + "offsets: {qubit_gradient: 0 Hz/um}\ndynamics: {layer_phase: 0.39 rad}\n").string(),
             "--out", (dir / "cmp").string(), "--compare"});
    REQUIRE(r.code == 0);
    CHECK(column(dir / "cmp" / "compare.csv", 3).size() == 26);
    auto impl = column(dir / "cmp" / "compare.csv", 3), offs = column(dir / "cmp" / "compare.csv", 4);
    impl.erase(impl.begin());
    offs.erase(offs.begin());
    CHECK(impl == offs);
    CHECK(slurp(dir / "cmp" / "compare_implemented.csv") == slurp(dir / "cmp" / "compare_offsets.csv"));
}

TEST_CASE("bsb command")
{
    const fs::path dir = testing::scratch_dir("cli_bsb");
    const Run r = cli({"bsb", "--config",
                       write_config(dir, trap(6) + "bsb: {mode: 3, mean_n: 0.1, times: {start: 0 us, stop: 100 us, count: 51}}\n").string(),
                       "--out", (dir / "o").string(), "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(dir / "o" / "bsb.csv");
    CHECK(rows.size() == 51);
    CHECK(rows[0].size() == 8);
    CHECK_FALSE(fs::exists(dir / "o" / "bsb.json"));
}

TEST_CASE("sweeps")
{
    const fs::path dir = testing::scratch_dir("cli_sweep");
    std::string cfg = std::string(kTrap4) + "target: {builtin: cross_polytope}\n" + kPlaquetteSchedule +
                      "sweep: {axis: axial_frequency, values: {start: 0.6 MHz, stop: 1.5 MHz, count: 10}}\n";
    Run r = cli({"sweep", "--config", write_config(dir, cfg).string(), "--out", (dir / "wz").string()});
    REQUIRE(r.code == 0);
    auto rows = csv_rows(dir / "wz" / "sweep.csv");
    REQUIRE(rows.size() == 10);
    double best = 0.0;
    for (const auto& row : rows) if (std::isfinite(row[1])) best = std::max(best, row[1]);
    CHECK(best >= 0.995);

    cfg = trap(6) + "target: {builtin: leaves_only_tree}\nschedule: design\nsweep: {axis: s, values: [-2, -1, 0, 1, 2]}\n";
    r = cli({"sweep", "--config", write_config(dir, cfg).string(), "--out", (dir / "s").string()});
    REQUIRE(r.code == 0);
    rows = csv_rows(dir / "s" / "sweep.csv");
    REQUIRE(rows.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(rows[k].back() == doctest::Approx(std::pow(2.0, rows[k][0])));
    for (std::size_t k = 1; k < 5; ++k) CHECK(rows[k].back() > rows[k - 1].back());

    cfg = std::string(kTrap4) + "target: {builtin: cross_polytope}\n" + kPlaquetteSchedule + "sweep: {axis: quartic, values: [0.5]}\n";
    r = cli({"sweep", "--config", write_config(dir, cfg).string(), "--out", (dir / "one").string()});
    REQUIRE(r.code == 0);
    CHECK(csv_rows(dir / "one" / "sweep.csv").size() == 1);
}

TEST_CASE("identical runs produce byte-identical data files")
{
    const fs::path dir = testing::scratch_dir("cli_determinism");
    const std::string cfg = std::string(kTrap4) + "target: {builtin: cross_polytope}\nschedule: design\n";
    const fs::path c = write_config(dir, cfg);
    REQUIRE(cli({"design", "--config", c.string(), "--out", (dir / "a").string()}).code == 0);
    REQUIRE(cli({"design", "--config", c.string(), "--out", (dir / "b").string(), "--backend", "serial", "--seedless"}).code == 0);
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        const std::string name = e.path().filename().string();
        if (name.find(".meta.") != std::string::npos) continue;
        CHECK_MESSAGE(slurp(e.path()) == slurp(dir / "b" / name), name);
        ++compared;
    }
    CHECK(compared >= 6);
}

TEST_CASE("the installed binary maps failures to exit codes")
{
    const char* exe = std::getenv("IONWEAVE_CLI");
    if (!exe) {
        MESSAGE("IONWEAVE_CLI not set; skipping");
        return;
    }
    const fs::path dir = testing::scratch_dir("cli_binary");
    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(exe) + " " + args + " > " + (dir / "log.txt").string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    const fs::path ok = write_config(dir, kTrap4);
    CHECK(run("modes --config " + ok.string() + " --out " + (dir / "o").string()) == 0);
    CHECK(run("modes --config " + ok.string() + " --format yaml") == 1);
    std::ofstream(dir / "bad.yaml") << "trap:\n  ion_count: 4\n  axial_com_frequency: 1300000\n";
    CHECK(run("modes --config " + (dir / "bad.yaml").string()) == 1);
    CHECK(slurp(dir / "log.txt").find("axial_com_frequency") != std::string::npos);
    std::ofstream(dir / "a.csv") << "0,1\n1,0\n";
    std::ofstream(dir / "b.csv") << "0,-1\n-1,0\n";
    CHECK(run("fidelity --implemented " + (dir / "a.csv").string() + " --target " + (dir / "b.csv").string() +
              " --threshold 0.5 --out " + (dir / "f").string()) == 2);
}

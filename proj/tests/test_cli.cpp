#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kSource(IONRABI_SOURCE_DIR);

int run_cli(const std::string& args, const fs::path& out_dir)
{
    const std::string cmd = "IONRABI_OUTPUT_DIR='" + out_dir.string() + "' '" + IONRABI_CLI + "' " + args +
                            " > '" + (out_dir / "stdout.txt").string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string first_line(const fs::path& file)
{
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("exit codes and outputs")
    {
        const fs::path dir = fs::temp_directory_path() / "ionrabi_test_cli";
        fs::remove_all(dir);
        fs::create_directories(dir);

        CHECK(run_cli("f1 --n 14 --eta 0.5", dir) == 0);
        CHECK(std::stod(first_line(dir / "stdout.txt")) == doctest::Approx(-0.0079891163270001833));
        CHECK(run_cli("f1 --find-zero 17", dir) == 0);
        CHECK(std::stod(first_line(dir / "stdout.txt")) == doctest::Approx(0.45178436070687834).epsilon(1e-14));
        CHECK(run_cli("f1 --eta 0.5 --n-max 60", dir) == 0);
        CHECK(first_line(dir / "stdout.txt") == "n,f1");
        CHECK(run_cli("f1 --n 3", dir) == 2);

        CHECK(run_cli("landscape --n-max 10 --grid 5", dir) == 0);
        CHECK(first_line(dir / "landscape.csv") == "n,eta,log10_abs_f1");

        const fs::path bad = dir / "bad.scenario";
        std::ofstream(bad) << "schema_version: 1\nname: x\nmodel: {kind: JC, g: 1, spin: 2}\n";
        CHECK(run_cli("evolve --scenario " + bad.string(), dir) == 2);
        std::ofstream(dir / "empty.scenario") << "";
        CHECK(run_cli("evolve --scenario " + (dir / "empty.scenario").string(), dir) == 2);
        CHECK(run_cli("evolve", dir) == 2);
        CHECK(run_cli("nonsense", dir) == 2);

        CHECK(run_cli("evolve --scenario " + (kSource / "scenarios/fig5.scenario").string(), dir) == 0);
        CHECK(fs::exists(dir / "fig5" / "trajectory.csv"));
        CHECK(fs::exists(dir / "fig5" / "snapshots.csv"));
        CHECK(run_cli("validate --scenario " + (kSource / "scenarios/fig5.scenario").string(), dir) == 0);

        CHECK(run_cli("plot --kind bars --csv " + (dir / "fig5" / "trajectory.csv").string(), dir) == 0);
        CHECK(fs::exists(dir / "trajectory_bars.gp"));
        CHECK(run_cli("plot --column entropy --csv " + (dir / "fig5" / "trajectory.csv").string(), dir) == 2);

        CHECK(run_cli("sweep --no-convergence --template " + (kSource / "scenarios/fig5.scenario").string() +
                          " --axis times.t_end=0.5,1 --threads 2",
                      dir) == 0);
        CHECK(fs::exists(dir / "fig5_index.csv"));
        CHECK(run_cli("sweep --no-convergence --template " + (kSource / "scenarios/fig5.scenario").string() +
                          " --axis truncation=3",
                      dir) == 3);
        CHECK(fs::exists(dir / "fig5_failures.json"));

        // A thermal state whose tail escapes the truncation fails numerically;
        // an unconverged truncation is reported by validate with code 4.
        std::ofstream(dir / "loose.scenario") << "schema_version: 1\nname: loose\nmodel: {kind: QRM, g: 20, omega_R: 10}\n"
                                                 "initial: {coherent: 1}\ntimes: {t_end: 3, n_points: 31}\ntruncation: 8\n";
        CHECK(run_cli("evolve --scenario " + (dir / "loose.scenario").string(), dir) == 3);
        std::ofstream(dir / "coarse.scenario") << "schema_version: 1\nname: coarse\nmodel: {kind: QRM, g: 20, omega_R: 10}\n"
                                                  "initial: {fock: 0}\ntimes: {t_end: 3, n_points: 31}\ntruncation: 12\n";
        CHECK(run_cli("validate --scenario " + (dir / "coarse.scenario").string(), dir) == 4);
    }
}

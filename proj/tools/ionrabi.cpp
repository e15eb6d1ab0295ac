// ionrabi: command-line front end for the nonlinear Rabi model simulator.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "ionrabi/errors.hpp"
#include "ionrabi/plotdata.hpp"
#include "ionrabi/protocols.hpp"
#include "ionrabi/runner.hpp"
#include "ionrabi/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace ionrabi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitConvergence = 4;

fs::path output_dir()
{
    const char* env = std::getenv("IONRABI_OUTPUT_DIR");
    return env && *env ? fs::path(env) : fs::current_path();
}

void print_convergence(const ConvergenceVerdict& v)
{
    if (!v.checked)
        return;
    std::printf("convergence: n_max %d vs %d, max difference %.3e (tolerance %.1e): %s\n", v.n_max,
                v.n_max_check, v.max_difference, v.tolerance, v.converged ? "converged" : "NOT converged");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nonlinear Rabi model simulator for trapped ions"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.set_version_flag("--version", version_string());

    // f1
    auto* f1_cmd = app.add_subcommand("f1", "Evaluate f1(n, eta), tabulate it, or find its zeros");
    int f1_n = -1, f1_table = -1, f1_zero = -1;
    double f1_eta = -1.0;
    f1_cmd->add_option("--n", f1_n, "Fock index")->check(CLI::NonNegativeNumber);
    f1_cmd->add_option("--eta", f1_eta, "Lamb-Dicke parameter")->check(CLI::NonNegativeNumber);
    f1_cmd->add_option("--n-max", f1_table, "Print the CSV table n,f1 for n = 0..N")->check(CLI::NonNegativeNumber);
    f1_cmd->add_option("--find-zero", f1_zero, "Smallest eta > 0 with f1(N, eta) = 0")->check(CLI::PositiveNumber);

    // evolve
    auto* evolve_cmd = app.add_subcommand("evolve", "Run a scenario file");
    std::string scenario_file;
    bool no_convergence = false;
    evolve_cmd->add_option("--scenario", scenario_file, "Scenario YAML file")->required();
    evolve_cmd->add_flag("--no-convergence", no_convergence, "Skip the n_max + 20 convergence run");

    // fockprep
    auto* fock_cmd = app.add_subcommand("fockprep", "Dissipative Fock-state preparation");
    FockPrepPlan plan;
    double fock_eta = -1.0;
    fock_cmd->add_option("--target", plan.target_n, "Target Fock state")->required()->check(CLI::PositiveNumber);
    fock_cmd->add_option("--eta", fock_eta, "Lamb-Dicke parameter (default: zero of f1(target, eta))");
    fock_cmd->add_option("--nbar", plan.initial_nbar, "Initial thermal occupation")->capture_default_str();
    fock_cmd->add_option("--gamma-ratio", plan.gamma_ratio, "Qubit decay rate over g")->capture_default_str();
    fock_cmd->add_option("--duration", plan.duration, "Duration in units of 2 pi / g")->capture_default_str();
    fock_cmd->add_option("--n-max", plan.n_max, "Truncation (0: automatic)")->capture_default_str();
    fock_cmd->add_option("--points", plan.n_points, "Output samples")->capture_default_str();

    // landscape
    auto* land_cmd = app.add_subcommand("landscape", "log10 |f1(n, eta)| on a grid");
    int land_n_min = 0, land_n_max = 60, land_grid = 100;
    double land_eta_min = 0.01, land_eta_max = 1.0;
    land_cmd->add_option("--n-min", land_n_min)->capture_default_str();
    land_cmd->add_option("--n-max", land_n_max)->capture_default_str();
    land_cmd->add_option("--eta-min", land_eta_min)->capture_default_str();
    land_cmd->add_option("--eta-max", land_eta_max)->capture_default_str();
    land_cmd->add_option("--grid", land_grid, "Number of eta values")->capture_default_str();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario template over a parameter grid");
    std::string template_file;
    std::vector<std::string> axis_texts;
    sweep_cmd->add_option("--template", template_file, "Scenario YAML template")->required();
    sweep_cmd->add_option("--axis", axis_texts, "key=lo:hi:count or key=v1,v2,... (repeatable)")->required();
    sweep_cmd->add_flag("--no-convergence", no_convergence, "Skip convergence runs");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "RWA cross-check and truncation convergence");
    std::string validate_file;
    bool force_rwa = false;
    double rwa_tolerance = 0.01;
    validate_cmd->add_option("--scenario", validate_file, "Scenario YAML file")->required();
    validate_cmd->add_flag("--rwa", force_rwa, "Also cross-check NonlinearQRM scenarios against a two-tone drive");
    validate_cmd->add_option("--rwa-tolerance", rwa_tolerance)->capture_default_str();

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "Gnuplot data and script from a result CSV");
    std::string plot_csv, plot_kind = "timeseries", plot_title;
    std::vector<std::string> plot_columns;
    plot_cmd->add_option("--csv", plot_csv, "Input CSV")->required();
    plot_cmd->add_option("--kind", plot_kind, "timeseries, heatmap or bars")
        ->check(CLI::IsMember({"timeseries", "heatmap", "bars"}))
        ->capture_default_str();
    plot_cmd->add_option("--column", plot_columns, "Columns to plot");
    plot_cmd->add_option("--title", plot_title);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitSchema;
    }

    const fs::path out = output_dir();

    try {
        if (*f1_cmd) {
            if (f1_zero > 0) {
                std::printf("%.16e\n", barrier_eta(f1_zero));
                return kExitOk;
            }
            if (f1_eta < 0.0)
                throw std::invalid_argument("--eta is required unless --find-zero is given");
            if (f1_table >= 0) {
                write_f1_table_csv(std::cout, f1_eta, f1_table);
                return kExitOk;
            }
            if (f1_n < 0)
                throw std::invalid_argument("give --n, --n-max or --find-zero");
            std::printf("%.16e\n", f1_scalar(f1_n, f1_eta));
            return kExitOk;
        }

        if (*evolve_cmd) {
            const Scenario s = parse_scenario(scenario_file);
            const RunResult r = run(s, {.out_dir = out, .threads = threads, .convergence_check = !no_convergence});
            std::printf("%s: %s (%.2f s)\n", r.name.c_str(), r.trajectory_csv.string().c_str(), r.wall_time);
            print_convergence(r.convergence);
            return kExitOk;
        }

        if (*fock_cmd) {
            if (fock_eta >= 0.0)
                plan.eta = fock_eta;
            const FockPrepResult r = run_fock_prep(plan);
            const fs::path dir = out / ("fockprep_" + std::to_string(plan.target_n));
            write_trajectory_csv(dir / "trajectory.csv", r.trajectory, kAllObservables);
            for (const auto& w : r.warnings)
                std::fprintf(stderr, "warning: %s\n", w.c_str());
            std::printf("eta = %.10f, n_max = %d\n", r.eta, r.n_max);
            std::printf("P_%d = %.10f, population above target: initial %.3e, max %.3e\n", plan.target_n,
                        r.target_population, r.above_target_initial, r.above_target_max);
            std::printf("trace drift %.3e, min eigenvalue %.3e\n", r.trajectory.info.max_norm_drift,
                        r.trajectory.info.min_eigenvalue);
            std::printf("%s\n", (dir / "trajectory.csv").string().c_str());
            return kExitOk;
        }

        if (*land_cmd) {
            const Landscape l = f1_landscape(land_n_min, land_n_max, land_eta_min, land_eta_max, land_grid, threads);
            const fs::path file = out / "landscape.csv";
            write_landscape_csv(file, l);
            std::printf("%s\n", file.string().c_str());
            return kExitOk;
        }

        if (*sweep_cmd) {
            const Scenario tmpl = parse_scenario(template_file);
            std::vector<SweepAxis> axes;
            for (const auto& a : axis_texts)
                axes.push_back(parse_axis(a));
            const SweepResult r =
                sweep(tmpl, axes, {.out_dir = out, .threads = threads, .convergence_check = !no_convergence});
            std::printf("%zu points, %zu failed\nindex: %s\n", r.points.size(), r.failures.size(),
                        r.index_csv.string().c_str());
            if (!r.failures.empty()) {
                std::printf("failures: %s\n", r.failure_manifest.string().c_str());
                return kExitNumerical;
            }
            return kExitOk;
        }

        if (*validate_cmd) {
            const Scenario s = parse_scenario(validate_file);
            const ModelSpec spec = physical_model(s);
            int code = kExitOk;
            for (const auto& w : validate(spec))
                std::printf("warning: %s\n", w.c_str());

            if (spec.kind == ModelKind::TwoTone || (force_rwa && spec.kind == ModelKind::NonlinearQRM)) {
                const ModelSpec drive = spec.kind == ModelKind::TwoTone
                                            ? spec
                                            : two_tone_for(spec.g, spec.eta, spec.omega_R, spec.omega0_R);
                const HilbertSpace space(scenario_truncation(s));
                const double duration = s.times.t_end * 2.0 * std::numbers::pi / coupling_strength(drive);
                const RwaReport rwa = rwa_crosscheck(drive, initial_state(s, space), duration, rwa_tolerance);
                std::printf("rwa: Omega/nu = %.4f, max infidelity %.3e (tolerance %.1e): %s\n", rwa.omega_over_nu,
                            rwa.max_deviation, rwa.tolerance, rwa.valid ? "valid" : "INVALID");
                if (!rwa.valid)
                    code = kExitNumerical;
            }
            const Simulation base = simulate(s);
            const ConvergenceVerdict v = check_convergence(s, base);
            print_convergence(v);
            if (!v.converged && code == kExitOk)
                code = kExitConvergence;
            return code;
        }

        if (*plot_cmd) {
            const PlotRequest req{plot_kind_from_string(plot_kind), plot_columns, plot_title};
            const PlotFiles files = emit_plotdata(plot_csv, req, out);
            std::printf("%s\n%s\n", files.data.string().c_str(), files.script.string().c_str());
            return kExitOk;
        }
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitSchema;
    } catch (const ConvergenceFailure& e) {
        std::fprintf(stderr, "convergence failure: %s\n", e.what());
        return kExitConvergence;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitSchema;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitOk;
}

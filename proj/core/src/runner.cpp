#include "ionrabi/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

#include <json.hpp>

#include "ionrabi/errors.hpp"
#include "ionrabi/trajectory_io.hpp"

#ifndef IONRABI_VERSION
#define IONRABI_VERSION "unknown"
#endif

namespace ionrabi {

using nlohmann::json;

std::string version_string()
{
    return IONRABI_VERSION;
}

namespace {

Trajectory evolve_scenario(const Scenario& s, const ModelSpec& spec, const QuantumState& psi0,
                           const std::vector<double>& times, double time_unit)
{
    const HilbertSpace& space = psi0.space();
    const double g = coupling_strength(spec);

    if (s.gamma_ratio) {
        LindbladSpec lindblad;
        lindblad.add(*s.gamma_ratio * g, qubit_ops(space).sigma_minus);
        LindbladOptions opts;
        opts.time_unit = time_unit;
        return evolve_lindblad(build_hamiltonian(spec, space), lindblad, psi0, times, opts);
    }
    if (spec.kind == ModelKind::TwoTone) {
        TimeDependentOptions opts;
        opts.time_unit = time_unit;
        opts.dt_max = 2.0 * std::numbers::pi / (200.0 * spec.nu);
        return evolve_unitary_td(schrodinger_generator(TwoToneHamiltonian(spec, space)), psi0, times, opts);
    }
    EvolveOptions opts;
    opts.time_unit = time_unit;
    return evolve_unitary(build_hamiltonian(spec, space), psi0, times, opts);
}

json spec_json(const ModelSpec& m)
{
    return {{"kind", std::string(to_string(m.kind))},
            {"eta", m.eta},
            {"g", m.g},
            {"omega_R", m.omega_R},
            {"omega0_R", m.omega0_R},
            {"Omega", m.Omega},
            {"nu", m.nu},
            {"delta_r", m.delta_r},
            {"delta_b", m.delta_b},
            {"phi_r", m.phi_r},
            {"phi_b", m.phi_b}};
}

json integrator_json(const IntegratorInfo& info)
{
    json j{{"method", info.method},
           {"dt", info.dt},
           {"steps", info.steps},
           {"max_norm_drift", info.max_norm_drift},
           {"min_eigenvalue", info.min_eigenvalue}};
    if (info.error_estimate)
        j["error_estimate"] = *info.error_estimate;
    return j;
}

json convergence_json(const ConvergenceVerdict& v)
{
    return {{"checked", v.checked},
            {"converged", v.converged},
            {"n_max", v.n_max},
            {"n_max_check", v.n_max_check},
            {"max_difference", v.max_difference},
            {"tolerance", v.tolerance}};
}

std::string point_name(const std::string& base, std::size_t index, std::size_t count)
{
    const int width = static_cast<int>(std::to_string(count > 0 ? count - 1 : 0).size());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, index);
    return base + "_" + buf;
}

} // namespace

Simulation simulate(const Scenario& scenario, std::optional<int> n_max)
{
    const ModelSpec spec = physical_model(scenario);
    const double g = scenario_coupling(scenario);
    const double time_unit = 2.0 * std::numbers::pi / g;
    const int nm = n_max.value_or(scenario_truncation(scenario));
    const HilbertSpace space(nm);
    const QuantumState psi0 = initial_state(scenario, space);

    const auto grid = linear_grid(scenario.times.t_end, scenario.times.n_points);
    std::set<double> merged(grid.begin(), grid.end());
    merged.insert(scenario.outputs.snapshot_times.begin(), scenario.outputs.snapshot_times.end());
    const std::vector<double> all_units(merged.begin(), merged.end());
    std::vector<double> all_times;
    all_times.reserve(all_units.size());
    for (double t : all_units)
        all_times.push_back(t * time_unit);

    const Trajectory full = evolve_scenario(scenario, spec, psi0, all_times, time_unit);
    const auto index_of = [&](double t) {
        return static_cast<std::size_t>(std::lower_bound(all_units.begin(), all_units.end(), t) - all_units.begin());
    };

    Simulation sim{.spec = spec, .n_max = nm, .time_unit = time_unit, .trajectory = Trajectory(space)};
    sim.warnings = validate(spec);
    sim.trajectory.time_unit = time_unit;
    sim.trajectory.info = full.info;
    for (double t : grid) {
        const std::size_t k = index_of(t);
        sim.trajectory.times.push_back(full.times[k]);
        sim.trajectory.records.push_back(full.records[k]);
    }
    std::set<double> snaps(scenario.outputs.snapshot_times.begin(), scenario.outputs.snapshot_times.end());
    for (double t : snaps) {
        sim.snapshot_times.push_back(t);
        sim.snapshots.push_back(full.records[index_of(t)]);
    }
    return sim;
}

double max_observable_difference(const Trajectory& a, const Trajectory& b)
{
    if (a.times.size() != b.times.size())
        throw std::invalid_argument("trajectories have different time grids");
    double diff = 0.0;
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        const auto& ra = a.records[k];
        const auto& rb = b.records[k];
        diff = std::max({diff, std::abs(ra.sigma_z - rb.sigma_z), std::abs(ra.fidelity - rb.fidelity),
                         std::abs(ra.n_mean - rb.n_mean)});
        const std::size_t m = std::min(ra.phonons.size(), rb.phonons.size());
        for (std::size_t n = 0; n < m; ++n)
            diff = std::max(diff, std::abs(ra.phonons[n] - rb.phonons[n]));
    }
    return diff;
}

ConvergenceVerdict check_convergence(const Scenario& scenario, const Simulation& base, double tolerance,
                                     int extra)
{
    const Simulation fine = simulate(scenario, base.n_max + extra);
    ConvergenceVerdict v;
    v.checked = true;
    v.n_max = base.n_max;
    v.n_max_check = fine.n_max;
    v.tolerance = tolerance;
    v.max_difference = max_observable_difference(base.trajectory, fine.trajectory);
    v.converged = v.max_difference < tolerance;
    return v;
}

RunResult run(const Scenario& scenario, const RunOptions& options)
{
    const auto start = std::chrono::steady_clock::now();

    std::future<Simulation> fine;
    const int n_max = scenario_truncation(scenario);
    if (options.convergence_check && options.threads > 1)
        fine = std::async(std::launch::async, [&] { return simulate(scenario, n_max + 20); });

    const Simulation sim = simulate(scenario, n_max);

    ConvergenceVerdict verdict;
    if (options.convergence_check) {
        const Simulation check = fine.valid() ? fine.get() : simulate(scenario, n_max + 20);
        verdict.checked = true;
        verdict.n_max = sim.n_max;
        verdict.n_max_check = check.n_max;
        verdict.tolerance = options.tolerance;
        verdict.max_difference = max_observable_difference(sim.trajectory, check.trajectory);
        verdict.converged = verdict.max_difference < options.tolerance;
    }

    RunResult result;
    result.name = scenario.name;
    result.directory = options.out_dir / scenario.name;
    result.trajectory_csv = result.directory / "trajectory.csv";
    result.metadata_json = result.directory / "metadata.json";
    std::filesystem::create_directories(result.directory);

    write_trajectory_csv(result.trajectory_csv, sim.trajectory, scenario.outputs.observables);
    if (!sim.snapshot_times.empty()) {
        Trajectory snaps(sim.trajectory.space);
        snaps.time_unit = 1.0;
        snaps.times = sim.snapshot_times;
        snaps.records = sim.snapshots;
        result.snapshots_csv = result.directory / "snapshots.csv";
        write_trajectory_csv(result.snapshots_csv, snaps, kAllObservables);
    }

    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.convergence = verdict;

    json meta;
    meta["name"] = scenario.name;
    meta["software"] = {{"name", "ionrabi"}, {"version", version_string()}, {"compiler", __VERSION__}};
    meta["schema_version"] = scenario.schema_version;
    meta["scenario"] = emit_scenario(scenario);
    meta["model"] = spec_json(sim.spec);
    meta["units"] = {{"frequency", "rad/s"},
                     {"time_column", "t in units of 2 pi / g"},
                     {"time_unit_seconds", sim.time_unit}};
    meta["truncation"] = {{"n_max", sim.n_max}, {"dimension", 2 * (sim.n_max + 1)}};
    meta["integrator"] = integrator_json(sim.trajectory.info);
    meta["determinism"] =
        "No random numbers are used. Outputs depend only on the scenario, the truncation and the integrator "
        "settings recorded here, and are byte-identical for the same build (IEEE double, no fast-math) "
        "regardless of the thread count.";
    meta["wall_time_s"] = result.wall_time;
    meta["convergence"] = convergence_json(verdict);
    meta["warnings"] = sim.warnings;
    meta["outputs"] = {{"trajectory", result.trajectory_csv.filename().string()},
                       {"observables", scenario.outputs.observables}};
    if (!result.snapshots_csv.empty())
        meta["outputs"]["snapshots"] = result.snapshots_csv.filename().string();
    write_text_file(result.metadata_json, meta.dump(2) + "\n");
    return result;
}

SweepAxis parse_axis(std::string_view text)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw std::invalid_argument("axis must look like key=lo:hi:count or key=v1,v2,...");
    SweepAxis axis;
    axis.key = std::string(text.substr(0, eq));
    const std::string rest(text.substr(eq + 1));

    const auto parse_number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw std::invalid_argument("bad number '" + s + "' in axis " + axis.key);
        return v;
    };

    if (rest.find(':') != std::string::npos) {
        const auto c1 = rest.find(':');
        const auto c2 = rest.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw std::invalid_argument("range axis needs lo:hi:count");
        const double lo = parse_number(rest.substr(0, c1));
        const double hi = parse_number(rest.substr(c1 + 1, c2 - c1 - 1));
        const double count = parse_number(rest.substr(c2 + 1));
        if (count < 1 || count != std::floor(count))
            throw std::invalid_argument("axis count must be a positive integer");
        axis.values = linear_grid(hi - lo, static_cast<int>(count));
        for (double& v : axis.values)
            v += lo;
        if (count > 1)
            axis.values.back() = hi;
    } else {
        std::size_t begin = 0;
        while (begin <= rest.size()) {
            const auto comma = rest.find(',', begin);
            const auto end = comma == std::string::npos ? rest.size() : comma;
            axis.values.push_back(parse_number(rest.substr(begin, end - begin)));
            begin = end + 1;
        }
    }
    return axis;
}

SweepResult sweep(const Scenario& scenario_template, const std::vector<SweepAxis>& axes,
                  const RunOptions& options)
{
    if (axes.empty())
        throw std::invalid_argument("sweep needs at least one axis");

    SweepResult out;
    out.points.emplace_back();
    for (const auto& axis : axes) {
        if (axis.values.empty())
            throw std::invalid_argument("axis " + axis.key + " has no values");
        std::vector<std::vector<double>> next;
        for (const auto& p : out.points)
            for (double v : axis.values) {
                auto q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        out.points = std::move(next);
    }
    const std::size_t count = out.points.size();
    out.results.resize(count);

    std::vector<std::optional<SweepFailure>> failed(count);
    RunOptions single = options;
    single.threads = 1;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                Scenario s = scenario_template;
                s.name = point_name(scenario_template.name, k, count);
                for (std::size_t a = 0; a < axes.size(); ++a)
                    set_scenario_value(s, axes[a].key, out.points[k][a]);
                out.results[k] = run(s, single);
            } catch (const std::exception& e) {
                failed[k] = SweepFailure{k, out.points[k], e.what()};
            }
        }
    };
    const int workers = std::clamp(options.threads, 1, static_cast<int>(count));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    for (auto& f : failed)
        if (f)
            out.failures.push_back(std::move(*f));

    std::string index = "index";
    for (const auto& axis : axes)
        index += "," + axis.key;
    index += ",status,directory\n";
    for (std::size_t k = 0; k < count; ++k) {
        index += std::to_string(k);
        for (double v : out.points[k])
            index += "," + format_double(v);
        if (out.results[k])
            index += ",ok," + out.results[k]->directory.filename().string() + "\n";
        else
            index += ",failed,\n";
    }
    out.index_csv = options.out_dir / (scenario_template.name + "_index.csv");
    write_text_file(out.index_csv, index);

    if (!out.failures.empty()) {
        json manifest = json::array();
        for (const auto& f : out.failures)
            manifest.push_back({{"index", f.index}, {"point", f.point}, {"error", f.message}});
        out.failure_manifest = options.out_dir / (scenario_template.name + "_failures.json");
        write_text_file(out.failure_manifest, manifest.dump(2) + "\n");
    }
    return out;
}

} // namespace ionrabi

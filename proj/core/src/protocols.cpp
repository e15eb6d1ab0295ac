#include "ionrabi/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "ionrabi/errors.hpp"

namespace ionrabi {

double rabi_period(double g)
{
    if (!(g > 0.0))
        throw std::invalid_argument("rabi_period needs g > 0");
    return 2.0 * std::numbers::pi / g;
}

// --- Fock-state preparation ---------------------------------------------------

FockPrepResult run_fock_prep(const FockPrepPlan& plan)
{
    if (plan.target_n < 1)
        throw std::invalid_argument("target Fock state must be >= 1");
    if (!(plan.g > 0.0) || !(plan.gamma_ratio >= 0.0) || !(plan.duration >= 0.0))
        throw std::invalid_argument("Fock preparation needs g > 0, gamma_ratio >= 0, duration >= 0");

    const double eta = plan.eta.value_or(barrier_eta(plan.target_n));

    int n_max = plan.n_max;
    if (n_max == 0) {
        n_max = default_truncation(plan.target_n, 0.0, 0.0);
        if (plan.initial_nbar > 0.0) {
            const double q = plan.initial_nbar / (plan.initial_nbar + 1.0);
            n_max = std::max(n_max, static_cast<int>(std::ceil(std::log(1e-10) / std::log(q))));
        }
    }
    if (n_max < 2 * plan.target_n)
        throw std::invalid_argument("truncation must be at least twice the target Fock state");

    const HilbertSpace space(n_max);
    std::vector<std::string> warnings;
    const QuantumState rho0 = thermal_state(space, plan.initial_nbar, Qubit::down);
    {
        const auto p0 = phonon_distribution(rho0);
        double tail = 0.0;
        for (int n = plan.target_n + 1; n <= n_max; ++n)
            tail += p0[static_cast<std::size_t>(n)];
        if (tail >= 1e-3)
            warnings.push_back("initial population above the target is " + std::to_string(tail) +
                               "; it is not funneled into the target");
    }

    const OperatorMatrix h = build_nonlinear_anti_jc(space, plan.g, eta);
    LindbladSpec lindblad;
    lindblad.add(plan.gamma_ratio * plan.g, qubit_ops(space).sigma_minus);

    LindbladOptions opts;
    opts.dt_max = plan.dt_max;
    opts.time_unit = rabi_period(plan.g);
    const auto times = linear_grid(plan.duration * opts.time_unit, plan.n_points);

    FockPrepResult result{.trajectory = evolve_lindblad(h, lindblad, rho0, times, opts)};
    result.eta = eta;
    result.n_max = n_max;
    result.warnings = std::move(warnings);
    result.final_distribution = result.trajectory.records.back().phonons;
    result.target_population = result.final_distribution[static_cast<std::size_t>(plan.target_n)];

    bool first = true;
    for (const auto& rec : result.trajectory.records) {
        double above = 0.0;
        for (int n = plan.target_n + 1; n <= n_max; ++n)
            above += rec.phonons[static_cast<std::size_t>(n)];
        if (first)
            result.above_target_initial = above;
        result.above_target_max = std::max(result.above_target_max, above);
        first = false;
    }
    return result;
}

// --- filter -------------------------------------------------------------------

FilterReport run_filter_analysis(const ModelSpec& spec, const QuantumState& initial, double duration,
                                 const std::vector<double>& snapshot_times, const FilterOptions& options)
{
    const HilbertSpace& space = initial.space();
    int barrier = 0;
    if (options.cut) {
        barrier = *options.cut;
        if (barrier < 0 || barrier > space.n_max())
            throw std::invalid_argument("leakage cut outside the retained Fock states");
    } else {
        if (!is_nonlinear(spec.kind) || spec.kind == ModelKind::TwoTone)
            throw NoBarrier("model " + std::string(to_string(spec.kind)) + " has no f1 barrier");
        const auto found = find_barrier(spec.eta, space.n_max());
        if (!found)
            throw NoBarrier("f1(n, " + std::to_string(spec.eta) + ") has no zero for n <= " +
                            std::to_string(space.n_max()));
        barrier = *found;
    }

    const OperatorMatrix h = build_hamiltonian(spec, space);
    EvolveOptions opts;
    opts.time_unit = options.time_unit;
    const auto times = linear_grid(duration, options.n_points);

    FilterReport report{.trajectory = evolve_unitary(h, initial, times, opts)};
    report.barrier_n = barrier;
    for (const auto& rec : report.trajectory.records) {
        double above = 0.0;
        for (std::size_t n = static_cast<std::size_t>(barrier) + 1; n < rec.phonons.size(); ++n)
            above += rec.phonons[n];
        report.leakage.push_back(above);
    }
    report.leakage_initial = report.leakage.front();
    report.leakage_max = *std::max_element(report.leakage.begin(), report.leakage.end());

    if (!snapshot_times.empty()) {
        std::vector<double> sorted = snapshot_times;
        std::sort(sorted.begin(), sorted.end());
        const Trajectory snaps = evolve_unitary(h, initial, sorted, opts);
        report.snapshot_times = sorted;
        for (const auto& rec : snaps.records)
            report.snapshot_phonons.push_back(rec.phonons);
    }
    return report;
}

// --- collapse and revival -------------------------------------------------------

double window_amplitude(const std::vector<double>& times, const std::vector<double>& values,
                        double begin, double end)
{
    double amp = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] >= begin && times[k] <= end)
            amp = std::max(amp, std::abs(values[k]));
    return amp;
}

CollapseRevival run_collapse_revival(JcVariant variant, cplx alpha, double g, double eta,
                                     const CollapseRevivalOptions& options)
{
    const double r = std::abs(alpha);
    if (!(r > 0.0))
        throw std::invalid_argument("collapse and revival needs a coherent amplitude alpha != 0");

    const double revival_time = 2.0 * std::numbers::pi * r / g;
    double duration = options.duration;
    if (duration <= 0.0) {
        duration = 1.5 * revival_time;
        if (variant == JcVariant::nonlinear)
            duration *= options.longer_factor;
    }
    int n_points = options.n_points;
    if (n_points <= 0)
        n_points = static_cast<int>(std::ceil(1500.0 * duration / revival_time)) + 1;
    int n_max = options.n_max;
    if (n_max <= 0)
        n_max = std::max({static_cast<int>(std::ceil(4.0 * r * r)), coherent_truncation(r) + 20, 40});

    const HilbertSpace space(n_max);
    const QuantumState psi0 = coherent_state(space, alpha, options.qubit);
    const OperatorMatrix h = variant == JcVariant::linear ? build_jc(space, g)
                                                           : build_nonlinear_jc(space, g, eta);
    EvolveOptions opts;
    opts.time_unit = rabi_period(g);
    const auto times = linear_grid(duration, n_points);

    CollapseRevival out{.trajectory = evolve_unitary(h, psi0, times, opts)};
    out.revival_time = revival_time;
    out.window_width = 0.4 * revival_time;
    out.collapse_begin = 0.3 * revival_time;
    out.collapse_end = 0.7 * revival_time;
    out.revival_search_begin = 0.8 * revival_time;
    out.duration = duration;
    out.n_max = n_max;

    std::vector<double> sz;
    sz.reserve(out.trajectory.records.size());
    for (const auto& rec : out.trajectory.records)
        sz.push_back(rec.sigma_z);
    const auto& t = out.trajectory.times;

    out.collapse_amplitude = window_amplitude(t, sz, out.collapse_begin, out.collapse_end);
    const double slide = out.window_width / 20.0;
    for (double begin = out.revival_search_begin; begin + out.window_width <= duration * (1 + 1e-12);
         begin += slide) {
        const double amp = window_amplitude(t, sz, begin, begin + out.window_width);
        if (amp > out.revival_amplitude) {
            out.revival_amplitude = amp;
            out.revival_window_begin = begin;
        }
    }
    out.ratio = out.collapse_amplitude > 0.0 ? out.revival_amplitude / out.collapse_amplitude : INFINITY;
    return out;
}

// --- landscape -------------------------------------------------------------------

Landscape f1_landscape(int n_min, int n_max, double eta_min, double eta_max, int eta_points, int threads)
{
    if (n_min < 0 || n_max < n_min)
        throw std::invalid_argument("landscape needs 0 <= n_min <= n_max");
    if (eta_points < 1 || eta_min < 0.0 || eta_max < eta_min)
        throw std::invalid_argument("landscape needs eta_points >= 1 and 0 <= eta_min <= eta_max");

    Landscape out;
    for (int n = n_min; n <= n_max; ++n)
        out.n.push_back(n);
    for (int k = 0; k < eta_points; ++k)
        out.eta.push_back(eta_points == 1 ? eta_min
                                          : eta_min + (eta_max - eta_min) * k / (eta_points - 1));
    out.log10_abs.resize(static_cast<Eigen::Index>(out.n.size()), eta_points);

    auto column = [&](int k) {
        const NonlinearCoupling f1(out.eta[static_cast<std::size_t>(k)], n_max);
        for (std::size_t i = 0; i < out.n.size(); ++i) {
            const double v = std::abs(f1(out.n[i]));
            out.log10_abs(static_cast<Eigen::Index>(i), k) =
                v > 0.0 ? std::max(std::log10(v), kLandscapeFloor) : kLandscapeFloor;
        }
    };

    const int workers = std::clamp(threads, 1, eta_points);
    if (workers == 1) {
        for (int k = 0; k < eta_points; ++k)
            column(k);
        return out;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int k = w; k < eta_points; k += workers)
                column(k);
        });
    for (auto& th : pool)
        th.join();
    return out;
}

} // namespace ionrabi

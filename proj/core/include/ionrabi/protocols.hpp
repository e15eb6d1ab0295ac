#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ionrabi/dynamics.hpp"
#include "ionrabi/models.hpp"

namespace ionrabi {

/// 2 pi / g, the natural time unit of every protocol.
double rabi_period(double g);

// --- dissipative Fock-state preparation -------------------------------------

struct FockPrepPlan
{
    int target_n = 17;
    /// Defaults to barrier_eta(target_n).
    std::optional<double> eta;
    double g = 1.0;
    /// Gamma_m / g.
    double gamma_ratio = 2.0;
    double initial_nbar = 1.0;
    /// In units of 2 pi / g.
    double duration = 100.0;
    /// 0 selects the default truncation.
    int n_max = 0;
    int n_points = 201;
    double dt_max = 0.0;
};

struct FockPrepResult
{
    Trajectory trajectory;
    double eta = 0.0;
    int n_max = 0;
    std::vector<double> final_distribution;
    double target_population = 0.0;
    /// Population on n > target_n, initially and the largest seen.
    double above_target_initial = 0.0;
    double above_target_max = 0.0;
    std::vector<std::string> warnings;
};

/// Thermal phonons (x) |down> evolved under the nonlinear anti-JC model with
/// qubit decay sigma- at rate gamma_ratio * g.
FockPrepResult run_fock_prep(const FockPrepPlan& plan);

// --- motional filter ---------------------------------------------------------

struct FilterOptions
{
    int n_points = 401;
    /// Measure leakage above this index instead of the detected f1 zero
    /// (for linear control runs, which have none).
    std::optional<int> cut;
    double time_unit = 1.0;
};

struct FilterReport
{
    int barrier_n = 0;
    double leakage_initial = 0.0;
    double leakage_max = 0.0;
    std::vector<double> leakage;
    Trajectory trajectory;
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> snapshot_phonons;
};

/// Closed evolution under `spec` tracking the population above the f1
/// barrier. Throws NoBarrier when f1(eta) has no zero (|f1| < 1e-10) in
/// 1..n_max and no cut is given.
FilterReport run_filter_analysis(const ModelSpec& spec, const QuantumState& initial, double duration,
                                 const std::vector<double>& snapshot_times,
                                 const FilterOptions& options = {});

// --- collapse and revival -----------------------------------------------------

enum class JcVariant { linear, nonlinear };

struct CollapseRevivalOptions
{
    /// 0 selects 1.5 t_r, times longer_factor for the nonlinear variant.
    double duration = 0.0;
    double longer_factor = 3.0;
    /// 0 selects about 1500 samples per revival time.
    int n_points = 0;
    /// 0 selects max(4 |alpha|^2, Poisson truncation + 20, 40).
    int n_max = 0;
    Qubit qubit = Qubit::down;
};

/// Summary of <sigma_z>(t). With t_r = 2 pi |alpha| / g, the collapse window
/// is [0.3, 0.7] t_r and revival amplitude is the largest max|<sigma_z>| over
/// any window of the same width starting at or after 0.8 t_r.
struct CollapseRevival
{
    Trajectory trajectory;
    double revival_time = 0.0;
    double window_width = 0.0;
    double collapse_begin = 0.0;
    double collapse_end = 0.0;
    double revival_search_begin = 0.0;
    double revival_window_begin = 0.0;  ///< window that attains revival_amplitude
    double duration = 0.0;
    int n_max = 0;
    double collapse_amplitude = 0.0;
    double revival_amplitude = 0.0;
    double ratio = 0.0;
};

CollapseRevival run_collapse_revival(JcVariant variant, cplx alpha, double g, double eta,
                                     const CollapseRevivalOptions& options = {});

/// max |values| over samples with begin <= times <= end.
double window_amplitude(const std::vector<double>& times, const std::vector<double>& values,
                        double begin, double end);

// --- f1 landscape ---------------------------------------------------------------

struct Landscape
{
    std::vector<int> n;
    std::vector<double> eta;
    /// log10 |f1(n, eta)| floored at -16; rows follow n, columns eta.
    Eigen::MatrixXd log10_abs;
};

inline constexpr double kLandscapeFloor = -16.0;

Landscape f1_landscape(int n_min, int n_max, double eta_min, double eta_max, int eta_points,
                       int threads = 1);

} // namespace ionrabi

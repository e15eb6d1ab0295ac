#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ionrabi/fock_algebra.hpp"
#include "ionrabi/models.hpp"

namespace ionrabi {

/// Pure state vector or density matrix on a HilbertSpace.
class QuantumState
{
public:
    /// Normalization is checked to |<psi|psi> - 1| < norm_tolerance.
    static QuantumState pure(const HilbertSpace& space, Vector psi, double norm_tolerance = 1e-10);
    /// Trace is checked to |Tr rho - 1| < trace_tolerance and Hermiticity to 1e-10.
    static QuantumState density(const HilbertSpace& space, Matrix rho, double trace_tolerance = 1e-8);

    const HilbertSpace& space() const noexcept { return space_; }
    bool is_pure() const noexcept { return pure_; }

    const Vector& vector() const;
    const Matrix& density_matrix() const;
    Matrix to_density() const;

    /// <psi|psi> for pure states, Re Tr rho for densities.
    double norm_squared() const;
    /// Smallest eigenvalue of the density matrix (1 for pure states).
    double min_eigenvalue() const;

private:
    QuantumState(const HilbertSpace& space, bool pure, Vector psi, Matrix rho);

    HilbertSpace space_;
    bool pure_;
    Vector psi_;
    Matrix rho_;
};

QuantumState fock_state(const HilbertSpace& space, int n, Qubit qubit);
/// Throws TruncationTooSmall when the Poisson mass above n_max is >= 1e-10.
QuantumState coherent_state(const HilbertSpace& space, cplx alpha, Qubit qubit);
/// Diagonal thermal phonon state (x) |qubit><qubit|. Throws
/// TruncationTooSmall when the geometric tail above n_max is >= 1e-10.
QuantumState thermal_state(const HilbertSpace& space, double nbar, Qubit qubit);

/// Smallest n_max whose Poisson(|alpha|^2) tail mass is below tail.
int coherent_truncation(double alpha_abs, double tail = 1e-10);

double expectation(const OperatorMatrix& op, const QuantumState& state);
/// |<ref|psi>|^2 or <ref|rho|ref>; for a density reference Tr(rho_ref rho).
double overlap_fidelity(const QuantumState& reference, const QuantumState& state);
/// P_n summed over both qubit sectors.
std::vector<double> phonon_distribution(const QuantumState& state);
double sigma_z_expectation(const QuantumState& state);

struct ObservableRecord
{
    double sigma_z = 0.0;
    double fidelity = 0.0;
    double n_mean = 0.0;
    std::vector<double> phonons;
};

struct IntegratorInfo
{
    std::string method;
    double dt = 0.0;           ///< step actually used (0 for exact propagation)
    long steps = 0;
    double max_norm_drift = 0.0;  ///< |<psi|psi> - 1| or |Tr rho - 1|
    double min_eigenvalue = 1.0;  ///< densities only
    std::optional<double> error_estimate;  ///< step-halving estimate, on demand
};

/// Observables on a time grid. `times` are in the Hamiltonian's time units;
/// output layers divide by `time_unit` (typically 2 pi / g).
struct Trajectory
{
    explicit Trajectory(const HilbertSpace& s) : space(s) {}

    HilbertSpace space;
    std::vector<double> times;
    double time_unit = 1.0;
    std::vector<ObservableRecord> records;
    std::vector<std::pair<std::size_t, QuantumState>> snapshots;
    IntegratorInfo info;

    const QuantumState* snapshot(std::size_t index) const;
};

struct EvolveOptions
{
    /// Record indices whose full state is kept in Trajectory::snapshots.
    std::vector<std::size_t> snapshot_indices;
    bool snapshot_all = false;
    /// Fidelity reference; defaults to the initial state.
    std::optional<QuantumState> reference;
    double time_unit = 1.0;
};

/// Cached eigendecomposition of a time-independent Hermitian H.
class UnitaryPropagator
{
public:
    explicit UnitaryPropagator(const OperatorMatrix& h);

    const HilbertSpace& space() const noexcept { return space_; }
    const Eigen::VectorXd& energies() const noexcept { return energies_; }
    const Matrix& eigenvectors() const noexcept { return vectors_; }

    Vector propagate(const Vector& psi0, double t) const;
    Matrix propagate(const Matrix& rho0, double t) const;

private:
    HilbertSpace space_;
    Eigen::VectorXd energies_;
    Matrix vectors_;
};

/// psi(t) = exp(-iHt) psi0 (or U rho0 U^dag) from one eigendecomposition.
/// Rejects non-Hermitian H; the norm is checked to 1e-10 at every time.
Trajectory evolve_unitary(const OperatorMatrix& h, const QuantumState& initial,
                          std::span<const double> times, const EvolveOptions& options = {});

/// out = -i H(t) psi.
using Generator = std::function<void(double t, const Vector& psi, Vector& out)>;

Generator schrodinger_generator(std::function<Matrix(double)> h_of_t);
Generator schrodinger_generator(TwoToneHamiltonian h);

struct TimeDependentOptions : EvolveOptions
{
    double dt_max = 0.0;
    /// Re-run at dt/2 and report the largest state difference.
    bool estimate_error = false;
    /// Norm drift beyond this raises StepTooLarge.
    double norm_tolerance = 1e-6;
};

/// Fixed-step RK4 on the Schrodinger equation. Each interval between
/// output times is split into equal steps no longer than dt_max.
Trajectory evolve_unitary_td(const Generator& generator, const QuantumState& initial,
                             std::span<const double> times, const TimeDependentOptions& options);

struct LindbladTerm
{
    double rate;
    OperatorMatrix op;
};

struct LindbladSpec
{
    std::vector<LindbladTerm> terms;

    void add(double rate, OperatorMatrix op);
};

/// -i[H, rho] + sum_k rate_k (C rho C^dag - {C^dag C, rho} / 2), dense.
Matrix lindblad_rhs(const OperatorMatrix& h, const LindbladSpec& lindblad, const Matrix& rho);

struct LindbladOptions : EvolveOptions
{
    /// Upper bound on the step; the step also obeys
    /// (||H|| + sum rate ||C||^2) dt <= step_safety.
    double dt_max = 0.0;
    double step_safety = 0.05;
    double trace_tolerance = 1e-6;
    double positivity_tolerance = 1e-6;
    bool check_positivity = true;
};

/// Fixed-step RK4 on the master equation with sparse H and collapse
/// operators. rho is symmetrized after every step; positivity is checked at
/// output times and raises PositivityLoss when an eigenvalue drops below
/// -positivity_tolerance.
Trajectory evolve_lindblad(const OperatorMatrix& h, const LindbladSpec& lindblad,
                           const QuantumState& initial, std::span<const double> times,
                           const LindbladOptions& options = {});

struct RwaReport
{
    double max_deviation = 0.0;  ///< max_t 1 - |<psi_full|psi_rwa>|^2
    double tolerance = 0.0;
    bool valid = false;
    double omega_over_nu = 0.0;
    long steps = 0;
    std::vector<double> times;
    std::vector<double> deviation;
    std::vector<std::string> warnings;
};

struct RwaOptions
{
    int n_points = 301;
    double dt_max = 0.0;  ///< 0 selects 2 pi / (200 nu)
};

/// Evolve `initial` under the two-tone drive and under the nonlinear Rabi
/// model it reduces to after the vibrational RWA, compare them in the common
/// interaction frame H0 = (delta_b + delta_r)/4 sigma_z + (delta_b - delta_r)/2 n,
/// and report the worst infidelity over [0, duration].
RwaReport rwa_crosscheck(const ModelSpec& two_tone, const QuantumState& initial, double duration,
                         double tolerance, const RwaOptions& options = {});

/// Evenly spaced grid of n_points values on [0, t_end].
std::vector<double> linear_grid(double t_end, int n_points);

} // namespace ionrabi

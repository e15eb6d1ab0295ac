#include "ionrabi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Sparse>

#include "ionrabi/errors.hpp"

namespace ionrabi {

namespace {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

constexpr cplx kMinusI{0.0, -1.0};

void check_times(std::span<const double> times)
{
    if (times.empty())
        throw std::invalid_argument("time grid is empty");
    if (times.front() < 0.0)
        throw std::invalid_argument("time grid must start at t >= 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] >= times[k - 1]))
            throw std::invalid_argument("time grid must be non-decreasing");
}

ObservableRecord observe(const QuantumState& state, const QuantumState& reference)
{
    ObservableRecord rec;
    rec.phonons = phonon_distribution(state);
    double total = 0.0;
    for (std::size_t n = 0; n < rec.phonons.size(); ++n) {
        total += rec.phonons[n];
        rec.n_mean += static_cast<double>(n) * rec.phonons[n];
    }
    if (std::abs(total - 1.0) > 1e-6)
        throw Error("phonon distribution sums to " + std::to_string(total));
    rec.sigma_z = sigma_z_expectation(state);
    rec.fidelity = overlap_fidelity(reference, state);
    return rec;
}

// Collects records and requested snapshots in grid order.
class Recorder
{
public:
    Recorder(Trajectory& traj, const EvolveOptions& options, const QuantumState& initial)
        : traj_(traj), options_(options), reference_(options.reference.value_or(initial))
    {
        require_same_space(reference_.space(), initial.space());
        traj_.time_unit = options.time_unit;
    }

    void record(std::size_t index, double t, const QuantumState& state)
    {
        traj_.times.push_back(t);
        traj_.records.push_back(observe(state, reference_));
        const auto& wanted = options_.snapshot_indices;
        if (options_.snapshot_all || std::find(wanted.begin(), wanted.end(), index) != wanted.end())
            traj_.snapshots.emplace_back(index, state);
    }

private:
    Trajectory& traj_;
    const EvolveOptions& options_;
    QuantumState reference_;
};

double spectral_norm_hermitian(const Matrix& h)
{
    const Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

long steps_for(double interval, double dt)
{
    if (interval <= 0.0)
        return 0;
    return std::max(1L, static_cast<long>(std::ceil(interval / dt - 1e-12)));
}

} // namespace

// --- QuantumState -----------------------------------------------------------

QuantumState::QuantumState(const HilbertSpace& space, bool pure, Vector psi, Matrix rho)
    : space_(space), pure_(pure), psi_(std::move(psi)), rho_(std::move(rho))
{
}

QuantumState QuantumState::pure(const HilbertSpace& space, Vector psi, double norm_tolerance)
{
    if (psi.size() != space.dim())
        throw SpaceMismatch("state vector has length " + std::to_string(psi.size()) +
                            ", space dimension is " + std::to_string(space.dim()));
    if (!psi.allFinite())
        throw std::invalid_argument("state vector has non-finite entries");
    const double n2 = psi.squaredNorm();
    if (std::abs(n2 - 1.0) >= norm_tolerance)
        throw std::invalid_argument("state vector is not normalized: <psi|psi> = " + std::to_string(n2));
    return QuantumState(space, true, std::move(psi), Matrix());
}

QuantumState QuantumState::density(const HilbertSpace& space, Matrix rho, double trace_tolerance)
{
    if (rho.rows() != space.dim() || rho.cols() != space.dim())
        throw SpaceMismatch("density matrix does not match the space dimension");
    if (!rho.allFinite())
        throw std::invalid_argument("density matrix has non-finite entries");
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) >= trace_tolerance)
        throw std::invalid_argument("density matrix trace is " + std::to_string(tr));
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() >= 1e-10)
        throw std::invalid_argument("density matrix is not Hermitian");
    return QuantumState(space, false, Vector(), std::move(rho));
}

const Vector& QuantumState::vector() const
{
    if (!pure_)
        throw std::logic_error("state is a density matrix");
    return psi_;
}

const Matrix& QuantumState::density_matrix() const
{
    if (pure_)
        throw std::logic_error("state is a pure vector");
    return rho_;
}

Matrix QuantumState::to_density() const
{
    return pure_ ? Matrix(psi_ * psi_.adjoint()) : rho_;
}

double QuantumState::norm_squared() const
{
    return pure_ ? psi_.squaredNorm() : rho_.trace().real();
}

double QuantumState::min_eigenvalue() const
{
    if (pure_)
        return 1.0;
    const Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// --- preparation ------------------------------------------------------------

QuantumState fock_state(const HilbertSpace& space, int n, Qubit qubit)
{
    if (n < 0)
        throw std::invalid_argument("Fock index must be >= 0");
    if (n > space.n_max())
        throw TruncationTooSmall("Fock state |" + std::to_string(n) + "> is not retained", n);
    Vector psi = Vector::Zero(space.dim());
    psi(space.index(qubit, n)) = 1.0;
    return QuantumState::pure(space, std::move(psi));
}

int coherent_truncation(double alpha_abs, double tail)
{
    const double x = alpha_abs * alpha_abs;
    if (x == 0.0)
        return 1;
    const auto log_p = [x](int n) { return -x + n * std::log(x) - std::lgamma(n + 1.0); };
    // Walk down from far beyond the mean, accumulating the tail mass.
    int n = static_cast<int>(std::ceil(x + 40.0 * std::sqrt(x) + 60.0));
    double mass = 0.0;
    while (n > 0) {
        mass += std::exp(log_p(n));
        if (mass >= tail)
            return std::max(n, 1);
        --n;
    }
    return 1;
}

QuantumState coherent_state(const HilbertSpace& space, cplx alpha, Qubit qubit)
{
    const double r = std::abs(alpha);
    const int needed = coherent_truncation(r);
    if (space.n_max() < needed)
        throw TruncationTooSmall("coherent state tail above n_max exceeds 1e-10", needed);

    const double x = r * r;
    const double theta = std::arg(alpha);
    Vector psi = Vector::Zero(space.dim());
    for (int n = 0; n <= space.n_max(); ++n) {
        const double log_p = (x == 0.0) ? (n == 0 ? 0.0 : -INFINITY)
                                        : -x + n * std::log(x) - std::lgamma(n + 1.0);
        psi(space.index(qubit, n)) = std::exp(0.5 * log_p) * std::exp(cplx(0.0, theta * n));
    }
    psi /= psi.norm();
    return QuantumState::pure(space, std::move(psi));
}

QuantumState thermal_state(const HilbertSpace& space, double nbar, Qubit qubit)
{
    if (!(nbar >= 0.0) || !std::isfinite(nbar))
        throw std::invalid_argument("mean phonon number must be finite and >= 0");
    const double q = nbar / (nbar + 1.0);
    if (q > 0.0) {
        // tail above N is q^{N+1}
        const double tail = std::pow(q, space.n_max() + 1);
        if (tail >= 1e-10) {
            const int needed = static_cast<int>(std::ceil(std::log(1e-10) / std::log(q)));
            throw TruncationTooSmall("thermal tail above n_max exceeds 1e-10", needed);
        }
    }
    Matrix rho = Matrix::Zero(space.dim(), space.dim());
    double total = 0.0;
    for (int k = 0; k <= space.n_max(); ++k) {
        const double p = std::pow(q, k) / (nbar + 1.0);
        const int i = space.index(qubit, k);
        rho(i, i) = p;
        total += p;
    }
    rho /= total;
    return QuantumState::density(space, std::move(rho));
}

// --- observables ------------------------------------------------------------

double expectation(const OperatorMatrix& op, const QuantumState& state)
{
    require_same_space(op.space(), state.space());
    cplx value;
    if (state.is_pure())
        value = state.vector().dot(op.matrix() * state.vector());
    else
        value = (op.matrix() * state.density_matrix()).trace();
    if (std::abs(value.imag()) >= 1e-10 * std::max(1.0, std::abs(value.real())))
        throw std::invalid_argument("expectation value has imaginary part " +
                                    std::to_string(value.imag()) + "; operator is not Hermitian");
    return value.real();
}

double overlap_fidelity(const QuantumState& reference, const QuantumState& state)
{
    require_same_space(reference.space(), state.space());
    double f;
    if (reference.is_pure() && state.is_pure()) {
        f = std::norm(reference.vector().dot(state.vector()));
    } else if (reference.is_pure()) {
        const Vector& r = reference.vector();
        f = r.dot(state.density_matrix() * r).real();
    } else if (state.is_pure()) {
        const Vector& s = state.vector();
        f = s.dot(reference.density_matrix() * s).real();
    } else {
        f = (reference.density_matrix() * state.density_matrix()).trace().real();
    }
    return std::clamp(f, 0.0, 1.0);
}

std::vector<double> phonon_distribution(const QuantumState& state)
{
    const HilbertSpace& space = state.space();
    const int nb = space.dim_boson();
    std::vector<double> p(static_cast<std::size_t>(nb));
    for (int n = 0; n < nb; ++n) {
        if (state.is_pure())
            p[static_cast<std::size_t>(n)] = std::norm(state.vector()(n)) + std::norm(state.vector()(nb + n));
        else
            p[static_cast<std::size_t>(n)] =
                state.density_matrix()(n, n).real() + state.density_matrix()(nb + n, nb + n).real();
    }
    return p;
}

double sigma_z_expectation(const QuantumState& state)
{
    const int nb = state.space().dim_boson();
    double down = 0.0;
    double up = 0.0;
    for (int n = 0; n < nb; ++n) {
        if (state.is_pure()) {
            down += std::norm(state.vector()(n));
            up += std::norm(state.vector()(nb + n));
        } else {
            down += state.density_matrix()(n, n).real();
            up += state.density_matrix()(nb + n, nb + n).real();
        }
    }
    return up - down;
}

const QuantumState* Trajectory::snapshot(std::size_t index) const
{
    for (const auto& [i, s] : snapshots)
        if (i == index)
            return &s;
    return nullptr;
}

std::vector<double> linear_grid(double t_end, int n_points)
{
    if (n_points < 1)
        throw std::invalid_argument("time grid needs at least one point");
    if (!(t_end >= 0.0))
        throw std::invalid_argument("time grid end must be >= 0");
    std::vector<double> t(static_cast<std::size_t>(n_points));
    for (int k = 0; k < n_points; ++k)
        t[static_cast<std::size_t>(k)] = n_points == 1 ? 0.0 : t_end * k / (n_points - 1);
    return t;
}

// --- closed evolution -------------------------------------------------------

UnitaryPropagator::UnitaryPropagator(const OperatorMatrix& h)
    : space_(h.space())
{
    const double defect = h.hermiticity_defect();
    if (defect >= kHermitianTolerance)
        throw std::invalid_argument("Hamiltonian is not Hermitian (relative defect " +
                                    std::to_string(defect) + ")");
    const Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    if (es.info() != Eigen::Success)
        throw Error("Hermitian eigendecomposition failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

Vector UnitaryPropagator::propagate(const Vector& psi0, double t) const
{
    Vector c = vectors_.adjoint() * psi0;
    for (Eigen::Index k = 0; k < c.size(); ++k)
        c(k) *= std::exp(cplx(0.0, -energies_(k) * t));
    return vectors_ * c;
}

Matrix UnitaryPropagator::propagate(const Matrix& rho0, double t) const
{
    Matrix r = vectors_.adjoint() * rho0 * vectors_;
    Vector phase(energies_.size());
    for (Eigen::Index k = 0; k < phase.size(); ++k)
        phase(k) = std::exp(cplx(0.0, -energies_(k) * t));
    r = phase.asDiagonal() * r * phase.conjugate().asDiagonal();
    return vectors_ * r * vectors_.adjoint();
}

Trajectory evolve_unitary(const OperatorMatrix& h, const QuantumState& initial,
                          std::span<const double> times, const EvolveOptions& options)
{
    require_same_space(h.space(), initial.space());
    check_times(times);
    const UnitaryPropagator propagator(h);

    Trajectory traj(initial.space());
    traj.info.method = "eigendecomposition";
    Recorder recorder(traj, options, initial);
    const double n0 = initial.norm_squared();

    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        QuantumState state =
            initial.is_pure()
                ? QuantumState::pure(initial.space(), propagator.propagate(initial.vector(), t), 1e-9)
                : QuantumState::density(initial.space(), [&] {
                      Matrix r = propagator.propagate(initial.density_matrix(), t);
                      return Matrix(0.5 * (r + r.adjoint()));
                  }());
        const double drift = std::abs(state.norm_squared() - n0);
        if (drift >= 1e-10)
            throw Error("unitary evolution changed the norm by " + std::to_string(drift));
        traj.info.max_norm_drift = std::max(traj.info.max_norm_drift, drift);
        recorder.record(k, t, state);
    }
    return traj;
}

// --- time-dependent closed evolution ----------------------------------------

Generator schrodinger_generator(std::function<Matrix(double)> h_of_t)
{
    return [h = std::move(h_of_t)](double t, const Vector& psi, Vector& out) {
        out = kMinusI * (h(t) * psi);
    };
}

Generator schrodinger_generator(TwoToneHamiltonian h)
{
    return [h = std::move(h)](double t, const Vector& psi, Vector& out) {
        h.apply_generator(t, psi, out);
    };
}

namespace {

struct Rk4Run
{
    std::vector<Vector> states;
    long steps = 0;
    double dt = 0.0;
    double max_drift = 0.0;
};

Rk4Run integrate_schrodinger(const Generator& f, const Vector& psi0, std::span<const double> times,
                             double dt_max, double norm_tolerance)
{
    Rk4Run run;
    run.dt = dt_max;
    Vector psi = psi0;
    const double n0 = psi0.squaredNorm();
    Vector k1, k2, k3, k4, tmp;
    double t = 0.0;
    for (double target : times) {
        const long n = steps_for(target - t, dt_max);
        const double h = n > 0 ? (target - t) / static_cast<double>(n) : 0.0;
        for (long s = 0; s < n; ++s) {
            f(t, psi, k1);
            tmp = psi + (0.5 * h) * k1;
            f(t + 0.5 * h, tmp, k2);
            tmp = psi + (0.5 * h) * k2;
            f(t + 0.5 * h, tmp, k3);
            tmp = psi + h * k3;
            f(t + h, tmp, k4);
            psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            const double drift = std::abs(psi.squaredNorm() - n0);
            run.max_drift = std::max(run.max_drift, drift);
            if (drift > norm_tolerance)
                throw StepTooLarge("RK4 norm drift " + std::to_string(drift) + " exceeds " +
                                   std::to_string(norm_tolerance) + " at t = " + std::to_string(t));
        }
        t = target;
        run.steps += n;
        run.states.push_back(psi);
    }
    return run;
}

} // namespace

Trajectory evolve_unitary_td(const Generator& generator, const QuantumState& initial,
                             std::span<const double> times, const TimeDependentOptions& options)
{
    if (!initial.is_pure())
        throw std::invalid_argument("time-dependent evolution needs a pure initial state");
    if (!(options.dt_max > 0.0))
        throw std::invalid_argument("dt_max must be > 0");
    check_times(times);

    const Rk4Run run =
        integrate_schrodinger(generator, initial.vector(), times, options.dt_max, options.norm_tolerance);

    Trajectory traj(initial.space());
    traj.info.method = "rk4";
    traj.info.dt = options.dt_max;
    traj.info.steps = run.steps;
    traj.info.max_norm_drift = run.max_drift;
    if (options.estimate_error) {
        const Rk4Run fine = integrate_schrodinger(generator, initial.vector(), times, 0.5 * options.dt_max,
                                                  options.norm_tolerance);
        double worst = 0.0;
        for (std::size_t k = 0; k < run.states.size(); ++k)
            worst = std::max(worst, (run.states[k] - fine.states[k]).norm());
        traj.info.error_estimate = worst;
    }

    Recorder recorder(traj, options, initial);
    for (std::size_t k = 0; k < times.size(); ++k)
        recorder.record(k, times[k], QuantumState::pure(initial.space(), run.states[k], 2.0 * options.norm_tolerance));
    return traj;
}

// --- Lindblad ---------------------------------------------------------------

void LindbladSpec::add(double rate, OperatorMatrix op)
{
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("Lindblad rate must be finite and >= 0");
    terms.push_back({rate, std::move(op)});
}

Matrix lindblad_rhs(const OperatorMatrix& h, const LindbladSpec& lindblad, const Matrix& rho)
{
    Matrix out = kMinusI * (h.matrix() * rho - rho * h.matrix());
    for (const auto& term : lindblad.terms) {
        require_same_space(h.space(), term.op.space());
        const Matrix& c = term.op.matrix();
        const Matrix cdc = c.adjoint() * c;
        out += term.rate * (c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc));
    }
    return out;
}

namespace {

// drho/dt = -i (H_eff rho - rho H_eff^dag) + sum_k J_k rho J_k^dag, with
// H_eff = H - (i/2) sum_k J_k^dag J_k and J_k = sqrt(rate_k) C_k.
class SparseLiouvillian
{
public:
    SparseLiouvillian(const OperatorMatrix& h, const LindbladSpec& lindblad)
    {
        Matrix h_eff = h.matrix();
        for (const auto& term : lindblad.terms) {
            require_same_space(h.space(), term.op.space());
            const Matrix j = std::sqrt(term.rate) * term.op.matrix();
            h_eff -= cplx(0.0, 0.5) * (j.adjoint() * j);
            if (term.rate > 0.0)
                jumps_.emplace_back(j.sparseView(), Matrix(j.adjoint()).sparseView());
        }
        h_eff_ = h_eff.sparseView();
    }

    // Valid for Hermitian rho.
    void apply(const Matrix& rho, Matrix& out) const
    {
        const Matrix a = h_eff_ * rho;
        out = kMinusI * a;
        out += cplx(0.0, 1.0) * a.adjoint();
        for (const auto& [j, jdag] : jumps_) {
            const Matrix jr = j * rho;
            out += jr * jdag;
        }
    }

private:
    SparseMatrix h_eff_;
    std::vector<std::pair<SparseMatrix, SparseMatrix>> jumps_;
};

} // namespace

Trajectory evolve_lindblad(const OperatorMatrix& h, const LindbladSpec& lindblad,
                           const QuantumState& initial, std::span<const double> times,
                           const LindbladOptions& options)
{
    require_same_space(h.space(), initial.space());
    check_times(times);
    if (h.hermiticity_defect() >= kHermitianTolerance)
        throw std::invalid_argument("Hamiltonian is not Hermitian");

    double scale = spectral_norm_hermitian(h.matrix());
    for (const auto& term : lindblad.terms) {
        const Matrix& c = term.op.matrix();
        const Eigen::SelfAdjointEigenSolver<Matrix> es(c.adjoint() * c, Eigen::EigenvaluesOnly);
        scale += term.rate * es.eigenvalues().maxCoeff();
    }
    double dt = scale > 0.0 ? options.step_safety / scale : INFINITY;
    if (options.dt_max > 0.0)
        dt = std::min(dt, options.dt_max);
    if (!std::isfinite(dt)) {
        // H = 0 and no dissipation: nothing moves.
        dt = times.back() > 0.0 ? times.back() : 1.0;
    }

    const SparseLiouvillian liouvillian(h, lindblad);
    Matrix rho = initial.to_density();
    const double tr0 = rho.trace().real();

    Trajectory traj(initial.space());
    traj.info.method = "rk4-lindblad";
    traj.info.dt = dt;
    Recorder recorder(traj, options, initial);

    Matrix k1, k2, k3, k4;
    double t = 0.0;
    for (std::size_t idx = 0; idx < times.size(); ++idx) {
        const double target = times[idx];
        const long n = steps_for(target - t, dt);
        const double step = n > 0 ? (target - t) / static_cast<double>(n) : 0.0;
        for (long s = 0; s < n; ++s) {
            liouvillian.apply(rho, k1);
            liouvillian.apply(rho + (0.5 * step) * k1, k2);
            liouvillian.apply(rho + (0.5 * step) * k2, k3);
            liouvillian.apply(rho + step * k3, k4);
            rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            rho = 0.5 * (rho + rho.adjoint()).eval();
            const double drift = std::abs(rho.trace().real() - tr0);
            traj.info.max_norm_drift = std::max(traj.info.max_norm_drift, drift);
            if (drift > options.trace_tolerance)
                throw StepTooLarge("trace drift " + std::to_string(drift) + " at t = " + std::to_string(t));
        }
        t = target;
        traj.info.steps += n;

        QuantumState state = QuantumState::density(initial.space(), rho, 2.0 * options.trace_tolerance + 1e-8);
        if (options.check_positivity) {
            const double lowest = state.min_eigenvalue();
            traj.info.min_eigenvalue = std::min(traj.info.min_eigenvalue, lowest);
            if (lowest < -options.positivity_tolerance)
                throw PositivityLoss("density matrix eigenvalue " + std::to_string(lowest) +
                                     " at t = " + std::to_string(t));
        }
        recorder.record(idx, target, state);
    }
    return traj;
}

// --- RWA cross-check --------------------------------------------------------

RwaReport rwa_crosscheck(const ModelSpec& two_tone, const QuantumState& initial, double duration,
                         double tolerance, const RwaOptions& options)
{
    if (two_tone.kind != ModelKind::TwoTone)
        throw std::invalid_argument("rwa_crosscheck needs a TwoTone spec");
    if (!initial.is_pure())
        throw std::invalid_argument("rwa_crosscheck needs a pure initial state");

    RwaReport report;
    report.tolerance = tolerance;
    report.warnings = validate(two_tone);
    report.omega_over_nu = two_tone.Omega / two_tone.nu;

    const HilbertSpace& space = initial.space();
    const double g = 0.5 * two_tone.eta * two_tone.Omega;
    const auto [omega0_R, omega_R] = simulated_frequencies(two_tone.delta_r, two_tone.delta_b);
    const UnitaryPropagator rwa(build_nonlinear_qrm(space, g, two_tone.eta, omega_R, omega0_R));

    report.times = linear_grid(duration, options.n_points);
    TimeDependentOptions td;
    td.dt_max = options.dt_max > 0.0 ? options.dt_max : 2.0 * std::numbers::pi / (200.0 * two_tone.nu);
    td.snapshot_all = true;
    const Trajectory full =
        evolve_unitary_td(schrodinger_generator(TwoToneHamiltonian(two_tone, space)), initial, report.times, td);
    report.steps = full.info.steps;

    // H0 = (delta_b + delta_r)/4 sigma_z + (delta_b - delta_r)/2 n, diagonal.
    const int nb = space.dim_boson();
    const double qubit_freq = 0.25 * (two_tone.delta_b + two_tone.delta_r);
    const double mode_freq = 0.5 * (two_tone.delta_b - two_tone.delta_r);
    for (std::size_t k = 0; k < report.times.size(); ++k) {
        const double t = report.times[k];
        Vector psi = rwa.propagate(initial.vector(), t);
        for (int n = 0; n < nb; ++n) {
            psi(n) *= std::exp(cplx(0.0, -t * (-qubit_freq + mode_freq * n)));
            psi(nb + n) *= std::exp(cplx(0.0, -t * (qubit_freq + mode_freq * n)));
        }
        const Vector& full_psi = full.snapshot(k)->vector();
        const double dev = std::max(0.0, 1.0 - std::norm(full_psi.dot(psi)));
        report.deviation.push_back(dev);
        report.max_deviation = std::max(report.max_deviation, dev);
    }
    report.valid = report.max_deviation < tolerance;
    return report;
}

} // namespace ionrabi

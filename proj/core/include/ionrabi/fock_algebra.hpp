#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ionrabi {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Qubit { down = 0, up = 1 };

/// Qubit (x) truncated Fock space. Basis index = qubit * (n_max + 1) + n,
/// qubit-major with |down> (the ground state |g>) first.
class HilbertSpace
{
public:
    explicit HilbertSpace(int n_max);

    int n_max() const noexcept { return n_max_; }
    int dim_boson() const noexcept { return n_max_ + 1; }
    int dim() const noexcept { return 2 * (n_max_ + 1); }
    int index(Qubit q, int n) const;

    bool operator==(const HilbertSpace&) const = default;

private:
    int n_max_;
};

/// Dense complex operator on a HilbertSpace. Entries are always finite; a
/// matrix tagged Hermitian has been checked to satisfy
/// max|H - H^dag| < 1e-12 max|H|.
class OperatorMatrix
{
public:
    OperatorMatrix(HilbertSpace space, Matrix entries, bool hermitian = false);

    const HilbertSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return entries_; }
    bool is_hermitian() const noexcept { return hermitian_; }

    cplx element(Qubit row_q, int row_n, Qubit col_q, int col_n) const;

    /// max|H - H^dag| / max|H|, zero for the zero matrix.
    double hermiticity_defect() const;

    OperatorMatrix adjoint() const;

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(cplx s, const OperatorMatrix& a);
    friend OperatorMatrix operator*(double s, const OperatorMatrix& a);

private:
    HilbertSpace space_;
    Matrix entries_;
    bool hermitian_;
};

/// Relative Hermiticity tolerance used by every builder.
inline constexpr double kHermitianTolerance = 1e-12;

double hermiticity_defect(const Matrix& m);

void require_same_space(const HilbertSpace& a, const HilbertSpace& b);

/// Lift a (n_max+1)-square boson matrix to 1_qubit (x) B.
OperatorMatrix embed_boson(const HilbertSpace& space, const Matrix& boson, bool hermitian = false);
/// Lift a 2x2 qubit matrix (rows/cols ordered down, up) to Q (x) 1_boson.
OperatorMatrix embed_qubit(const HilbertSpace& space, const Eigen::Matrix2cd& qubit,
                           bool hermitian = false);

OperatorMatrix identity_op(const HilbertSpace& space);
OperatorMatrix annihilation_op(const HilbertSpace& space);
OperatorMatrix creation_op(const HilbertSpace& space);
OperatorMatrix number_op(const HilbertSpace& space);

struct QubitOps
{
    OperatorMatrix sigma_z;
    OperatorMatrix sigma_plus;
    OperatorMatrix sigma_minus;
    OperatorMatrix sigma_x;
};

QubitOps qubit_ops(const HilbertSpace& space);

// --- nonlinear sideband function -------------------------------------------
//
// f1(n, eta) = exp(-eta^2/2) sum_{l=0}^{n} (-eta^2)^l n! / (l! (l+1)! (n-l)!)
//            = exp(-eta^2/2) L_n^{(1)}(eta^2) / (n + 1)
//
// Both routes are evaluated in 113-bit binary floating point and rounded to
// double at the end; near the zeros of f1 the terms cancel by up to ~11
// decimal orders at n = 200, eta = 1.

/// Closed form through the upward three-term Laguerre recurrence.
double f1_scalar(int n, double eta);

/// Finite series with compensated summation. Independent of f1_scalar.
double f1_series(int n, double eta);

/// Associated Laguerre polynomial L_n^{(alpha)}(x) in double precision.
double assoc_laguerre(int n, double alpha, double x);

/// Cached table f1(0..n_max) for one Lamb-Dicke parameter.
class NonlinearCoupling
{
public:
    NonlinearCoupling(double eta, int n_max);

    double eta() const noexcept { return eta_; }
    int n_max() const noexcept { return static_cast<int>(values_.size()) - 1; }
    double operator()(int n) const { return values_.at(static_cast<std::size_t>(n)); }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    double eta_;
    std::vector<double> values_;
};

/// Diagonal f1(n^) on the composite space (identity on the qubit).
OperatorMatrix f1_operator(const HilbertSpace& space, double eta);

/// Smallest eta in `bracket` with f1(n, eta) = 0. The bracket is scanned on a
/// 1e-3 grid for the first sign change, which is then bisected to machine
/// precision. Throws NoSignChange if no sign change is found.
double barrier_eta(int n, std::pair<double, double> bracket = {1e-3, 1.0});

/// Smallest Fock index in [1, n_max] with |f1(n, eta)| < tol.
std::optional<int> find_barrier(double eta, int n_max, double tol = 1e-10);

enum class Sideband { red, blue };

/// Sideband Rabi rate beyond the Lamb-Dicke regime:
///   red:  eta * omega * sqrt(n)   * |f1(n-1)|  for |down,n> <-> |up,n-1>
///   blue: eta * omega * sqrt(n+1) * |f1(n)|    for |down,n> <-> |up,n+1>
double rabi_rate(int n, Sideband direction, double omega, double eta);

/// Boson block of D(beta) = exp(beta a^dag - conj(beta) a) on Fock states
/// 0..n_max, from the closed Laguerre form of <m|D|n>. The truncated matrix
/// is the exact infinite-space matrix restricted to the retained states.
Matrix displacement_boson(int n_max, cplx beta);

OperatorMatrix displacement_matrix(const HilbertSpace& space, cplx beta);

} // namespace ionrabi

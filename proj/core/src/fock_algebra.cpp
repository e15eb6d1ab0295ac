#include "ionrabi/fock_algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ionrabi/errors.hpp"

namespace ionrabi {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

void check_eta(double eta)
{
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("Lamb-Dicke parameter must be finite and >= 0, got " +
                                    std::to_string(eta));
}

void check_n(int n)
{
    if (n < 0)
        throw std::invalid_argument("Fock index must be >= 0, got " + std::to_string(n));
}

// f1(0..n_max) from one pass of the upward recurrence
//   (k+1) L_{k+1} = (2k + 2 - x) L_k - (k + 1) L_{k-1},   alpha = 1.
std::vector<double> f1_closed_form_table(int n_max, double eta)
{
    const Quad e = eta;
    const Quad x = e * e;
    const Quad envelope = boost::multiprecision::exp(-x / 2);

    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
    Quad prev = 1;     // L_0
    Quad cur = 2 - x;  // L_1
    out[0] = static_cast<double>(envelope);
    if (n_max >= 1)
        out[1] = static_cast<double>(envelope * cur / 2);
    for (int k = 1; k < n_max; ++k) {
        const Quad next = ((2 * k + 2 - x) * cur - (k + 1) * prev) / (k + 1);
        prev = cur;
        cur = next;
        out[static_cast<std::size_t>(k) + 1] = static_cast<double>(envelope * cur / (k + 2));
    }
    return out;
}

} // namespace

// --- HilbertSpace / OperatorMatrix ------------------------------------------

HilbertSpace::HilbertSpace(int n_max)
    : n_max_(n_max)
{
    if (n_max < 1)
        throw std::invalid_argument("n_max must be >= 1, got " + std::to_string(n_max));
}

int HilbertSpace::index(Qubit q, int n) const
{
    if (n < 0 || n > n_max_)
        throw std::out_of_range("Fock index " + std::to_string(n) + " outside [0, " +
                                std::to_string(n_max_) + "]");
    return static_cast<int>(q) * dim_boson() + n;
}

double hermiticity_defect(const Matrix& m)
{
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

OperatorMatrix::OperatorMatrix(HilbertSpace space, Matrix entries, bool hermitian)
    : space_(space), entries_(std::move(entries)), hermitian_(hermitian)
{
    if (entries_.rows() != space_.dim() || entries_.cols() != space_.dim())
        throw SpaceMismatch("operator of size " + std::to_string(entries_.rows()) + "x" +
                            std::to_string(entries_.cols()) + " on a space of dimension " +
                            std::to_string(space_.dim()));
    if (!entries_.allFinite())
        throw std::invalid_argument("operator has non-finite entries");
    if (hermitian_) {
        const double defect = ionrabi::hermiticity_defect(entries_);
        if (defect >= kHermitianTolerance)
            throw std::invalid_argument("operator tagged Hermitian has relative defect " +
                                        std::to_string(defect));
    }
}

cplx OperatorMatrix::element(Qubit row_q, int row_n, Qubit col_q, int col_n) const
{
    return entries_(space_.index(row_q, row_n), space_.index(col_q, col_n));
}

double OperatorMatrix::hermiticity_defect() const
{
    return ionrabi::hermiticity_defect(entries_);
}

OperatorMatrix OperatorMatrix::adjoint() const
{
    return OperatorMatrix(space_, entries_.adjoint(), hermitian_);
}

void require_same_space(const HilbertSpace& a, const HilbertSpace& b)
{
    if (!(a == b))
        throw SpaceMismatch("operands live on spaces with n_max " + std::to_string(a.n_max()) +
                            " and " + std::to_string(b.n_max()));
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b)
{
    require_same_space(a.space_, b.space_);
    return OperatorMatrix(a.space_, a.entries_ + b.entries_, a.hermitian_ && b.hermitian_);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b)
{
    require_same_space(a.space_, b.space_);
    return OperatorMatrix(a.space_, a.entries_ - b.entries_, a.hermitian_ && b.hermitian_);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b)
{
    require_same_space(a.space_, b.space_);
    return OperatorMatrix(a.space_, a.entries_ * b.entries_, false);
}

OperatorMatrix operator*(cplx s, const OperatorMatrix& a)
{
    return OperatorMatrix(a.space_, s * a.entries_, a.hermitian_ && s.imag() == 0.0);
}

OperatorMatrix operator*(double s, const OperatorMatrix& a)
{
    return OperatorMatrix(a.space_, s * a.entries_, a.hermitian_);
}

// --- elementary operators ---------------------------------------------------

OperatorMatrix embed_boson(const HilbertSpace& space, const Matrix& boson, bool hermitian)
{
    const int nb = space.dim_boson();
    if (boson.rows() != nb || boson.cols() != nb)
        throw SpaceMismatch("boson block must be " + std::to_string(nb) + " square");
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    m.topLeftCorner(nb, nb) = boson;
    m.bottomRightCorner(nb, nb) = boson;
    return OperatorMatrix(space, std::move(m), hermitian);
}

OperatorMatrix embed_qubit(const HilbertSpace& space, const Eigen::Matrix2cd& qubit, bool hermitian)
{
    const int nb = space.dim_boson();
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m.block(i * nb, j * nb, nb, nb).diagonal().setConstant(qubit(i, j));
    return OperatorMatrix(space, std::move(m), hermitian);
}

OperatorMatrix identity_op(const HilbertSpace& space)
{
    return OperatorMatrix(space, Matrix::Identity(space.dim(), space.dim()), true);
}

OperatorMatrix annihilation_op(const HilbertSpace& space)
{
    Matrix a = Matrix::Zero(space.dim_boson(), space.dim_boson());
    for (int n = 1; n <= space.n_max(); ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return embed_boson(space, a);
}

OperatorMatrix creation_op(const HilbertSpace& space)
{
    return annihilation_op(space).adjoint();
}

OperatorMatrix number_op(const HilbertSpace& space)
{
    Matrix n = Matrix::Zero(space.dim_boson(), space.dim_boson());
    for (int k = 0; k <= space.n_max(); ++k)
        n(k, k) = static_cast<double>(k);
    return embed_boson(space, n, true);
}

QubitOps qubit_ops(const HilbertSpace& space)
{
    Eigen::Matrix2cd z, p, m, x;
    // rows/cols: down, up
    z << -1, 0, 0, 1;
    p << 0, 0, 1, 0;
    m << 0, 1, 0, 0;
    x << 0, 1, 1, 0;
    return QubitOps{embed_qubit(space, z, true), embed_qubit(space, p), embed_qubit(space, m),
                    embed_qubit(space, x, true)};
}

// --- f1 ---------------------------------------------------------------------

double f1_scalar(int n, double eta)
{
    check_n(n);
    check_eta(eta);
    return f1_closed_form_table(n, eta).back();
}

double f1_series(int n, double eta)
{
    check_n(n);
    check_eta(eta);
    const Quad e = eta;
    const Quad x = e * e;

    // term_l = (-x)^l C(n, l) / (l+1)!, Neumaier-compensated.
    Quad term = 1;
    Quad sum = 0;
    Quad comp = 0;
    for (int l = 0; l <= n; ++l) {
        const Quad t = sum + term;
        if (boost::multiprecision::abs(sum) >= boost::multiprecision::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        term *= -x * (n - l) / ((l + 1) * (l + 2));
    }
    return static_cast<double>(boost::multiprecision::exp(-x / 2) * (sum + comp));
}

double assoc_laguerre(int n, double alpha, double x)
{
    check_n(n);
    if (n == 0)
        return 1.0;
    double prev = 1.0;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

NonlinearCoupling::NonlinearCoupling(double eta, int n_max)
    : eta_(eta)
{
    check_eta(eta);
    check_n(n_max);
    values_ = f1_closed_form_table(n_max, eta);
}

OperatorMatrix f1_operator(const HilbertSpace& space, double eta)
{
    const NonlinearCoupling f1(eta, space.n_max());
    Matrix d = Matrix::Zero(space.dim_boson(), space.dim_boson());
    for (int n = 0; n <= space.n_max(); ++n)
        d(n, n) = f1(n);
    return embed_boson(space, d, true);
}

double barrier_eta(int n, std::pair<double, double> bracket)
{
    if (n < 1)
        throw std::invalid_argument("barrier_eta needs n >= 1, got " + std::to_string(n));
    const auto [lo, hi] = bracket;
    if (!(lo >= 0.0) || !(hi > lo))
        throw std::invalid_argument("barrier_eta bracket must satisfy 0 <= lo < hi");

    constexpr double kScanStep = 1e-3;
    const auto sign = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };

    double a = lo;
    double fa = f1_scalar(n, a);
    if (fa == 0.0)
        return a;

    const auto steps = static_cast<long>(std::ceil((hi - lo) / kScanStep));
    for (long k = 1; k <= steps; ++k) {
        const double b = (k == steps) ? hi : lo + static_cast<double>(k) * kScanStep;
        const double fb = f1_scalar(n, b);
        if (fb == 0.0)
            return b;
        if (sign(fa) != sign(fb)) {
            double left = a, right = b, fleft = fa, fright = fb;
            for (;;) {
                const double mid = left + 0.5 * (right - left);
                if (mid <= left || mid >= right)
                    break;
                const double fm = f1_scalar(n, mid);
                if (fm == 0.0)
                    return mid;
                if (sign(fm) == sign(fleft)) {
                    left = mid;
                    fleft = fm;
                } else {
                    right = mid;
                    fright = fm;
                }
            }
            return std::abs(fleft) <= std::abs(fright) ? left : right;
        }
        a = b;
        fa = fb;
    }
    throw NoSignChange(n, lo, hi);
}

std::optional<int> find_barrier(double eta, int n_max, double tol)
{
    const NonlinearCoupling f1(eta, n_max);
    for (int n = 1; n <= n_max; ++n)
        if (std::abs(f1(n)) < tol)
            return n;
    return std::nullopt;
}

double rabi_rate(int n, Sideband direction, double omega, double eta)
{
    check_n(n);
    check_eta(eta);
    if (direction == Sideband::red) {
        if (n == 0)
            throw std::invalid_argument("red sideband has no transition out of |down,0>");
        return eta * omega * std::sqrt(static_cast<double>(n)) * std::abs(f1_scalar(n - 1, eta));
    }
    return eta * omega * std::sqrt(n + 1.0) * std::abs(f1_scalar(n, eta));
}

// --- displacement -----------------------------------------------------------

Matrix displacement_boson(int n_max, cplx beta)
{
    check_n(n_max);
    const int nb = n_max + 1;
    const double r = std::abs(beta);
    if (r == 0.0)
        return Matrix::Identity(nb, nb);

    const double x = r * r;
    const double log_r = std::log(r);
    const cplx up_phase = beta / r;              // below the diagonal (m > n)
    const cplx down_phase = -std::conj(beta) / r; // above the diagonal (m < n)

    std::vector<double> lfact(static_cast<std::size_t>(nb));
    for (int k = 0; k < nb; ++k)
        lfact[static_cast<std::size_t>(k)] = std::lgamma(k + 1.0);

    // <m|D|n> = sqrt(n!/m!) beta^(m-n) e^{-x/2} L_n^{(m-n)}(x),  m >= n
    // <m|D|n> = sqrt(m!/n!) (-beta*)^(n-m) e^{-x/2} L_m^{(n-m)}(x), m < n
    Matrix d(nb, nb);
    for (int k = 0; k < nb; ++k) {
        cplx phase_up = std::pow(up_phase, k);
        cplx phase_down = std::pow(down_phase, k);
        double prev = 0.0;
        double cur = 1.0;
        for (int j = 0; j + k < nb; ++j) {
            if (j == 1) {
                prev = 1.0;
                cur = 1.0 + k - x;
            } else if (j > 1) {
                const double next = ((2.0 * (j - 1) + 1.0 + k - x) * cur - (j - 1.0 + k) * prev) / j;
                prev = cur;
                cur = next;
            }
            const double mag = std::exp(0.5 * (lfact[static_cast<std::size_t>(j)] -
                                               lfact[static_cast<std::size_t>(j + k)]) +
                                        k * log_r - 0.5 * x);
            d(j + k, j) = mag * cur * phase_up;
            if (k > 0)
                d(j, j + k) = mag * cur * phase_down;
        }
    }
    return d;
}

OperatorMatrix displacement_matrix(const HilbertSpace& space, cplx beta)
{
    return embed_boson(space, displacement_boson(space.n_max(), beta));
}

} // namespace ionrabi

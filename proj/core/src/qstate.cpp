#include "trideph/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trideph {

namespace {

int qubit_count_checked(Eigen::Index dim, const char* what) {
    if (dim < 2)
        throw std::invalid_argument(std::string(what) + ": dimension must be >= 2");
    int n = 0;
    Eigen::Index d = dim;
    while ((d & 1) == 0) {
        d >>= 1;
        ++n;
    }
    if (d != 1)
        throw std::invalid_argument(std::string(what) + ": dimension must be a power of two");
    return n;
}

} // namespace

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
    qubits_ = qubit_count_checked(amps_.size(), "StateVector");
    const double norm2 = amps_.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTol)
        throw std::invalid_argument("StateVector: amplitudes are not normalized");
}

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols())
        throw std::invalid_argument("DensityMatrix: matrix must be square");
    qubits_ = qubit_count_checked(m_.rows(), "DensityMatrix");
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 2 * kHermTol)
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > kTraceTol || std::abs(m_.trace().imag()) > kTraceTol)
        throw std::invalid_argument("DensityMatrix: trace is not 1");
    // Symmetrize away representation-level asymmetry so downstream
    // eigensolves see an exactly Hermitian matrix.
    m_ = 0.5 * (m_ + m_.adjoint().eval());
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate_psd() const {
    if (min_eigenvalue() < kEigFloor)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond clip floor");
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw std::invalid_argument("tensor: operands must be square");
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVector tensor(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const int n = rho.qubits();
    std::vector<int> kept = keep;
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    if (kept.empty())
        throw std::invalid_argument("partial_trace: keep set is empty");
    if (kept.front() < 0 || kept.back() >= n)
        throw std::invalid_argument("partial_trace: qubit index out of range");

    std::vector<int> traced;
    for (int q = 0; q < n; ++q)
        if (!std::binary_search(kept.begin(), kept.end(), q))
            traced.push_back(q);

    // Qubit q (0 = most significant) occupies bit (n-1-q) of the index.
    auto bit_of = [n](int q) { return n - 1 - q; };

    const Eigen::Index dk = Eigen::Index(1) << kept.size();
    const Eigen::Index dt = Eigen::Index(1) << traced.size();
    CMatrix out = CMatrix::Zero(dk, dk);
    const CMatrix& m = rho.matrix();

    auto expand = [&](Eigen::Index kept_idx, Eigen::Index traced_idx) {
        Eigen::Index full = 0;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const Eigen::Index bit = (kept_idx >> (kept.size() - 1 - i)) & 1;
            full |= bit << bit_of(kept[i]);
        }
        for (std::size_t i = 0; i < traced.size(); ++i) {
            const Eigen::Index bit = (traced_idx >> (traced.size() - 1 - i)) & 1;
            full |= bit << bit_of(traced[i]);
        }
        return full;
    };

    for (Eigen::Index r = 0; r < dk; ++r)
        for (Eigen::Index c = 0; c < dk; ++c) {
            cplx acc = 0.0;
            for (Eigen::Index s = 0; s < dt; ++s)
                acc += m(expand(r, s), expand(c, s));
            out(r, c) = acc;
        }
    return DensityMatrix(std::move(out));
}

namespace {

// Eigenvalues clipped per the shared floor policy; throws below the floor.
Eigen::VectorXd clipped_spectrum(const CMatrix& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < kEigFloor)
            throw std::invalid_argument(std::string(what) + ": eigenvalue below clip floor");
        if (ev(i) < 0.0)
            ev(i) = 0.0;
    }
    return ev;
}

} // namespace

double von_neumann_entropy(const DensityMatrix& rho) {
    const Eigen::VectorXd ev = clipped_spectrum(rho.matrix(), "von_neumann_entropy");
    double s = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 0.0)
            s -= ev(i) * std::log(ev(i));
    return s;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("relative_entropy: dimension mismatch");

    // tr(rho ln rho) from rho's spectrum.
    const Eigen::VectorXd p = clipped_spectrum(rho.matrix(), "relative_entropy");
    double tr_rho_ln_rho = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > 0.0)
            tr_rho_ln_rho += p(i) * std::log(p(i));

    // -tr(rho ln sigma) via sigma's eigenbasis, with the support test on
    // near-null sigma directions.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma.matrix());
    const Eigen::VectorXd q = es.eigenvalues();
    const CMatrix& v = es.eigenvectors();
    double tr_rho_ln_sigma = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double weight = std::real(cplx(v.col(i).adjoint() * rho.matrix() * v.col(i)));
        if (q(i) < kSupportEigTol) {
            if (weight > kSupportWeightTol)
                return std::numeric_limits<double>::infinity();
            continue; // negligible weight on a null direction
        }
        tr_rho_ln_sigma += weight * std::log(q(i));
    }
    return tr_rho_ln_rho - tr_rho_ln_sigma;
}

} // namespace trideph
